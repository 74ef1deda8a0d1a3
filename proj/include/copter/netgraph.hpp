#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "copter/errors.hpp"
#include "copter/modes.hpp"

namespace copter {

// Time is measured in seconds since midnight. The horizon spans two days so
// that late trips and post-midnight transit service stay representable.
inline constexpr int kSecondsHorizon = 172800;

struct Node {
  std::string id;
  double lat = 0;  // degrees, WGS84
  double lon = 0;
};

struct FixedSpeed {
  double speed_mps = 0;
};

struct ScheduledRef {
  std::string schedule_id;
};

using Traversal = std::variant<FixedSpeed, ScheduledRef>;

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  Mode mode = Mode::Walk;
  double length_m = 0;
  Traversal traversal;
  std::optional<double> capacity_vph;  // optional, used by the delay model

  bool is_scheduled() const {
    return std::holds_alternative<ScheduledRef>(traversal);
  }
  double fixed_speed() const { return std::get<FixedSpeed>(traversal).speed_mps; }
};

struct Schedule {
  std::string id;
  std::vector<int> departures;  // strictly increasing, within [0, horizon)
  int ride_time_s = 0;
};

struct Query {
  std::string origin;
  std::string destination;
  int depart_s = 0;    // t_s
  int deadline_s = 0;  // t_e
};

// Mode speeds applied when a fixed-speed edge row omits the speed field.
// Only non-motorized modes have meaningful defaults; motorized free-flow
// speeds must come from the edge data.
struct LoadOptions {
  double default_walk_speed_mps = 1.4;
  double default_cycle_speed_mps = 4.0;
};

// Immutable after construction; safe for unsynchronized concurrent readers.
class TransportGraph {
 public:
  TransportGraph() = default;

  // Validates all invariants; throws DanglingReference or
  // InvariantViolation.
  static TransportGraph build(std::vector<Node> nodes, std::vector<Edge> edges,
                              std::vector<Schedule> schedules);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Schedule>& schedules() const { return schedules_; }

  int node_index(const std::string& id) const;       // -1 when absent
  int edge_index(const std::string& id) const;       // -1 when absent
  int schedule_index(const std::string& id) const;   // -1 when absent

  const Node& node(int index) const { return nodes_[index]; }
  const Edge& edge(int index) const { return edges_[index]; }
  const Schedule& schedule_of(const Edge& e) const;

  // Outgoing edge indices per node index.
  const std::vector<int>& out_edges(int node_index) const {
    return out_edges_[node_index];
  }

  bool has_query_endpoints(const Query& q) const {
    return node_index(q.origin) >= 0 && node_index(q.destination) >= 0;
  }

  friend bool operator==(const TransportGraph& a, const TransportGraph& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Schedule> schedules_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::unordered_map<std::string, int> schedule_index_;
  std::vector<std::vector<int>> out_edges_;
};

bool operator==(const Node& a, const Node& b);
bool operator==(const Edge& a, const Edge& b);
bool operator==(const Schedule& a, const Schedule& b);

// Loads nodes.csv, edges.csv and schedules.csv from a directory.
TransportGraph load_graph(const std::filesystem::path& dir,
                          const LoadOptions& options = {});
TransportGraph load_graph(const std::filesystem::path& nodes_csv,
                          const std::filesystem::path& edges_csv,
                          const std::filesystem::path& schedules_csv,
                          const LoadOptions& options = {});
void save_graph(const TransportGraph& graph, const std::filesystem::path& dir);

// Traversal time in seconds when starting the edge at departure_s. For
// scheduled edges the wait until the next departure is included. Throws
// NoService when no departure remains within the horizon.
double duration(const TransportGraph& graph, const Edge& edge,
                double departure_s);

// Soft variant used by the planner: nullopt instead of NoService.
std::optional<double> try_duration(const TransportGraph& graph,
                                   const Edge& edge, double departure_s);

// Great-circle distance in meters (haversine, mean earth radius).
double great_circle_m(double lat1, double lon1, double lat2, double lon2);

// Upper bound on distance/time over all edges of the graph: the fastest
// possible traversal speed (for scheduled edges, length/ride_time with zero
// wait). Used as the A* heuristic speed.
double max_speed_mps(const TransportGraph& graph);

void validate_query(const TransportGraph& graph, const Query& q);

}  // namespace copter
