#include "copter/netgraph.hpp"

#include <algorithm>
#include <cmath>

#include "copter/csv.hpp"

namespace copter {

bool operator==(const Node& a, const Node& b) {
  return a.id == b.id && a.lat == b.lat && a.lon == b.lon;
}

bool operator==(const Edge& a, const Edge& b) {
  if (a.id != b.id || a.from != b.from || a.to != b.to || a.mode != b.mode ||
      a.length_m != b.length_m || a.capacity_vph != b.capacity_vph) {
    return false;
  }
  if (a.traversal.index() != b.traversal.index()) return false;
  if (a.is_scheduled()) {
    return std::get<ScheduledRef>(a.traversal).schedule_id ==
           std::get<ScheduledRef>(b.traversal).schedule_id;
  }
  return a.fixed_speed() == b.fixed_speed();
}

bool operator==(const Schedule& a, const Schedule& b) {
  return a.id == b.id && a.departures == b.departures &&
         a.ride_time_s == b.ride_time_s;
}

bool operator==(const TransportGraph& a, const TransportGraph& b) {
  return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ &&
         a.schedules_ == b.schedules_;
}

TransportGraph TransportGraph::build(std::vector<Node> nodes,
                                     std::vector<Edge> edges,
                                     std::vector<Schedule> schedules) {
  TransportGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.schedules_ = std::move(schedules);

  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    const Node& n = g.nodes_[i];
    if (n.lat < -90 || n.lat > 90 || n.lon < -180 || n.lon > 180) {
      throw InvariantViolation("node '" + n.id + "': lat/lon out of range");
    }
    if (!g.node_index_.emplace(n.id, static_cast<int>(i)).second) {
      throw InvariantViolation("duplicate node id '" + n.id + "'");
    }
  }
  for (std::size_t i = 0; i < g.schedules_.size(); ++i) {
    const Schedule& s = g.schedules_[i];
    if (s.departures.empty()) {
      throw InvariantViolation("schedule '" + s.id + "': no departures");
    }
    int prev = -1;
    for (int d : s.departures) {
      if (d < 0 || d >= kSecondsHorizon) {
        throw InvariantViolation("schedule '" + s.id +
                                 "': departure outside [0, horizon)");
      }
      if (d <= prev) {
        throw InvariantViolation("schedule '" + s.id +
                                 "': departures not strictly increasing");
      }
      prev = d;
    }
    if (s.ride_time_s <= 0) {
      throw InvariantViolation("schedule '" + s.id + "': ride_time must be > 0");
    }
    if (!g.schedule_index_.emplace(s.id, static_cast<int>(i)).second) {
      throw InvariantViolation("duplicate schedule id '" + s.id + "'");
    }
  }

  g.out_edges_.resize(g.nodes_.size());
  for (std::size_t i = 0; i < g.edges_.size(); ++i) {
    const Edge& e = g.edges_[i];
    if (!g.edge_index_.emplace(e.id, static_cast<int>(i)).second) {
      throw InvariantViolation("duplicate edge id '" + e.id + "'");
    }
    const auto from_it = g.node_index_.find(e.from);
    if (from_it == g.node_index_.end()) {
      throw DanglingReference("edge '" + e.id + "': unknown node '" + e.from +
                              "'");
    }
    if (g.node_index_.find(e.to) == g.node_index_.end()) {
      throw DanglingReference("edge '" + e.id + "': unknown node '" + e.to +
                              "'");
    }
    if (e.length_m <= 0) {
      throw InvariantViolation("edge '" + e.id + "': length must be > 0");
    }
    if (e.capacity_vph && *e.capacity_vph <= 0) {
      throw InvariantViolation("edge '" + e.id + "': capacity must be > 0");
    }
    if (e.is_scheduled()) {
      if (!is_scheduled_mode(e.mode)) {
        throw InvariantViolation("edge '" + e.id +
                                 "': schedules are only valid for modes b, s");
      }
      const auto& ref = std::get<ScheduledRef>(e.traversal).schedule_id;
      if (g.schedule_index_.find(ref) == g.schedule_index_.end()) {
        throw DanglingReference("edge '" + e.id + "': unknown schedule '" +
                                ref + "'");
      }
    } else if (e.fixed_speed() <= 0) {
      throw InvariantViolation("edge '" + e.id + "': speed must be > 0");
    }
    g.out_edges_[from_it->second].push_back(static_cast<int>(i));
  }
  return g;
}

int TransportGraph::node_index(const std::string& id) const {
  const auto it = node_index_.find(id);
  return it == node_index_.end() ? -1 : it->second;
}

int TransportGraph::edge_index(const std::string& id) const {
  const auto it = edge_index_.find(id);
  return it == edge_index_.end() ? -1 : it->second;
}

int TransportGraph::schedule_index(const std::string& id) const {
  const auto it = schedule_index_.find(id);
  return it == schedule_index_.end() ? -1 : it->second;
}

const Schedule& TransportGraph::schedule_of(const Edge& e) const {
  const auto& ref = std::get<ScheduledRef>(e.traversal).schedule_id;
  return schedules_[schedule_index_.at(ref)];
}

namespace {

std::vector<Node> parse_nodes(const CsvTable& t) {
  const int c_id = t.require_column("id");
  const int c_lat = t.require_column("lat");
  const int c_lon = t.require_column("lon");
  std::vector<Node> nodes;
  nodes.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = t.line_numbers[i];
    if (row[c_id].empty()) throw ParseError(line, "empty node id");
    nodes.push_back({row[c_id], parse_double_field(row[c_lat], line, "lat"),
                     parse_double_field(row[c_lon], line, "lon")});
  }
  return nodes;
}

std::vector<Edge> parse_edges(const CsvTable& t, const LoadOptions& options) {
  const int c_id = t.require_column("id");
  const int c_from = t.require_column("from");
  const int c_to = t.require_column("to");
  const int c_mode = t.require_column("mode");
  const int c_len = t.require_column("length_m");
  const int c_speed = t.require_column("speed_mps");
  const int c_sched = t.require_column("schedule_id");
  const int c_cap = t.column("capacity_vph");  // optional
  std::vector<Edge> edges;
  edges.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = t.line_numbers[i];
    Edge e;
    e.id = row[c_id];
    if (e.id.empty()) throw ParseError(line, "empty edge id");
    e.from = row[c_from];
    e.to = row[c_to];
    const std::string& mode_field = row[c_mode];
    std::optional<Mode> mode =
        mode_field.size() == 1 ? mode_from_symbol(mode_field[0])
                               : mode_from_name(mode_field);
    if (!mode) throw ParseError(line, "unknown mode '" + mode_field + "'");
    e.mode = *mode;
    e.length_m = parse_double_field(row[c_len], line, "length_m");
    const std::string& speed = row[c_speed];
    const std::string& sched = row[c_sched];
    if (!speed.empty() && !sched.empty()) {
      throw ParseError(line,
                       "edge '" + e.id +
                           "': speed_mps and schedule_id are exclusive");
    }
    if (!sched.empty()) {
      e.traversal = ScheduledRef{sched};
    } else if (!speed.empty()) {
      e.traversal = FixedSpeed{parse_double_field(speed, line, "speed_mps")};
    } else if (e.mode == Mode::Walk) {
      e.traversal = FixedSpeed{options.default_walk_speed_mps};
    } else if (e.mode == Mode::Cycle) {
      e.traversal = FixedSpeed{options.default_cycle_speed_mps};
    } else {
      throw ParseError(line, "edge '" + e.id +
                                 "': one of speed_mps or schedule_id required");
    }
    if (c_cap >= 0 && !row[c_cap].empty()) {
      e.capacity_vph = parse_double_field(row[c_cap], line, "capacity_vph");
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<int> parse_departures(const std::string& field, std::size_t line) {
  std::vector<int> deps;
  std::string item;
  auto flush = [&] {
    if (item.empty()) throw ParseError(line, "empty departure entry");
    deps.push_back(
        static_cast<int>(parse_int_field(item, line, "departure")));
    item.clear();
  };
  for (char c : field) {
    if (c == ';') {
      flush();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) flush();
  if (deps.empty()) throw ParseError(line, "empty departures list");
  return deps;
}

std::vector<Schedule> parse_schedules(const CsvTable& t) {
  const int c_id = t.require_column("schedule_id");
  const int c_ride = t.require_column("ride_time_s");
  const int c_deps = t.require_column("departures");
  std::vector<Schedule> schedules;
  schedules.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = t.line_numbers[i];
    Schedule s;
    s.id = row[c_id];
    if (s.id.empty()) throw ParseError(line, "empty schedule id");
    s.ride_time_s =
        static_cast<int>(parse_int_field(row[c_ride], line, "ride_time_s"));
    s.departures = parse_departures(row[c_deps], line);
    schedules.push_back(std::move(s));
  }
  return schedules;
}

}  // namespace

TransportGraph load_graph(const std::filesystem::path& nodes_csv,
                          const std::filesystem::path& edges_csv,
                          const std::filesystem::path& schedules_csv,
                          const LoadOptions& options) {
  auto nodes = parse_nodes(read_csv(nodes_csv));
  auto edges = parse_edges(read_csv(edges_csv), options);
  std::vector<Schedule> schedules;
  if (std::filesystem::exists(schedules_csv)) {
    schedules = parse_schedules(read_csv(schedules_csv));
  }
  return TransportGraph::build(std::move(nodes), std::move(edges),
                               std::move(schedules));
}

TransportGraph load_graph(const std::filesystem::path& dir,
                          const LoadOptions& options) {
  return load_graph(dir / "nodes.csv", dir / "edges.csv",
                    dir / "schedules.csv", options);
}

void save_graph(const TransportGraph& graph, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::vector<std::vector<std::string>> rows;
    for (const Node& n : graph.nodes()) {
      rows.push_back({n.id, format_double(n.lat), format_double(n.lon)});
    }
    write_csv(dir / "nodes.csv", {"id", "lat", "lon"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const Edge& e : graph.edges()) {
      std::string speed, sched;
      if (e.is_scheduled()) {
        sched = std::get<ScheduledRef>(e.traversal).schedule_id;
      } else {
        speed = format_double(e.fixed_speed());
      }
      rows.push_back({e.id, e.from, e.to, std::string(1, mode_symbol(e.mode)),
                      format_double(e.length_m), speed, sched,
                      e.capacity_vph ? format_double(*e.capacity_vph) : ""});
    }
    write_csv(dir / "edges.csv",
              {"id", "from", "to", "mode", "length_m", "speed_mps",
               "schedule_id", "capacity_vph"},
              rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const Schedule& s : graph.schedules()) {
      std::string deps;
      for (std::size_t i = 0; i < s.departures.size(); ++i) {
        if (i) deps.push_back(';');
        deps += std::to_string(s.departures[i]);
      }
      rows.push_back({s.id, std::to_string(s.ride_time_s), deps});
    }
    write_csv(dir / "schedules.csv",
              {"schedule_id", "ride_time_s", "departures"}, rows);
  }
}

std::optional<double> try_duration(const TransportGraph& graph,
                                   const Edge& edge, double departure_s) {
  if (!edge.is_scheduled()) {
    return edge.length_m / edge.fixed_speed();
  }
  const Schedule& s = graph.schedule_of(edge);
  const auto it = std::lower_bound(s.departures.begin(), s.departures.end(),
                                   departure_s);
  if (it == s.departures.end()) return std::nullopt;
  return (*it - departure_s) + s.ride_time_s;
}

double duration(const TransportGraph& graph, const Edge& edge,
                double departure_s) {
  if (departure_s < 0) {
    throw InvariantViolation("departure time must be >= 0");
  }
  const auto d = try_duration(graph, edge, departure_s);
  if (!d) {
    throw NoService("edge '" + edge.id + "': no departure at or after " +
                    std::to_string(departure_s));
  }
  return *d;
}

double great_circle_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRadius = 6371008.8;  // mean earth radius, meters
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double phi1 = lat1 * kDeg;
  const double phi2 = lat2 * kDeg;
  const double dphi = (lat2 - lat1) * kDeg;
  const double dlam = (lon2 - lon1) * kDeg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) *
                       std::sin(dlam / 2);
  return 2 * kRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

double max_speed_mps(const TransportGraph& graph) {
  double best = 0;
  for (const Edge& e : graph.edges()) {
    double speed;
    if (e.is_scheduled()) {
      speed = e.length_m / graph.schedule_of(e).ride_time_s;
    } else {
      speed = e.fixed_speed();
    }
    best = std::max(best, speed);
  }
  return best;
}

void validate_query(const TransportGraph& graph, const Query& q) {
  if (q.depart_s < 0) {
    throw InvariantViolation("query: depart must be >= 0");
  }
  if (q.depart_s >= q.deadline_s) {
    throw InvariantViolation("query: depart must be before deadline");
  }
  if (graph.node_index(q.origin) < 0) {
    throw DanglingReference("query: unknown origin '" + q.origin + "'");
  }
  if (graph.node_index(q.destination) < 0) {
    throw DanglingReference("query: unknown destination '" + q.destination +
                            "'");
  }
}

}  // namespace copter
