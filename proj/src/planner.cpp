#include "copter/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace copter {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SearchState {
  double arrival = kInf;
  int edges = 0;
  std::string word;
  int parent = -1;     // settled product-state index
  int via_edge = -1;   // edge index taken to reach this state
  double start_s = 0;  // time the via edge was started
};

// (arrival, edges, word) with lexicographic word tie-break. Words of equal
// edge count have equal length, so the comparison is dominance-safe under
// path extension.
bool better(double arrival, int edges, const std::string& word,
            const SearchState& incumbent) {
  if (arrival != incumbent.arrival) return arrival < incumbent.arrival;
  if (edges != incumbent.edges) return edges < incumbent.edges;
  return word < incumbent.word;
}

struct QueueEntry {
  double priority;  // arrival (+ heuristic for A*)
  double arrival;
  int edges;
  int state;
  std::uint64_t stamp;  // version to drop stale entries

  bool operator>(const QueueEntry& other) const {
    if (priority != other.priority) return priority > other.priority;
    if (arrival != other.arrival) return arrival > other.arrival;
    if (edges != other.edges) return edges > other.edges;
    return state > other.state;
  }
};

}  // namespace

std::optional<Plan> plan(const TransportGraph& graph, const Query& query,
                         const ModeDfa& dfa, SearchAlgorithm algorithm) {
  validate_query(graph, query);
  const int origin = graph.node_index(query.origin);
  const int destination = graph.node_index(query.destination);
  const int n_nodes = static_cast<int>(graph.nodes().size());
  const int n_dfa = dfa.n_states();

  std::vector<double> heuristic(n_nodes, 0.0);
  if (algorithm == SearchAlgorithm::AStar) {
    const double v_max = max_speed_mps(graph);
    const Node& dest = graph.node(destination);
    for (int i = 0; i < n_nodes; ++i) {
      const Node& n = graph.node(i);
      heuristic[i] =
          v_max > 0
              ? great_circle_m(n.lat, n.lon, dest.lat, dest.lon) / v_max
              : 0.0;
    }
  }

  auto state_id = [n_dfa](int node, int q) { return node * n_dfa + q; };
  std::vector<SearchState> states(
      static_cast<std::size_t>(n_nodes) * n_dfa);
  std::vector<std::uint64_t> stamps(states.size(), 0);
  std::vector<bool> settled(states.size(), false);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>,
                      std::greater<QueueEntry>>
      open;

  const int start_state = state_id(origin, dfa.start());
  const double depart = query.depart_s;
  states[start_state].arrival = depart;
  states[start_state].edges = 0;
  open.push({depart + heuristic[origin], depart, 0, start_state, 0});

  int goal = -1;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (top.stamp != stamps[top.state]) continue;  // stale
    if (settled[top.state]) continue;
    settled[top.state] = true;

    const int node = top.state / n_dfa;
    const int q = top.state % n_dfa;
    const SearchState& current = states[top.state];

    // Goal: at the destination, in an accepting dfa state, after >= 1 edge
    // (the empty word is never a valid plan).
    if (node == destination && dfa.accepting(q) && current.edges > 0) {
      goal = top.state;
      break;
    }

    for (int edge_index : graph.out_edges(node)) {
      const Edge& edge = graph.edge(edge_index);
      const int q_next = dfa.next(q, edge.mode);
      if (!dfa.can_reach_accept(q_next)) continue;
      const auto dur = try_duration(graph, edge, current.arrival);
      if (!dur) continue;  // no remaining service
      const double arrival = current.arrival + *dur;
      if (arrival > query.deadline_s) continue;
      const int to_node = graph.node_index(edge.to);
      const int next_state = state_id(to_node, q_next);
      if (settled[next_state]) continue;
      const int edges = current.edges + 1;
      std::string word = current.word;
      word.push_back(mode_symbol(edge.mode));
      SearchState& target = states[next_state];
      if (better(arrival, edges, word, target)) {
        target.arrival = arrival;
        target.edges = edges;
        target.word = std::move(word);
        target.parent = top.state;
        target.via_edge = edge_index;
        target.start_s = current.arrival;
        const std::uint64_t stamp = ++stamps[next_state];
        open.push({arrival + heuristic[to_node], arrival, edges, next_state,
                   stamp});
      }
    }
  }

  if (goal < 0) return std::nullopt;

  Plan result;
  result.word = states[goal].word;
  result.arrive_s = states[goal].arrival;
  result.depart_s = query.depart_s;

  std::vector<int> chain;
  for (int s = goal; states[s].via_edge >= 0; s = states[s].parent) {
    chain.push_back(s);
  }
  std::reverse(chain.begin(), chain.end());
  for (int s : chain) {
    const Edge& edge = graph.edge(states[s].via_edge);
    PlanStep step;
    step.edge_id = edge.id;
    step.mode = edge.mode;
    step.start_s = states[s].start_s;
    step.duration_s = states[s].arrival - states[s].start_s;
    step.distance_m = edge.length_m;
    result.steps.push_back(std::move(step));
    result.distance_m += edge.length_m;
    result.mode_distance_m[edge.mode] += edge.length_m;
  }
  return result;
}

CandidatePlanSet candidate_plans(const TransportGraph& graph,
                                 const Query& query,
                                 const std::vector<LanguageElement>& languages,
                                 SearchAlgorithm algorithm) {
  CandidatePlanSet out;
  out.items.reserve(languages.size());
  for (const auto& language : languages) {
    out.items.push_back({language, plan(graph, query, language.dfa, algorithm)});
  }
  return out;
}

double plan_cost(const Plan& p, const CostWeights& weights) {
  if (weights.theta.empty()) {
    throw InvariantViolation("cost weights: at least one weight required");
  }
  bool any_nonzero = false;
  for (const auto& [name, theta] : weights.theta) {
    if (!std::isfinite(theta)) {
      throw InvariantViolation("cost weights: non-finite weight for '" + name +
                               "'");
    }
    if (theta != 0) any_nonzero = true;
    if (name != "duration_s" && name != "distance_m" && name != "fare_units" &&
        name != "energy_l") {
      throw UnknownEvaluative("unknown evaluative function '" + name + "'");
    }
  }
  if (!any_nonzero) {
    throw InvariantViolation("cost weights: at least one non-zero weight");
  }

  double total = 0;
  for (const PlanStep& step : p.steps) {
    for (const auto& [name, theta] : weights.theta) {
      double value = 0;
      if (name == "duration_s") value = step.duration_s;
      else if (name == "distance_m") value = step.distance_m;
      else if (name == "fare_units") value = step.fare_units;
      else value = step.energy_l;
      total += theta * value;
    }
  }
  return total;
}

std::vector<PlanViolation> validate_plan(const TransportGraph& graph,
                                         const Query& query, const Plan& p,
                                         const ModeDfa& dfa) {
  using Kind = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  constexpr double kEps = 1e-9;

  if (p.steps.empty()) {
    out.push_back({Kind::EmptyPlan, "plan has no steps"});
    return out;
  }

  std::string word;
  std::string at = query.origin;
  bool connected = true;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const PlanStep& step = p.steps[i];
    const int edge_index = graph.edge_index(step.edge_id);
    if (edge_index < 0) {
      out.push_back({Kind::UnknownEdge,
                     "step " + std::to_string(i) + ": unknown edge '" +
                         step.edge_id + "'"});
      return out;
    }
    const Edge& edge = graph.edge(edge_index);
    word.push_back(mode_symbol(edge.mode));
    if (edge.from != at) {
      connected = false;
      out.push_back({i == 0 ? Kind::WrongOrigin : Kind::NotConnected,
                     "step " + std::to_string(i) + ": edge '" + edge.id +
                         "' departs '" + edge.from + "', expected '" + at +
                         "'"});
    }
    at = edge.to;
  }
  if (connected && at != query.destination) {
    out.push_back({Kind::WrongDestination,
                   "plan ends at '" + at + "', expected '" +
                       query.destination + "'"});
  }

  if (p.steps.front().start_s < query.depart_s - kEps) {
    out.push_back({Kind::DepartsBeforeStart,
                   "first step starts before the query start time"});
  }
  double previous_arrival = query.depart_s;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const PlanStep& step = p.steps[i];
    if (step.start_s < previous_arrival - kEps) {
      out.push_back({Kind::TemporalOrder,
                     "step " + std::to_string(i) +
                         " starts before the previous edge is finished"});
    }
    const int edge_index = graph.edge_index(step.edge_id);
    const auto dur = try_duration(graph, graph.edge(edge_index), step.start_s);
    if (!dur) {
      out.push_back({Kind::TemporalOrder,
                     "step " + std::to_string(i) + ": no service at " +
                         std::to_string(step.start_s)});
      previous_arrival = step.start_s + step.duration_s;
      continue;
    }
    previous_arrival = step.start_s + *dur;
  }
  if (previous_arrival > query.deadline_s + kEps) {
    out.push_back({Kind::DeadlineExceeded, "plan arrives after the deadline"});
  }

  if (p.word != word) {
    out.push_back({Kind::WordMismatch,
                   "plan word '" + p.word + "' does not match edge labels '" +
                       word + "'"});
  }
  if (!dfa.accepts(word)) {
    out.push_back({Kind::WordRejected,
                   "word '" + word + "' is not in the language"});
  }
  return out;
}

}  // namespace copter
