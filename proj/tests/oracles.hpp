// Test-only oracles, independent of the implementation paths they check:
// a naive backtracking regex matcher, a brute-force plan enumerator, random
// instance generators, and small numeric helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "copter/modelang.hpp"
#include "copter/netgraph.hpp"
#include "copter/rng.hpp"

namespace copter::testing {

// --- naive regex matching (backtracking over the AST) ---

inline bool match_node(const ModeRegexPtr& node, std::string_view word,
                       std::size_t pos,
                       const std::function<bool(std::size_t)>& k);

inline bool match_concat(const std::vector<ModeRegexPtr>& children,
                         std::size_t index, std::string_view word,
                         std::size_t pos,
                         const std::function<bool(std::size_t)>& k) {
  if (index == children.size()) return k(pos);
  return match_node(children[index], word, pos, [&](std::size_t next) {
    return match_concat(children, index + 1, word, next, k);
  });
}

inline bool match_star(const ModeRegexPtr& child, std::string_view word,
                       std::size_t pos,
                       const std::function<bool(std::size_t)>& k) {
  if (k(pos)) return true;
  return match_node(child, word, pos, [&](std::size_t next) {
    if (next == pos) return false;  // no progress; stop expanding
    return match_star(child, word, next, k);
  });
}

inline bool match_node(const ModeRegexPtr& node, std::string_view word,
                       std::size_t pos,
                       const std::function<bool(std::size_t)>& k) {
  switch (node->kind) {
    case ModeRegex::Kind::Symbol:
      return pos < word.size() && word[pos] == mode_symbol(node->symbol) &&
             k(pos + 1);
    case ModeRegex::Kind::Concat:
      return match_concat(node->children, 0, word, pos, k);
    case ModeRegex::Kind::Alternate:
      for (const auto& child : node->children) {
        if (match_node(child, word, pos, k)) return true;
      }
      return false;
    case ModeRegex::Kind::Star:
      return match_star(node->children[0], word, pos, k);
    case ModeRegex::Kind::Plus:
      return match_node(node->children[0], word, pos, [&](std::size_t next) {
        return match_star(node->children[0], word, next, k);
      });
  }
  return false;
}

inline bool naive_regex_match(const ModeRegexPtr& regex,
                              std::string_view word) {
  return match_node(regex, word, 0,
                    [&](std::size_t pos) { return pos == word.size(); });
}

// --- random regex / word generation ---

inline ModeRegexPtr random_regex(Rng& rng, int depth,
                                 const std::vector<Mode>& alphabet) {
  const int kind = depth <= 0 ? 0 : static_cast<int>(rng.uniform_int(0, 7));
  switch (kind) {
    case 0:
    case 1:
    case 2:
      return ModeRegex::make_symbol(alphabet[rng.index(alphabet.size())]);
    case 3:
    case 4: {
      std::vector<ModeRegexPtr> parts;
      const int n = static_cast<int>(rng.uniform_int(2, 3));
      for (int i = 0; i < n; ++i) {
        parts.push_back(random_regex(rng, depth - 1, alphabet));
      }
      return ModeRegex::make_concat(std::move(parts));
    }
    case 5: {
      std::vector<ModeRegexPtr> parts;
      const int n = static_cast<int>(rng.uniform_int(2, 3));
      for (int i = 0; i < n; ++i) {
        parts.push_back(random_regex(rng, depth - 1, alphabet));
      }
      return ModeRegex::make_alternate(std::move(parts));
    }
    case 6:
      return ModeRegex::make_star(random_regex(rng, depth - 1, alphabet));
    default:
      return ModeRegex::make_plus(random_regex(rng, depth - 1, alphabet));
  }
}

// Uniform random word over the alphabet.
inline std::string random_word(Rng& rng, std::size_t max_length,
                               const std::vector<Mode>& alphabet) {
  const std::size_t length = rng.index(max_length + 1);
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(mode_symbol(alphabet[rng.index(alphabet.size())]));
  }
  return out;
}

// A word drawn from the regex's own language (to exercise accepting paths).
inline void sample_from_regex(const ModeRegexPtr& node, Rng& rng,
                              std::string& out) {
  switch (node->kind) {
    case ModeRegex::Kind::Symbol:
      out.push_back(mode_symbol(node->symbol));
      return;
    case ModeRegex::Kind::Concat:
      for (const auto& child : node->children) {
        sample_from_regex(child, rng, out);
      }
      return;
    case ModeRegex::Kind::Alternate:
      sample_from_regex(node->children[rng.index(node->children.size())], rng,
                        out);
      return;
    case ModeRegex::Kind::Star: {
      const int repeats = static_cast<int>(rng.uniform_int(0, 2));
      for (int i = 0; i < repeats; ++i) {
        sample_from_regex(node->children[0], rng, out);
      }
      return;
    }
    case ModeRegex::Kind::Plus: {
      const int repeats = static_cast<int>(rng.uniform_int(1, 3));
      for (int i = 0; i < repeats; ++i) {
        sample_from_regex(node->children[0], rng, out);
      }
      return;
    }
  }
}

// --- brute-force planning oracle ---
//
// Depth-bounded DFS over all timed edge sequences; a sequence is a valid
// plan when it connects the query endpoints within the deadline and its
// word satisfies the naive regex matcher. Returns the minimal
// (arrival, edges, word) triple. All durations in the generated instances
// are integers, so arrival comparisons are exact.
struct BruteResult {
  bool found = false;
  double arrival = std::numeric_limits<double>::infinity();
  int edges = 0;
  std::string word;
};

inline void brute_dfs(const TransportGraph& graph, const Query& query,
                      const ModeRegexPtr& regex, int node, double time,
                      std::string& word, int depth, int max_depth,
                      BruteResult& best, long long& expansions) {
  if (++expansions > 50'000'000) {
    throw std::runtime_error("brute force oracle exploded");
  }
  if (depth > 0 && node == graph.node_index(query.destination) &&
      naive_regex_match(regex, word)) {
    const int edges = depth;
    if (time < best.arrival ||
        (time == best.arrival &&
         (edges < best.edges ||
          (edges == best.edges && word < best.word)))) {
      best.found = true;
      best.arrival = time;
      best.edges = edges;
      best.word = word;
    }
    // Longer plans from here can only arrive later; still explore, since a
    // different branch may do better.
  }
  if (depth == max_depth) return;
  for (int edge_index : graph.out_edges(node)) {
    const Edge& edge = graph.edge(edge_index);
    const auto dur = try_duration(graph, edge, time);
    if (!dur) continue;
    const double arrival = time + *dur;
    if (arrival > query.deadline_s) continue;
    word.push_back(mode_symbol(edge.mode));
    brute_dfs(graph, query, regex, graph.node_index(edge.to), arrival, word,
              depth + 1, max_depth, best, expansions);
    word.pop_back();
  }
}

inline BruteResult brute_force_plan(const TransportGraph& graph,
                                    const Query& query,
                                    const ModeRegexPtr& regex, int max_depth) {
  BruteResult best;
  std::string word;
  long long expansions = 0;
  brute_dfs(graph, query, regex, graph.node_index(query.origin),
            query.depart_s, word, 0, max_depth, best, expansions);
  return best;
}

// --- random time-dependent multi-modal graphs ---
//
// Integer durations throughout (fixed-speed edges have length = speed *
// integer duration; schedules are integer) and edge lengths that dominate
// the endpoints' great-circle distance, so the A* heuristic is admissible
// and all arrival arithmetic is exact.
inline TransportGraph random_graph(Rng& rng, int max_nodes = 8,
                                   int max_edges = 16) {
  const int n_nodes = static_cast<int>(rng.uniform_int(2, max_nodes));
  std::vector<Node> nodes;
  for (int i = 0; i < n_nodes; ++i) {
    nodes.push_back({"n" + std::to_string(i), 34.0 + rng.uniform() * 0.005,
                     -118.0 + rng.uniform() * 0.005});
  }
  const std::vector<Mode> modes = {Mode::Walk, Mode::Cycle, Mode::Bus,
                                   Mode::Subway, Mode::Drive};
  const std::vector<int> speeds = {1, 2, 4, 5, 10};

  std::vector<Edge> edges;
  std::vector<Schedule> schedules;
  const int n_edges = static_cast<int>(rng.uniform_int(1, max_edges));
  for (int i = 0; i < n_edges; ++i) {
    const int from = static_cast<int>(rng.index(n_nodes));
    int to = from;
    while (to == from) to = static_cast<int>(rng.index(n_nodes));
    const Mode mode = modes[rng.index(modes.size())];
    const double gc = great_circle_m(nodes[from].lat, nodes[from].lon,
                                     nodes[to].lat, nodes[to].lon);
    Edge e;
    e.id = "e" + std::to_string(i);
    e.from = nodes[from].id;
    e.to = nodes[to].id;
    e.mode = mode;
    if (is_scheduled_mode(mode) && rng.bernoulli(0.5)) {
      Schedule s;
      s.id = "s" + std::to_string(i);
      s.ride_time_s = static_cast<int>(rng.uniform_int(60, 900));
      int t = static_cast<int>(rng.uniform_int(0, 3600));
      const int n_departures = static_cast<int>(rng.uniform_int(1, 5));
      for (int d = 0; d < n_departures; ++d) {
        s.departures.push_back(t);
        t += static_cast<int>(rng.uniform_int(60, 1800));
      }
      e.length_m = std::max(std::ceil(gc),
                            static_cast<double>(rng.uniform_int(50, 2000)));
      e.traversal = ScheduledRef{s.id};
      schedules.push_back(std::move(s));
    } else {
      const int speed = speeds[rng.index(speeds.size())];
      const std::int64_t min_duration =
          static_cast<std::int64_t>(std::ceil(gc / speed));
      const std::int64_t duration =
          std::max(min_duration, rng.uniform_int(30, 600));
      e.length_m = static_cast<double>(speed * duration);
      e.traversal = FixedSpeed{static_cast<double>(speed)};
    }
    edges.push_back(std::move(e));
  }
  return TransportGraph::build(std::move(nodes), std::move(edges),
                               std::move(schedules));
}

inline Query random_query(Rng& rng, const TransportGraph& graph) {
  const int n = static_cast<int>(graph.nodes().size());
  const int origin = static_cast<int>(rng.index(n));
  int destination = origin;
  while (destination == origin) destination = static_cast<int>(rng.index(n));
  Query q;
  q.origin = graph.node(origin).id;
  q.destination = graph.node(destination).id;
  q.depart_s = static_cast<int>(rng.uniform_int(0, 7200));
  q.deadline_s = q.depart_s + static_cast<int>(rng.uniform_int(600, 14400));
  return q;
}

// --- numeric helpers ---

inline std::vector<double> central_differences(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    grad[i] = (f(hi) - f(lo)) / (2 * h);
  }
  return grad;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace copter::testing
