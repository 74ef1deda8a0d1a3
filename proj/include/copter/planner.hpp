#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copter/modelang.hpp"
#include "copter/netgraph.hpp"

namespace copter {

struct PlanStep {
  std::string edge_id;
  Mode mode = Mode::Walk;
  double start_s = 0;
  double duration_s = 0;   // includes schedule waiting for transit edges
  double distance_m = 0;
  double fare_units = 0;   // evaluative extension points; 0 unless set
  double energy_l = 0;
};

struct Plan {
  std::vector<PlanStep> steps;
  std::string word;  // edge mode symbols, in order
  double depart_s = 0;
  double arrive_s = 0;
  double distance_m = 0;
  std::map<Mode, double> mode_distance_m;

  double duration_s() const { return arrive_s - depart_s; }
};

enum class SearchAlgorithm { Dijkstra, AStar };

// Earliest-arrival plan whose word is accepted by the DFA, or nullopt when
// no valid plan meets the deadline. Label-setting search on the
// (node x dfa-state) product with time-dependent edge relaxation; requires
// FIFO edges. Ties on arrival prefer fewer edges, then the
// lexicographically smaller word.
std::optional<Plan> plan(const TransportGraph& graph, const Query& query,
                         const ModeDfa& dfa,
                         SearchAlgorithm algorithm = SearchAlgorithm::Dijkstra);

struct CandidatePlanSet {
  struct Item {
    LanguageElement language;
    std::optional<Plan> plan;
  };
  std::vector<Item> items;  // preserves language-set order
};

CandidatePlanSet candidate_plans(const TransportGraph& graph,
                                 const Query& query,
                                 const std::vector<LanguageElement>& languages,
                                 SearchAlgorithm algorithm =
                                     SearchAlgorithm::Dijkstra);

// Weighted sum of per-edge evaluative functions. Known evaluative names:
// duration_s, distance_m, fare_units, energy_l.
struct CostWeights {
  std::map<std::string, double> theta;
};

double plan_cost(const Plan& plan, const CostWeights& weights);

struct PlanViolation {
  enum class Kind {
    UnknownEdge,
    NotConnected,
    WrongOrigin,
    WrongDestination,
    EmptyPlan,
    DepartsBeforeStart,
    TemporalOrder,
    DeadlineExceeded,
    WordMismatch,
    WordRejected,
  };
  Kind kind;
  std::string message;
};

// Reports every violated validity condition; empty result means the plan is
// a valid solution for the query under the language.
std::vector<PlanViolation> validate_plan(const TransportGraph& graph,
                                         const Query& query, const Plan& plan,
                                         const ModeDfa& dfa);

}  // namespace copter
