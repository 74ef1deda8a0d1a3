#pragma once

#include <optional>
#include <string>
#include <vector>

#include "copter/adoption.hpp"
#include "copter/choice.hpp"
#include "copter/energy.hpp"
#include "copter/likelihood.hpp"
#include "copter/modelang.hpp"
#include "copter/netgraph.hpp"
#include "copter/planner.hpp"
#include "copter/profile.hpp"

namespace copter {

struct Recommendation {
  Plan plan;
  std::string language;         // pattern the plan was generated under
  ModeCategory category = ModeCategory::NonMotorized;
  Acceptability acceptability;
  double adoption_prob = 0;
  double saving_l = 0;           // fuel saved vs. the baseline drive plan
  double expected_saving_l = 0;  // adoption_prob * saving_l
};

double expected_saving(double adoption_prob, double saving_l);

// Category of the plan's dominant non-walk mode (largest distance share);
// an all-walk plan is non-motorized.
ModeCategory plan_category(const Plan& plan);

enum class SelectionRule {
  ExpectedSaving,      // argmax adoption_prob * saving
  AdoptionLikelihood,  // argmax adoption_prob (favors any change)
};

struct RecommendOptions {
  bool use_mode_probs = false;  // 7-mode instead of 3-category acceptability
  SelectionRule rule = SelectionRule::ExpectedSaving;
  // Non-empty: used verbatim instead of the per-person language set.
  std::vector<LanguageElement> language_override;
};

struct RecommendResult {
  std::optional<Plan> baseline;          // time-optimal drive-only plan
  std::vector<Recommendation> candidates;  // scored, language-set order
  std::optional<Recommendation> best;
  std::string no_alternative_reason;     // set when best is empty
};

// The acceptable-planning pipeline: candidate mode set, language set,
// per-language time-optimal plans, fuel saving vs. the drive baseline,
// acceptability from the forest's likelihoods, adoption probability, and
// the expected-saving argmax. Candidates with non-positive expected saving
// are dropped. The traveler's usual mode must be drive.
RecommendResult recommend_all(const TransportGraph& graph, const Query& query,
                              const TravelerProfile& profile,
                              const ForestModel& forest,
                              const AdoptionModel& adoption,
                              const FuelModel& fuel,
                              PersonIntercept intercept,
                              const RecommendOptions& options = {});

std::optional<Recommendation> recommend(const TransportGraph& graph,
                                        const Query& query,
                                        const TravelerProfile& profile,
                                        const ForestModel& forest,
                                        const AdoptionModel& adoption,
                                        const FuelModel& fuel,
                                        PersonIntercept intercept,
                                        const RecommendOptions& options = {});

// Selection shared with recommend_all: maximal expected saving, ties to the
// higher adoption probability, then the lexicographically smaller word.
// Returns -1 when empty.
int select_best(const std::vector<Recommendation>& candidates,
                SelectionRule rule);

}  // namespace copter
