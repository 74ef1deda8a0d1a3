#include "copter/copter.hpp"

#include <algorithm>

namespace copter {

double expected_saving(double adoption_prob, double saving_l) {
  if (adoption_prob < 0 || adoption_prob > 1) {
    throw InvariantViolation("expected_saving: probability out of [0, 1]");
  }
  return adoption_prob * saving_l;
}

ModeCategory plan_category(const Plan& plan) {
  Mode dominant = Mode::Walk;
  double best_distance = -1;
  for (const auto& [mode, distance] : plan.mode_distance_m) {
    if (mode == Mode::Walk) continue;
    if (distance > best_distance) {
      best_distance = distance;
      dominant = mode;
    }
  }
  if (best_distance < 0) return ModeCategory::NonMotorized;  // all-walk plan
  return category_of(dominant);
}

int select_best(const std::vector<Recommendation>& candidates,
                SelectionRule rule) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    if (best < 0) {
      best = i;
      continue;
    }
    const Recommendation& a = candidates[i];
    const Recommendation& b = candidates[best];
    const double key_a = rule == SelectionRule::ExpectedSaving
                             ? a.expected_saving_l
                             : a.adoption_prob;
    const double key_b = rule == SelectionRule::ExpectedSaving
                             ? b.expected_saving_l
                             : b.adoption_prob;
    if (key_a > key_b ||
        (key_a == key_b &&
         (a.adoption_prob > b.adoption_prob ||
          (a.adoption_prob == b.adoption_prob && a.plan.word < b.plan.word)))) {
      best = i;
    }
  }
  return best;
}

RecommendResult recommend_all(const TransportGraph& graph, const Query& query,
                              const TravelerProfile& profile,
                              const ForestModel& forest,
                              const AdoptionModel& adoption,
                              const FuelModel& fuel,
                              PersonIntercept intercept,
                              const RecommendOptions& options) {
  if (profile.usual_mode != Mode::Drive) {
    throw InvariantViolation(
        "recommend: the influenced population are regular drivers; "
        "usual_mode must be drive");
  }

  RecommendResult result;
  static const ModeDfa drive_dfa = compile_dfa(parse_regex("d+"));
  result.baseline = plan(graph, query, drive_dfa);
  if (!result.baseline) {
    result.no_alternative_reason = "no drive baseline within the deadline";
    return result;
  }
  const double trip_distance = result.baseline->distance_m;

  // The trip's own distance feeds the likelihood features, whatever the
  // sampled profile carried.
  TravelerProfile checked = profile;
  checked.trip_distance_m = trip_distance;
  checked.validate();
  std::vector<double> features = checked.features();
  const std::vector<double> probs = predict_proba(forest, features);
  const auto cat_probs = category_probs(probs, forest.labels);
  const bool mode_space = forest.labels == mode_labels();
  if (options.use_mode_probs && !mode_space) {
    throw SchemaMismatch("use_mode_probs requires a 7-mode forest model");
  }

  const std::vector<LanguageElement>& languages =
      options.language_override.empty()
          ? language_set(candidate_modes(checked, trip_distance))
          : options.language_override;
  const CandidatePlanSet plans = candidate_plans(graph, query, languages);

  const double pr_usual =
      options.use_mode_probs
          ? probs[static_cast<int>(Mode::Drive)]
          : cat_probs[static_cast<int>(ModeCategory::Motorized)];

  for (const auto& item : plans.items) {
    if (!item.plan) continue;
    Recommendation rec;
    rec.plan = *item.plan;
    rec.language = item.language.pattern;
    rec.category = plan_category(rec.plan);
    double pr_rec;
    if (options.use_mode_probs) {
      Mode dominant = Mode::Walk;
      double best_distance = -1;
      for (const auto& [mode, distance] : rec.plan.mode_distance_m) {
        if (mode != Mode::Walk && distance > best_distance) {
          best_distance = distance;
          dominant = mode;
        }
      }
      pr_rec = probs[static_cast<int>(dominant)];
    } else {
      pr_rec = cat_probs[static_cast<int>(rec.category)];
    }
    rec.acceptability = acceptability(pr_rec, pr_usual);
    rec.adoption_prob =
        adoption_probability(adoption, intercept, rec.acceptability.odds);
    rec.saving_l = energy_saving(fuel, *result.baseline, rec.plan);
    rec.expected_saving_l = expected_saving(rec.adoption_prob, rec.saving_l);
    if (rec.expected_saving_l <= 0) continue;  // never recommend a worse plan
    result.candidates.push_back(std::move(rec));
  }

  const int best = select_best(result.candidates, options.rule);
  if (best < 0) {
    result.no_alternative_reason = result.candidates.empty()
                                       ? "no feasible alternative with "
                                         "positive expected saving"
                                       : "";
    return result;
  }
  result.best = result.candidates[best];
  return result;
}

std::optional<Recommendation> recommend(const TransportGraph& graph,
                                        const Query& query,
                                        const TravelerProfile& profile,
                                        const ForestModel& forest,
                                        const AdoptionModel& adoption,
                                        const FuelModel& fuel,
                                        PersonIntercept intercept,
                                        const RecommendOptions& options) {
  return recommend_all(graph, query, profile, forest, adoption, fuel,
                       intercept, options)
      .best;
}

}  // namespace copter
