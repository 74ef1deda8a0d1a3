#include <doctest.h>

#include "copter/copter.hpp"
#include "copter/sim.hpp"
#include "copter/synthetic.hpp"
#include "oracles.hpp"

using namespace copter;

namespace {

// Shared fixtures: a small grid with transit and a trained category forest.
const TransportGraph& grid() {
  static const TransportGraph g = [] {
    GridSpec spec;
    spec.n = 5;
    spec.bus_rows = {1};
    spec.subway_cols = {2};
    return make_grid_network(spec);
  }();
  return g;
}

const ForestModel& category_forest() {
  static const ForestModel model = [] {
    Dataset data = synthetic_trips({1500, 0.10}, 2024);
    for (int& t : data.targets) {
      t = static_cast<int>(category_of(static_cast<Mode>(t)));
    }
    data.labels = category_labels();
    return train_forest(data, {10, 12, 2}, 7);
  }();
  return model;
}

TravelerProfile driver_profile() {
  TravelerProfile p;
  p.trip_distance_m = 1500;
  p.n_autos = 1;
  p.has_license = 1;
  p.household_size = 2;
  p.usual_mode = Mode::Drive;
  return p;
}

Recommendation scored(double saving, double adoption, std::string word) {
  Recommendation rec;
  rec.saving_l = saving;
  rec.adoption_prob = adoption;
  rec.expected_saving_l = expected_saving(adoption, saving);
  rec.plan.word = std::move(word);
  return rec;
}

}  // namespace

TEST_SUITE("copter") {

TEST_CASE("expected saving is a plain product") {
  CHECK(expected_saving(0.5, 10) == doctest::Approx(5));
  CHECK(expected_saving(0.0, 123) == 0.0);
  CHECK(expected_saving(1.0, 7.25) == doctest::Approx(7.25));
  CHECK_THROWS_AS(expected_saving(1.5, 1), InvariantViolation);
}

TEST_CASE("selection prefers higher expected saving") {
  // saving 10 l at adoption 0.2 (expected 2.0) loses to saving 4 l at
  // adoption 0.9 (expected 3.6).
  std::vector<Recommendation> candidates = {scored(10, 0.2, "w"),
                                            scored(4, 0.9, "wbw")};
  CHECK(select_best(candidates, SelectionRule::ExpectedSaving) == 1);
  CHECK(select_best(candidates, SelectionRule::AdoptionLikelihood) == 1);

  SUBCASE("ties fall back to adoption, then the smaller word") {
    std::vector<Recommendation> tied = {scored(4, 0.5, "wsw"),
                                        scored(2, 1.0, "wbw")};
    CHECK(select_best(tied, SelectionRule::ExpectedSaving) == 1);
    std::vector<Recommendation> same = {scored(2, 1.0, "wsw"),
                                        scored(2, 1.0, "wbw")};
    CHECK(select_best(same, SelectionRule::ExpectedSaving) == 1);
  }
  SUBCASE("scaling all savings leaves the argmax unchanged") {
    std::vector<Recommendation> scaled = {scored(10 * 3.5, 0.2, "w"),
                                          scored(4 * 3.5, 0.9, "wbw")};
    CHECK(select_best(scaled, SelectionRule::ExpectedSaving) ==
          select_best(candidates, SelectionRule::ExpectedSaving));
  }
  SUBCASE("raising a candidate's adoption never demotes it") {
    std::vector<Recommendation> bumped = {scored(10, 0.2, "w"),
                                          scored(4, 0.95, "wbw")};
    CHECK(select_best(bumped, SelectionRule::ExpectedSaving) == 1);
  }
}

TEST_CASE("plan categories come from the dominant non-walk mode") {
  Plan p;
  p.mode_distance_m[Mode::Walk] = 900;
  p.mode_distance_m[Mode::Bus] = 800;
  CHECK(plan_category(p) == ModeCategory::PublicTransit);
  p.mode_distance_m.clear();
  p.mode_distance_m[Mode::Walk] = 500;
  CHECK(plan_category(p) == ModeCategory::NonMotorized);
  p.mode_distance_m[Mode::Cycle] = 100;
  CHECK(plan_category(p) == ModeCategory::NonMotorized);
}

TEST_CASE("recommend returns a scored alternative on the grid") {
  const Query query{"n0_0", "n1_3", 7 * 3600, 7 * 3600 + 5400};
  const AdoptionModel adoption;
  const FuelModel fuel;
  const auto result =
      recommend_all(grid(), query, driver_profile(), category_forest(),
                    adoption, fuel, PersonIntercept{adoption.intercept_mean});

  REQUIRE(result.baseline.has_value());
  CHECK(result.baseline->word.find_first_not_of('d') == std::string::npos);
  REQUIRE(result.best.has_value());
  CHECK(result.best->expected_saving_l > 0);
  CHECK(result.best->adoption_prob > 0);
  CHECK(result.best->adoption_prob < 1);
  CHECK(result.best->expected_saving_l ==
        doctest::Approx(result.best->adoption_prob * result.best->saving_l)
            .epsilon(1e-12));

  // Exhaustive re-scoring: nothing in the candidate set beats the winner.
  for (const auto& candidate : result.candidates) {
    CHECK(result.best->expected_saving_l >= candidate.expected_saving_l);
  }
}

TEST_CASE("the usual mode must be drive") {
  TravelerProfile cyclist = driver_profile();
  cyclist.usual_mode = Mode::Cycle;
  const Query query{"n0_0", "n1_3", 7 * 3600, 7 * 3600 + 5400};
  CHECK_THROWS_AS(
      recommend_all(grid(), query, cyclist, category_forest(), AdoptionModel{},
                    FuelModel{}, PersonIntercept{0}),
      InvariantViolation);
}

TEST_CASE("no feasible alternative yields NoAlternative") {
  // Drive-only network: no transit, trip over a mile, no bike.
  std::vector<Node> nodes = {{"a", 34.0, -118.0}, {"b", 34.02, -118.0}};
  Edge d1;
  d1.id = "d1";
  d1.from = "a";
  d1.to = "b";
  d1.mode = Mode::Drive;
  d1.length_m = 2200;
  d1.traversal = FixedSpeed{13.9};
  Edge w1 = d1;
  w1.id = "w1";
  w1.mode = Mode::Walk;
  w1.traversal = FixedSpeed{1.4};
  const TransportGraph g = TransportGraph::build(nodes, {d1, w1}, {});

  TravelerProfile p = driver_profile();
  p.n_bicycles = 0;
  const Query query{"a", "b", 0, 7200};
  const auto result = recommend_all(g, query, p, category_forest(),
                                    AdoptionModel{}, FuelModel{},
                                    PersonIntercept{-1.065});
  CHECK(result.baseline.has_value());
  CHECK_FALSE(result.best.has_value());
  CHECK(result.candidates.empty());
  CHECK_FALSE(result.no_alternative_reason.empty());
}

TEST_CASE("candidates that waste energy are filtered out") {
  const Query query{"n0_0", "n0_1", 7 * 3600, 7 * 3600 + 5400};
  // A fuel model where the bus share exceeds the car's burn: bus plans
  // lose fuel, so only non-motorized alternatives can be recommended.
  FuelModel wasteful;
  wasteful.bus_per_passenger_factor = 1.0;
  wasteful.a0 = 0.05;
  wasteful.a1 = 0;
  wasteful.a2 = 0;
  const auto result =
      recommend_all(grid(), query, driver_profile(), category_forest(),
                    AdoptionModel{}, wasteful,
                    PersonIntercept{-1.065});
  for (const auto& candidate : result.candidates) {
    CHECK(candidate.expected_saving_l > 0);
    CHECK(candidate.plan.mode_distance_m.count(Mode::Bus) == 0);
  }
}

TEST_CASE("language override narrows the candidate set") {
  const Query query{"n0_0", "n0_1", 7 * 3600, 7 * 3600 + 5400};
  RecommendOptions options;
  options.language_override.push_back(make_language_element("w*"));
  const auto result =
      recommend_all(grid(), query, driver_profile(), category_forest(),
                    AdoptionModel{}, FuelModel{}, PersonIntercept{-1.065},
                    options);
  REQUIRE(result.best.has_value());
  CHECK(result.best->plan.word == "w");
  CHECK(result.candidates.size() == 1);
}

TEST_CASE("randomized argmax property over grid scenarios") {
  Rng rng(606);
  const AdoptionModel adoption;
  const FuelModel fuel;
  int with_alternatives = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TravelerProfile p = driver_profile();
    p.n_bicycles = static_cast<int>(rng.uniform_int(0, 1));
    p.n_autos = static_cast<int>(rng.uniform_int(1, 3));
    Query q;
    const int n = 5;
    const int o_r = static_cast<int>(rng.index(n));
    const int o_c = static_cast<int>(rng.index(n));
    int d_r = o_r, d_c = o_c;
    while (d_r == o_r && d_c == o_c) {
      d_r = static_cast<int>(rng.index(n));
      d_c = static_cast<int>(rng.index(n));
    }
    q.origin = "n" + std::to_string(o_r) + "_" + std::to_string(o_c);
    q.destination = "n" + std::to_string(d_r) + "_" + std::to_string(d_c);
    q.depart_s = static_cast<int>(rng.uniform_int(6 * 3600, 9 * 3600));
    q.deadline_s = q.depart_s + 7200;
    const PersonIntercept intercept{rng.uniform(-3, 1)};

    const auto result = recommend_all(grid(), q, p, category_forest(),
                                      adoption, fuel, intercept);
    if (!result.best) continue;
    ++with_alternatives;
    for (const auto& candidate : result.candidates) {
      const double rescored =
          expected_saving(candidate.adoption_prob, candidate.saving_l);
      CHECK(candidate.expected_saving_l == doctest::Approx(rescored));
      CHECK(result.best->expected_saving_l >= rescored);
    }
  }
  CHECK(with_alternatives > 10);
}

}  // TEST_SUITE
