#include <doctest.h>

#include <cmath>

#include "copter/choice.hpp"
#include "copter/rng.hpp"
#include "oracles.hpp"

using namespace copter;

namespace {

ChoiceSchema two_alt_schema() {
  ChoiceSchema schema;
  schema.attribute_names = {"travel_time_s"};
  schema.feature_names = {};
  schema.alternatives = {"drive", "transit"};
  schema.reference = "drive";
  return schema;
}

// Synthetic choices from a known utility gamma * time (no constants).
std::vector<ChoiceObservation> synthetic_choices(double gamma, int n,
                                                 Rng& rng) {
  std::vector<ChoiceObservation> data;
  data.reserve(n);
  for (int i = 0; i < n; ++i) {
    ChoiceObservation record;
    record.alternatives = {
        {"drive", {rng.uniform(0, 10)}},
        {"transit", {rng.uniform(0, 10)}},
    };
    const double v0 = gamma * record.alternatives[0].attributes[0];
    const double v1 = gamma * record.alternatives[1].attributes[0];
    const double p0 = std::exp(v0) / (std::exp(v0) + std::exp(v1));
    record.chosen = rng.uniform() < p0 ? 0 : 1;
    data.push_back(std::move(record));
  }
  return data;
}

}  // namespace

TEST_SUITE("choice") {

TEST_CASE("observable utility is linear") {
  ChoiceModel model;
  model.schema = two_alt_schema();
  model.gamma = {0.0};

  SUBCASE("all-zero parameters give zero value") {
    CHECK(model.value({600}, {}, "transit") == doctest::Approx(0));
  }
  SUBCASE("gamma scales the attribute") {
    model.gamma = {-0.01};
    CHECK(model.value({600}, {}, "transit") == doctest::Approx(-6.0));
    model.gamma = {-0.02};
    CHECK(model.value({600}, {}, "transit") == doctest::Approx(-12.0));
  }
  SUBCASE("schema mismatches throw") {
    CHECK_THROWS_AS(model.value({600, 1}, {}, "transit"), SchemaMismatch);
    CHECK_THROWS_AS(model.value({600}, {1.0}, "transit"), SchemaMismatch);
    CHECK_THROWS_AS(model.value({600}, {}, "jetpack"), SchemaMismatch);
  }
}

TEST_CASE("probabilities are an analytic softmax") {
  ChoiceModel model;
  model.schema = two_alt_schema();
  model.gamma = {1.0};

  SUBCASE("equal values split evenly") {
    const auto p = probabilities(model, {{"drive", {1.0}}, {"transit", {1.0}}},
                                 {});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }
  SUBCASE("values (ln 2, 0) give (2/3, 1/3)") {
    const auto p = probabilities(
        model, {{"drive", {std::log(2.0)}}, {"transit", {0.0}}}, {});
    CHECK(p[0] == doctest::Approx(2.0 / 3));
    CHECK(p[1] == doctest::Approx(1.0 / 3));
  }
  SUBCASE("three alternatives (0, 0, ln 2)") {
    ChoiceModel m3;
    m3.schema = two_alt_schema();
    m3.schema.alternatives = {"a", "b", "c"};
    m3.schema.reference = "a";
    m3.gamma = {1.0};
    const auto p = probabilities(
        m3, {{"a", {0.0}}, {"b", {0.0}}, {"c", {std::log(2.0)}}}, {});
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.5));
  }
}

TEST_CASE("softmax properties: normalization, translation, permutation") {
  Rng rng(55);
  ChoiceModel model;
  model.schema = two_alt_schema();
  model.schema.alternatives = {"a", "b", "c"};
  model.schema.reference = "a";
  model.gamma = {1.0};
  // Value spreads stay below ~30 so exp(-spread) is still representable
  // next to 1.0 and the strict (0,1) bounds hold in floating point.
  for (int trial = 0; trial < 200; ++trial) {
    const double va = rng.uniform(-15, 15);
    const double vb = rng.uniform(-15, 15);
    const double vc = rng.uniform(-15, 15);
    const double shift = rng.uniform(-100, 100);
    const auto p =
        probabilities(model, {{"a", {va}}, {"b", {vb}}, {"c", {vc}}}, {});
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : p) CHECK((v > 0 && v < 1));

    const auto shifted = probabilities(
        model, {{"a", {va + shift}}, {"b", {vb + shift}}, {"c", {vc + shift}}},
        {});
    for (int i = 0; i < 3; ++i) {
      CHECK(shifted[i] == doctest::Approx(p[i]).epsilon(1e-9));
    }

    const auto permuted =
        probabilities(model, {{"c", {vc}}, {"a", {va}}, {"b", {vb}}}, {});
    CHECK(permuted[0] == doctest::Approx(p[2]).epsilon(1e-12));
    CHECK(permuted[1] == doctest::Approx(p[0]).epsilon(1e-12));
    CHECK(permuted[2] == doctest::Approx(p[1]).epsilon(1e-12));
  }
}

TEST_CASE("overflow-prone values stay finite") {
  ChoiceModel model;
  model.schema = two_alt_schema();
  model.gamma = {1.0};
  const auto p =
      probabilities(model, {{"drive", {800.0}}, {"transit", {-800.0}}}, {});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] >= 0);
}

TEST_CASE("MNL fit recovers a known gamma") {
  Rng rng(2024);
  const auto data = synthetic_choices(-0.5, 10000, rng);
  const MnlFitResult fit = fit_mnl(two_alt_schema(), data);
  CHECK(fit.model.gamma[0] == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::abs(fit.model.gamma[0] + 0.5) < 0.05);
  // Constants stay near zero for symmetric data.
  CHECK(std::abs(fit.model.constants.at("transit")) < 0.05);
}

TEST_CASE("uniform random choices drive constants toward zero") {
  Rng rng(91);
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 10000; ++i) {
    ChoiceObservation record;
    record.alternatives = {{"drive", {0.0}}, {"transit", {0.0}}};
    record.chosen = rng.bernoulli(0.5) ? 1 : 0;
    data.push_back(record);
  }
  const MnlFitResult fit = fit_mnl(two_alt_schema(), data);
  CHECK(std::abs(fit.model.constants.at("transit")) < 0.05);
}

TEST_CASE("degenerate datasets are rejected") {
  CHECK_THROWS_AS(fit_mnl(two_alt_schema(), {}), EmptyDataset);

  std::vector<ChoiceObservation> single;
  ChoiceObservation record;
  record.alternatives = {{"drive", {1.0}}};
  record.chosen = 0;
  single.push_back(record);
  CHECK_THROWS_AS(fit_mnl(two_alt_schema(), single), Degenerate);

  // Perfectly separated data: the optimum is at infinity, so parameters
  // keep growing until the guard trips.
  std::vector<ChoiceObservation> separated;
  for (int i = 0; i < 200; ++i) {
    ChoiceObservation r;
    r.alternatives = {{"drive", {0.0}}, {"transit", {1.0}}};
    r.chosen = 0;
    separated.push_back(r);
  }
  MnlFitOptions tight;
  tight.parameter_bound = 5;
  CHECK_THROWS_AS(fit_mnl(two_alt_schema(), separated, tight), Degenerate);
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(31337);
  ChoiceSchema schema;
  schema.attribute_names = {"time", "cost"};
  schema.feature_names = {"income"};
  schema.alternatives = {"drive", "transit", "walk"};
  schema.reference = "drive";

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ChoiceObservation> data;
    for (int i = 0; i < 40; ++i) {
      ChoiceObservation record;
      record.features = {rng.uniform(-1, 1)};
      for (const auto& name : schema.alternatives) {
        record.alternatives.push_back(
            {name, {rng.uniform(-2, 2), rng.uniform(-2, 2)}});
      }
      record.chosen = static_cast<int>(rng.index(3));
      data.push_back(std::move(record));
    }
    std::vector<double> params(mnl_parameter_count(schema));
    for (double& p : params) p = rng.uniform(-0.5, 0.5);

    std::vector<double> analytic;
    mnl_log_likelihood(schema, data, params, &analytic);
    const auto numeric = testing::central_differences(
        [&](const std::vector<double>& x) {
          return mnl_log_likelihood(schema, data, x, nullptr);
        },
        params);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double scale = std::max(1.0, std::abs(analytic[i]));
      CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-6);
    }
  }
}

TEST_CASE("log-likelihood is non-decreasing across fit iterations") {
  Rng rng(17);
  const auto data = synthetic_choices(-0.3, 2000, rng);
  const MnlFitResult fit = fit_mnl(two_alt_schema(), data);
  REQUIRE(fit.log_likelihood_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
    CHECK(fit.log_likelihood_trace[i] >= fit.log_likelihood_trace[i - 1]);
  }
}

TEST_CASE("acceptability identities and floor") {
  SUBCASE("equal probabilities give zero gain, unit odds") {
    const Acceptability a = acceptability(0.4, 0.4);
    CHECK(a.delta == 0.0);
    CHECK(a.odds == 1.0);
    CHECK(a.prob == doctest::Approx(0.4));
  }
  SUBCASE("pr_r 0.25 vs pr_u 0.5") {
    const Acceptability a = acceptability(0.25, 0.5);
    CHECK(a.odds == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.delta == doctest::Approx(-0.6931471805599453).epsilon(1e-12));
  }
  SUBCASE("zero usual-mode probability is floored") {
    const Acceptability a = acceptability(0.5, 0.0);
    CHECK(a.odds == doctest::Approx(0.5 / kProbabilityFloor));
  }
  SUBCASE("odds == exp(delta) on random pairs") {
    Rng rng(8);
    for (int i = 0; i < 10000; ++i) {
      const Acceptability a = acceptability(rng.uniform(), rng.uniform());
      CHECK(std::abs(a.odds - std::exp(a.delta)) <= 1e-12 * a.odds);
      CHECK(a.odds > 0);
    }
  }
}

TEST_CASE("choice model JSON round-trip") {
  ChoiceSchema schema;
  schema.attribute_names = {"time", "cost"};
  schema.feature_names = {"income"};
  schema.alternatives = {"drive", "transit"};
  schema.reference = "drive";
  ChoiceModel model;
  model.schema = schema;
  model.gamma = {-0.25, -1.5};
  model.lambdas["transit"] = {0.125};
  model.constants["transit"] = 0.75;

  const ChoiceModel back = choice_model_from_json(choice_model_to_json(model));
  CHECK(back.gamma == model.gamma);
  CHECK(back.lambdas == model.lambdas);
  CHECK(back.constants == model.constants);
  CHECK(back.schema.reference == "drive");
}

}  // TEST_SUITE
