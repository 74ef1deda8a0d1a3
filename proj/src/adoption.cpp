#include "copter/adoption.hpp"

#include <algorithm>
#include <cmath>

#include "copter/errors.hpp"

namespace copter {

namespace {

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

PersonIntercept sample_intercept(const AdoptionModel& model, Rng& rng) {
  if (model.intercept_sd < 0) {
    throw InvariantViolation("adoption: intercept_sd must be >= 0");
  }
  if (model.intercept_sd == 0) return {model.intercept_mean};
  return {rng.normal(model.intercept_mean, model.intercept_sd)};
}

double adoption_probability(const AdoptionModel& model,
                            PersonIntercept intercept, double odds) {
  if (odds < 0) throw InvariantViolation("adoption: odds must be >= 0");
  const double capped = std::min(odds, model.odds_cap);
  return sigmoid(intercept.value + model.beta_odds * capped);
}

double logistic_log_likelihood(std::span<const std::pair<double, int>> records,
                               const std::vector<double>& params,
                               std::vector<double>* gradient) {
  const double intercept = params[0];
  const double beta = params[1];
  if (gradient) gradient->assign(2, 0.0);
  double total = 0;
  for (const auto& [x, y] : records) {
    const double p = sigmoid(intercept + beta * x);
    total += y ? std::log(std::max(p, 1e-300))
               : std::log(std::max(1.0 - p, 1e-300));
    if (gradient) {
      const double w = y - p;
      (*gradient)[0] += w;
      (*gradient)[1] += w * x;
    }
  }
  return total;
}

LogisticFit fit_logistic(std::span<const std::pair<double, int>> records,
                         const LogisticFitOptions& options) {
  if (records.size() < 2) throw EmptyDataset("need at least 2 records");
  bool any0 = false, any1 = false;
  for (const auto& [x, y] : records) {
    if (y == 0) any0 = true;
    else if (y == 1) any1 = true;
    else throw InvariantViolation("outcomes must be 0/1");
  }
  if (!any0 || !any1) {
    throw AllSameOutcome("both outcome values must be present");
  }

  std::vector<double> params = {0.0, 0.0};
  std::vector<double> gradient;
  LogisticFit result;
  double ll = logistic_log_likelihood(records, params, &gradient);
  result.log_likelihood_trace.push_back(ll);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double grad_norm =
        std::max(std::abs(gradient[0]), std::abs(gradient[1]));
    if (grad_norm < options.gradient_tolerance) break;

    // Newton direction from the 2x2 Hessian (negative definite).
    double h00 = 0, h01 = 0, h11 = 0;
    for (const auto& [x, y] : records) {
      const double p = sigmoid(params[0] + params[1] * x);
      const double w = p * (1.0 - p);
      h00 += w;
      h01 += w * x;
      h11 += w * x * x;
    }
    const double det = h00 * h11 - h01 * h01;
    double d0, d1;
    if (det > 1e-12) {
      d0 = (h11 * gradient[0] - h01 * gradient[1]) / det;
      d1 = (h00 * gradient[1] - h01 * gradient[0]) / det;
    } else {  // near-singular Hessian: fall back to a gradient step
      d0 = gradient[0] / std::max(h00, 1e-12);
      d1 = gradient[1] / std::max(h11, 1e-12);
    }

    // Step halving keeps the log-likelihood increasing; once no halved step
    // yields a representable improvement, the fit is at float resolution.
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const std::vector<double> trial = {params[0] + step * d0,
                                         params[1] + step * d1};
      const double trial_ll = logistic_log_likelihood(records, trial, nullptr);
      if (trial_ll > ll) {
        params = trial;
        ll = trial_ll;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    result.iterations = iter + 1;
    result.log_likelihood_trace.push_back(ll);

    if (std::abs(params[0]) > options.parameter_bound ||
        std::abs(params[1]) > options.parameter_bound) {
      throw Separable("parameter magnitude exceeded " +
                      std::to_string(options.parameter_bound));
    }
    ll = logistic_log_likelihood(records, params, &gradient);
  }

  result.intercept = params[0];
  result.beta = params[1];
  result.log_likelihood = ll;
  return result;
}

}  // namespace copter
