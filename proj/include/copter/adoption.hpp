#pragma once

#include <span>
#include <utility>
#include <vector>

#include "copter/rng.hpp"

namespace copter {

// Working model of recommendation adoption: a logistic function of the
// acceptability odds with a per-person random intercept. Default
// coefficients are the binary-adoption fit (odds coefficient 1.780,
// intercept -1.065); the ordinal-adoption pair (2.386, -0.025) ships as an
// alternative configuration. The intercept spread is a configuration
// stand-in with no published value.
struct AdoptionModel {
  double beta_odds = 1.780;
  double intercept_mean = -1.065;
  double intercept_sd = 1.0;
  double odds_cap = 20.0;  // saturation guard for floor-inflated odds
};

// Drawn once per simulated person and reused for all their trips in a run.
struct PersonIntercept {
  double value = 0;
};

PersonIntercept sample_intercept(const AdoptionModel& model, Rng& rng);

// sigma(intercept + beta_odds * min(odds, odds_cap)).
double adoption_probability(const AdoptionModel& model,
                            PersonIntercept intercept, double odds);

struct LogisticFit {
  double intercept = 0;
  double beta = 0;
  double log_likelihood = 0;
  int iterations = 0;
  std::vector<double> log_likelihood_trace;
};

struct LogisticFitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;  // infinity norm
  double parameter_bound = 1e3;      // beyond this, declare separation
};

// Fixed-effects logistic MLE on (odds, adopted) records, by Newton's method
// with step halving. Stops at the gradient tolerance or once no step yields
// a representable log-likelihood improvement (whichever comes first).
// Throws AllSameOutcome or Separable.
LogisticFit fit_logistic(std::span<const std::pair<double, int>> records,
                         const LogisticFitOptions& options = {});

// Log-likelihood and gradient of the two-parameter model, exposed for
// gradient checking. params = {intercept, beta}.
double logistic_log_likelihood(std::span<const std::pair<double, int>> records,
                               const std::vector<double>& params,
                               std::vector<double>* gradient = nullptr);

}  // namespace copter
