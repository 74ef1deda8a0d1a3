#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "copter/errors.hpp"

namespace copter {

// Declared attribute and person-feature names for a choice model. Utility
// parameters are identified by fixing one reference alternative whose
// person-feature weights and constant are zero.
struct ChoiceSchema {
  std::vector<std::string> attribute_names;  // per-alternative x_i entries
  std::vector<std::string> feature_names;    // person f_p entries
  std::vector<std::string> alternatives;
  std::string reference;  // must be one of `alternatives`
};

struct ChoiceModel {
  ChoiceSchema schema;
  std::vector<double> gamma;  // shared attribute weights, schema order
  std::map<std::string, std::vector<double>> lambdas;  // non-reference alts
  std::map<std::string, double> constants;             // non-reference alts

  // gamma . x + lambda_alt . f + constant_alt
  double value(const std::vector<double>& attributes,
               const std::vector<double>& features,
               const std::string& alternative) const;
};

struct ChoiceAlternative {
  std::string name;
  std::vector<double> attributes;  // schema.attribute_names order
};

// Softmax over the alternatives' values; overflow-safe via max subtraction.
std::vector<double> probabilities(const ChoiceModel& model,
                                  const std::vector<ChoiceAlternative>& alts,
                                  const std::vector<double>& features);

struct ChoiceObservation {
  int chosen = 0;  // index into alternatives
  std::vector<ChoiceAlternative> alternatives;
  std::vector<double> features;
};

struct MnlFitOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // infinity norm of the mean-LL gradient
  double parameter_bound = 1e3;      // beyond this, declare separation
};

struct MnlFitResult {
  ChoiceModel model;
  double log_likelihood = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;  // per accepted iteration
};

// Maximum-likelihood fit by gradient ascent with backtracking line search.
// Throws EmptyDataset, Degenerate (perfect separation / no record offers a
// real choice), or SchemaMismatch.
MnlFitResult fit_mnl(const ChoiceSchema& schema,
                     const std::vector<ChoiceObservation>& data,
                     const MnlFitOptions& options = {});

// Log-likelihood and its gradient at a parameter vector, exposed for
// gradient checking. Parameter packing order: gamma, then per non-reference
// alternative (schema order, reference skipped): lambdas then constant.
int mnl_parameter_count(const ChoiceSchema& schema);
double mnl_log_likelihood(const ChoiceSchema& schema,
                          const std::vector<ChoiceObservation>& data,
                          const std::vector<double>& params,
                          std::vector<double>* gradient = nullptr);
ChoiceModel unpack_mnl_params(const ChoiceSchema& schema,
                              const std::vector<double>& params);

// Switching gain and the derived acceptability quantities for a recommended
// vs. usual alternative. Probabilities are floored at kProbabilityFloor so
// the ratio stays defined; odds == exp(delta) by construction.
struct Acceptability {
  double delta = 0;  // ln(pr_r / pr_u)
  double odds = 1;   // exp(delta)
  double prob = 0;   // pr_r
};

inline constexpr double kProbabilityFloor = 1e-6;

Acceptability acceptability(double pr_r, double pr_u);

// JSON (de)serialization: {schema, gamma, lambdas, constants, reference}.
inline constexpr int kChoiceFormatVersion = 1;
std::string choice_model_to_json(const ChoiceModel& model);
ChoiceModel choice_model_from_json(const std::string& text);
void save_choice_model(const ChoiceModel& model,
                       const std::filesystem::path& path);
ChoiceModel load_choice_model(const std::filesystem::path& path);

// Long-format CSV: one row per (case, alternative). Columns: case_id, alt,
// chosen (exactly one 1 per case), attribute columns prefixed `x_`, person
// feature columns prefixed `f_` (constant within a case).
struct ChoiceData {
  ChoiceSchema schema;  // reference left empty; fit options decide it
  std::vector<ChoiceObservation> observations;
};

ChoiceData load_choice_csv(const std::filesystem::path& path);

}  // namespace copter
