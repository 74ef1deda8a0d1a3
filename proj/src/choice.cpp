#include "copter/choice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "copter/csv.hpp"

namespace copter {

double ChoiceModel::value(const std::vector<double>& attributes,
                          const std::vector<double>& features,
                          const std::string& alternative) const {
  if (attributes.size() != schema.attribute_names.size()) {
    throw SchemaMismatch("attribute vector size " +
                         std::to_string(attributes.size()) + ", expected " +
                         std::to_string(schema.attribute_names.size()));
  }
  if (features.size() != schema.feature_names.size()) {
    throw SchemaMismatch("feature vector size " +
                         std::to_string(features.size()) + ", expected " +
                         std::to_string(schema.feature_names.size()));
  }
  if (std::find(schema.alternatives.begin(), schema.alternatives.end(),
                alternative) == schema.alternatives.end()) {
    throw SchemaMismatch("unknown alternative '" + alternative + "'");
  }
  for (double x : attributes) {
    if (!std::isfinite(x)) {
      throw SchemaMismatch("attribute values must be finite");
    }
  }
  double v = 0;
  for (std::size_t k = 0; k < attributes.size(); ++k) {
    v += gamma[k] * attributes[k];
  }
  const auto lam = lambdas.find(alternative);
  if (lam != lambdas.end()) {
    for (std::size_t l = 0; l < features.size(); ++l) {
      v += lam->second[l] * features[l];
    }
  }
  const auto c = constants.find(alternative);
  if (c != constants.end()) v += c->second;
  return v;
}

std::vector<double> probabilities(const ChoiceModel& model,
                                  const std::vector<ChoiceAlternative>& alts,
                                  const std::vector<double>& features) {
  if (alts.empty()) throw SchemaMismatch("at least one alternative required");
  std::vector<double> values;
  values.reserve(alts.size());
  for (const auto& alt : alts) {
    values.push_back(model.value(alt.attributes, features, alt.name));
  }
  const double max_value = *std::max_element(values.begin(), values.end());
  double total = 0;
  for (double& v : values) {
    v = std::exp(v - max_value);
    total += v;
  }
  for (double& v : values) v /= total;
  return values;
}

int mnl_parameter_count(const ChoiceSchema& schema) {
  const int n_alts = static_cast<int>(schema.alternatives.size());
  const int n_free = n_alts - 1;  // reference excluded
  return static_cast<int>(schema.attribute_names.size()) +
         n_free * (static_cast<int>(schema.feature_names.size()) + 1);
}

ChoiceModel unpack_mnl_params(const ChoiceSchema& schema,
                              const std::vector<double>& params) {
  ChoiceModel model;
  model.schema = schema;
  const std::size_t k = schema.attribute_names.size();
  const std::size_t l = schema.feature_names.size();
  model.gamma.assign(params.begin(), params.begin() + k);
  std::size_t offset = k;
  for (const auto& alt : schema.alternatives) {
    if (alt == schema.reference) continue;
    model.lambdas[alt] =
        std::vector<double>(params.begin() + offset, params.begin() + offset + l);
    offset += l;
    model.constants[alt] = params[offset++];
  }
  return model;
}

namespace {

// Per-alternative parameter block offsets for non-reference alternatives.
std::map<std::string, std::size_t> block_offsets(const ChoiceSchema& schema) {
  std::map<std::string, std::size_t> out;
  std::size_t offset = schema.attribute_names.size();
  for (const auto& alt : schema.alternatives) {
    if (alt == schema.reference) continue;
    out[alt] = offset;
    offset += schema.feature_names.size() + 1;
  }
  return out;
}

}  // namespace

double mnl_log_likelihood(const ChoiceSchema& schema,
                          const std::vector<ChoiceObservation>& data,
                          const std::vector<double>& params,
                          std::vector<double>* gradient) {
  const ChoiceModel model = unpack_mnl_params(schema, params);
  const auto offsets = block_offsets(schema);
  const std::size_t l = schema.feature_names.size();
  if (gradient) gradient->assign(params.size(), 0.0);

  double total = 0;
  for (const auto& record : data) {
    std::vector<double> probs =
        probabilities(model, record.alternatives, record.features);
    total += std::log(probs[record.chosen]);
    if (!gradient) continue;
    for (std::size_t j = 0; j < record.alternatives.size(); ++j) {
      const double indicator = static_cast<int>(j) == record.chosen ? 1.0 : 0.0;
      const double weight = indicator - probs[j];
      const auto& alt = record.alternatives[j];
      for (std::size_t a = 0; a < schema.attribute_names.size(); ++a) {
        (*gradient)[a] += weight * alt.attributes[a];
      }
      const auto block = offsets.find(alt.name);
      if (block != offsets.end()) {
        for (std::size_t f = 0; f < l; ++f) {
          (*gradient)[block->second + f] += weight * record.features[f];
        }
        (*gradient)[block->second + l] += weight;
      }
    }
  }
  return total;
}

MnlFitResult fit_mnl(const ChoiceSchema& schema,
                     const std::vector<ChoiceObservation>& data,
                     const MnlFitOptions& options) {
  if (data.empty()) throw EmptyDataset("no choice observations");
  if (schema.alternatives.size() < 2) {
    throw Degenerate("schema declares fewer than 2 alternatives");
  }
  bool any_real_choice = false;
  for (const auto& record : data) {
    if (record.chosen < 0 ||
        record.chosen >= static_cast<int>(record.alternatives.size())) {
      throw SchemaMismatch("chosen index out of range");
    }
    if (record.alternatives.size() >= 2) any_real_choice = true;
  }
  if (!any_real_choice) {
    throw Degenerate("every record has a single alternative");
  }

  const int n_params = mnl_parameter_count(schema);
  std::vector<double> params(n_params, 0.0);
  const double n = static_cast<double>(data.size());

  MnlFitResult result;
  std::vector<double> gradient;
  double ll = mnl_log_likelihood(schema, data, params, &gradient);
  result.log_likelihood_trace.push_back(ll);

  double step = 1.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double grad_norm = 0;
    for (double g : gradient) grad_norm = std::max(grad_norm, std::abs(g) / n);
    if (grad_norm < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Backtracking (Armijo) line search on the ascent direction.
    double grad_sq = 0;
    for (double g : gradient) grad_sq += g * g;
    std::vector<double> trial(params.size());
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        trial[i] = params[i] + step / n * gradient[i];
      }
      const double trial_ll = mnl_log_likelihood(schema, data, trial, nullptr);
      if (trial_ll >= ll + 1e-4 * (step / n) * grad_sq) {
        params = trial;
        ll = trial_ll;
        accepted = true;
        step *= 2.0;  // allow growth after a successful step
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;  // step underflow: at a stationary point
      break;
    }
    result.iterations = iter + 1;
    result.log_likelihood_trace.push_back(ll);

    for (double p : params) {
      if (std::abs(p) > options.parameter_bound) {
        throw Degenerate("parameter magnitude exceeded " +
                         std::to_string(options.parameter_bound) +
                         " (perfect separation?)");
      }
    }
    ll = mnl_log_likelihood(schema, data, params, &gradient);
  }

  result.model = unpack_mnl_params(schema, params);
  result.log_likelihood = ll;
  return result;
}

Acceptability acceptability(double pr_r, double pr_u) {
  if (pr_r < 0 || pr_r > 1 || pr_u < 0 || pr_u > 1) {
    throw InvariantViolation("acceptability: probabilities must be in [0, 1]");
  }
  Acceptability out;
  const double r = std::max(pr_r, kProbabilityFloor);
  const double u = std::max(pr_u, kProbabilityFloor);
  out.delta = std::log(r / u);
  out.odds = std::exp(out.delta);
  out.prob = pr_r;
  return out;
}

std::string choice_model_to_json(const ChoiceModel& model) {
  nlohmann::json j;
  j["format"] = "copter-choice";
  j["version"] = kChoiceFormatVersion;
  j["schema"]["attributes"] = model.schema.attribute_names;
  j["schema"]["features"] = model.schema.feature_names;
  j["schema"]["alternatives"] = model.schema.alternatives;
  j["reference"] = model.schema.reference;
  j["gamma"] = model.gamma;
  j["lambdas"] = model.lambdas;
  j["constants"] = model.constants;
  return j.dump(2) + "\n";
}

ChoiceModel choice_model_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "copter-choice") {
      throw ParseError(1, "not a choice model file");
    }
    if (j.at("version").get<int>() != kChoiceFormatVersion) {
      throw ParseError(1, "unsupported choice model version");
    }
    ChoiceModel model;
    model.schema.attribute_names =
        j.at("schema").at("attributes").get<std::vector<std::string>>();
    model.schema.feature_names =
        j.at("schema").at("features").get<std::vector<std::string>>();
    model.schema.alternatives =
        j.at("schema").at("alternatives").get<std::vector<std::string>>();
    model.schema.reference = j.at("reference").get<std::string>();
    model.gamma = j.at("gamma").get<std::vector<double>>();
    model.lambdas =
        j.at("lambdas").get<std::map<std::string, std::vector<double>>>();
    model.constants = j.at("constants").get<std::map<std::string, double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("choice model: ") + e.what());
  }
}

void save_choice_model(const ChoiceModel& model,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << choice_model_to_json(model);
}

ChoiceModel load_choice_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return choice_model_from_json(buf.str());
}

ChoiceData load_choice_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const int c_case = table.require_column("case_id");
  const int c_alt = table.require_column("alt");
  const int c_chosen = table.require_column("chosen");

  ChoiceData data;
  std::vector<int> attr_cols, feature_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name.rfind("x_", 0) == 0) {
      attr_cols.push_back(static_cast<int>(c));
      data.schema.attribute_names.push_back(name.substr(2));
    } else if (name.rfind("f_", 0) == 0) {
      feature_cols.push_back(static_cast<int>(c));
      data.schema.feature_names.push_back(name.substr(2));
    }
  }

  std::vector<std::string> alternative_names;
  std::string current_case;
  bool has_case = false;
  ChoiceObservation record;
  int chosen_count = 0;

  auto flush = [&](std::size_t line) {
    if (!has_case) return;
    if (chosen_count != 1) {
      throw ParseError(line, "case '" + current_case +
                                 "': exactly one chosen row required");
    }
    data.observations.push_back(std::move(record));
    record = {};
    chosen_count = 0;
  };

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    if (!has_case || row[c_case] != current_case) {
      flush(line);
      current_case = row[c_case];
      has_case = true;
      record.features.clear();
      for (int c : feature_cols) {
        record.features.push_back(parse_double_field(row[c], line, "feature"));
      }
    }
    ChoiceAlternative alt;
    alt.name = row[c_alt];
    if (std::find(alternative_names.begin(), alternative_names.end(), alt.name) ==
        alternative_names.end()) {
      alternative_names.push_back(alt.name);
    }
    for (int c : attr_cols) {
      alt.attributes.push_back(parse_double_field(row[c], line, "attribute"));
    }
    const long long chosen = parse_int_field(row[c_chosen], line, "chosen");
    if (chosen != 0 && chosen != 1) {
      throw ParseError(line, "chosen must be 0 or 1");
    }
    if (chosen == 1) {
      record.chosen = static_cast<int>(record.alternatives.size());
      ++chosen_count;
    }
    record.alternatives.push_back(std::move(alt));
  }
  flush(table.rows.empty() ? 1 : table.line_numbers.back());
  if (data.observations.empty()) throw EmptyDataset("no cases in file");

  std::sort(alternative_names.begin(), alternative_names.end());
  data.schema.alternatives = std::move(alternative_names);
  return data;
}

}  // namespace copter
