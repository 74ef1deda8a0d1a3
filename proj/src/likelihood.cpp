#include "copter/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "copter/csv.hpp"
#include "copter/errors.hpp"
#include "copter/rng.hpp"

namespace copter {

std::vector<std::string> mode_labels() {
  std::vector<std::string> out;
  for (Mode m : kAllModes) out.emplace_back(mode_name(m));
  return out;
}

std::vector<std::string> category_labels() {
  return {std::string(category_name(ModeCategory::NonMotorized)),
          std::string(category_name(ModeCategory::PublicTransit)),
          std::string(category_name(ModeCategory::Motorized))};
}

bool ForestModel::is_category_model() const {
  return labels == category_labels();
}

Dataset load_trips_csv(const std::filesystem::path& path,
                       const std::string& target) {
  if (target != "mode" && target != "category") {
    throw SchemaMismatch("target must be 'mode' or 'category'");
  }
  const CsvTable table = read_csv(path);
  const int c_label = table.require_column("label");
  std::vector<int> feature_cols;
  Dataset data;
  for (const char* name : kProfileFeatureNames) {
    feature_cols.push_back(table.require_column(name));
    data.feature_names.emplace_back(name);
  }
  data.labels = target == "mode" ? mode_labels() : category_labels();

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    std::vector<double> features;
    features.reserve(feature_cols.size());
    for (int c : feature_cols) {
      const std::string& field = row[c];
      features.push_back(field.empty()
                             ? std::nan("")
                             : parse_double_field(field, line, "feature"));
    }
    const std::string& label_field = row[c_label];
    std::optional<Mode> mode = label_field.size() == 1
                                   ? mode_from_symbol(label_field[0])
                                   : mode_from_name(label_field);
    if (!mode) throw ParseError(line, "unknown label '" + label_field + "'");
    int target_index;
    if (target == "mode") {
      target_index = static_cast<int>(*mode);
    } else {
      target_index = static_cast<int>(category_of(*mode));
    }
    data.rows.push_back(std::move(features));
    data.targets.push_back(target_index);
  }
  if (data.rows.empty()) throw EmptyDataset("no rows in '" + path.string() + "'");
  return data;
}

namespace {

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0;
  double sum_sq = 0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct TreeBuilder {
  const std::vector<std::vector<double>>& rows;  // imputed
  const std::vector<int>& targets;
  int n_labels;
  const ForestParams& params;
  int n_subsample_features;
  Rng& rng;
  Tree tree;

  int build(std::vector<int>& samples, int depth) {
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::vector<double> counts(n_labels, 0.0);
    for (int s : samples) counts[targets[s]] += 1.0;
    const double n = static_cast<double>(samples.size());
    const double impurity = gini(counts, n);

    tree.nodes[node_index].n_samples = static_cast<int>(samples.size());
    tree.nodes[node_index].impurity = impurity;

    const bool can_split = depth < params.max_depth &&
                           static_cast<int>(samples.size()) >=
                               params.min_samples_split &&
                           impurity > 0;
    if (!can_split) {
      tree.nodes[node_index].class_counts = std::move(counts);
      return node_index;
    }

    // Sample a feature subset (partial Fisher-Yates), then scan in
    // ascending feature order so equal-gain ties resolve to the lowest
    // feature index and lowest threshold.
    const int k = static_cast<int>(rows[0].size());
    std::vector<int> pool(k);
    for (int i = 0; i < k; ++i) pool[i] = i;
    for (int i = 0; i < n_subsample_features; ++i) {
      const int j = i + static_cast<int>(rng.index(k - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<int> features(pool.begin(), pool.begin() + n_subsample_features);
    std::sort(features.begin(), features.end());

    double best_gain = 0;
    int best_feature = -1;
    double best_threshold = 0;
    std::vector<std::pair<double, int>> ordered;
    for (int f : features) {
      ordered.clear();
      ordered.reserve(samples.size());
      for (int s : samples) ordered.push_back({rows[s][f], targets[s]});
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<double> left_counts(n_labels, 0.0);
      std::vector<double> right_counts = counts;
      for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        left_counts[ordered[i].second] += 1.0;
        right_counts[ordered[i].second] -= 1.0;
        if (ordered[i].first == ordered[i + 1].first) continue;
        const double n_left = static_cast<double>(i + 1);
        const double n_right = n - n_left;
        const double gain = impurity - (n_left / n) * gini(left_counts, n_left) -
                            (n_right / n) * gini(right_counts, n_right);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[node_index].class_counts = std::move(counts);
      return node_index;
    }

    std::vector<int> left, right;
    for (int s : samples) {
      if (rows[s][best_feature] <= best_threshold) {
        left.push_back(s);
      } else {
        right.push_back(s);
      }
    }
    if (left.empty() || right.empty()) {  // all values equal after all
      tree.nodes[node_index].class_counts = std::move(counts);
      return node_index;
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[node_index].feature = best_feature;
    tree.nodes[node_index].threshold = best_threshold;
    const int left_index = build(left, depth + 1);
    tree.nodes[node_index].left = left_index;
    const int right_index = build(right, depth + 1);
    tree.nodes[node_index].right = right_index;
    return node_index;
  }
};

const TreeNode& descend(const Tree& tree, std::span<const double> features) {
  const TreeNode* node = &tree.nodes[0];
  while (node->feature >= 0) {
    node = features[node->feature] <= node->threshold
               ? &tree.nodes[node->left]
               : &tree.nodes[node->right];
  }
  return *node;
}

std::vector<double> impute(const ForestModel& model,
                           std::span<const double> features) {
  if (features.size() != model.feature_names.size()) {
    throw SchemaMismatch("feature vector size " +
                         std::to_string(features.size()) + ", expected " +
                         std::to_string(model.feature_names.size()));
  }
  std::vector<double> out(features.begin(), features.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::isnan(out[i])) out[i] = model.medians[i];
  }
  return out;
}

}  // namespace

ForestModel train_forest(const Dataset& data, const ForestParams& params,
                         std::uint64_t seed) {
  if (data.rows.empty()) throw EmptyDataset("empty training dataset");
  if (params.n_trees < 1 || params.max_depth < 1) {
    throw InvariantViolation("forest params: n_trees and max_depth must be >= 1");
  }
  const std::size_t n = data.rows.size();
  const std::size_t k = data.feature_names.size();

  ForestModel model;
  model.params = params;
  model.feature_names = data.feature_names;
  model.labels = data.labels;
  model.seed = seed;

  model.medians.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<double> values;
    values.reserve(n);
    for (const auto& row : data.rows) {
      if (!std::isnan(row[f])) values.push_back(row[f]);
    }
    model.medians[f] = median_of(std::move(values));
  }

  std::vector<std::vector<double>> imputed = data.rows;
  for (auto& row : imputed) {
    for (std::size_t f = 0; f < k; ++f) {
      if (std::isnan(row[f])) row[f] = model.medians[f];
    }
  }

  const int n_subsample =
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  model.trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> bootstrap(n);
    for (std::size_t i = 0; i < n; ++i) {
      bootstrap[i] = static_cast<int>(rng.index(n));
    }
    TreeBuilder builder{imputed, data.targets,
                        static_cast<int>(data.labels.size()), params,
                        n_subsample, rng, {}};
    builder.build(bootstrap, 0);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

std::vector<double> predict_proba(const ForestModel& model,
                                  std::span<const double> features) {
  const std::vector<double> x = impute(model, features);
  std::vector<double> probs(model.labels.size(), 0.0);
  for (const Tree& tree : model.trees) {
    const TreeNode& leaf = descend(tree, x);
    double total = 0;
    for (double c : leaf.class_counts) total += c;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      probs[i] += leaf.class_counts[i] / total;
    }
  }
  for (double& p : probs) p /= static_cast<double>(model.trees.size());
  return probs;
}

int predict_label(const ForestModel& model, std::span<const double> features) {
  const auto probs = predict_proba(model, features);
  return static_cast<int>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::vector<int> baseline_predict(const Dataset& data, BaselineKind kind,
                                  std::uint64_t seed) {
  if (data.rows.empty()) throw EmptyDataset("empty dataset");
  std::vector<double> counts(data.labels.size(), 0.0);
  for (int t : data.targets) counts[t] += 1.0;

  std::vector<int> out(data.size());
  if (kind == BaselineKind::MostFrequent) {
    int best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
      // ties: lexicographically smaller label wins
      if (counts[i] > counts[best] ||
          (counts[i] == counts[best] && data.labels[i] < data.labels[best])) {
        best = static_cast<int>(i);
      }
    }
    std::fill(out.begin(), out.end(), best);
    return out;
  }

  // weighted_random: i.i.d. draws from the empirical label frequencies
  std::vector<double> cumulative(counts.size(), 0.0);
  double total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    cumulative[i] = total;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = rng.uniform() * total;
    out[i] = static_cast<int>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    if (out[i] >= static_cast<int>(counts.size())) {
      out[i] = static_cast<int>(counts.size()) - 1;
    }
  }
  return out;
}

F1Report f1_scores(const std::vector<int>& predictions,
                   const std::vector<int>& truth,
                   const std::vector<std::string>& labels) {
  if (predictions.size() != truth.size()) {
    throw LengthMismatch("predictions and truth differ in length");
  }
  const std::size_t n_labels = labels.size();
  std::vector<int> tp(n_labels, 0), fp(n_labels, 0), fn(n_labels, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predictions[i] == truth[i]) {
      ++tp[truth[i]];
    } else {
      ++fp[predictions[i]];
      ++fn[truth[i]];
    }
  }

  F1Report report;
  double weighted_sum = 0;
  int total_support = 0;
  for (std::size_t c = 0; c < n_labels; ++c) {
    const int support = tp[c] + fn[c];
    if (support == 0 && fp[c] == 0) continue;  // absent in truth and preds
    F1Report::PerClass pc;
    pc.label = labels[c];
    pc.support = support;
    pc.precision = tp[c] + fp[c] > 0
                       ? static_cast<double>(tp[c]) / (tp[c] + fp[c])
                       : 0.0;
    pc.recall = support > 0 ? static_cast<double>(tp[c]) / support : 0.0;
    pc.f1 = pc.precision + pc.recall > 0
                ? 2 * pc.precision * pc.recall / (pc.precision + pc.recall)
                : 0.0;
    report.classes.push_back(pc);
    weighted_sum += pc.f1 * support;
    total_support += support;
  }
  report.weighted_f1 = total_support > 0 ? weighted_sum / total_support : 0.0;
  return report;
}

std::vector<double> gini_importance(const ForestModel& model) {
  const std::size_t k = model.feature_names.size();
  std::vector<double> importance(k, 0.0);
  for (const Tree& tree : model.trees) {
    if (tree.nodes.empty()) continue;
    const double n_root = tree.nodes[0].n_samples;
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) continue;
      const TreeNode& left = tree.nodes[node.left];
      const TreeNode& right = tree.nodes[node.right];
      const double n = node.n_samples;
      const double decrease =
          node.impurity - (left.n_samples / n) * left.impurity -
          (right.n_samples / n) * right.impurity;
      importance[node.feature] += (n / n_root) * decrease;
    }
  }
  for (double& v : importance) v /= static_cast<double>(model.trees.size());
  double total = 0;
  for (double v : importance) total += v;
  if (total > 0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

std::array<double, kNumCategories> category_probs(
    const std::vector<double>& probs, const std::vector<std::string>& labels) {
  std::array<double, kNumCategories> out = {0, 0, 0};
  if (labels == category_labels()) {
    for (int i = 0; i < kNumCategories; ++i) out[i] = probs[i];
    return out;
  }
  if (labels != mode_labels()) {
    throw SchemaMismatch("unknown label space for category aggregation");
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto category = category_of(static_cast<Mode>(i));
    out[static_cast<int>(category)] += probs[i];
  }
  return out;
}

namespace {

using nlohmann::json;

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const TreeNode& node : tree.nodes) {
    json j;
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["left"] = node.left;
    j["right"] = node.right;
    j["n"] = node.n_samples;
    j["impurity"] = node.impurity;
    if (node.feature < 0) j["counts"] = node.class_counts;
    nodes.push_back(std::move(j));
  }
  return nodes;
}

Tree tree_from_json(const json& nodes) {
  Tree tree;
  for (const auto& j : nodes) {
    TreeNode node;
    node.feature = j.at("feature").get<int>();
    node.threshold = j.at("threshold").get<double>();
    node.left = j.at("left").get<int>();
    node.right = j.at("right").get<int>();
    node.n_samples = j.at("n").get<int>();
    node.impurity = j.at("impurity").get<double>();
    if (node.feature < 0) {
      node.class_counts = j.at("counts").get<std::vector<double>>();
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

}  // namespace

std::string forest_to_json(const ForestModel& model) {
  json j;
  j["format"] = "copter-forest";
  j["version"] = kForestFormatVersion;
  j["n_trees"] = model.params.n_trees;
  j["max_depth"] = model.params.max_depth;
  j["min_samples_split"] = model.params.min_samples_split;
  j["features"] = model.feature_names;
  j["labels"] = model.labels;
  j["medians"] = model.medians;
  j["seed"] = model.seed;
  json trees = json::array();
  for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
  j["trees"] = std::move(trees);
  return j.dump(2) + "\n";
}

ForestModel forest_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.value("format", "") != "copter-forest") {
      throw ParseError(1, "not a forest model file");
    }
    if (j.at("version").get<int>() != kForestFormatVersion) {
      throw ParseError(1, "unsupported forest model version");
    }
    ForestModel model;
    model.params.n_trees = j.at("n_trees").get<int>();
    model.params.max_depth = j.at("max_depth").get<int>();
    model.params.min_samples_split = j.at("min_samples_split").get<int>();
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.medians = j.at("medians").get<std::vector<double>>();
    model.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tree : j.at("trees")) {
      model.trees.push_back(tree_from_json(tree));
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("forest model: ") + e.what());
  }
}

void save_forest(const ForestModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << forest_to_json(model);
}

ForestModel load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return forest_from_json(buf.str());
}

}  // namespace copter
