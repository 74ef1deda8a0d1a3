#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "copter/modes.hpp"
#include "copter/profile.hpp"

namespace copter {

// Canonical label spaces for the two prediction problems.
std::vector<std::string> mode_labels();      // 7 modes, alphabet order
std::vector<std::string> category_labels();  // 3 categories

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;            // label space, fixed order
  std::vector<std::vector<double>> rows;      // NaN marks a missing value
  std::vector<int> targets;                   // index into labels

  std::size_t size() const { return rows.size(); }
};

// Loads a trips CSV whose header is the TravelerProfile feature schema plus
// a `label` column holding a mode symbol or name. target == "category"
// collapses mode labels into the 3 categories.
Dataset load_trips_csv(const std::filesystem::path& path,
                       const std::string& target);

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0;    // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  int n_samples = 0;
  double impurity = 0;     // Gini at this node
  std::vector<double> class_counts;  // leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;  // index 0 is the root
};

struct ForestParams {
  int n_trees = 20;
  int max_depth = 30;
  int min_samples_split = 2;
};

struct ForestModel {
  ForestParams params;
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;
  std::vector<double> medians;  // per-feature imputation values
  std::uint64_t seed = 0;
  std::vector<Tree> trees;

  bool is_category_model() const;
};

// Bootstrap-aggregated CART trees with Gini best splits over ceil(sqrt(k))
// features sampled per node. Deterministic for a given seed.
ForestModel train_forest(const Dataset& data, const ForestParams& params,
                         std::uint64_t seed);

// Mean of the per-tree leaf class frequencies; sums to 1.
std::vector<double> predict_proba(const ForestModel& model,
                                  std::span<const double> features);
int predict_label(const ForestModel& model, std::span<const double> features);

enum class BaselineKind { MostFrequent, WeightedRandom };

std::vector<int> baseline_predict(const Dataset& data, BaselineKind kind,
                                  std::uint64_t seed);

struct F1Report {
  struct PerClass {
    std::string label;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    int support = 0;
  };
  std::vector<PerClass> classes;  // classes present in truth or predictions
  double weighted_f1 = 0;         // support-weighted mean
};

F1Report f1_scores(const std::vector<int>& predictions,
                   const std::vector<int>& truth,
                   const std::vector<std::string>& labels);

// Mean over trees of the total weighted impurity decrease per feature,
// normalized to sum 1 (all-zero when no tree ever splits).
std::vector<double> gini_importance(const ForestModel& model);

// Collapses a 7-mode probability vector into the 3 mode categories; passes
// through when the vector already lives in category space.
std::array<double, kNumCategories> category_probs(
    const std::vector<double>& probs, const std::vector<std::string>& labels);

// Versioned JSON (de)serialization.
inline constexpr int kForestFormatVersion = 1;
void save_forest(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

}  // namespace copter
