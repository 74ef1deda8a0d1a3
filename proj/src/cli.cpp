#include "copter/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "copter/config.hpp"
#include "copter/copter.hpp"
#include "copter/csv.hpp"
#include "copter/sim.hpp"
#include "copter/synthetic.hpp"

namespace copter {

namespace {

using nlohmann::json;

std::string version_string() {
  return "copter 0.1.0 (formats: graph-csv v1, forest-json v" +
         std::to_string(kForestFormatVersion) + ", choice-json v" +
         std::to_string(kChoiceFormatVersion) + ", report-json v1)";
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

json plan_to_json(const Plan& plan) {
  json steps = json::array();
  for (const PlanStep& step : plan.steps) {
    steps.push_back({{"edge", step.edge_id},
                     {"mode", mode_name(step.mode)},
                     {"start_s", step.start_s},
                     {"duration_s", step.duration_s},
                     {"distance_m", step.distance_m}});
  }
  json by_mode;
  for (const auto& [mode, distance] : plan.mode_distance_m) {
    by_mode[std::string(mode_name(mode))] = distance;
  }
  return {{"steps", steps},
          {"word", plan.word},
          {"depart_s", plan.depart_s},
          {"arrive_s", plan.arrive_s},
          {"duration_s", plan.duration_s()},
          {"distance_m", plan.distance_m},
          {"mode_distance_m", by_mode}};
}

json recommendation_to_json(const Recommendation& rec) {
  return {{"plan", plan_to_json(rec.plan)},
          {"language", rec.language},
          {"category", category_name(rec.category)},
          {"acceptability",
           {{"delta", rec.acceptability.delta},
            {"odds", rec.acceptability.odds},
            {"prob", rec.acceptability.prob}}},
          {"adoption_prob", rec.adoption_prob},
          {"saving_l", rec.saving_l},
          {"expected_saving_l", rec.expected_saving_l}};
}

TravelerProfile profile_from_json_value(const json& j) {
  TravelerProfile profile;
  std::vector<std::pair<std::string, double>> values;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "usual_mode") {
      const std::string name = it.value().get<std::string>();
      const auto mode = name.size() == 1 ? mode_from_symbol(name[0])
                                         : mode_from_name(name);
      if (!mode) throw SchemaMismatch("unknown usual_mode '" + name + "'");
      profile.usual_mode = *mode;
      continue;
    }
    values.push_back({it.key(), it.value().get<double>()});
  }
  const Mode usual = profile.usual_mode;
  profile = profile_from_values(values, usual);
  return profile;
}

TravelerProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(0, "profile '" + path + "': " + e.what());
  }
  return profile_from_json_value(j);
}

struct PlanArgs {
  std::string graph_dir;
  std::string from, to;
  int depart = 0, deadline = 0;
  std::string lang = "w*";
  std::string algo = "dijkstra";
  std::string out;
};

void cmd_plan(const PlanArgs& args) {
  const TransportGraph graph = load_graph(args.graph_dir);
  const Query query{args.from, args.to, args.depart, args.deadline};
  const LanguageElement language = make_language_element(args.lang);
  const SearchAlgorithm algorithm = args.algo == "astar"
                                        ? SearchAlgorithm::AStar
                                        : SearchAlgorithm::Dijkstra;
  const auto result = plan(graph, query, language.dfa, algorithm);
  json j;
  j["language"] = args.lang;
  j["found"] = result.has_value();
  if (result) j["plan"] = plan_to_json(*result);
  write_output(args.out, j.dump(2) + "\n");
}

struct FitChoiceArgs {
  std::string data;
  std::string out;
  std::string reference = "drive";
};

void cmd_fit_choice(const FitChoiceArgs& args) {
  ChoiceData data = load_choice_csv(args.data);
  data.schema.reference = args.reference;
  if (std::find(data.schema.alternatives.begin(),
                data.schema.alternatives.end(),
                data.schema.reference) == data.schema.alternatives.end()) {
    data.schema.reference = data.schema.alternatives.front();
  }
  const MnlFitResult fit = fit_mnl(data.schema, data.observations);
  log_message(LogLevel::Info,
              "fit-choice: log-likelihood " +
                  std::to_string(fit.log_likelihood) + " after " +
                  std::to_string(fit.iterations) + " iterations");
  save_choice_model(fit.model, args.out);
}

struct TrainForestArgs {
  std::string data;
  std::string target = "mode";
  std::uint64_t seed = 0;
  std::string out;
  int trees = 20;
  int depth = 30;
};

void cmd_train_forest(const TrainForestArgs& args) {
  const Dataset data = load_trips_csv(args.data, args.target);
  ForestParams params;
  params.n_trees = args.trees;
  params.max_depth = args.depth;
  const ForestModel model = train_forest(data, params, args.seed);
  save_forest(model, args.out);
}

struct EvalForestArgs {
  std::string model;
  std::string data;
  std::string f1_out;
  std::string importance_out;
  std::uint64_t seed = 0;
};

void cmd_eval_forest(const EvalForestArgs& args) {
  const ForestModel model = load_forest(args.model);
  const std::string target =
      model.is_category_model() ? "category" : "mode";
  const Dataset data = load_trips_csv(args.data, target);

  std::vector<int> predictions;
  predictions.reserve(data.size());
  for (const auto& row : data.rows) {
    predictions.push_back(predict_label(model, row));
  }
  const F1Report forest_f1 = f1_scores(predictions, data.targets, data.labels);
  const F1Report mf_f1 = f1_scores(
      baseline_predict(data, BaselineKind::MostFrequent, args.seed),
      data.targets, data.labels);
  const F1Report wr_f1 = f1_scores(
      baseline_predict(data, BaselineKind::WeightedRandom, args.seed),
      data.targets, data.labels);

  std::string f1_csv = "label,most_frequent,weighted_random,forest,support\n";
  for (std::size_t i = 0; i < forest_f1.classes.size(); ++i) {
    const auto& pc = forest_f1.classes[i];
    auto lookup = [&](const F1Report& r) {
      for (const auto& other : r.classes) {
        if (other.label == pc.label) return other.f1;
      }
      return 0.0;
    };
    f1_csv += pc.label + ',' + format_double(lookup(mf_f1)) + ',' +
              format_double(lookup(wr_f1)) + ',' + format_double(pc.f1) + ',' +
              std::to_string(pc.support) + '\n';
  }
  f1_csv += "total," + format_double(mf_f1.weighted_f1) + ',' +
            format_double(wr_f1.weighted_f1) + ',' +
            format_double(forest_f1.weighted_f1) + ",\n";
  write_output(args.f1_out, f1_csv);

  const std::vector<double> importance = gini_importance(model);
  std::string imp_csv = "feature,importance\n";
  for (std::size_t i = 0; i < importance.size(); ++i) {
    imp_csv += model.feature_names[i] + ',' + format_double(importance[i]) +
               '\n';
  }
  write_output(args.importance_out, imp_csv);
}

struct AcceptabilityArgs {
  double pr_r = -1;
  double pr_u = -1;
  std::string model;
  std::string profile;
  std::string category;
  std::string out;
};

void cmd_acceptability(const AcceptabilityArgs& args) {
  double pr_r = args.pr_r;
  double pr_u = args.pr_u;
  json extra;
  if (!args.model.empty()) {
    const ForestModel forest = load_forest(args.model);
    const TravelerProfile profile = load_profile(args.profile);
    const auto category = category_from_name(args.category);
    if (!category) {
      throw SchemaMismatch("unknown category '" + args.category + "'");
    }
    const auto probs = predict_proba(forest, profile.features());
    const auto cats = category_probs(probs, forest.labels);
    pr_r = cats[static_cast<int>(*category)];
    pr_u = cats[static_cast<int>(ModeCategory::Motorized)];
    extra["category_probs"] = {
        {category_name(ModeCategory::NonMotorized), cats[0]},
        {category_name(ModeCategory::PublicTransit), cats[1]},
        {category_name(ModeCategory::Motorized), cats[2]}};
  }
  if (pr_r < 0 || pr_u < 0) {
    throw ConfigError(
        "acceptability: provide --pr-r/--pr-u, or --model/--profile/"
        "--category");
  }
  const Acceptability result = acceptability(pr_r, pr_u);
  json j = {{"pr_r", pr_r},
            {"pr_u", pr_u},
            {"delta", result.delta},
            {"odds", result.odds},
            {"prob", result.prob}};
  if (!extra.empty()) j.update(extra);
  write_output(args.out, j.dump(2) + "\n");
}

struct RecommendArgs {
  std::string graph_dir;
  std::string models_dir;
  std::string profile;
  std::string from, to;
  int depart = 0, deadline = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string config_file;
  std::vector<std::string> overrides;
  std::string languages_file;
  std::string out;
};

void cmd_recommend(const RecommendArgs& args) {
  AppConfig config;
  const auto models_config =
      std::filesystem::path(args.models_dir) / "config.json";
  if (std::filesystem::exists(models_config)) {
    apply_config_file(config, models_config);
  }
  if (!args.config_file.empty()) apply_config_file(config, args.config_file);
  for (const auto& entry : args.overrides) {
    apply_config_override(config, entry);
  }

  const TransportGraph graph = load_graph(args.graph_dir);
  const ForestModel forest =
      load_forest(std::filesystem::path(args.models_dir) / "forest.json");
  const TravelerProfile profile = load_profile(args.profile);
  const Query query{args.from, args.to, args.depart, args.deadline};

  PersonIntercept intercept{config.adoption.intercept_mean};
  if (config.adoption.intercept_sd > 0) {
    if (!args.seed_set) {
      throw ConfigError(
          "recommend: --seed is required when adoption.intercept_sd > 0");
    }
    Rng rng(args.seed);
    intercept = sample_intercept(config.adoption, rng);
  }

  RecommendOptions options;
  options.use_mode_probs = config.use_mode_probs;
  options.rule = config.rule;
  if (!args.languages_file.empty()) {
    options.language_override = load_language_file(args.languages_file);
  }

  const RecommendResult result =
      recommend_all(graph, query, profile, forest, config.adoption,
                    config.fuel, intercept, options);

  json j;
  if (args.seed_set) j["seed"] = args.seed;
  j["intercept"] = intercept.value;
  j["found"] = result.best.has_value();
  if (result.baseline) j["baseline"] = plan_to_json(*result.baseline);
  if (result.best) {
    j["recommendation"] = recommendation_to_json(*result.best);
  } else {
    j["reason"] = result.no_alternative_reason;
  }
  json candidates = json::array();
  for (const auto& rec : result.candidates) {
    candidates.push_back(recommendation_to_json(rec));
  }
  j["candidates"] = candidates;
  write_output(args.out, j.dump(2) + "\n");
}

struct SimulateArgs {
  std::string scenario;
  std::string out;
};

void cmd_simulate(const SimulateArgs& args) {
  const Scenario scenario = load_scenario(args.scenario);
  log_message(LogLevel::Info,
              "simulate: " + std::to_string(scenario.population.size()) +
                  " travelers, " + std::to_string(scenario.n_trials) +
                  " trials per condition");
  const SimReport report = run_experiment(scenario);
  write_output(args.out, report_to_json(report).dump(2) + "\n");
}

struct ReportArgs {
  std::string in;
  std::string format = "table";
  std::string out;
};

void cmd_report(const ReportArgs& args) {
  std::ifstream in(args.in);
  if (!in) throw Error("cannot open report '" + args.in + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(0, "report '" + args.in + "': " + e.what());
  }
  if (j.value("format", "") != "copter-report") {
    throw ParseError(0, "'" + args.in + "' is not a report file");
  }
  write_output(args.out, args.format == "csv" ? render_report_csv(j)
                                              : render_report_table(j));
}

struct GenGridArgs {
  int n = 8;
  double spacing_m = 500;
  std::string out;
};

void cmd_gen_grid(const GenGridArgs& args) {
  GridSpec spec;
  spec.n = args.n;
  spec.spacing_m = args.spacing_m;
  save_graph(make_grid_network(spec), args.out);
}

struct GenTripsArgs {
  int n = 5000;
  std::uint64_t seed = 0;
  double noise = 0.10;
  std::string out;
};

void cmd_gen_trips(const GenTripsArgs& args) {
  SyntheticTripsSpec spec;
  spec.n = args.n;
  spec.label_noise = args.noise;
  write_trips_csv(synthetic_trips(spec, args.seed), args.out);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Multi-modal acceptable-planning toolkit"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan_cmd =
      app.add_subcommand("plan", "Mode-language-constrained earliest arrival");
  plan_cmd->add_option("--graph", plan_args.graph_dir, "Graph CSV directory")
      ->required();
  plan_cmd->add_option("--from", plan_args.from, "Origin node id")->required();
  plan_cmd->add_option("--to", plan_args.to, "Destination node id")
      ->required();
  plan_cmd->add_option("--depart", plan_args.depart, "Start time (s)")
      ->required();
  plan_cmd->add_option("--deadline", plan_args.deadline, "Deadline (s)")
      ->required();
  plan_cmd->add_option("--lang", plan_args.lang, "Mode regex (default w*)");
  plan_cmd->add_option("--algo", plan_args.algo, "dijkstra|astar")
      ->check(CLI::IsMember({"dijkstra", "astar"}));
  plan_cmd->add_option("--out", plan_args.out, "Output file (default stdout)");

  FitChoiceArgs fit_args;
  auto* fit_cmd =
      app.add_subcommand("fit-choice", "Fit a multinomial logit choice model");
  fit_cmd->add_option("--data", fit_args.data, "Long-format choice CSV")
      ->required();
  fit_cmd->add_option("--out", fit_args.out, "Model JSON path")->required();
  fit_cmd->add_option("--reference", fit_args.reference,
                      "Reference alternative (default drive)");

  TrainForestArgs train_args;
  auto* train_cmd =
      app.add_subcommand("train-forest", "Train the mode-likelihood forest");
  train_cmd->add_option("--data", train_args.data, "Trips CSV")->required();
  train_cmd->add_option("--target", train_args.target, "mode|category")
      ->check(CLI::IsMember({"mode", "category"}));
  train_cmd->add_option("--seed", train_args.seed, "Training seed")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Model JSON path")
      ->required();
  train_cmd->add_option("--trees", train_args.trees, "Trees (default 20)");
  train_cmd->add_option("--depth", train_args.depth, "Max depth (default 30)");

  EvalForestArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "eval-forest", "F1 vs. baselines and Gini feature importances");
  eval_cmd->add_option("--model", eval_args.model, "Forest JSON")->required();
  eval_cmd->add_option("--data", eval_args.data, "Trips CSV")->required();
  eval_cmd->add_option("--f1-out", eval_args.f1_out,
                       "F1 report CSV (default stdout)");
  eval_cmd->add_option("--importance-out", eval_args.importance_out,
                       "Importance CSV (default stdout)");
  eval_cmd->add_option("--seed", eval_args.seed,
                       "Seed for the weighted-random baseline");

  AcceptabilityArgs acc_args;
  auto* acc_cmd = app.add_subcommand(
      "acceptability", "Switching gain, odds and probability");
  acc_cmd->add_option("--pr-r", acc_args.pr_r, "Recommended-mode probability");
  acc_cmd->add_option("--pr-u", acc_args.pr_u, "Usual-mode probability");
  acc_cmd->add_option("--model", acc_args.model, "Forest JSON");
  acc_cmd->add_option("--profile", acc_args.profile, "Profile JSON");
  acc_cmd->add_option("--category", acc_args.category,
                      "Recommended category name");
  acc_cmd->add_option("--out", acc_args.out, "Output file (default stdout)");

  RecommendArgs rec_args;
  auto* rec_cmd = app.add_subcommand(
      "recommend", "Acceptable alternative with maximal expected saving");
  rec_cmd->add_option("--graph", rec_args.graph_dir, "Graph CSV directory")
      ->required();
  rec_cmd->add_option("--models", rec_args.models_dir,
                      "Directory with forest.json (and optional config.json)")
      ->required();
  rec_cmd->add_option("--profile", rec_args.profile, "Profile JSON")
      ->required();
  rec_cmd->add_option("--from", rec_args.from, "Origin node id")->required();
  rec_cmd->add_option("--to", rec_args.to, "Destination node id")->required();
  rec_cmd->add_option("--depart", rec_args.depart, "Start time (s)")
      ->required();
  rec_cmd->add_option("--deadline", rec_args.deadline, "Deadline (s)")
      ->required();
  auto* seed_opt =
      rec_cmd->add_option("--seed", rec_args.seed, "Intercept sampling seed");
  rec_cmd->add_option("--config", rec_args.config_file, "Config JSON");
  rec_cmd->add_option("--set", rec_args.overrides,
                      "Config override key=value (repeatable)");
  rec_cmd->add_option("--languages", rec_args.languages_file,
                      "Language override file (one regex per line)");
  rec_cmd->add_option("--out", rec_args.out, "Output file (default stdout)");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo baseline-vs-influence experiment");
  sim_cmd->add_option("--scenario", sim_args.scenario, "scenario.json")
      ->required();
  sim_cmd->add_option("--out", sim_args.out, "Report JSON path")->required();

  ReportArgs report_args;
  auto* report_cmd =
      app.add_subcommand("report", "Render a report JSON as a table or CSV");
  report_cmd->add_option("--in", report_args.in, "Report JSON")->required();
  report_cmd->add_option("--format", report_args.format, "table|csv")
      ->check(CLI::IsMember({"table", "csv"}));
  report_cmd->add_option("--out", report_args.out,
                         "Output file (default stdout)");

  GenGridArgs grid_args;
  auto* grid_cmd = app.add_subcommand(
      "gen-grid", "Write the synthetic grid network as graph CSVs");
  grid_cmd->add_option("--n", grid_args.n, "Grid dimension (default 8)");
  grid_cmd->add_option("--spacing", grid_args.spacing_m,
                       "Link length in meters (default 500)");
  grid_cmd->add_option("--out", grid_args.out, "Output directory")->required();

  GenTripsArgs trips_args;
  auto* trips_cmd = app.add_subcommand(
      "gen-trips", "Write a synthetic trips CSV for training and demos");
  trips_cmd->add_option("--n", trips_args.n, "Rows (default 5000)");
  trips_cmd->add_option("--seed", trips_args.seed, "Sampling seed")
      ->required();
  trips_cmd->add_option("--noise", trips_args.noise,
                        "Label noise fraction (default 0.10)");
  trips_cmd->add_option("--out", trips_args.out, "Output CSV path")
      ->required();

  try {
    app.parse(argc, argv);
    rec_args.seed_set = seed_opt->count() > 0;

    if (plan_cmd->parsed()) cmd_plan(plan_args);
    else if (fit_cmd->parsed()) cmd_fit_choice(fit_args);
    else if (train_cmd->parsed()) cmd_train_forest(train_args);
    else if (eval_cmd->parsed()) cmd_eval_forest(eval_args);
    else if (acc_cmd->parsed()) cmd_acceptability(acc_args);
    else if (rec_cmd->parsed()) cmd_recommend(rec_args);
    else if (sim_cmd->parsed()) cmd_simulate(sim_args);
    else if (report_cmd->parsed()) cmd_report(report_args);
    else if (grid_cmd->parsed()) cmd_gen_grid(grid_args);
    else if (trips_cmd->parsed()) cmd_gen_trips(trips_args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    log_message(LogLevel::Error, e.what());
    return 2;
  } catch (const json::exception& e) {
    log_message(LogLevel::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log_message(LogLevel::Error, e.what());
    return 2;
  }
  return 0;
}

}  // namespace copter
