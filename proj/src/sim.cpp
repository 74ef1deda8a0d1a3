#include "copter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "copter/csv.hpp"

namespace copter {

namespace {

std::string grid_node_id(int row, int col) {
  return "n" + std::to_string(row) + "_" + std::to_string(col);
}

std::vector<int> default_bus_rows(int n) {
  std::vector<int> rows;
  for (int r = 1; r < n; r += 3) rows.push_back(r);
  return rows;
}

std::vector<int> default_subway_cols(int n) {
  return {n / 2};
}

}  // namespace

TransportGraph make_grid_network(const GridSpec& spec) {
  if (spec.n < 2) throw InvariantViolation("grid: n must be >= 2");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<Schedule> schedules;

  const double dlat = spec.spacing_m / 111320.0;
  const double dlon =
      spec.spacing_m /
      (111320.0 * std::cos(spec.origin_lat * 3.14159265358979323846 / 180.0));

  for (int r = 0; r < spec.n; ++r) {
    for (int c = 0; c < spec.n; ++c) {
      nodes.push_back({grid_node_id(r, c), spec.origin_lat + r * dlat,
                       spec.origin_lon + c * dlon});
    }
  }

  auto add_two_way = [&](char prefix, Mode mode, double speed, int r1, int c1,
                         int r2, int c2) {
    for (int dir = 0; dir < 2; ++dir) {
      const std::string from = dir ? grid_node_id(r2, c2) : grid_node_id(r1, c1);
      const std::string to = dir ? grid_node_id(r1, c1) : grid_node_id(r2, c2);
      Edge e;
      e.id = std::string(1, prefix) + ":" + from + ":" + to;
      e.from = from;
      e.to = to;
      e.mode = mode;
      e.length_m = spec.spacing_m;
      e.traversal = FixedSpeed{speed};
      if (mode == Mode::Drive) e.capacity_vph = spec.drive_capacity_vph;
      edges.push_back(std::move(e));
    }
  };

  for (int r = 0; r < spec.n; ++r) {
    for (int c = 0; c < spec.n; ++c) {
      if (c + 1 < spec.n) {
        add_two_way('d', Mode::Drive, spec.drive_speed_mps, r, c, r, c + 1);
        add_two_way('w', Mode::Walk, spec.walk_speed_mps, r, c, r, c + 1);
      }
      if (r + 1 < spec.n) {
        add_two_way('d', Mode::Drive, spec.drive_speed_mps, r, c, r + 1, c);
        add_two_way('w', Mode::Walk, spec.walk_speed_mps, r, c, r + 1, c);
      }
    }
  }

  // A transit line is a chain of scheduled hops. Hop k's departures are the
  // line's departures shifted by k rides, so a single vehicle's timetable is
  // consistent along the line.
  auto add_line = [&](const std::string& line_id, Mode mode,
                      const std::vector<std::pair<int, int>>& stops,
                      int headway_s, double speed, int dwell_s) {
    const int ride_time =
        static_cast<int>(std::ceil(spec.spacing_m / speed)) + dwell_s;
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
      for (int dir = 0; dir < 2; ++dir) {
        const auto& a = dir ? stops[k + 1] : stops[k];
        const auto& b = dir ? stops[k] : stops[k + 1];
        const std::string suffix =
            ":" + std::to_string(k) + (dir ? ":rev" : ":fwd");
        Schedule s;
        s.id = line_id + suffix;
        s.ride_time_s = ride_time;
        const int hop_index =
            dir ? static_cast<int>(stops.size()) - 2 - static_cast<int>(k)
                : static_cast<int>(k);
        for (int t = spec.service_start_s + hop_index * ride_time;
             t < spec.service_end_s; t += headway_s) {
          s.departures.push_back(t);
        }
        if (s.departures.empty()) continue;
        schedules.push_back(s);
        Edge e;
        e.id = line_id + suffix;
        e.from = grid_node_id(a.first, a.second);
        e.to = grid_node_id(b.first, b.second);
        e.mode = mode;
        e.length_m = spec.spacing_m;
        e.traversal = ScheduledRef{s.id};
        edges.push_back(std::move(e));
      }
    }
  };

  const std::vector<int> bus_rows =
      spec.bus_rows ? *spec.bus_rows : default_bus_rows(spec.n);
  for (int r : bus_rows) {
    if (r < 0 || r >= spec.n) throw InvariantViolation("grid: bus row out of range");
    std::vector<std::pair<int, int>> stops;
    for (int c = 0; c < spec.n; ++c) stops.push_back({r, c});
    add_line("b:row" + std::to_string(r), Mode::Bus, stops, spec.bus_headway_s,
             spec.bus_speed_mps, spec.bus_dwell_s);
  }
  const std::vector<int> subway_cols =
      spec.subway_cols ? *spec.subway_cols : default_subway_cols(spec.n);
  for (int c : subway_cols) {
    if (c < 0 || c >= spec.n) throw InvariantViolation("grid: subway col out of range");
    std::vector<std::pair<int, int>> stops;
    for (int r = 0; r < spec.n; ++r) stops.push_back({r, c});
    add_line("s:col" + std::to_string(c), Mode::Subway, stops,
             spec.subway_headway_s, spec.subway_speed_mps, spec.subway_dwell_s);
  }

  return TransportGraph::build(std::move(nodes), std::move(edges),
                               std::move(schedules));
}

namespace {

TravelerProfile sample_profile(const PopulationSpec& spec,
                               const std::vector<TravelerProfile>& pool,
                               Rng& rng) {
  if (!pool.empty()) {
    return pool[rng.index(pool.size())];
  }
  std::vector<std::pair<std::string, double>> values;
  for (const auto& [feature, dist] : spec.marginals) {
    double total = 0;
    for (const auto& [value, weight] : dist) total += weight;
    const double u = rng.uniform() * total;
    double acc = 0;
    double drawn = dist.back().first;
    for (const auto& [value, weight] : dist) {
      acc += weight;
      if (u < acc) {
        drawn = value;
        break;
      }
    }
    values.push_back({feature, drawn});
  }
  return profile_from_values(values, Mode::Drive);
}

std::vector<TravelerProfile> load_profile_pool(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::vector<int> cols;
  for (const char* name : kProfileFeatureNames) {
    cols.push_back(table.require_column(name));
  }
  std::vector<TravelerProfile> pool;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<std::pair<std::string, double>> values;
    for (std::size_t f = 0; f < cols.size(); ++f) {
      const std::string& field = table.rows[i][cols[f]];
      if (field.empty()) continue;
      values.push_back({kProfileFeatureNames[f],
                        parse_double_field(field, table.line_numbers[i],
                                           kProfileFeatureNames[f])});
    }
    pool.push_back(profile_from_values(values, Mode::Drive));
  }
  if (pool.empty()) throw EmptySource("no profiles in '" + path + "'");
  return pool;
}

}  // namespace

std::vector<Traveler> generate_population(const PopulationSpec& spec,
                                          const TransportGraph& graph,
                                          int period_start_s, int period_end_s,
                                          int trip_slack_s,
                                          std::uint64_t seed) {
  if (spec.size <= 0) throw EmptySource("population size must be > 0");
  if (spec.source_csv.empty() && spec.marginals.empty()) {
    throw EmptySource("population spec needs source_csv or marginals");
  }
  std::vector<TravelerProfile> pool;
  if (!spec.source_csv.empty()) pool = load_profile_pool(spec.source_csv);

  // Origins/destinations are restricted to nodes with outgoing drive edges
  // so the drive baseline exists.
  std::vector<int> drive_nodes;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    for (int e : graph.out_edges(static_cast<int>(i))) {
      if (graph.edge(e).mode == Mode::Drive) {
        drive_nodes.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  if (drive_nodes.size() < 2) {
    throw EmptySource("network has fewer than 2 drivable nodes");
  }

  Rng rng(derive_seed(seed, 0x706f70));  // "pop"
  std::vector<Traveler> out;
  out.reserve(spec.size);
  for (int i = 0; i < spec.size; ++i) {
    Traveler t;
    t.profile = sample_profile(spec, pool, rng);
    const int o = drive_nodes[rng.index(drive_nodes.size())];
    int d = o;
    while (d == o) d = drive_nodes[rng.index(drive_nodes.size())];
    t.query.origin = graph.node(o).id;
    t.query.destination = graph.node(d).id;
    t.query.depart_s =
        static_cast<int>(rng.uniform_int(period_start_s, period_end_s - 1));
    t.query.deadline_s = t.query.depart_s + trip_slack_s;
    t.seed = derive_seed(seed, 0x747276, static_cast<std::uint64_t>(i));
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<bool> influenced_members(const Scenario& scenario) {
  const std::size_t n = scenario.population.size();
  std::vector<bool> members(n, false);
  const std::size_t count = static_cast<std::size_t>(
      std::ceil(scenario.influenced_fraction * static_cast<double>(n)));
  if (count == 0) return members;
  // Rank travelers by a hash of their own seed so membership is a property
  // of the traveler, stable across trials, conditions, and processing
  // order.
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranked[i] = {derive_seed(scenario.seed, 0x696e66,
                             scenario.population[i].seed),
                 i};
  }
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t i = 0; i < std::min(count, n); ++i) {
    members[ranked[i].second] = true;
  }
  return members;
}

namespace {

const ModeDfa& drive_only_dfa() {
  static const ModeDfa dfa = compile_dfa(parse_regex("d+"));
  return dfa;
}

struct RoutedTraveler {
  const Plan* plan = nullptr;  // points into owned storage below
  bool influenced = false;
  bool adopted = false;
};

double bus_speed_for(const TransportGraph& graph, const PlanStep& step) {
  const Edge& edge = graph.edge(graph.edge_index(step.edge_id));
  if (edge.is_scheduled()) {
    return edge.length_m / graph.schedule_of(edge).ride_time_s;
  }
  return edge.fixed_speed();
}

}  // namespace

TrialResult run_trial(const Scenario& scenario, Condition condition,
                      int trial_index) {
  const std::uint64_t trial_seed =
      derive_seed(scenario.seed, 0x747269616c, static_cast<std::uint64_t>(trial_index));
  const std::vector<bool> influenced = influenced_members(scenario);

  // Route every traveler.
  std::vector<std::optional<Plan>> baseline_plans(scenario.population.size());
  std::vector<std::optional<Plan>> chosen_plans(scenario.population.size());
  std::vector<RoutedTraveler> routed(scenario.population.size());

  for (std::size_t i = 0; i < scenario.population.size(); ++i) {
    const Traveler& traveler = scenario.population[i];
    baseline_plans[i] = plan(scenario.graph, traveler.query, drive_only_dfa());
    if (!baseline_plans[i]) {
      throw InvariantViolation("traveler " + std::to_string(i) +
                               ": no drive baseline; scenario is inconsistent");
    }
    routed[i].influenced = influenced[i];
    bool adopted = false;
    if (condition == Condition::Influence && influenced[i]) {
      Rng rng(derive_seed(trial_seed, traveler.seed));
      const PersonIntercept intercept =
          sample_intercept(scenario.adoption, rng);
      const RecommendResult rec = recommend_all(
          scenario.graph, traveler.query, traveler.profile, scenario.forest,
          scenario.adoption, scenario.fuel, intercept, scenario.options);
      if (rec.best) {
        const double p = scenario.force_adoption
                             ? *scenario.force_adoption
                             : rec.best->adoption_prob;
        if (rng.uniform() < p) {
          chosen_plans[i] = rec.best->plan;
          adopted = true;
        }
      }
    }
    routed[i].adopted = adopted;
    if (!adopted) chosen_plans[i] = *baseline_plans[i];
    routed[i].plan = &*chosen_plans[i];
  }

  // One-shot assignment: drive volumes from final routes plus the fixed
  // background, then delay and fuel from those volumes.
  std::vector<double> volume(scenario.graph.edges().size(), 0.0);
  for (std::size_t e = 0; e < volume.size(); ++e) {
    if (scenario.graph.edge(static_cast<int>(e)).mode == Mode::Drive) {
      volume[e] = scenario.background_volume;
    }
  }
  for (const RoutedTraveler& rt : routed) {
    for (const PlanStep& step : rt.plan->steps) {
      if (step.mode == Mode::Drive) {
        volume[scenario.graph.edge_index(step.edge_id)] += 1.0;
      }
    }
  }

  auto edge_vd = [&](const Edge& edge) {
    VolumeDelay vd;
    vd.alpha = scenario.delay_alpha;
    vd.beta = scenario.delay_beta;
    vd.capacity_vph = edge.capacity_vph.value_or(scenario.default_capacity_vph);
    vd.t0_s = edge.length_m / edge.fixed_speed();
    return vd;
  };

  TrialResult result;
  for (std::size_t e = 0; e < volume.size(); ++e) {
    const Edge& edge = scenario.graph.edge(static_cast<int>(e));
    if (edge.mode != Mode::Drive || volume[e] <= 0) continue;
    const VolumeDelay vd = edge_vd(edge);
    const double excess_s = link_delay(vd, volume[e]);
    result.total_delay_hr += volume[e] * excess_s / 3600.0;
    // Background vehicles burn fuel at the congested speed too.
    const double speed = edge.length_m / congested_time_s(vd, volume[e]);
    result.total_fuel_l += scenario.background_volume *
                           step_fuel(scenario.fuel, Mode::Drive, edge.length_m,
                                     speed);
  }

  for (std::size_t i = 0; i < routed.size(); ++i) {
    const RoutedTraveler& rt = routed[i];
    for (const PlanStep& step : rt.plan->steps) {
      double speed;
      if (step.mode == Mode::Drive) {
        const Edge& edge =
            scenario.graph.edge(scenario.graph.edge_index(step.edge_id));
        const VolumeDelay vd = edge_vd(edge);
        speed = edge.length_m /
                congested_time_s(vd, volume[scenario.graph.edge_index(step.edge_id)]);
      } else {
        speed = bus_speed_for(scenario.graph, step);
      }
      result.total_fuel_l +=
          step_fuel(scenario.fuel, step.mode, step.distance_m, speed);
    }
    if (rt.influenced) {
      ++result.influenced;
      if (rt.adopted) ++result.adopted;
      std::map<Mode, bool> seen;
      for (const PlanStep& step : rt.plan->steps) seen[step.mode] = true;
      for (const auto& [mode, _] : seen) {
        ++result.influenced_mode_counts[std::string(mode_name(mode))];
      }
    }
  }
  return result;
}

nlohmann::json trial_to_json(const TrialResult& trial) {
  nlohmann::json j;
  j["total_fuel_l"] = trial.total_fuel_l;
  j["total_delay_hr"] = trial.total_delay_hr;
  j["influenced"] = trial.influenced;
  j["adopted"] = trial.adopted;
  j["influenced_mode_counts"] = trial.influenced_mode_counts;
  return j;
}

WelchInterval welch_ci95(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientTrials("Welch CI needs >= 2 samples per condition");
  }
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double mean1 = std::accumulate(a.begin(), a.end(), 0.0) / n1;
  const double mean2 = std::accumulate(b.begin(), b.end(), 0.0) / n2;
  double var1 = 0, var2 = 0;
  for (double v : a) var1 += (v - mean1) * (v - mean1);
  for (double v : b) var2 += (v - mean2) * (v - mean2);
  var1 /= n1 - 1;
  var2 /= n2 - 1;

  WelchInterval out;
  out.diff = mean1 - mean2;
  const double se_sq = var1 / n1 + var2 / n2;
  if (se_sq <= 0) {  // all trials identical: zero-width interval
    out.lo = out.hi = out.diff;
    return out;
  }
  const double se = std::sqrt(se_sq);
  const double df = se_sq * se_sq /
                    (var1 * var1 / (n1 * n1 * (n1 - 1)) +
                     var2 * var2 / (n2 * n2 * (n2 - 1)));
  const boost::math::students_t_distribution<double> dist(df);
  const double t = boost::math::quantile(dist, 0.975);
  out.lo = out.diff - t * se;
  out.hi = out.diff + t * se;
  return out;
}

SimReport run_experiment(const Scenario& scenario) {
  if (scenario.n_trials < 2) {
    throw InsufficientTrials("n_trials must be >= 2 for confidence intervals");
  }
  SimReport report;
  report.seed = scenario.seed;
  report.n_trials = scenario.n_trials;
  report.influenced_fraction = scenario.influenced_fraction;

  // Trials are independent; run them concurrently and reduce in fixed
  // trial order so reports are bit-stable.
  std::vector<std::future<TrialResult>> baseline_futures, influence_futures;
  for (int t = 0; t < scenario.n_trials; ++t) {
    baseline_futures.push_back(std::async(std::launch::async, [&scenario, t] {
      return run_trial(scenario, Condition::Baseline, t);
    }));
    influence_futures.push_back(std::async(std::launch::async, [&scenario, t] {
      return run_trial(scenario, Condition::Influence, t);
    }));
  }
  for (auto& f : baseline_futures) report.baseline_trials.push_back(f.get());
  for (auto& f : influence_futures) report.influence_trials.push_back(f.get());

  auto metric = [&](auto getter) {
    std::vector<double> base, inf;
    for (const auto& trial : report.baseline_trials) base.push_back(getter(trial));
    for (const auto& trial : report.influence_trials) inf.push_back(getter(trial));
    MetricSummary m;
    m.baseline_mean = std::accumulate(base.begin(), base.end(), 0.0) / base.size();
    m.influence_mean = std::accumulate(inf.begin(), inf.end(), 0.0) / inf.size();
    m.reduction_ci = welch_ci95(base, inf);
    m.pct_change = m.baseline_mean != 0
                       ? (m.influence_mean - m.baseline_mean) /
                             m.baseline_mean * 100.0
                       : 0.0;
    return m;
  };
  report.fuel = metric([](const TrialResult& t) { return t.total_fuel_l; });
  report.delay = metric([](const TrialResult& t) { return t.total_delay_hr; });

  // Mode shares over influenced travelers, averaged across influence trials.
  std::map<std::string, double> share_sums;
  for (const auto& trial : report.influence_trials) {
    if (trial.influenced == 0) continue;
    for (const auto& [mode, count] : trial.influenced_mode_counts) {
      share_sums[mode] +=
          100.0 * count / static_cast<double>(trial.influenced);
    }
  }
  for (const auto& [mode, sum] : share_sums) {
    report.mode_share_pct[mode] =
        sum / static_cast<double>(report.influence_trials.size());
  }
  return report;
}

nlohmann::json report_to_json(const SimReport& report) {
  nlohmann::json j;
  j["format"] = "copter-report";
  j["version"] = 1;
  j["seed"] = report.seed;
  j["n_trials"] = report.n_trials;
  j["influenced_fraction"] = report.influenced_fraction;

  auto trials = [](const std::vector<TrialResult>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : list) arr.push_back(trial_to_json(t));
    return arr;
  };
  j["baseline"]["trials"] = trials(report.baseline_trials);
  j["influence"]["trials"] = trials(report.influence_trials);

  auto metric = [](const MetricSummary& m) {
    nlohmann::json out;
    out["baseline_mean"] = m.baseline_mean;
    out["influence_mean"] = m.influence_mean;
    out["pct_change"] = m.pct_change;
    out["reduction"] = m.reduction_ci.diff;
    out["reduction_ci95"] = {m.reduction_ci.lo, m.reduction_ci.hi};
    if (m.baseline_mean != 0) {
      out["pct_change_ci95"] = {-m.reduction_ci.hi / m.baseline_mean * 100.0,
                                -m.reduction_ci.lo / m.baseline_mean * 100.0};
    }
    return out;
  };
  j["fuel"] = metric(report.fuel);
  j["delay"] = metric(report.delay);
  j["mode_share_pct"] = report.mode_share_pct;
  return j;
}

namespace {

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << v;
  return out.str();
}

std::string sig(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

std::string render_report_table(const nlohmann::json& report) {
  std::ostringstream out;
  auto row = [&](const std::string& label, const nlohmann::json& m) {
    out << label << "  baseline " << sig(m.at("baseline_mean"))
        << "  influence " << sig(m.at("influence_mean")) << "  change "
        << fixed(m.at("pct_change"), 2) << "%";
    if (m.contains("pct_change_ci95")) {
      out << " (" << fixed(m.at("pct_change_ci95")[0], 2) << "% .. "
          << fixed(m.at("pct_change_ci95")[1], 2) << "%)";
    }
    out << "\n";
  };
  out << "Condition means (" << report.at("n_trials").get<int>()
      << " trials each, 95% Welch CI for the change)\n";
  row("Total fuel (l)    ", report.at("fuel"));
  row("Total delay (hr)  ", report.at("delay"));
  out << "\nShare of influenced population that used mode (may sum over "
         "100%):\n";
  const auto& shares = report.at("mode_share_pct");
  for (auto it = shares.begin(); it != shares.end(); ++it) {
    out << "  " << it.key() << "  " << fixed(it.value().get<double>(), 1)
        << "%\n";
  }
  return out.str();
}

std::string render_report_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "metric,baseline_mean,influence_mean,pct_change,reduction,ci95_lo,"
         "ci95_hi\n";
  auto row = [&](const std::string& name, const nlohmann::json& m) {
    out << name << ',' << format_double(m.at("baseline_mean")) << ','
        << format_double(m.at("influence_mean")) << ','
        << format_double(m.at("pct_change")) << ','
        << format_double(m.at("reduction")) << ','
        << format_double(m.at("reduction_ci95")[0]) << ','
        << format_double(m.at("reduction_ci95")[1]) << '\n';
  };
  row("fuel_l", report.at("fuel"));
  row("delay_hr", report.at("delay"));
  out << "\nmode,share_pct\n";
  const auto& shares = report.at("mode_share_pct");
  for (auto it = shares.begin(); it != shares.end(); ++it) {
    out << it.key() << ',' << format_double(it.value().get<double>()) << '\n';
  }
  return out.str();
}

namespace {

void require_known_keys(const nlohmann::json& j,
                        const std::vector<std::string>& known,
                        const std::string& where) {
  if (!j.is_object()) {
    throw ConfigError(where + " must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

Scenario scenario_from_json_checked(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir);

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir) {
  try {
    return scenario_from_json_checked(j, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

namespace {

Scenario scenario_from_json_checked(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir) {
  require_known_keys(
      j,
      {"seed", "graph", "population", "influenced_fraction", "n_trials",
       "period", "trip_slack_s", "background_volume", "models", "adoption",
       "energy", "delay", "force_adoption", "languages", "selection"},
      "scenario");
  Scenario s;
  if (!j.contains("seed")) {
    throw ConfigError("scenario: 'seed' is required (no wall-clock seeding)");
  }
  s.seed = j.at("seed").get<std::uint64_t>();

  const auto& graph = j.at("graph");
  require_known_keys(graph, {"dir", "grid"}, "scenario.graph");
  if (graph.contains("dir")) {
    s.graph = load_graph(base_dir / graph.at("dir").get<std::string>());
  } else if (graph.contains("grid")) {
    const auto& g = graph.at("grid");
    require_known_keys(
        g,
        {"n", "spacing_m", "drive_speed_mps", "walk_speed_mps",
         "drive_capacity_vph", "bus_rows", "subway_cols", "bus_headway_s",
         "subway_headway_s"},
        "scenario.graph.grid");
    GridSpec spec;
    spec.n = g.value("n", spec.n);
    spec.spacing_m = g.value("spacing_m", spec.spacing_m);
    spec.drive_speed_mps = g.value("drive_speed_mps", spec.drive_speed_mps);
    spec.walk_speed_mps = g.value("walk_speed_mps", spec.walk_speed_mps);
    spec.drive_capacity_vph =
        g.value("drive_capacity_vph", spec.drive_capacity_vph);
    if (g.contains("bus_rows")) {
      spec.bus_rows = g.at("bus_rows").get<std::vector<int>>();
    }
    if (g.contains("subway_cols")) {
      spec.subway_cols = g.at("subway_cols").get<std::vector<int>>();
    }
    spec.bus_headway_s = g.value("bus_headway_s", spec.bus_headway_s);
    spec.subway_headway_s = g.value("subway_headway_s", spec.subway_headway_s);
    s.graph = make_grid_network(spec);
  } else {
    throw ConfigError("scenario.graph needs 'dir' or 'grid'");
  }

  if (j.contains("period")) {
    const auto& period = j.at("period");
    require_known_keys(period, {"start", "end"}, "scenario.period");
    s.period_start_s = period.at("start").get<int>();
    s.period_end_s = period.at("end").get<int>();
    if (s.period_start_s >= s.period_end_s) {
      throw ConfigError("scenario.period: start must be before end");
    }
  }
  const int trip_slack_s = j.value("trip_slack_s", 5400);

  const auto& pop = j.at("population");
  require_known_keys(pop, {"size", "source_csv", "marginals"},
                     "scenario.population");
  PopulationSpec pspec;
  pspec.size = pop.at("size").get<int>();
  if (pop.contains("source_csv")) {
    pspec.source_csv =
        (base_dir / pop.at("source_csv").get<std::string>()).string();
  }
  if (pop.contains("marginals")) {
    for (auto it = pop.at("marginals").begin(); it != pop.at("marginals").end();
         ++it) {
      std::vector<std::pair<double, double>> dist;
      for (const auto& entry : it.value()) {
        dist.push_back({entry.at(0).get<double>(), entry.at(1).get<double>()});
      }
      pspec.marginals.push_back({it.key(), std::move(dist)});
    }
  }

  s.influenced_fraction = j.value("influenced_fraction", 0.10);
  if (s.influenced_fraction < 0 || s.influenced_fraction > 1) {
    throw ConfigError("influenced_fraction must be within [0, 1]");
  }
  s.n_trials = j.value("n_trials", 5);
  s.background_volume = j.value("background_volume", 0.0);

  const auto& models = j.at("models");
  require_known_keys(models, {"forest"}, "scenario.models");
  s.forest = load_forest(base_dir / models.at("forest").get<std::string>());

  if (j.contains("adoption")) {
    const auto& a = j.at("adoption");
    require_known_keys(a, {"beta_odds", "intercept_mean", "intercept_sd",
                           "odds_cap"},
                       "scenario.adoption");
    s.adoption.beta_odds = a.value("beta_odds", s.adoption.beta_odds);
    s.adoption.intercept_mean =
        a.value("intercept_mean", s.adoption.intercept_mean);
    s.adoption.intercept_sd = a.value("intercept_sd", s.adoption.intercept_sd);
    s.adoption.odds_cap = a.value("odds_cap", s.adoption.odds_cap);
  }
  if (j.contains("energy")) {
    const auto& e = j.at("energy");
    require_known_keys(e, {"fuel", "bus_factor"}, "scenario.energy");
    if (e.contains("fuel")) {
      require_known_keys(e.at("fuel"), {"a0", "a1", "a2"},
                         "scenario.energy.fuel");
      s.fuel.a0 = e.at("fuel").value("a0", s.fuel.a0);
      s.fuel.a1 = e.at("fuel").value("a1", s.fuel.a1);
      s.fuel.a2 = e.at("fuel").value("a2", s.fuel.a2);
    }
    s.fuel.bus_per_passenger_factor =
        e.value("bus_factor", s.fuel.bus_per_passenger_factor);
  }
  if (j.contains("delay")) {
    const auto& d = j.at("delay");
    require_known_keys(d, {"alpha", "beta", "default_capacity_vph"},
                       "scenario.delay");
    s.delay_alpha = d.value("alpha", s.delay_alpha);
    s.delay_beta = d.value("beta", s.delay_beta);
    s.default_capacity_vph =
        d.value("default_capacity_vph", s.default_capacity_vph);
  }
  if (j.contains("force_adoption") && !j.at("force_adoption").is_null()) {
    s.force_adoption = j.at("force_adoption").get<double>();
    if (*s.force_adoption < 0 || *s.force_adoption > 1) {
      throw ConfigError("force_adoption must be within [0, 1]");
    }
  }
  if (j.contains("languages")) {
    for (const auto& pattern : j.at("languages")) {
      s.options.language_override.push_back(
          make_language_element(pattern.get<std::string>()));
    }
  }
  if (j.contains("selection")) {
    const auto& sel = j.at("selection");
    require_known_keys(sel, {"use_mode_probs", "rule"}, "scenario.selection");
    s.options.use_mode_probs = sel.value("use_mode_probs", false);
    const std::string rule = sel.value("rule", "expected_saving");
    if (rule == "expected_saving") {
      s.options.rule = SelectionRule::ExpectedSaving;
    } else if (rule == "adoption_likelihood") {
      s.options.rule = SelectionRule::AdoptionLikelihood;
    } else {
      throw ConfigError("unknown selection rule '" + rule + "'");
    }
  }

  s.population = generate_population(pspec, s.graph, s.period_start_s,
                                     s.period_end_s, trip_slack_s, s.seed);
  return s;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, "scenario '" + path.string() + "': " + e.what());
  }
  return scenario_from_json(j, path.parent_path());
}

}  // namespace copter
