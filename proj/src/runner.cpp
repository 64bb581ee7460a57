#include "socsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "socsim/errors.hpp"

namespace socsim {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::vector<double>> price_series(
    const std::vector<EpochMetrics>& metrics) {
  std::vector<std::vector<double>> series;
  series.reserve(metrics.size());
  for (const EpochMetrics& m : metrics) {
    std::vector<double> row;
    row.reserve(m.operators.size());
    for (const OperatorEpochMetrics& o : m.operators) row.push_back(o.price);
    series.push_back(std::move(row));
  }
  return series;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config,
                       std::optional<std::uint64_t> seed_override,
                       std::optional<long> epochs_override) {
  ScenarioConfig cfg = config;
  if (seed_override) cfg.seed = *seed_override;
  const long epochs = epochs_override.value_or(cfg.epochs);

  RunResult result;
  MarketState state = build_market(cfg);
  Rng rng(cfg.seed);
  result.metrics.reserve(static_cast<std::size_t>(epochs));
  for (long e = 0; e < epochs; ++e) {
    auto [next, metrics] = step_epoch(state, rng);
    state = std::move(next);
    result.metrics.push_back(std::move(metrics));
  }
  result.final_state = std::move(state);

  const int window = cfg.equilibrium.window;
  if (static_cast<long>(result.metrics.size()) >= window + 1) {
    result.equilibrium_epoch = detect_equilibrium(
        price_series(result.metrics), window, cfg.equilibrium.tol);
  }
  return result;
}

std::string run_summary_json(const RunResult& result,
                             const ScenarioConfig& config,
                             std::uint64_t seed) {
  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["epochs"] = result.metrics.size();
  if (result.equilibrium_epoch)
    j["equilibrium_epoch"] = *result.equilibrium_epoch;
  else
    j["equilibrium_epoch"] = nullptr;

  ordered_json final_state;
  const int population = config.consumers.count;
  if (!result.metrics.empty()) {
    const EpochMetrics& last = result.metrics.back();
    ordered_json ops;
    for (std::size_t o = 0; o < config.operators.size(); ++o) {
      ordered_json op;
      op["price"] = last.operators[o].price;
      op["revenue"] = last.operators[o].revenue;
      op["exclusive_subs"] = last.operators[o].exclusive_subs;
      ops[config.operators[o].id] = op;
    }
    final_state["operators"] = ops;
    ordered_json mvnos;
    for (std::size_t m = 0; m < config.mvnos.size(); ++m) {
      ordered_json mv;
      mv["subs"] = last.mvnos[m].subs;
      mv["revenue"] = last.mvnos[m].revenue;
      mv["active"] = last.mvnos[m].active;
      mvnos[config.mvnos[m].id] = mv;
    }
    final_state["mvnos"] = mvnos;
    final_state["society_subs"] = last.society_subs;
    final_state["exclusive_subs"] = last.exclusive_subs;
    final_state["society_market_share"] =
        population > 0 ? static_cast<double>(last.society_subs) / population
                       : 0.0;
  }
  j["final"] = final_state;

  ordered_json aggregates;
  ordered_json mean_prices;
  for (std::size_t o = 0; o < config.operators.size(); ++o) {
    double sum = 0.0;
    for (const EpochMetrics& m : result.metrics) sum += m.operators[o].price;
    mean_prices[config.operators[o].id] =
        result.metrics.empty() ? 0.0 : sum / result.metrics.size();
  }
  aggregates["mean_prices"] = mean_prices;
  double donated = 0.0, unallocated = 0.0;
  for (const EpochMetrics& m : result.metrics) {
    donated += m.donated;
    unallocated += m.unallocated;
  }
  aggregates["total_donated"] = donated;
  aggregates["total_unallocated"] = unallocated;
  j["aggregates"] = aggregates;
  return j.dump(2) + "\n";
}

void write_run_artifacts(const RunResult& result, const ScenarioConfig& config,
                         std::uint64_t seed, const std::string& out_dir,
                         const std::string& basename) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  std::vector<std::string> op_ids, mvno_ids;
  for (const OperatorConfig& o : config.operators) op_ids.push_back(o.id);
  for (const MvnoConfig& m : config.mvnos) mvno_ids.push_back(m.id);

  const std::string csv_path = out_dir + "/" + basename + ".csv";
  write_metrics_csv(csv_path, op_ids, mvno_ids, result.metrics);

  const std::string json_path = out_dir + "/" + basename + "_summary.json";
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + json_path);
  out << run_summary_json(result, config, seed);
}

SweepResult run_sweep(const std::string& scenario_json_text,
                      const SweepSpec& spec, int jobs) {
  if (spec.steps < 1) throw ConfigError("sweep: steps must be >= 1");
  if (spec.seeds_per_point < 1)
    throw ConfigError("sweep: seeds per point must be >= 1");
  if (spec.from > spec.to) throw ConfigError("sweep: need from <= to");
  if (jobs < 1) jobs = 1;

  nlohmann::json base;
  try {
    base = nlohmann::json::parse(scenario_json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }

  // The parameter path must already resolve in the document.
  {
    const nlohmann::json* node = &base;
    std::istringstream path(spec.param_path);
    std::string key;
    while (std::getline(path, key, '.')) {
      if (!node->is_object() || !node->contains(key))
        throw ConfigError("sweep: parameter path `" + spec.param_path +
                          "` does not resolve in the scenario");
      node = &node->at(key);
    }
    if (!node->is_number())
      throw ConfigError("sweep: parameter `" + spec.param_path +
                        "` is not numeric");
  }

  const ScenarioConfig base_cfg = parse_scenario(base.dump());

  SweepResult result;
  result.spec = spec;
  for (const OperatorConfig& o : base_cfg.operators)
    result.operator_ids.push_back(o.id);
  for (const MvnoConfig& m : base_cfg.mvnos) result.mvno_ids.push_back(m.id);

  struct Job {
    int point;
    int seed_slot;
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> grid;
  for (int p = 0; p < spec.steps; ++p) {
    const double value =
        spec.steps == 1
            ? spec.from
            : spec.from + (spec.to - spec.from) * p / (spec.steps - 1);
    for (int s = 0; s < spec.seeds_per_point; ++s)
      grid.push_back({p, s, value, base_cfg.seed + static_cast<std::uint64_t>(s)});
  }

  const auto run_one = [&](const Job& job) {
    nlohmann::json doc = base;
    nlohmann::json* node = &doc;
    std::istringstream path(spec.param_path);
    std::string key, last;
    nlohmann::json* parent = nullptr;
    while (std::getline(path, key, '.')) {
      parent = node;
      node = &node->at(key);
      last = key;
    }
    (*parent)[last] = job.value;
    const ScenarioConfig cfg = parse_scenario(doc.dump());
    return run_scenario(cfg, job.seed);
  };

  std::vector<RunResult> runs(grid.size());
  if (jobs == 1) {
    for (std::size_t g = 0; g < grid.size(); ++g) runs[g] = run_one(grid[g]);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::future<void>> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::size_t g = cursor.fetch_add(1);
          if (g >= grid.size()) return;
          runs[g] = run_one(grid[g]);
        }
      }));
    }
    for (auto& w : workers) w.get();
  }

  result.points.resize(static_cast<std::size_t>(spec.steps));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepPointResult& point = result.points[grid[g].point];
    point.value = grid[g].value;
    point.seeds.push_back(grid[g].seed);
    point.runs.push_back(std::move(runs[g]));
  }

  const int population = base_cfg.consumers.count;
  for (SweepPointResult& point : result.points) {
    std::vector<double> shares;
    std::vector<double> eq_epochs;
    std::vector<std::vector<double>> prices(result.operator_ids.size());
    for (const RunResult& run : point.runs) {
      if (!run.metrics.empty() && population > 0)
        shares.push_back(
            static_cast<double>(run.metrics.back().society_subs) / population);
      if (run.equilibrium_epoch)
        eq_epochs.push_back(static_cast<double>(*run.equilibrium_epoch));
      for (std::size_t o = 0; o < result.operator_ids.size(); ++o) {
        double sum = 0.0;
        for (const EpochMetrics& m : run.metrics) sum += m.operators[o].price;
        prices[o].push_back(run.metrics.empty() ? 0.0
                                                : sum / run.metrics.size());
      }
    }
    point.society_market_share = median(shares);
    for (std::size_t o = 0; o < prices.size(); ++o)
      point.mean_prices.push_back(median(prices[o]));
    if (eq_epochs.size() == point.runs.size() && !eq_epochs.empty())
      point.equilibrium_epoch = static_cast<long>(median(eq_epochs));
  }
  return result;
}

std::string sweep_summary_json(const SweepResult& result) {
  ordered_json j;
  j["schema_version"] = 1;
  j["parameter"] = result.spec.param_path;
  j["seeds_per_point"] = result.spec.seeds_per_point;
  ordered_json points;
  for (const SweepPointResult& point : result.points) {
    ordered_json p;
    if (point.equilibrium_epoch)
      p["equilibrium_epoch"] = *point.equilibrium_epoch;
    else
      p["equilibrium_epoch"] = nullptr;
    ordered_json prices;
    for (std::size_t o = 0; o < result.operator_ids.size(); ++o)
      prices[result.operator_ids[o]] = point.mean_prices[o];
    p["mean_prices"] = prices;
    p["society_market_share"] = point.society_market_share;
    points[format_value(point.value)] = p;
  }
  j["points"] = points;
  return j.dump(2) + "\n";
}

void write_sweep_artifacts(const SweepResult& result,
                           const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  for (std::size_t p = 0; p < result.points.size(); ++p) {
    const SweepPointResult& point = result.points[p];
    for (std::size_t s = 0; s < point.runs.size(); ++s) {
      char name[96];
      std::snprintf(name, sizeof name, "point%02zu_seed%llu", p,
                    static_cast<unsigned long long>(point.seeds[s]));
      write_metrics_csv(out_dir + "/" + name + ".csv", result.operator_ids,
                        result.mvno_ids, point.runs[s].metrics);
    }
  }
  const std::string json_path = out_dir + "/sweep_summary.json";
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + json_path);
  out << sweep_summary_json(result);
}

}  // namespace socsim
