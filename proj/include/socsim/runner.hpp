#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socsim/market_dynamics.hpp"
#include "socsim/market_model.hpp"
#include "socsim/metrics.hpp"

namespace socsim {

struct RunResult {
  std::vector<EpochMetrics> metrics;
  MarketState final_state;
  std::optional<long> equilibrium_epoch;  // over the full price series
};

/// Builds the market and advances it `epochs` times. Overrides replace the
/// scenario's seed/epoch count when set.
RunResult run_scenario(const ScenarioConfig& config,
                       std::optional<std::uint64_t> seed_override = {},
                       std::optional<long> epochs_override = {});

/// Writes `<basename>.csv` and `<basename>_summary.json` under `out_dir`
/// (created if missing). Output bytes depend only on the run inputs.
void write_run_artifacts(const RunResult& result, const ScenarioConfig& config,
                         std::uint64_t seed, const std::string& out_dir,
                         const std::string& basename);

std::string run_summary_json(const RunResult& result,
                             const ScenarioConfig& config, std::uint64_t seed);

struct SweepSpec {
  std::string param_path;  // dotted path into the scenario JSON, e.g. spectrum.w
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  int seeds_per_point = 3;
};

struct SweepPointResult {
  double value = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<RunResult> runs;  // by seed order
  // Per-seed medians:
  std::optional<long> equilibrium_epoch;
  std::vector<double> mean_prices;  // per operator
  double society_market_share = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> operator_ids;
  std::vector<std::string> mvno_ids;
  std::vector<SweepPointResult> points;
};

/// Applies `spec.param_path` across the grid and runs every (point, seed)
/// combination; points may run on up to `jobs` worker threads but the result
/// and all artifacts are independent of the parallelism degree.
SweepResult run_sweep(const std::string& scenario_json_text,
                      const SweepSpec& spec, int jobs = 1);

/// One CSV per (point, seed) plus a combined summary JSON keyed by the
/// parameter value.
void write_sweep_artifacts(const SweepResult& result,
                           const std::string& out_dir);

std::string sweep_summary_json(const SweepResult& result);

}  // namespace socsim
