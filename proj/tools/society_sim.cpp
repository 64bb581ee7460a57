// Command line front end: scenario validation, single runs and parameter
// sweeps. Exit codes: 0 success, 1 validation failure, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "socsim/errors.hpp"
#include "socsim/fair_scheduler.hpp"
#include "socsim/runner.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("SOCIETY_SIM_LOG");
  if (env == nullptr) return 0;
  const std::string v(env);
  if (v == "debug" || v == "2") return 2;
  if (v == "info" || v == "1") return 1;
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw socsim::IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string basename_no_ext(const std::string& path) {
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

int cmd_validate(const std::string& path) {
  try {
    const socsim::ScenarioConfig cfg = socsim::load_scenario(path);
    const socsim::MarketState state = socsim::build_market(cfg);
    const std::vector<socsim::Violation> violations = socsim::validate(state);
    for (const socsim::Violation& v : violations)
      std::printf("%s %s: %s\n", socsim::violation_kind_name(v.kind),
                  v.entity.c_str(), v.message.c_str());
    if (violations.empty()) {
      std::printf("ok\n");
      return 0;
    }
    return 1;
  } catch (const socsim::ConfigError& e) {
    std::fprintf(stderr, "invalid scenario: %s\n", e.what());
    return 1;
  } catch (const socsim::IoError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
}

// Packet-level replay of one epoch's society contention: per active MVNO one
// flow weighted by its contract count, packetized residual demand, WFQ at the
// society pool rate.
void write_epoch_packet_trace(const socsim::RunResult& result,
                              const socsim::ScenarioConfig& cfg,
                              long trace_epoch, double packet_size,
                              const std::string& out_dir) {
  if (trace_epoch < 0 ||
      trace_epoch >= static_cast<long>(result.metrics.size()))
    throw socsim::ConfigError("packet trace epoch outside the run");
  const socsim::EpochMetrics& m =
      result.metrics[static_cast<std::size_t>(trace_epoch)];
  if (packet_size <= 0.0) packet_size = cfg.consumers.demand / 20.0;

  std::vector<std::vector<socsim::Packet>> queues;
  std::vector<double> weights;
  double pool = 0.0;
  for (std::size_t v = 0; v < m.mvnos.size(); ++v) pool += m.mvnos[v].society_granted;
  pool += m.unallocated;
  if (pool <= 0.0) pool = 1.0;
  for (std::size_t v = 0; v < m.mvnos.size(); ++v) {
    if (m.mvnos[v].subs <= 0) continue;
    const double demand = m.mvnos[v].subs * cfg.consumers.demand;
    const long packets = std::max(1L, std::lround(demand / packet_size));
    std::vector<socsim::Packet> q;
    for (long p = 0; p < packets; ++p)
      q.push_back({static_cast<int>(v), 0.0, packet_size});
    queues.push_back(std::move(q));
    weights.push_back(static_cast<double>(m.mvnos[v].subs));
  }
  const auto schedule = socsim::wfq_schedule(queues, weights, pool);
  socsim::write_packet_trace_csv(
      out_dir + "/packets_epoch" + std::to_string(trace_epoch) + ".csv",
      schedule);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-regulating spectrum market simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Check a scenario file and exit");
  validate->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required();

  std::string run_scenario_path, run_out = "out";
  std::uint64_t run_seed = 0;
  long run_epochs = -1;
  long trace_epoch = -1;
  double trace_packet_size = 0.0;
  bool seed_given = false;
  CLI::App* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("scenario", run_scenario_path, "Scenario JSON file")
      ->required();
  run->add_option("--seed", run_seed, "Override the scenario seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--epochs", run_epochs, "Override the epoch count");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--packet-trace", trace_epoch,
                  "Also write a packet-level WFQ trace of this epoch");
  run->add_option("--packet-size", trace_packet_size,
                  "Packet size for --packet-trace (default demand/20)");

  std::string sweep_scenario_path, sweep_out = "out";
  socsim::SweepSpec spec;
  int jobs = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
  sweep->add_option("scenario", sweep_scenario_path, "Scenario JSON file")
      ->required();
  sweep->add_option("--param", spec.param_path, "Dotted parameter path")
      ->required();
  sweep->add_option("--from", spec.from, "First grid value")->required();
  sweep->add_option("--to", spec.to, "Last grid value")->required();
  sweep->add_option("--steps", spec.steps, "Grid points")->required();
  sweep->add_option("--seeds", spec.seeds_per_point, "Seeds per grid point");
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--jobs", jobs, "Worker threads (result-invariant)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const int verbosity = log_level();

  if (validate->parsed()) return cmd_validate(scenario_path);

  if (run->parsed()) {
    socsim::ScenarioConfig cfg;
    try {
      cfg = socsim::load_scenario(run_scenario_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "invalid scenario: %s\n", e.what());
      return 1;
    }
    try {
      const std::uint64_t seed = seed_given ? run_seed : cfg.seed;
      const long epochs = run_epochs >= 0 ? run_epochs : cfg.epochs;
      if (verbosity >= 1)
        std::fprintf(stderr, "running %s: seed=%llu epochs=%ld\n",
                     run_scenario_path.c_str(),
                     static_cast<unsigned long long>(seed), epochs);
      const socsim::RunResult result =
          socsim::run_scenario(cfg, seed, epochs);
      socsim::write_run_artifacts(result, cfg, seed, run_out,
                                  basename_no_ext(run_scenario_path));
      if (trace_epoch >= 0)
        write_epoch_packet_trace(result, cfg, trace_epoch, trace_packet_size,
                                 run_out);

      const int population = cfg.consumers.count;
      const double share =
          !result.metrics.empty() && population > 0
              ? static_cast<double>(result.metrics.back().society_subs) /
                    population
              : 0.0;
      if (result.equilibrium_epoch)
        std::printf("equilibrium_epoch=%ld society_share=%.4f\n",
                    *result.equilibrium_epoch, share);
      else
        std::printf("equilibrium_epoch=none society_share=%.4f\n", share);
      return 0;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "run failed: %s\n", e.what());
      return 2;
    }
  }

  if (sweep->parsed()) {
    std::string text;
    try {
      text = read_file(sweep_scenario_path);
      socsim::parse_scenario(text);  // fail fast on an invalid scenario
      if (spec.steps < 1 || spec.from > spec.to || spec.seeds_per_point < 1)
        throw socsim::ConfigError("invalid sweep grid");
    } catch (const std::exception& e) {
      std::fprintf(stderr, "invalid sweep: %s\n", e.what());
      return 1;
    }
    try {
      if (verbosity >= 1)
        std::fprintf(stderr, "sweeping %s over %s\n",
                     sweep_scenario_path.c_str(), spec.param_path.c_str());
      const socsim::SweepResult result = socsim::run_sweep(text, spec, jobs);
      socsim::write_sweep_artifacts(result, sweep_out);
      std::printf("points=%d runs=%d\n", spec.steps,
                  spec.steps * spec.seeds_per_point);
      return 0;
    } catch (const socsim::ConfigError& e) {
      std::fprintf(stderr, "invalid sweep: %s\n", e.what());
      return 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "sweep failed: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
