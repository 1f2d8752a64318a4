// Command-line front end: single trials, sweeps, and the canonical figure
// data sets.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dmimo/dmimo.hpp"

namespace fs = std::filesystem;
using namespace dmimo;

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("DMIMO_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError("DMIMO_WORKERS", "must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

ScenarioConfig load_config(const std::string& path) {
  return path.empty() ? parse_config_text("") : parse_config(path);
}

/// Removes every output of a failed run.
class OutputGuard {
 public:
  void add(fs::path p) { paths_.push_back(std::move(p)); }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    std::error_code ignored;
    for (const auto& p : paths_) fs::remove(p, ignored);
  }

 private:
  std::vector<fs::path> paths_;
};

void run_and_write(const RunManifest& manifest, const fs::path& csv, unsigned workers, OutputGuard& guard) {
  const SweepTable table =
      run_sweep(manifest.config, manifest.axis, manifest.values, manifest.trials, manifest.master_seed, workers);
  guard.add(csv);
  emit_csv(table, csv);
  RunManifest m = manifest;
  m.timestamp = utc_timestamp();
  m.outputs = {csv.string()};
  const fs::path manifest_path = csv.string() + ".manifest.json";
  guard.add(manifest_path);
  write_file_atomically(manifest_path, [&](std::ostream& out) { out << manifest_to_json(m).dump(2) << '\n'; });
  std::cerr << "wrote " << csv.string() << " (" << table.points.size() << " points x " << manifest.trials
            << " trials)\n";
}

std::vector<double> grid(double from, double to, double step) {
  std::vector<double> v;
  for (double x = from; x <= to + 1e-9; x += step) v.push_back(x);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase mobile distributed-MIMO capacity simulator"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::size_t trials = 10000;
  unsigned workers = 0;

  auto* trial_cmd = app.add_subcommand("trial", "run one trial and print it as JSON");
  std::uint64_t trial_index = 0;
  std::string trial_out;
  trial_cmd->add_option("--config", config_path, "scenario config (YAML key: value)");
  trial_cmd->add_option("--seed", seed, "master seed");
  trial_cmd->add_option("--index", trial_index, "trial index");
  trial_cmd->add_option("--out", trial_out, "write JSON here instead of stdout");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter and write a CSV table plus manifest");
  std::string axis_name;
  std::vector<double> values;
  std::string sweep_out;
  sweep_cmd->add_option("--config", config_path, "scenario config (YAML key: value)");
  sweep_cmd->add_option("--axis", axis_name, "R | U | d_bs_ue | p_node")->required();
  sweep_cmd->add_option("--values", values, "comma separated axis values")->required()->delimiter(',');
  sweep_cmd->add_option("--trials", trials, "trials per point");
  sweep_cmd->add_option("--seed", seed, "master seed");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path")->required();
  sweep_cmd->add_option("--workers", workers, "parallel workers (default: $DMIMO_WORKERS or all cores)");

  auto* rerun_cmd = app.add_subcommand("rerun", "reproduce a sweep from its manifest");
  std::string manifest_path;
  std::string rerun_out;
  rerun_cmd->add_option("--manifest", manifest_path, "manifest JSON written by sweep")->required();
  rerun_cmd->add_option("--out", rerun_out, "CSV output path")->required();
  rerun_cmd->add_option("--workers", workers, "parallel workers");

  auto* fig_cmd = app.add_subcommand("figures", "run the canonical sweeps behind the capacity figures");
  std::string out_dir = "figures";
  fig_cmd->add_option("--config", config_path, "base scenario config");
  fig_cmd->add_option("--trials", trials, "trials per point");
  fig_cmd->add_option("--seed", seed, "master seed");
  fig_cmd->add_option("--out-dir", out_dir, "output directory");
  fig_cmd->add_option("--workers", workers, "parallel workers");

  CLI11_PARSE(app, argc, argv);

  OutputGuard guard;
  try {
    if (workers == 0) workers = default_workers();

    if (*trial_cmd) {
      const ScenarioConfig cfg = load_config(config_path);
      const std::string json = trial_to_json(run_trial(cfg, seed, trial_index)).dump(2);
      if (trial_out.empty()) {
        std::cout << json << '\n';
      } else {
        guard.add(trial_out);
        write_file_atomically(trial_out, [&](std::ostream& out) { out << json << '\n'; });
      }
    } else if (*sweep_cmd) {
      RunManifest m;
      m.config = load_config(config_path);
      m.master_seed = seed;
      m.axis = parse_axis(axis_name);
      m.values = values;
      m.trials = trials;
      run_and_write(m, sweep_out, workers, guard);
    } else if (*rerun_cmd) {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError("manifest", "cannot open '" + manifest_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest", e.what());
      }
      run_and_write(manifest_from_json(j), rerun_out, workers, guard);
    } else if (*fig_cmd) {
      const ScenarioConfig base = load_config(config_path);
      fs::create_directories(out_dir);
      const fs::path dir(out_dir);
      const std::vector<double> radii{10, 25, 50, 75, 100, 125, 150, 175, 200};
      const std::vector<double> distances = grid(200, 1000, 100);
      auto job = [&](ScenarioConfig cfg, SweepAxis axis, std::vector<double> vals, const std::string& name) {
        RunManifest m;
        m.config = cfg;
        m.master_seed = seed;
        m.axis = axis;
        m.values = std::move(vals);
        m.trials = trials;
        run_and_write(m, dir / name, workers, guard);
      };
      for (int u : {5, 10, 20}) {
        ScenarioConfig cfg = base;
        cfg.nodes = u;
        job(cfg, SweepAxis::radius, radii, "fig3_u" + std::to_string(u) + ".csv");
      }
      for (int u : {0, 5, 10, 20}) {
        ScenarioConfig cfg = base;
        cfg.nodes = u;
        job(cfg, SweepAxis::d_bs_ue, distances, "fig4_u" + std::to_string(u) + ".csv");
      }
      {
        ScenarioConfig cfg = base;
        cfg.nodes = 1;
        cfg.d_bs_ue_m = 1000.0;
        job(cfg, SweepAxis::p_node, grid(base.p_bs_dbm - 30.0, base.p_bs_dbm, 3.0), "fig5.csv");
      }
      for (Phase1Policy policy : {Phase1Policy::min, Phase1Policy::median, Phase1Policy::max}) {
        ScenarioConfig cfg = base;
        cfg.nodes = 10;
        cfg.phase1_policy = policy;
        job(cfg, SweepAxis::d_bs_ue, distances, "fig7_" + std::string(to_string(policy)) + ".csv");
      }
    }
    guard.commit();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
