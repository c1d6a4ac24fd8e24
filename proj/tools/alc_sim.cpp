// Closed-loop lane-centering simulator CLI: run single scenarios, attack
// sweeps, attack calibration, and report aggregation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alc/harness.hpp"
#include "alc/scenario_io.hpp"

namespace {

alc::Variant parse_variant(const std::string& s) {
  if (s == "baseline") return alc::Variant::kBaseline;
  if (s == "mitigated") return alc::Variant::kMitigated;
  if (s == "mitigated_no_cache") return alc::Variant::kMitigatedNoCache;
  throw CLI::ValidationError("--variant", "must be baseline|mitigated|mitigated_no_cache");
}

alc::ScenarioConfig load_or_default(const std::string& path) {
  if (path.empty()) return {};
  return alc::load_scenario(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware lane-centering simulation harness"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string lock_path = "calibration.json";
  std::string variant_str = "mitigated";
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario YAML file (defaults when omitted)");
    cmd->add_option("--seed", seed_override, "Override the scenario seed");
    cmd->add_option("--out", out_dir, "Output directory");
  };

  CLI::App* run = app.add_subcommand("run", "Run one closed-loop scenario");
  add_common(run);
  run->add_option("--variant", variant_str, "baseline|mitigated|mitigated_no_cache");
  run->add_option("--lock", lock_path, "Calibration lockfile to apply if present");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Patch-position x strength sweep");
  add_common(sweep_cmd);
  std::vector<double> positions{40.0, 80.0, 120.0};
  std::vector<double> strengths{0.25, 0.5, 0.75, 1.0};
  sweep_cmd->add_option("--positions", positions, "Patch start positions [m]")->delimiter(',');
  sweep_cmd->add_option("--strengths", strengths, "Attack strengths in [0,1]")->delimiter(',');
  sweep_cmd->add_option("--lock", lock_path, "Calibration lockfile to apply if present");

  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Calibrate the attack to the target band");
  add_common(cal_cmd);
  cal_cmd->add_option("--lock", lock_path, "Lockfile to write");

  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate summaries into tables");
  std::string in_dir = "out";
  report_cmd->add_option("--in", in_dir, "Directory holding run/sweep outputs");
  report_cmd->add_option("--out", out_dir, "Output directory for report.md / report.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      alc::ScenarioConfig cfg = load_or_default(scenario_path);
      if (seed_override) cfg.seed = *seed_override;
      if (auto cal = alc::read_calibration_lock(lock_path)) {
        cfg = alc::apply_calibration(cfg, *cal);
        std::printf("applied calibration: path_bias_gain=%g conf_floor=%g\n",
                    cal->path_bias_gain, cal->conf_floor);
      }
      const alc::Variant variant = parse_variant(variant_str);
      const alc::RunResult result = alc::run_scenario(cfg, variant);
      alc::export_run(result, cfg, out_dir);
      std::printf("%s: max |deviation| = %.4f m, out_of_lane = %s, ticks = %zu\n",
                  variant_str.c_str(), result.max_abs_lateral_deviation,
                  result.out_of_lane ? "true" : "false", result.trace.size());
      std::printf("wrote %s/trace.csv and %s/summary.json\n", out_dir.c_str(), out_dir.c_str());
    } else if (*sweep_cmd) {
      alc::ScenarioConfig cfg = load_or_default(scenario_path);
      if (seed_override) cfg.seed = *seed_override;
      if (auto cal = alc::read_calibration_lock(lock_path)) {
        cfg = alc::apply_calibration(cfg, *cal);
        std::printf("applied calibration: path_bias_gain=%g conf_floor=%g\n",
                    cal->path_bias_gain, cal->conf_floor);
      } else {
        std::printf("warning: no calibration lockfile at %s, using scenario attack gains\n",
                    lock_path.c_str());
      }
      const auto cells = alc::sweep(cfg, positions, strengths);
      alc::export_sweep(cells, cfg, out_dir);
      for (const auto& c : cells) {
        std::printf("patch %6.1f m  strength %4.2f  baseline %.3f m  mitigated %.3f m",
                    c.patch_position, c.strength, c.baseline.max_abs_lateral_deviation,
                    c.mitigated.max_abs_lateral_deviation);
        if (c.mitigation_pct) std::printf("  mitigation %.1f%%", *c.mitigation_pct);
        std::printf("\n");
      }
      std::printf("wrote %s/sweep.json\n", out_dir.c_str());
    } else if (*cal_cmd) {
      alc::ScenarioConfig cfg = load_or_default(scenario_path);
      if (seed_override) cfg.seed = *seed_override;
      const alc::CalibrationResult cal = alc::calibrate(cfg);
      alc::write_calibration_lock(cal, alc::reference_scenario(cfg), lock_path);
      std::printf("calibrated path_bias_gain = %.4f (baseline deviation %.3f m, %s)\n",
                  cal.path_bias_gain, cal.baseline_deviation,
                  cal.converged ? "in band" : "NOT in band");
      std::printf("wrote %s\n", lock_path.c_str());
      return cal.converged ? 0 : 1;
    } else if (*report_cmd) {
      alc::write_report(in_dir, out_dir);
      std::printf("wrote %s/report.md and %s/report.csv\n", out_dir.c_str(), out_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
