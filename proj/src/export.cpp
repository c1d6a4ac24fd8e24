#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "alc/harness.hpp"

namespace alc {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Shortest round-trip decimal form; locale-independent and deterministic.
std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kMitigated: return "mitigated";
    default: return "mitigated_no_cache";
  }
}

json config_echo(const ScenarioConfig& cfg) {
  return json{
      {"road",
       {{"length", cfg.road.length},
        {"lane_width", cfg.road.lane_width},
        {"curvature", cfg.road.curvature},
        {"half_width", cfg.road.half_width}}},
      {"attack",
       {{"patch_start", cfg.attack.patch_start},
        {"patch_length", cfg.attack.patch_length},
        {"strength", cfg.attack.strength},
        {"path_bias_gain", cfg.attack.path_bias_gain},
        {"conf_floor", cfg.attack.conf_floor},
        {"conf_drop_gain", cfg.attack.conf_drop_gain},
        {"exposure_falloff", cfg.attack.exposure_falloff}}},
      {"perception",
       {{"base_noise_sigma", cfg.perception.base_noise_sigma},
        {"noise_growth", cfg.perception.noise_growth},
        {"mc_samples", cfg.perception.mc_samples},
        {"dropout_rate", cfg.perception.dropout_rate},
        {"benign_confidence", cfg.perception.benign_confidence},
        {"num_points", cfg.perception.num_points},
        {"station_spacing", cfg.perception.station_spacing}}},
      {"planner",
       {{"conf_threshold", cfg.planner.conf_threshold},
        {"cache_size", cfg.planner.cache_size},
        {"lane_width", cfg.planner.lane_width}}},
      {"mpc",
       {{"horizon", cfg.mpc.horizon},
        {"max_steer", cfg.mpc.max_steer},
        {"max_heading", cfg.mpc.max_heading},
        {"solver_iters", cfg.mpc.solver_iters},
        {"solver_tol", cfg.mpc.solver_tol}}},
      {"speed",
       {{"alpha_max", cfg.speed.alpha_max},
        {"v_min", cfg.speed.v_min},
        {"v_ref", cfg.speed.v_ref}}},
      {"sim",
       {{"duration", cfg.duration}, {"dt", cfg.dt}, {"seed", cfg.seed},
        {"start_y", cfg.start_y}, {"start_heading", cfg.start_heading}}},
  };
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_trace_csv(const RunResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "tick,t,x,y,heading,v,steering,accel,lr_conf,sigma_left_sum,sigma_right_sum,v_ref\n";
  for (const TraceRow& r : result.trace) {
    out << r.tick << ',' << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.y) << ','
        << fmt(r.heading) << ',' << fmt(r.v) << ',' << fmt(r.steering) << ',' << fmt(r.accel)
        << ',' << fmt(r.lr_conf) << ',' << fmt(r.sigma_left_sum) << ','
        << fmt(r.sigma_right_sum) << ',' << fmt(r.v_ref) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_summary_json(const RunResult& result, const ScenarioConfig& cfg,
                        const std::string& path) {
  json j{
      {"variant", variant_name(result.variant)},
      {"seed", result.seed},
      {"ticks", result.trace.size()},
      {"max_abs_lateral_deviation", result.max_abs_lateral_deviation},
      {"out_of_lane", result.out_of_lane},
      {"truncated", result.truncated},
      {"mitigation_pct",
       result.mitigation_pct ? json(*result.mitigation_pct) : json(nullptr)},
      {"config", config_echo(cfg)},
  };
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void export_run(const RunResult& result, const ScenarioConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_trace_csv(result, (fs::path(out_dir) / "trace.csv").string());
  write_summary_json(result, cfg, (fs::path(out_dir) / "summary.json").string());
}

void export_sweep(const std::vector<SweepCell>& cells, const ScenarioConfig& base,
                  const std::string& out_dir) {
  fs::create_directories(out_dir);
  json all = json::array();
  for (const SweepCell& cell : cells) {
    ScenarioConfig cfg = base;
    cfg.attack.patch_start = cell.patch_position;
    cfg.attack.strength = cell.strength;
    char name[64];
    std::snprintf(name, sizeof(name), "cell_p%g_s%g", cell.patch_position, cell.strength);
    const fs::path dir = fs::path(out_dir) / name;
    fs::create_directories(dir);
    write_trace_csv(cell.baseline, (dir / "baseline_trace.csv").string());
    write_trace_csv(cell.mitigated, (dir / "mitigated_trace.csv").string());
    json cj{
        {"patch_position", cell.patch_position},
        {"strength", cell.strength},
        {"baseline_deviation", cell.baseline.max_abs_lateral_deviation},
        {"mitigated_deviation", cell.mitigated.max_abs_lateral_deviation},
        {"baseline_out_of_lane", cell.baseline.out_of_lane},
        {"mitigated_out_of_lane", cell.mitigated.out_of_lane},
        {"mitigation_pct", cell.mitigation_pct ? json(*cell.mitigation_pct) : json(nullptr)},
        {"seed", base.seed},
    };
    auto out = open_out((dir / "cell.json").string());
    out << cj.dump(2) << '\n';
    all.push_back(cj);
  }
  auto out = open_out((fs::path(out_dir) / "sweep.json").string());
  out << json{{"cells", all}, {"config", config_echo(base)}}.dump(2) << '\n';
}

void write_calibration_lock(const CalibrationResult& cal, const ScenarioConfig& reference,
                            const std::string& path) {
  json j{
      {"path_bias_gain", cal.path_bias_gain},
      {"conf_floor", cal.conf_floor},
      {"baseline_deviation", cal.baseline_deviation},
      {"converged", cal.converged},
      {"reference",
       {{"patch_start", reference.attack.patch_start},
        {"patch_length", reference.attack.patch_length},
        {"strength", reference.attack.strength},
        {"v_ref", reference.speed.v_ref},
        {"seed", reference.seed}}},
  };
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::optional<CalibrationResult> read_calibration_lock(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    CalibrationResult cal;
    cal.path_bias_gain = j.at("path_bias_gain").get<double>();
    cal.conf_floor = j.at("conf_floor").get<double>();
    cal.baseline_deviation = j.at("baseline_deviation").get<double>();
    cal.converged = j.at("converged").get<bool>();
    return cal;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void write_report(const std::string& in_dir, const std::string& out_dir) {
  // Collect per-cell summaries (sweep output) and standalone run summaries.
  std::map<std::string, json> cells;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string fname = entry.path().filename().string();
    if (fname != "cell.json" && fname != "summary.json") continue;
    std::ifstream in(entry.path());
    json j;
    try {
      in >> j;
    } catch (const json::exception&) {
      continue;
    }
    cells.emplace(entry.path().string(), std::move(j));
  }

  fs::create_directories(out_dir);
  auto md = open_out((fs::path(out_dir) / "report.md").string());
  auto csv = open_out((fs::path(out_dir) / "report.csv").string());
  md << "| source | patch position [m] | strength | baseline dev [m] | mitigated dev [m] | "
        "mitigation [%] |\n";
  md << "|---|---|---|---|---|---|\n";
  csv << "source,patch_position,strength,baseline_deviation,mitigated_deviation,"
         "mitigation_pct\n";
  auto cell_str = [](const json& j, const char* key) -> std::string {
    if (!j.contains(key) || j.at(key).is_null()) return "-";
    const json& v = j.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& [path, j] : cells) {
    const std::string rel = fs::relative(path, in_dir).string();
    if (j.contains("baseline_deviation")) {  // sweep cell
      md << "| " << rel << " | " << cell_str(j, "patch_position") << " | "
         << cell_str(j, "strength") << " | " << cell_str(j, "baseline_deviation") << " | "
         << cell_str(j, "mitigated_deviation") << " | " << cell_str(j, "mitigation_pct")
         << " |\n";
      csv << rel << ',' << cell_str(j, "patch_position") << ',' << cell_str(j, "strength") << ','
          << cell_str(j, "baseline_deviation") << ',' << cell_str(j, "mitigated_deviation") << ','
          << cell_str(j, "mitigation_pct") << '\n';
    } else if (j.contains("max_abs_lateral_deviation")) {  // single run
      md << "| " << rel << " (" << cell_str(j, "variant") << ") | - | - | - | "
         << cell_str(j, "max_abs_lateral_deviation") << " | " << cell_str(j, "mitigation_pct")
         << " |\n";
      csv << rel << ",-,-,-," << cell_str(j, "max_abs_lateral_deviation") << ','
          << cell_str(j, "mitigation_pct") << '\n';
    }
  }
}

}  // namespace alc
