#include "cli.hpp"

#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "swflood/dsm_builder.hpp"
#include "swflood/errors.hpp"
#include "swflood/raster_io.hpp"
#include "swflood/simulation.hpp"
#include "swflood/validation.hpp"

namespace swflood::cli {

Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Shallow-water flood simulation on raster surface models", "swflood"};
  app.require_subcommand(1);

  BuildDsm build;
  auto* b = app.add_subcommand("build-dsm", "Extrude classified vector features onto a terrain raster");
  b->add_option("--dtm", build.dtm, "Terrain raster (ASCII grid)")->required();
  b->add_option("--features", build.features, "Classified feature file")->required();
  b->add_option("--classes", build.classes, "Selected class ids, one per line")->required();
  b->add_option("--close-tolerance", build.close_tolerance, "Distance in metres under which lines are closed")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  b->add_option("--out", build.out, "Output DSM raster")->required();

  Run run;
  int blocks = 0;
  auto* r = app.add_subcommand("run", "Run a flood scenario");
  r->add_option("--config", run.config, "Scenario file")->required();
  auto* blocks_opt = r->add_option("--blocks", blocks, "Number of domain blocks")->check(CLI::PositiveNumber);

  Validate val;
  auto* v = app.add_subcommand("validate", "Compare the solver with an analytical solution");
  v->add_option("--case", val.case_name, "Test case")
      ->required()
      ->check(CLI::IsMember({"lake-at-rest", "lake-emerged", "ritter", "stoker"}));
  v->add_option("--n", val.n, "Cells along the strip (also runs n/2)")->capture_default_str()->check(CLI::Range(10, 1 << 20));
  v->add_option("--report", val.report, "Write a CSV of error norms and observed orders");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = app.exit(e, out, err);
    throw UsageExit(code == 0 ? out.str() : err.str(), code == 0 ? 0 : 1);
  }

  if (b->parsed()) return build;
  if (r->parsed()) {
    if (blocks_opt->count() > 0) run.blocks = blocks;
    return run;
  }
  return val;
}

int resolve_blocks(const std::optional<int>& cli, const char* env, int config) {
  if (cli) return *cli;
  if (env != nullptr && *env != '\0') {
    int value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end || value < 1) {
      throw ConfigError(std::string("SWFLOOD_BLOCKS must be a positive integer, got '") + env + "'");
    }
    return value;
  }
  return config;
}

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("swflood");
    l->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(l);
    spdlog::cfg::load_env_levels();
    return l;
  }();
  return log;
}

int build_dsm_command(const BuildDsm& cmd) {
  const RasterGrid dtm = read_ascii_grid_file(cmd.dtm);
  const auto features = dsm::parse_features_file(cmd.features);
  const auto classes = dsm::parse_class_selection_file(cmd.classes);
  dsm::ExtrudeReport report;
  const RasterGrid out = dsm::build_dsm(dtm, features, classes, {cmd.close_tolerance}, &report);
  write_ascii_grid_file(cmd.out, out);
  logger()->info("wrote {} ({}x{}) from {} features", cmd.out, out.ncols, out.nrows, features.size());
  if (report.skipped_nodata > 0) logger()->warn("{} feature cells fell on nodata and were skipped", report.skipped_nodata);
  return 0;
}

nlohmann::json mass_json(const MassBalance& mb) {
  return {{"initial_storage_m3", mb.initial_storage}, {"final_storage_m3", mb.final_storage},
          {"inflow_m3", mb.inflow},                   {"outflow_m3", mb.outflow},
          {"imbalance_m3", mb.imbalance()},           {"relative_closure", mb.relative_closure()}};
}

void write_summary(const Scenario& scn, const nlohmann::json& summary) {
  if (scn.output_dir.empty()) return;
  std::filesystem::create_directories(scn.output_dir);
  std::ofstream out(scn.output_dir / "summary.json");
  out << summary.dump(2) << '\n';
  if (!out) throw Error("cannot write " + (scn.output_dir / "summary.json").string());
}

int run_command(const Run& cmd) {
  auto log = logger();
  Scenario scn = load_scenario(cmd.config);
  scn.solver.blocks = resolve_blocks(cmd.blocks, std::getenv("SWFLOOD_BLOCKS"), scn.solver.blocks);
  for (const auto& w : scn.warnings) log->warn("{}", w);
  log->info("scenario {}: {}x{} cells, {} s, {} block(s)", cmd.config, scn.dsm.ncols, scn.dsm.nrows,
            scn.total_duration, scn.solver.blocks);

  nlohmann::json summary = {{"config", cmd.config}, {"blocks", scn.solver.blocks},
                            {"total_duration_s", scn.total_duration}};
  Simulation sim(scn);
  double next_report = 0.1 * scn.total_duration;
  try {
    sim.advance_to(scn.total_duration, [&](const Simulation& s, const StepDiagnostics& d) {
      if (s.time() >= next_report) {
        log->info("t={:.1f} s, step {}, dt={:.3e} s, max wave speed {:.3f} m/s", s.time(), s.steps(), d.dt_used,
                  d.max_wave_speed);
        next_report += 0.1 * scn.total_duration;
      }
    });
  } catch (const NumericalError& e) {
    summary["status"] = "numerical_abort";
    summary["error"] = e.what();
    summary["steps"] = e.step();
    summary["end_time_s"] = e.time();
    summary["cell"] = {{"col", e.col()}, {"row", e.row()}};
    write_summary(scn, summary);
    throw;
  }
  sim.write_maxima();

  const MassBalance mb = sim.mass_balance();
  double peak = 0.0;
  const auto& max_h = sim.maxima().max_h;
  for (int j = 0; j < max_h.ny(); ++j) {
    for (int i = 0; i < max_h.nx(); ++i) peak = std::max(peak, max_h(i, j));
  }
  summary["status"] = "ok";
  summary["steps"] = sim.steps();
  summary["end_time_s"] = sim.time();
  summary["mass_balance"] = mass_json(mb);
  summary["max_depth_m"] = peak;
  summary["critical_fallbacks"] = sim.critical_fallbacks();
  summary["snapshots"] = sim.snapshots().size();
  write_summary(scn, summary);
  log->info("done: {} steps, mass-balance closure {:.3e}, max depth {:.3f} m", sim.steps(), mb.relative_closure(),
            peak);
  if (sim.critical_fallbacks() > 0) {
    log->warn("inflow fell back to the critical state {} times", sim.critical_fallbacks());
  }
  return 0;
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : fmt::format("{:.10g}", v); }

int validate_command(const Validate& cmd) {
  auto log = logger();
  const auto rows = validation::validate_case(cmd.case_name, cmd.n);
  for (const auto& row : rows) {
    log->info("{} n={}: L1(h)={:.4e} L2(h)={:.4e} Linf(h)={:.4e} order={}", row.case_name, row.n, row.h.l1,
              row.h.l2, row.h.linf, csv_number(row.order_l1_h));
  }
  if (!cmd.report.empty()) {
    std::ofstream out(cmd.report);
    if (!out) throw ConfigError("cannot write report '" + cmd.report + "'");
    out << "case,n,l1_h,l2_h,linf_h,l1_u,l2_u,linf_u,order_l1_h\n";
    for (const auto& r : rows) {
      out << r.case_name << ',' << r.n << ',' << csv_number(r.h.l1) << ',' << csv_number(r.h.l2) << ','
          << csv_number(r.h.linf) << ',' << csv_number(r.u.l1) << ',' << csv_number(r.u.l2) << ','
          << csv_number(r.u.linf) << ',' << csv_number(r.order_l1_h) << '\n';
    }
    if (!out) throw Error("I/O failure writing '" + cmd.report + "'");
  }
  return 0;
}

}  // namespace

int execute(const Command& command) {
  auto log = logger();
  try {
    return std::visit(
        [](const auto& cmd) {
          using T = std::decay_t<decltype(cmd)>;
          if constexpr (std::is_same_v<T, BuildDsm>) {
            return build_dsm_command(cmd);
          } else if constexpr (std::is_same_v<T, Run>) {
            return run_command(cmd);
          } else {
            return validate_command(cmd);
          }
        },
        command);
  } catch (const NumericalError& e) {
    log->error("numerical abort: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return 1;
  }
}

}  // namespace swflood::cli
