// Command-line front end: solve / simulate / evaluate / verify pipelines.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tzliq/config.hpp"
#include "tzliq/hjb_solver.hpp"
#include "tzliq/io.hpp"
#include "tzliq/verification.hpp"
#include "tzliq/version.hpp"

namespace fs = std::filesystem;
using namespace tzliq;

namespace {

// Stable exit codes (documented in the README):
//   0 success, 1 unexpected error, 2 config/validation failure,
//   3 ladder non-convergence, 4 missing artifact,
//   10+k first failing verify suite (validate=0, envelope=1, monotonicity=2,
//   comparison=3, skorokhod=4, decay=5, holder=6).
constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kConfigError = 2;
constexpr int kLadderError = 3;
constexpr int kMissingArtifact = 4;
constexpr int kSuiteBase = 10;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // flag override
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
};

struct Context {
  RunConfig cfg;
  Provenance prov;
  fs::path out;
};

// precedence: config < environment (TZLIQ_OUT, TZLIQ_SEED) < flags
Context make_context(const CommonArgs& args) {
  Context ctx;
  ctx.cfg = load_config(args.config_path);
  if (const char* env = std::getenv("TZLIQ_OUT")) ctx.cfg.out_dir = env;
  if (const char* env = std::getenv("TZLIQ_SEED")) ctx.cfg.seed = std::stoull(env);
  if (!args.out_dir.empty()) ctx.cfg.out_dir = args.out_dir;
  if (args.seed) ctx.cfg.seed = *args.seed;
  if (args.paths) ctx.cfg.n_paths = *args.paths;
  ctx.prov = Provenance{config_hash(ctx.cfg), ctx.cfg.seed};
  ctx.out = ctx.cfg.out_dir;
  fs::create_directories(ctx.out);
  return ctx;
}

int validated_model(const Context& ctx, ModelParams& model) {
  model = build_model(ctx.cfg);
  const AuditGrid audit = AuditGrid::make(model, ctx.cfg.y_max);
  const auto violations = validate(model, audit);
  if (!violations.empty()) {
    std::cerr << "model validation failed (" << violations.size() << " violations):\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 8); ++i) {
      const auto& v = violations[i];
      std::cerr << "  " << v.rule << " at (t=" << v.t << ", y=" << v.y << "): " << v.value
                << "\n";
    }
    return kConfigError;
  }
  return kOk;
}

int cmd_solve(const CommonArgs& args) {
  const Context ctx = make_context(args);
  ModelParams model;
  if (int rc = validated_model(ctx, model); rc != kOk) return rc;
  const Grid grid = build_grid(ctx.cfg);

  SingularLimitOptions lim;
  lim.eps_ladder = ctx.cfg.eps_ladder;
  if (ctx.cfg.tau_mono && ctx.cfg.tau_env) {
    lim.tau_mono = *ctx.cfg.tau_mono;
    lim.tau_env = *ctx.cfg.tau_env;
  } else {
    const double err = scheme_error_estimate(model, grid, ctx.cfg.m_schedule.back());
    lim.tau_mono = ctx.cfg.tau_mono.value_or(10.0 * err);
    lim.tau_env = ctx.cfg.tau_env.value_or(10.0 * err);
    std::cout << "measured scheme error " << err << " -> tau = " << 10.0 * err << "\n";
  }

  LadderResult ladder;
  ValueSurface surface;
  try {
    ladder = solve_ladder(model, grid, ctx.cfg.m_schedule);
    surface = singular_limit(model, grid, ctx.cfg.m_schedule, ctx.cfg.t_cut, {}, lim);
  } catch (const LadderError& e) {
    std::cerr << "ladder not converged: " << e.what() << "\n";
    return kLadderError;
  }

  const auto has_format = [&](const char* f) {
    for (const auto& s : ctx.cfg.formats)
      if (s == f) return true;
    return false;
  };
  if (has_format("csv")) write_surface_csv((ctx.out / "surface.csv").string(), surface, ctx.prov);
  if (has_format("bin")) write_surface_bin((ctx.out / "surface.bin").string(), surface, ctx.prov);

  const EnvelopePair env = ode_envelopes(model, surface.truncation_level);
  write_envelopes_csv((ctx.out / "envelopes.csv").string(), env, surface.grid.t_grid, ctx.prov);

  {
    std::ofstream log(ctx.out / "ladder_log.csv");
    log.precision(17);
    log << provenance_lines(ctx.prov);
    log << "rung,M,u0_at_y0,gap_vs_prev_on_tcut,mono_defect_vs_prev\n";
    for (std::size_t r = 0; r < ladder.rungs.size(); ++r) {
      double gap = 0.0, defect = 0.0;
      if (r > 0) {
        const auto& a = ladder.rungs[r - 1];
        const auto& b = ladder.rungs[r];
        for (std::size_t k = 0; k < b.n_time_nodes() && b.grid.t_grid[k] <= ctx.cfg.t_cut; ++k)
          for (std::size_t j = 0; j < grid.n_space; ++j) {
            gap = std::max(gap, std::abs(b.at(k, j) - a.at(k, j)) /
                                    std::max(1.0, std::abs(b.at(k, j))));
            defect = std::max(defect, (a.at(k, j) - b.at(k, j)) /
                                          std::max(1.0, std::abs(b.at(k, j))));
          }
      }
      log << r << ',' << ladder.m_schedule[r] << ','
          << interpolate(ladder.rungs[r], 0.0, ctx.cfg.y0) << ',' << gap << ',' << defect
          << '\n';
    }
    if (ladder.rungs.size() == 1) log << "# single rung\n";
  }
  std::cout << "surface written to " << ctx.out.string() << " (t_cut = " << surface.t_max()
            << ", M = " << surface.truncation_level << ")\n";
  return kOk;
}

int load_surface(const Context& ctx, ValueSurface& surface) {
  const fs::path p = ctx.out / "surface.bin";
  if (!fs::exists(p)) {
    std::cerr << "surface artifact missing: " << p.string() << " (run `tzliq solve` first)\n";
    return kMissingArtifact;
  }
  surface = read_surface_bin(p.string());
  return kOk;
}

int cmd_simulate(const CommonArgs& args) {
  const Context ctx = make_context(args);
  ModelParams model;
  if (int rc = validated_model(ctx, model); rc != kOk) return rc;

  Strategy strategy = Strategy::twap();
  ValueSurface surface;
  double t_cut = ctx.cfg.t_cut;
  if (ctx.cfg.strategy == "twap") {
    t_cut = model.T;
  } else {
    if (int rc = load_surface(ctx, surface); rc != kOk) return rc;
    if (ctx.cfg.strategy == "optimal") {
      strategy = Strategy::optimal(surface);
    } else if (ctx.cfg.strategy == "no-dark-pool") {
      strategy = Strategy::no_dark_pool(surface);
    } else {
      std::cerr << "unknown strategy '" << ctx.cfg.strategy << "'\n";
      return kConfigError;
    }
    t_cut = std::min(ctx.cfg.t_cut, surface.t_max());
  }

  std::ofstream summary(ctx.out / "summary.csv");
  summary.precision(17);
  summary << provenance_lines(ctx.prov);
  summary << "path,y_end,x_end,cost_impact,cost_risk,cost_slippage,executions\n";
  for (std::size_t i = 0; i < ctx.cfg.n_paths; ++i) {
    const ReflectedPath path =
        simulate_path(model, ctx.cfg.y0, ctx.cfg.dt, rng::Stream{ctx.cfg.seed, i});
    const LiquidationRun run = run_strategy(model, strategy, path, ctx.cfg.x0, t_cut);
    summary << i << ',' << run.y_end() << ',' << run.x_end() << ',' << run.cost_impact.back()
            << ',' << run.cost_risk.back() << ',' << run.cost_slippage.back() << ','
            << run.executions.size() << '\n';
    if (i < ctx.cfg.dump_paths) {
      const std::string tag = std::to_string(i);
      write_path_csv((ctx.out / ("path_" + tag + ".csv")).string(), path, ctx.prov);
      write_path_events_csv((ctx.out / ("path_" + tag + "_events.csv")).string(), path,
                            ctx.prov);
      write_run_csv((ctx.out / ("run_" + tag + ".csv")).string(), run, ctx.prov);
      write_run_events_csv((ctx.out / ("run_" + tag + "_events.csv")).string(), run, ctx.prov);
    }
  }
  std::cout << "simulated " << ctx.cfg.n_paths << " paths (strategy " << strategy.name()
            << ", t_cut " << t_cut << ")\n";
  return kOk;
}

int cmd_evaluate(const CommonArgs& args) {
  const Context ctx = make_context(args);
  ModelParams model;
  if (int rc = validated_model(ctx, model); rc != kOk) return rc;
  ValueSurface surface;
  if (int rc = load_surface(ctx, surface); rc != kOk) return rc;

  const double t_cut = std::min(ctx.cfg.t_cut, surface.t_max());
  const std::vector<Strategy> strategies = {Strategy::optimal(surface), Strategy::twap(),
                                            Strategy::no_dark_pool(surface)};
  McOptions mc{ctx.cfg.n_paths, ctx.cfg.dt, ctx.cfg.seed, Exec::openmp};
  const DominanceReport rep =
      verify_dominance(model, surface, strategies, ctx.cfg.x0, ctx.cfg.y0, mc, t_cut);

  std::ofstream(ctx.out / "cost_report.json") << dominance_report_to_json(rep);
  std::ofstream csv(ctx.out / "cost_summary.csv");
  csv.precision(17);
  csv << provenance_lines(ctx.prov);
  csv << "strategy,mean_total,stderr_total,mean_impact,mean_risk,mean_slippage,mean_terminal\n";
  for (const auto& r : rep.reports) {
    csv << r.strategy << ',' << r.mean_total << ',' << r.stderr_total << ',' << r.mean_impact
        << ',' << r.mean_risk << ',' << r.mean_slippage << ',' << r.mean_terminal << '\n';
  }
  for (const auto& p : rep.pairs) {
    std::cout << p.a << " - " << p.b << ": paired diff " << p.mean_diff << " (z = " << p.z
              << ")\n";
  }
  return kOk;
}

int cmd_verify(const CommonArgs& args) {
  const Context ctx = make_context(args);

  std::vector<Fixture> catalog;
  for (const std::string& name : ctx.cfg.fixtures) {
    if (name == "builtin") {
      for (auto& f : builtin_catalog()) catalog.push_back(std::move(f));
    } else if (name == "config") {
      ModelParams model;
      if (int rc = validated_model(ctx, model); rc != kOk) return rc;
      Fixture f;
      f.name = "config";
      f.params = model;
      f.y_max = ctx.cfg.y_max;
      f.m_schedule = ctx.cfg.m_schedule;
      f.t_cut = ctx.cfg.t_cut;
      f.mc = McOptions{std::min<std::size_t>(ctx.cfg.n_paths, 2000), ctx.cfg.dt, ctx.cfg.seed,
                       Exec::openmp};
      catalog.push_back(std::move(f));
    } else if (name == "broken-superparabolicity") {
      catalog.push_back(broken_fixture());
    } else {
      bool found = false;
      for (auto& f : builtin_catalog()) {
        if (f.name == name) {
          catalog.push_back(std::move(f));
          found = true;
        }
      }
      if (!found) {
        std::cerr << "unknown fixture '" << name << "'\n";
        return kConfigError;
      }
    }
  }

  const PropertyReport rep = run_property_suites(catalog);
  std::ofstream(ctx.out / "verify_report.json") << property_report_to_json(rep, ctx.prov);
  write_suite_summary_csv((ctx.out / "verify_summary.csv").string(), rep, ctx.prov);

  for (const auto& r : rep.results) {
    std::cout << (r.verdict == "pass" ? "[PASS]" : r.verdict == "fail" ? "[FAIL]" : "[SKIP]")
              << " " << r.fixture << "/" << r.suite << " " << r.statistic_name << " = "
              << r.statistic << " (tol " << r.tolerance << ")\n";
  }
  if (!rep.all_pass()) {
    static const char* order[] = {"validate", "envelope",  "monotonicity", "comparison",
                                  "skorokhod", "decay",    "holder"};
    const std::string failing = rep.first_failing_suite().value_or("validate");
    int idx = 0;
    for (int i = 0; i < 7; ++i)
      if (failing == order[i]) idx = i;
    std::cerr << "first failing suite: " << failing << "\n";
    return kSuiteBase + idx;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               " - target-zone optimal liquidation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "run configuration file")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config and TZLIQ_OUT)");
    sub->add_option("--seed", args.seed, "RNG seed override");
    sub->add_option("--paths", args.paths, "path count override");
  };

  auto* solve = app.add_subcommand("solve", "solve the truncated ladder and export the surface");
  auto* simulate = app.add_subcommand("simulate", "simulate paths and strategy runs");
  auto* evaluate = app.add_subcommand("evaluate", "compare strategies on common paths");
  auto* verify = app.add_subcommand("verify", "run the property suites");
  for (auto* sub : {solve, simulate, evaluate, verify}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (evaluate->parsed()) return cmd_evaluate(args);
    if (verify->parsed()) return cmd_verify(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const LadderError& e) {
    std::cerr << "ladder error: " << e.what() << "\n";
    return kLadderError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
