// Acceptance suite: every checkable claim is exercised end to end at desk
// scale, one pass/fail line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tzliq/hjb_solver.hpp"
#include "tzliq/verification.hpp"

using namespace tzliq;
using namespace tzliq::testfix;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// "general" fixture: y-dependent risk aversion, drift, both noises, finite
// dark-pool slippage on two marks
ModelParams general_model() {
  ModelParams p = ydep_model();
  p.marks = {{0.0, 0.6}, {1.0, 0.9}};
  p.gamma = {Coefficient::constant(0.5), Coefficient::constant(1.0)};
  return p;
}

// oracle with gamma = +inf and envelope headroom, used by the decay and
// Holder criteria: the solution is u(t) = 1/((T-t) + 1/M)
ModelParams decay_model() {
  ModelParams p = oracle_model();
  p.gamma = {Coefficient::constant(kInf)};
  p.Lambda = 1.2;
  return p;
}

void criterion_1_closed_form() {
  const ModelParams p = oracle_model();
  const Grid grid = make_grid(0.0, 2.0, 400, 170, 30, 0.85, 1.0);  // 200 x 400
  ValueSurface s;
  const double elapsed = seconds([&] { s = solve_truncated(p, grid, 10.0); });
  const double cf = 1.0 / (1.1 * std::exp(1.0) - 1.0);  // 0.502485...
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.n_space; ++j)
    worst = std::max(worst, std::abs(s.at(0, j) - cf) / cf);
  report(1, "closed-form truncated solution",
         worst <= 1e-3 && elapsed < 5.0,
         fmt("rel err %.2e (tol 1e-3), %.2fs (budget 5s)", worst, elapsed));
}

void criterion_2_gamma_envelope() {
  const ModelParams p = gamma_model();
  const Grid grid = make_grid(0.0, 2.0, 100, 340, 60, 0.9, 1.0);
  const double M = 20.0;
  const ValueSurface s = solve_truncated(p, grid, M);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.n_time_nodes(); ++k) {
    const double t = grid.t_grid[k];
    if (t > 0.99 * p.T) continue;
    const double oracle = rk4_gamma(t, M, p.q, p.T, p.Lambda);
    worst = std::max(worst, std::abs(s.at(k, 0) - oracle) / oracle);
  }
  report(2, "Gamma^M upper-envelope agreement", worst <= 1e-3,
         fmt("rel err %.2e vs RK4 (tol 1e-3, t <= 0.99T)", worst));
}

void criterion_3_ladder_and_sandwich() {
  const std::vector<double> schedule{1.0, 10.0, 100.0, 1000.0};
  bool pass = true;
  std::string detail;
  for (const auto& [name, params] :
       {std::pair<const char*, ModelParams>{"oracle", oracle_model()},
        {"ydep", ydep_model()},
        {"darkpool", darkpool_model()}}) {
    const Grid grid = make_grid(0.0, 4.0, 120, 160, 60, 0.9, 1.0);
    const double tau = 10.0 * scheme_error_estimate(params, grid, schedule.back());
    const LadderResult ladder = solve_ladder(params, grid, schedule);
    double env_defect = -1e300;
    for (std::size_t r = 0; r < ladder.rungs.size(); ++r)
      env_defect = std::max(
          env_defect, envelope_defect(ladder.rungs[r], ode_envelopes(params, schedule[r])));
    const bool ok = ladder.monotonicity_violation <= tau && env_defect <= tau;
    pass = pass && ok;
    detail += fmt("%s: mono %.1e env %.1e tau %.1e; ", name, ladder.monotonicity_violation,
                  env_defect, tau);
  }
  report(3, "ladder monotonicity + sandwich", pass, detail);
}

void criterion_4_comparison() {
  const ModelParams p1 = oracle_model();
  ModelParams p2 = p1;
  p2.lam = Coefficient::constant(1.0);
  const Grid grid = make_grid(0.0, 4.0, 120, 160, 60, 0.9, 1.0);
  const double tau = 10.0 * scheme_error_estimate(p1, grid, 100.0);
  const ComparisonVerdict v = comparison_harness(p1, p2, grid, 100.0);
  report(4, "comparison harness lam1 <= lam2", v.max_violation <= tau,
         fmt("max violation %.2e (tau %.2e)", v.max_violation, tau));
}

void criterion_5_reflected_law() {
  ModelParams p = oracle_model();
  p.marks.clear();
  p.gamma.clear();
  const std::size_t n = 100000;
  const double dt = 1.0 / 32768.0;
  PathBatchStats stats;
  const double elapsed =
      seconds([&] { stats = simulate_batch_stats(p, 0.0, dt, n, 20240809); });

  const double target = std::sqrt(2.0 / M_PI);
  const double dev = std::abs(stats.mean_y_end - target);
  const bool mean_ok = dev <= 3.0 * stats.stderr_y_end;
  const bool skorokhod_ok = stats.max_skorokhod_product == 0.0 && stats.min_y >= 0.0;

  std::vector<double> ends = stats.y_end;
  std::sort(ends.begin(), ends.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const double cdf = std::erf(ends[i] / std::sqrt(2.0));
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / ends.size()));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / ends.size()));
  }
  const double ks_crit = 1.628 / std::sqrt(static_cast<double>(n));
  const bool runtime_ok = elapsed < 30.0;

  report(5, "reflected-path law",
         mean_ok && skorokhod_ok && ks < ks_crit && runtime_ok,
         fmt("E|y_T| dev %.2e (3se %.2e), KS %.2e (crit %.2e), skorokhod max %.1e, %.1fs",
             dev, 3.0 * stats.stderr_y_end, ks, ks_crit, stats.max_skorokhod_product,
             elapsed));
}

void criterion_6_dp_identity() {
  // statistical check on the general fixture
  const ModelParams p = general_model();
  const Grid grid = make_grid(0.0, 4.0, 120, 160, 60, 0.9, 1.0);
  const double M = 200.0;
  const ValueSurface s = solve_truncated(p, grid, M);
  const EnvelopePair env = ode_envelopes(p, M);
  const McOptions mc{100000, 5e-4, 60901, Exec::openmp};
  const double rel_err = scheme_error_estimate(p, grid, M);
  const auto allow = dp_identity_allowance(p, s, env, 1.0, 1.0, mc, 0.5, rel_err);
  const CostReport r = verify_value(p, s, env, 1.0, 1.0, mc, 0.5, allow.total());

  // deterministic check on the oracle fixture (single path, no noise)
  const ModelParams po = gamma_model();
  const Grid go = make_grid(0.0, 4.0, 80, 200, 80, 0.9, 1.0);
  const ValueSurface so = solve_truncated(po, go, 50.0);
  const EnvelopePair envo = ode_envelopes(po, 50.0);
  const McOptions mco{1, 5e-4, 1, Exec::serial};
  const double rel_err_o = scheme_error_estimate(po, go, 50.0);
  const auto allow_o = dp_identity_allowance(po, so, envo, 1.0, 1.0, mco, 0.5, rel_err_o);
  const CostReport ro = verify_value(po, so, envo, 1.0, 1.0, mco, 0.5, allow_o.total());

  report(6, "dynamic-programming identity", r.pass && ro.pass,
         fmt("general: diff %.2e vs 3se+allow %.2e; oracle: diff %.2e vs allow %.2e",
             std::abs(r.diff), 3.0 * r.stderr_total + r.allowance, std::abs(ro.diff),
             ro.allowance));
}

void criterion_7_dominance() {
  const ModelParams p = darkpool_model();
  const Grid grid = make_grid(0.0, 4.0, 120, 160, 60, 0.9, 1.0);
  const ValueSurface s = solve_truncated(p, grid, 200.0);
  const std::vector<Strategy> strategies = {Strategy::optimal(s), Strategy::twap(),
                                            Strategy::no_dark_pool(s)};
  const McOptions mc{100000, 5e-4, 70902, Exec::openmp};
  const DominanceReport rep = verify_dominance(p, s, strategies, 1.0, 1.0, mc, 0.5);
  const bool pass = rep.pairs.size() == 2 && rep.pairs[0].z <= -3.0 && rep.pairs[1].z <= -3.0;
  report(7, "dominance over baselines", pass,
         fmt("paired z: vs twap %.1f, vs no-dark-pool %.1f (need <= -3)", rep.pairs[0].z,
             rep.pairs[1].z));
}

void criterion_8_feynman_kac() {
  // statistical probes on the y-dependent fixture with a finite-M surface
  const ModelParams p = ydep_model();
  const Grid grid = make_grid(0.0, 4.0, 120, 160, 60, 0.9, 1.0);
  const ValueSurface s = solve_truncated(p, grid, 50.0);
  const std::vector<FkProbe> probes = {{0.0, 0.0}, {0.0, 1.0}, {0.2, 2.0}};
  const McOptions mc{100000, 2.5e-4, 80903, Exec::openmp};
  const double rel_err = scheme_error_estimate(p, grid, 50.0);
  const auto allow = fk_allowance(p, s, probes, 0.8, mc, rel_err);
  const FkReport rep = verify_feynman_kac(p, s, probes, 0.8, mc, allow.total());
  // z after deducting the discretization allowance from the difference
  double worst_z = 0.0;
  for (const auto& row : rep.rows) {
    const double excess =
        std::max(0.0, std::abs(row.right_mean - row.left) - rep.allowance);
    worst_z = std::max(worst_z, row.stderr_right > 0 ? excess / row.stderr_right : 0.0);
  }

  // exact (quadrature-only) agreement on the space-constant fixture
  // (no marks, so every path quadratures the same grid)
  ModelParams po = gamma_model();
  po.marks.clear();
  po.gamma.clear();
  const Grid go = make_grid(0.0, 4.0, 80, 200, 80, 0.9, 1.0);
  const ValueSurface so = solve_truncated(po, go, 50.0);
  const McOptions mco{2, 5e-4, 2, Exec::serial};
  const double rel_err_o = scheme_error_estimate(po, go, 50.0);
  const auto allow_o = fk_allowance(po, so, {{0.0, 1.0}}, 0.8, mco, rel_err_o);
  const FkReport repo = verify_feynman_kac(po, so, {{0.0, 1.0}}, 0.8, mco, allow_o.total());

  report(8, "Feynman-Kac representation", rep.all_pass && repo.all_pass,
         fmt("max |z| %.2f after allowance %.1e (need <= 4); space-constant diff %.2e "
             "(allow %.1e)",
             worst_z, rep.allowance, std::abs(repo.rows[0].right_mean - repo.rows[0].left),
             repo.allowance));
}

void criterion_9_decay() {
  const ModelParams p = decay_model();
  const Grid grid = make_grid(0.0, 2.0, 80, 300, 120, 0.93, 1.0);
  const double M = 10000.0;
  const ValueSurface s = solve_truncated(p, grid, M);
  const EnvelopePair env = ode_envelopes(p, M);
  const double t_cuts[3] = {0.9, 0.99, 0.999};
  bool bound_ok = true, monotone_ok = true;
  double worst_margin = 1e300;
  for (std::size_t i = 0; i < 1000; ++i) {
    const ReflectedPath path = simulate_path(p, 0.5, 5e-4, {90904, i});
    double prev = 1e300;
    for (double tc : t_cuts) {
      const LiquidationRun run = run_strategy(p, Strategy::optimal(s), path, 1.0, tc);
      const DecayVerdict v = terminal_decay_check(run, p, env);
      bound_ok = bound_ok && v.pass;
      worst_margin = std::min(worst_margin, v.worst_margin);
      monotone_ok = monotone_ok && std::abs(run.x_end()) < prev;
      prev = std::abs(run.x_end());
    }
  }
  report(9, "optimal-inventory decay", bound_ok && monotone_ok,
         fmt("worst margin %.2e, residual decreasing pathwise across {0.9,0.99,0.999}T: %s",
             worst_margin, monotone_ok ? "yes" : "no"));
}

void criterion_10_holder() {
  bool pass = true;
  double worst = 1e300;
  // twap runs, exact liquidation at T
  {
    ModelParams p = oracle_model();
    p.marks.clear();
    p.gamma.clear();
    for (std::size_t i = 0; i < 100; ++i) {
      const ReflectedPath path = simulate_path(p, 0.5, 1e-3, {100905, i});
      const LiquidationRun run = run_strategy(p, Strategy::twap(), path, 1.0, p.T);
      const HolderVerdict v = holder_inventory_check(run, p);
      pass = pass && v.pass;
      worst = std::min(worst, v.worst_margin);
    }
  }
  // no-dark-pool feedback runs driven almost to the horizon
  {
    const ModelParams p = decay_model();
    const Grid grid = make_grid(0.0, 2.0, 80, 300, 120, 0.93, 1.0);
    const ValueSurface s = solve_truncated(p, grid, 10000.0);
    for (std::size_t i = 0; i < 100; ++i) {
      const ReflectedPath path = simulate_path(p, 0.5, 5e-4, {100906, i});
      const LiquidationRun run = run_strategy(p, Strategy::optimal(s), path, 1.0, 0.999);
      const HolderVerdict v = holder_inventory_check(run, p);
      pass = pass && v.pass;
      worst = std::min(worst, v.worst_margin);
    }
  }
  report(10, "pathwise Holder inventory bound", pass, fmt("worst margin %.2e", worst));
}

void criterion_11_grid_convergence() {
  const ModelParams p = oracle_model();
  const Grid grid = make_grid(0.0, 2.0, 100, 100, 0, 1.0, 1.0);
  auto sup_err = [&](const ValueSurface& s) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.n_time_nodes(); ++k) {
      const double cf = closed_form_u(s.grid.t_grid[k], 10.0, p.q, p.T, 1.0, 1.0);
      for (std::size_t j = 0; j < s.grid.n_space; j += 7)
        worst = std::max(worst, std::abs(s.at(k, j) - cf) / cf);
    }
    return worst;
  };
  const double e1 = sup_err(solve_truncated(p, grid, 10.0));
  const double e2 = sup_err(solve_truncated(p, grid.refined(), 10.0));
  report(11, "grid convergence order", e1 / e2 >= 1.7,
         fmt("sup-error ratio %.2f after step halving (need >= 1.7)", e1 / e2));
}

}  // namespace

int main() {
  std::printf("acceptance suite (%d threads)\n", max_threads());
  criterion_1_closed_form();
  criterion_2_gamma_envelope();
  criterion_3_ladder_and_sandwich();
  criterion_4_comparison();
  criterion_5_reflected_law();
  criterion_6_dp_identity();
  criterion_7_dominance();
  criterion_8_feynman_kac();
  criterion_9_decay();
  criterion_10_holder();
  criterion_11_grid_convergence();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
