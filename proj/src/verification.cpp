#include "tzliq/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tzliq/pathsim.hpp"

namespace tzliq {

namespace {

struct PathTotals {
  double impact = 0.0, risk = 0.0, slip = 0.0, terminal = 0.0;
  double total = 0.0;
  double x_end = 0.0, y_end = 0.0;
};

// Runs every strategy over one common path (common random numbers) on
// [0, t_cut]; the terminal value term uses the shared surface.
void run_common_path(const ModelParams& p, const detail::PathKernel& kernel,
                     const std::vector<Strategy>& strategies, const ValueSurface& surface,
                     double x0, double y0, double dt, rng::Stream stream, double t_cut,
                     PathTotals* out) {
  std::vector<detail::StrategyEngine> engines;
  engines.reserve(strategies.size());
  for (const auto& s : strategies) engines.emplace_back(p, s, x0, t_cut, nullptr);
  walk_path(
      kernel, y0, dt, stream,
      [&](double t0, double t1, double ya, double yb, double) {
        for (auto& e : engines) e.on_step(t0, t1, ya, yb);
      },
      [&](double te, std::size_t mark) {
        for (auto& e : engines) e.on_event(te, mark);
      },
      0.0, t_cut);
  for (std::size_t i = 0; i < engines.size(); ++i) {
    auto& e = engines[i];
    PathTotals& t = out[i];
    t.impact = e.cost_impact();
    t.risk = e.cost_risk();
    t.slip = e.cost_slippage();
    t.x_end = e.x();
    t.y_end = e.y();
    // paths may leave [y_min, y_max]; the truncated surface is flat there
    std::size_t hint = 0;
    const double u_end = interpolate_hinted(surface, std::min(t_cut, surface.t_max()),
                                            t.y_end, hint);
    t.terminal = u_end * std::pow(std::abs(t.x_end), p.q);
    t.total = t.impact + t.risk + t.slip + t.terminal;
  }
}

struct MeanStderr {
  double mean = 0.0, se = 0.0;
};

MeanStderr reduce(const std::vector<double>& v) {
  MeanStderr m;
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return m;
}

struct McMeans {
  MeanStderr total;
  double impact = 0.0, risk = 0.0, slip = 0.0, terminal = 0.0;
};

McMeans value_mc(const ModelParams& p, const ValueSurface& surface, double x0, double y0,
                 const McOptions& mc, double t_cut) {
  detail::PathKernel kernel(p);
  const std::vector<Strategy> strategies{Strategy::optimal(surface)};
  std::vector<PathTotals> totals(mc.n_paths);
  parallel_for(mc.n_paths, mc.exec, [&](std::size_t i) {
    run_common_path(p, kernel, strategies, surface, x0, y0, mc.dt, rng::Stream{mc.seed, i},
                    t_cut, &totals[i]);
  });
  McMeans out;
  std::vector<double> tot(mc.n_paths);
  for (std::size_t i = 0; i < mc.n_paths; ++i) {
    tot[i] = totals[i].total;
    out.impact += totals[i].impact;
    out.risk += totals[i].risk;
    out.slip += totals[i].slip;
    out.terminal += totals[i].terminal;
  }
  const double n = std::max<double>(1.0, static_cast<double>(mc.n_paths));
  out.impact /= n;
  out.risk /= n;
  out.slip /= n;
  out.terminal /= n;
  out.total = reduce(tot);
  return out;
}

}  // namespace

CostReport verify_value(const ModelParams& p, const ValueSurface& surface,
                        const EnvelopePair& envelopes, double x0, double y0,
                        const McOptions& mc, double t_cut, double allowance) {
  if (mc.n_paths == 0) throw std::invalid_argument("verify_value: need at least one path");
  if (envelope_defect(surface, envelopes) > 0.05)
    throw std::invalid_argument("verify_value: surface grossly escapes its envelopes");

  const McMeans m = value_mc(p, surface, x0, y0, mc, t_cut);
  CostReport r;
  r.strategy = "optimal-feedback";
  r.n_paths = mc.n_paths;
  r.mean_total = m.total.mean;
  r.mean_impact = m.impact;
  r.mean_risk = m.risk;
  r.mean_slippage = m.slip;
  r.mean_terminal = m.terminal;
  r.stderr_total = m.total.se;
  r.reference = interpolate(surface, 0.0, y0) * std::pow(std::abs(x0), p.q);
  r.allowance = allowance;
  r.diff = r.mean_total - r.reference;
  r.z = r.stderr_total > 0.0 ? r.diff / r.stderr_total : 0.0;
  if (mc.n_paths > 1 && 3.0 * r.stderr_total > std::max(std::abs(r.reference), 1e-12)) {
    std::ostringstream os;
    os << "verify_value: 3 stderr = " << 3.0 * r.stderr_total
       << " cannot resolve the reference " << r.reference << "; increase n_paths";
    throw InsufficientPaths(os.str());
  }
  r.pass = std::abs(r.diff) <= 3.0 * r.stderr_total + allowance;
  return r;
}

DominanceReport verify_dominance(const ModelParams& p, const ValueSurface& surface,
                                 const std::vector<Strategy>& strategies, double x0, double y0,
                                 const McOptions& mc, double t_cut, double allowance) {
  if (strategies.empty()) throw std::invalid_argument("verify_dominance: no strategies");
  detail::PathKernel kernel(p);
  const std::size_t ns = strategies.size();
  std::vector<PathTotals> totals(mc.n_paths * ns);
  parallel_for(mc.n_paths, mc.exec, [&](std::size_t i) {
    run_common_path(p, kernel, strategies, surface, x0, y0, mc.dt, rng::Stream{mc.seed, i},
                    t_cut, &totals[i * ns]);
  });

  DominanceReport rep;
  const double reference = interpolate(surface, 0.0, y0) * std::pow(std::abs(x0), p.q);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> tot(mc.n_paths);
    CostReport r;
    r.strategy = strategies[s].name();
    r.n_paths = mc.n_paths;
    for (std::size_t i = 0; i < mc.n_paths; ++i) {
      const PathTotals& t = totals[i * ns + s];
      tot[i] = t.total;
      r.mean_impact += t.impact;
      r.mean_risk += t.risk;
      r.mean_slippage += t.slip;
      r.mean_terminal += t.terminal;
    }
    const double n = static_cast<double>(mc.n_paths);
    r.mean_impact /= n;
    r.mean_risk /= n;
    r.mean_slippage /= n;
    r.mean_terminal /= n;
    const MeanStderr ms = reduce(tot);
    r.mean_total = ms.mean;
    r.stderr_total = ms.se;
    r.reference = reference;
    r.diff = r.mean_total - reference;
    r.z = r.stderr_total > 0.0 ? r.diff / r.stderr_total : 0.0;
    r.pass = true;
    rep.reports.push_back(std::move(r));
  }

  rep.optimal_dominates = true;
  for (std::size_t s = 1; s < ns; ++s) {
    std::vector<double> diff(mc.n_paths);
    for (std::size_t i = 0; i < mc.n_paths; ++i)
      diff[i] = totals[i * ns + 0].total - totals[i * ns + s].total;
    const MeanStderr ms = reduce(diff);
    DominanceReport::Pair pr;
    pr.a = strategies[0].name();
    pr.b = strategies[s].name();
    pr.mean_diff = ms.mean;
    pr.stderr_diff = ms.se;
    pr.z = ms.se > 0.0 ? ms.mean / ms.se : 0.0;
    if (pr.mean_diff > allowance) rep.optimal_dominates = false;
    rep.pairs.push_back(pr);
  }
  return rep;
}

FkReport verify_feynman_kac(const ModelParams& p, const ValueSurface& surface,
                            const std::vector<FkProbe>& probes, double tau, const McOptions& mc,
                            double allowance) {
  if (!(tau <= surface.t_max() + 1e-12) || !(tau < p.T + 1e-12))
    throw std::out_of_range("verify_feynman_kac: tau outside surface coverage");
  for (const auto& pr : probes) {
    if (pr.t < 0.0 || pr.t > tau || pr.y < surface.grid.y_min - 1e-12 ||
        pr.y > surface.grid.y_max + 1e-12)
      throw std::out_of_range("verify_feynman_kac: probe outside grid");
  }

  detail::PathKernel kernel(p);
  FkReport rep;
  rep.tau = tau;
  rep.allowance = allowance;
  rep.all_pass = true;
  const double h = surface.grid.h();

  for (const auto& probe : probes) {
    if (probe.t >= tau) {  // zero-length window: the right side is u_t(y) itself
      FkReport::Row row;
      row.t = probe.t;
      row.y = probe.y;
      row.left = interpolate(surface, probe.t, probe.y);
      row.right_mean = row.left;
      row.pass = true;
      rep.rows.push_back(row);
      continue;
    }
    std::vector<double> right(mc.n_paths, 0.0), ltt(mc.n_paths, 0.0);
    parallel_for(mc.n_paths, mc.exec, [&](std::size_t i) {
      double integral = 0.0;
      double lterm = 0.0;
      double y_end = probe.y;
      std::size_t hint = 0;
      walk_path(
          kernel, probe.y, mc.dt, rng::Stream{mc.seed, i},
          [&](double t0, double t1, double ya, double yb, double dl) {
            const double u = interpolate_hinted(surface, t0, ya, hint);
            integral += (t1 - t0) * hamiltonian_zeroth(p, t0, ya, std::max(u, 0.0));
            if (dl > 0.0) {
              // discrete Du(a) dL: the Neumann condition makes this vanish
              std::size_t hb = hint;
              const double u0 = interpolate_hinted(surface, t1, surface.grid.y_min, hb);
              std::size_t hb2 = hint;
              const double u1 =
                  interpolate_hinted(surface, t1, surface.grid.y_min + h, hb2);
              lterm += (u1 - u0) / h * dl;
            }
            y_end = yb;
          },
          [](double, std::size_t) {}, probe.t, tau);
      std::size_t hint_b = 0;
      right[i] = integral + interpolate_hinted(surface, tau, y_end, hint_b);
      ltt[i] = lterm;
    });

    const MeanStderr ms = reduce(right);
    FkReport::Row row;
    row.t = probe.t;
    row.y = probe.y;
    row.left = interpolate(surface, probe.t, probe.y);
    row.right_mean = ms.mean;
    row.stderr_right = ms.se;
    const double diff = ms.mean - row.left;
    row.z = ms.se > 0.0 ? diff / ms.se : 0.0;
    const MeanStderr lt = reduce(ltt);
    row.local_time_term = lt.mean;
    row.pass = std::abs(diff) <= 4.0 * ms.se + allowance;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

AllowanceBreakdown dp_identity_allowance(const ModelParams& p, const ValueSurface& surface,
                                         const EnvelopePair& envelopes, double x0, double y0,
                                         const McOptions& mc, double t_cut,
                                         double rel_scheme_error) {
  (void)envelopes;
  McOptions probe = mc;
  probe.n_paths = std::min<std::size_t>(mc.n_paths, 20000);
  const McMeans m1 = value_mc(p, surface, x0, y0, probe, t_cut);
  McOptions half = probe;
  half.dt = probe.dt / 2.0;
  const McMeans m2 = value_mc(p, surface, x0, y0, half, t_cut);

  AllowanceBreakdown a;
  const double reference = interpolate(surface, 0.0, y0) * std::pow(std::abs(x0), p.q);
  a.surface_component = 3.0 * rel_scheme_error * (std::abs(reference) + std::abs(m1.terminal));
  a.euler_component = 3.0 * std::abs(m1.total.mean - m2.total.mean);
  return a;
}

AllowanceBreakdown fk_allowance(const ModelParams& p, const ValueSurface& surface,
                                const std::vector<FkProbe>& probes, double tau,
                                const McOptions& mc, double rel_scheme_error) {
  McOptions probe_mc = mc;
  probe_mc.n_paths = std::min<std::size_t>(mc.n_paths, 20000);
  McOptions half = probe_mc;
  half.dt = probe_mc.dt / 2.0;
  const FkReport r1 = verify_feynman_kac(p, surface, probes, tau, probe_mc, 1e300);
  const FkReport r2 = verify_feynman_kac(p, surface, probes, tau, half, 1e300);
  AllowanceBreakdown a;
  double scale = 1.0, euler = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    scale = std::max(scale, std::abs(r1.rows[i].left));
    euler = std::max(euler, std::abs(r1.rows[i].right_mean - r2.rows[i].right_mean));
  }
  a.surface_component = 3.0 * rel_scheme_error * scale;
  a.euler_component = 3.0 * euler;
  return a;
}

}  // namespace tzliq
