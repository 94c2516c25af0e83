#include "tzliq/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tzliq {

namespace {

template <class... Args>
std::string msg(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Tridiagonal solve (Thomas). Overwrites rhs with the solution.
void thomas(std::span<const double> lower, std::span<double> diag, std::span<const double> upper,
            std::span<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Coefficient samples for one time level.
struct LevelCoeffs {
  std::vector<double> alpha, beta, eta_pow, lam;  // eta_pow = (q*-1) eta^{q*-1}
  std::vector<std::vector<double>> gamma;         // [mark][node]
};

class Stepper {
 public:
  Stepper(const ModelParams& p, const Grid& g, const SolverOptions& opts)
      : p_(p), g_(g), opts_(opts), n_(g.n_space), qs_(p.q_star()), mu_(p.mu_total()) {
    lo_.resize(n_);
    di_.resize(n_);
    up_.resize(n_);
    rhs_.resize(n_);
    work_.resize(n_);
    lc_.alpha.resize(n_);
    lc_.beta.resize(n_);
    lc_.eta_pow.resize(n_);
    lc_.lam.resize(n_);
    lc_.gamma.assign(p.marks.size(), std::vector<double>(n_));
  }

  void sample_coeffs(double t) {
    const double h = g_.h();
    for (std::size_t j = 0; j < n_; ++j) {
      const double y = g_.y_min + h * static_cast<double>(j);
      lc_.alpha[j] = alpha(p_, t, y);
      lc_.beta[j] = p_.beta(t, y);
      lc_.eta_pow[j] = (qs_ - 1.0) * std::pow(p_.eta(t, y), qs_ - 1.0);
      lc_.lam[j] = p_.lam(t, y);
      for (std::size_t i = 0; i < p_.marks.size(); ++i) lc_.gamma[i][j] = p_.gamma[i](t, y);
    }
  }

  // Spatial operator L u = alpha D^2 u + beta D u with homogeneous Neumann
  // ghosts at both ends, applied to v using the current coefficient samples.
  void apply_L(std::span<const double> v, std::span<double> out) const {
    const double h = g_.h();
    const double ih2 = 1.0 / (h * h);
    const double i2h = 1.0 / (2.0 * h);
    const double gb = opts_.neumann == NeumannOrder::second ? 2.0 : 1.0;
    out[0] = lc_.alpha[0] * gb * (v[1] - v[0]) * ih2;
    out[n_ - 1] = lc_.alpha[n_ - 1] * gb * (v[n_ - 2] - v[n_ - 1]) * ih2;
    for (std::size_t j = 1; j + 1 < n_; ++j) {
      const double a = lc_.alpha[j], b = lc_.beta[j];
      double adv;
      if (h * std::abs(b) > 2.0 * a) {
        adv = b > 0 ? b * (v[j + 1] - v[j]) / h : b * (v[j] - v[j - 1]) / h;
      } else {
        adv = b * (v[j + 1] - v[j - 1]) * i2h;
      }
      out[j] = a * (v[j + 1] - 2.0 * v[j] + v[j - 1]) * ih2 + adv;
    }
  }

  double reaction(std::size_t j, double u) const {
    double r = lc_.lam[j] - std::pow(u, qs_) / lc_.eta_pow[j] - mu_ * u;
    for (std::size_t i = 0; i < lc_.gamma.size(); ++i)
      r += p_.marks[i].weight * jump_summand(lc_.gamma[i][j], u, p_.q, qs_);
    return r;
  }

  // Solves x - cdt (L x + F0(x)) = rhs0, with the power term linearized at
  // the running iterate (initialized from guess) and the remaining
  // reaction pieces frozen per sweep. Coefficients must be pre-sampled.
  void implicit_stage(std::span<const double> rhs0, double cdt, std::span<const double> guess,
                      std::span<double> out) {
    const double h = g_.h();
    const double ih2 = 1.0 / (h * h);
    const double i2h = 1.0 / (2.0 * h);
    const double gb = opts_.neumann == NeumannOrder::second ? 2.0 : 1.0;

    std::copy(guess.begin(), guess.end(), work_.begin());
    for (int sweep = 0; sweep < std::max(1, opts_.picard_sweeps); ++sweep) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double uh = std::max(work_[j], 0.0);
        const double pcoef = std::pow(uh, qs_ - 1.0) / lc_.eta_pow[j];
        double jump = 0.0;
        for (std::size_t i = 0; i < lc_.gamma.size(); ++i)
          jump += p_.marks[i].weight * jump_summand(lc_.gamma[i][j], uh, p_.q, qs_);
        di_[j] = 1.0 + cdt * (pcoef + mu_);
        rhs_[j] = rhs0[j] + cdt * (lc_.lam[j] + jump);
        lo_[j] = 0.0;
        up_[j] = 0.0;
      }
      di_[0] += cdt * lc_.alpha[0] * gb * ih2;
      up_[0] = -cdt * lc_.alpha[0] * gb * ih2;
      di_[n_ - 1] += cdt * lc_.alpha[n_ - 1] * gb * ih2;
      lo_[n_ - 1] = -cdt * lc_.alpha[n_ - 1] * gb * ih2;
      for (std::size_t j = 1; j + 1 < n_; ++j) {
        const double a = lc_.alpha[j], b = lc_.beta[j];
        double cl, cu;
        if (h * std::abs(b) > 2.0 * a) {
          if (b > 0) {
            cl = a * ih2;
            cu = a * ih2 + b / h;
            di_[j] += cdt * (2.0 * a * ih2 + b / h);
          } else {
            cl = a * ih2 - b / h;
            cu = a * ih2;
            di_[j] += cdt * (2.0 * a * ih2 - b / h);
          }
        } else {
          cl = a * ih2 - b * i2h;
          cu = a * ih2 + b * i2h;
          di_[j] += cdt * 2.0 * a * ih2;
        }
        lo_[j] = -cdt * cl;
        up_[j] = -cdt * cu;
      }
      std::copy(rhs_.begin(), rhs_.end(), out.begin());
      thomas(lo_, di_, up_, out);

      double delta = 0.0, scale = 1.0;
      for (std::size_t j = 0; j < n_; ++j) {
        delta = std::max(delta, std::abs(out[j] - work_[j]));
        scale = std::max(scale, std::abs(out[j]));
      }
      std::copy(out.begin(), out.end(), work_.begin());
      if (delta <= opts_.picard_tol * scale) break;
      if (sweep + 1 == std::max(1, opts_.picard_sweeps) && opts_.picard_sweeps > 4 &&
          delta > 1e-6 * scale) {
        throw SolveError("nonlinear stage failed to converge; refine the time grid");
      }
    }
  }

  const LevelCoeffs& lc() const { return lc_; }

 private:
  const ModelParams& p_;
  const Grid& g_;
  SolverOptions opts_;
  std::size_t n_;
  double qs_, mu_;
  LevelCoeffs lc_;
  std::vector<double> lo_, di_, up_, rhs_, work_;
};

void check_nonnegative(std::span<const double> u, double t) {
  for (double v : u) {
    if (!(v >= 0.0)) {
      throw SolveError(
          msg("scheme produced a negative or non-finite value ", v, " at t = ", t, "; aborting"));
    }
  }
}

}  // namespace

ValueSurface solve_truncated(const ModelParams& p, const Grid& grid, double M,
                             const SolverOptions& opts) {
  grid.check();
  if (!(M >= 0.0)) throw std::invalid_argument("solve_truncated: M must be nonnegative");
  if (std::abs(grid.y_min - p.a) > 1e-12 * (1.0 + std::abs(p.a)))
    throw std::invalid_argument("solve_truncated: grid must start at the barrier");
  if (std::abs(grid.t_end() - p.T) > 1e-12 * (1.0 + p.T))
    throw std::invalid_argument("solve_truncated: grid horizon must equal T");

  const std::size_t n = grid.n_space;
  const std::size_t K = grid.n_time_steps();
  ValueSurface s;
  s.grid = grid;
  s.truncation_level = M;
  s.boundary = opts.neumann;
  s.values.assign((K + 1) * n, M);

  SolverOptions eff = opts;
  if (opts.scheme == TimeScheme::imex_euler) eff.picard_sweeps = 1;  // one linearized solve per level
  Stepper stepper(p, grid, eff);
  std::vector<double> u(n, M), ug(n), unew(n), Gn(n), rhs(n);
  const double gamma_tr = 2.0 - std::sqrt(2.0);

  for (std::size_t k = K; k-- > 0;) {
    const double t0 = grid.t_grid[k];
    const double t1 = grid.t_grid[k + 1];
    const double dt = t1 - t0;

    if (opts.scheme == TimeScheme::imex_euler) {
      stepper.sample_coeffs(t0);
      stepper.implicit_stage(u, dt, u, unew);
    } else {
      // TR stage to t1 - gamma*dt
      stepper.sample_coeffs(t1);
      stepper.apply_L(u, Gn);
      for (std::size_t j = 0; j < n; ++j) Gn[j] += stepper.reaction(j, std::max(u[j], 0.0));
      const double c1 = 0.5 * gamma_tr * dt;
      for (std::size_t j = 0; j < n; ++j) rhs[j] = u[j] + c1 * Gn[j];
      stepper.sample_coeffs(t1 - gamma_tr * dt);
      stepper.implicit_stage(rhs, c1, u, ug);

      // BDF2 stage to t0
      const double w1 = 1.0 / (gamma_tr * (2.0 - gamma_tr));
      const double w2 = (1.0 - gamma_tr) * (1.0 - gamma_tr) / (gamma_tr * (2.0 - gamma_tr));
      const double c2 = (1.0 - gamma_tr) / (2.0 - gamma_tr) * dt;
      for (std::size_t j = 0; j < n; ++j) rhs[j] = w1 * ug[j] - w2 * u[j];
      stepper.sample_coeffs(t0);
      stepper.implicit_stage(rhs, c2, ug, unew);
    }

    check_nonnegative(unew, t0);
    std::copy(unew.begin(), unew.end(), s.values.begin() + k * n);
    std::swap(u, unew);
  }
  return s;
}

double LadderResult::gap_on(double t_cut) const {
  if (rungs.empty()) return 0.0;
  const auto& tg = rungs.back().grid.t_grid;
  double worst = 0.0;
  for (std::size_t k = 0; k < tg.size(); ++k) {
    if (tg[k] > t_cut + 1e-12) break;
    worst = std::max(worst, gap_profile[k]);
  }
  return worst;
}

LadderResult solve_ladder(const ModelParams& p, const Grid& grid,
                          std::span<const double> m_schedule, const SolverOptions& opts) {
  if (m_schedule.empty()) throw std::invalid_argument("solve_ladder: empty schedule");
  // nondecreasing; equal rungs are legal and reproduce identical surfaces
  for (std::size_t i = 0; i + 1 < m_schedule.size(); ++i)
    if (!(m_schedule[i] <= m_schedule[i + 1]))
      throw std::invalid_argument("solve_ladder: schedule must be nondecreasing");

  LadderResult res;
  res.m_schedule.assign(m_schedule.begin(), m_schedule.end());
  res.rungs.reserve(m_schedule.size());
  for (double M : m_schedule) res.rungs.push_back(solve_truncated(p, grid, M, opts));

  for (std::size_t r = 0; r + 1 < res.rungs.size(); ++r) {
    const auto& a = res.rungs[r].values;
    const auto& b = res.rungs[r + 1].values;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double defect = (a[i] - b[i]) / std::max(1.0, std::abs(b[i]));
      res.monotonicity_violation = std::max(res.monotonicity_violation, defect);
    }
  }

  const auto& last = res.rungs.back();
  const std::size_t n = grid.n_space;
  res.gap_profile.assign(last.n_time_nodes(), 0.0);
  if (res.rungs.size() >= 2) {
    const auto& prev = res.rungs[res.rungs.size() - 2];
    for (std::size_t k = 0; k < last.n_time_nodes(); ++k) {
      double g = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        g = std::max(g, std::abs(last.at(k, j) - prev.at(k, j)) /
                            std::max(1.0, std::abs(last.at(k, j))));
      }
      res.gap_profile[k] = g;
    }
  }
  return res;
}

ValueSurface singular_limit(const ModelParams& p, const Grid& grid,
                            std::span<const double> m_schedule, double t_cut,
                            const SolverOptions& opts, const SingularLimitOptions& lim) {
  if (!(t_cut < p.T)) throw std::invalid_argument("singular_limit: t_cut must lie below T");
  LadderResult ladder = solve_ladder(p, grid, m_schedule, opts);

  if (ladder.monotonicity_violation > lim.tau_mono) {
    throw LadderError(msg("ladder monotonicity defect ", ladder.monotonicity_violation,
                          " exceeds tolerance ", lim.tau_mono));
  }
  if (m_schedule.size() >= 2) {
    const double gap = ladder.gap_on(t_cut);
    if (gap > lim.eps_ladder) {
      throw LadderError(msg("ladder gap ", gap, " on [0, ", t_cut, "] exceeds eps_ladder ",
                            lim.eps_ladder, "; extend the M schedule"));
    }
  }

  const ValueSurface& top = ladder.rungs.back();
  const EnvelopePair env = ode_envelopes(p, top.truncation_level);

  // restrict to [0, t_hi], t_hi = smallest grid time >= t_cut
  std::size_t k_hi = 0;
  while (k_hi + 1 < top.n_time_nodes() && top.grid.t_grid[k_hi] < t_cut - 1e-15) ++k_hi;
  ValueSurface out;
  out.grid.y_min = grid.y_min;
  out.grid.y_max = grid.y_max;
  out.grid.n_space = grid.n_space;
  out.grid.t_grid.assign(top.grid.t_grid.begin(), top.grid.t_grid.begin() + k_hi + 1);
  out.values.assign(top.values.begin(), top.values.begin() + (k_hi + 1) * grid.n_space);
  out.truncation_level = top.truncation_level;
  out.ladder_limit = true;
  out.boundary = top.boundary;

  const double defect = envelope_defect(out, env);
  if (defect > lim.tau_env) {
    throw SolveError(msg("surface escapes the envelopes by ", defect, " (tolerance ",
                         lim.tau_env, ")"));
  }
  return out;
}

ComparisonVerdict comparison_harness(const ModelParams& p1, const ModelParams& p2,
                                     const Grid& grid, double M, const SolverOptions& opts) {
  if (p1.q != p2.q || p1.T != p2.T || p1.a != p2.a)
    throw std::invalid_argument("comparison_harness: q, T, a must match");
  if (p1.marks.size() != p2.marks.size())
    throw std::invalid_argument("comparison_harness: mark lists must match");
  for (std::size_t i = 0; i < p1.marks.size(); ++i)
    if (p1.marks[i].weight != p2.marks[i].weight)
      throw std::invalid_argument("comparison_harness: mark weights must match");

  // ordering audit on the grid: lam1 <= lam2, eta1 <= eta2, gamma1 <= gamma2,
  // identical generator coefficients
  const double tol = 1e-12;
  for (double t : grid.t_grid) {
    for (std::size_t j = 0; j < grid.n_space; ++j) {
      const double y = grid.y(j);
      if (std::abs(p1.beta(t, y) - p2.beta(t, y)) > tol ||
          std::abs(p1.sigma(t, y) - p2.sigma(t, y)) > tol ||
          std::abs(p1.sigma_bar(t, y) - p2.sigma_bar(t, y)) > tol)
        throw std::invalid_argument("comparison_harness: generator coefficients differ");
      if (p1.lam(t, y) > p2.lam(t, y) + tol)
        throw std::invalid_argument("comparison_harness: lam ordering violated");
      if (p1.eta(t, y) > p2.eta(t, y) + tol)
        throw std::invalid_argument("comparison_harness: eta ordering violated");
      for (std::size_t i = 0; i < p1.gamma.size(); ++i) {
        const double g1 = p1.gamma[i](t, y), g2 = p2.gamma[i](t, y);
        if (std::isinf(g1) && std::isinf(g2)) continue;
        if (g1 > g2 + tol)
          throw std::invalid_argument("comparison_harness: gamma ordering violated");
      }
    }
  }

  ComparisonVerdict v;
  v.u1 = solve_truncated(p1, grid, M, opts);
  v.u2 = solve_truncated(p2, grid, M, opts);
  v.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.u1.n_time_nodes(); ++k) {
    for (std::size_t j = 0; j < grid.n_space; ++j) {
      const double d =
          (v.u1.at(k, j) - v.u2.at(k, j)) / std::max(1.0, std::abs(v.u2.at(k, j)));
      if (d > v.max_violation) {
        v.max_violation = d;
        v.worst_t = grid.t_grid[k];
        v.worst_y = grid.y(j);
      }
    }
  }
  return v;
}

double scheme_error_estimate(const ModelParams& p, const Grid& grid, double M,
                             const SolverOptions& opts) {
  const ValueSurface coarse = solve_truncated(p, grid, M, opts);
  const ValueSurface fine = solve_truncated(p, grid.refined(), M, opts);
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.n_time_nodes(); ++k) {
    for (std::size_t j = 0; j < grid.n_space; ++j) {
      const double uc = coarse.at(k, j);
      const double uf = fine.at(2 * k, 2 * j);
      worst = std::max(worst, std::abs(uc - uf) / std::max(1.0, std::abs(uf)));
    }
  }
  return worst;
}

double pde_residual_sup(const ValueSurface& s, const ModelParams& p, double t_hi) {
  const Grid& g = s.grid;
  const double h = g.h();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.n_time_nodes(); ++k) {
    const double t = g.t_grid[k];
    if (t > t_hi) break;
    const double dtm = g.t_grid[k] - g.t_grid[k - 1];
    const double dtp = g.t_grid[k + 1] - g.t_grid[k];
    for (std::size_t j = 1; j + 1 < g.n_space; ++j) {
      const double y = g.y(j);
      const double u = s.at(k, j);
      // non-uniform centered time derivative
      const double ut = (dtm * dtm * s.at(k + 1, j) +
                         (dtp * dtp - dtm * dtm) * u - dtp * dtp * s.at(k - 1, j)) /
                        (dtm * dtp * (dtm + dtp));
      const double uyy = (s.at(k, j + 1) - 2.0 * u + s.at(k, j - 1)) / (h * h);
      const double uy = (s.at(k, j + 1) - s.at(k, j - 1)) / (2.0 * h);
      const double r = ut + alpha(p, t, y) * uyy + p.beta(t, y) * uy +
                       hamiltonian_zeroth(p, t, y, std::max(u, 0.0));
      worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(u)));
    }
  }
  return worst;
}

double envelope_defect(const ValueSurface& s, const EnvelopePair& env) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.n_time_nodes(); ++k) {
    const double t = s.grid.t_grid[k];
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = 0; j < s.grid.n_space; ++j) {
      lo = std::min(lo, s.at(k, j));
      hi = std::max(hi, s.at(k, j));
    }
    const double lower = env.lower(t);
    const double upper = env.upper(t);
    worst = std::max(worst, (lower - lo) / std::max(1.0, lower));
    if (std::isfinite(upper)) worst = std::max(worst, (hi - upper) / std::max(1.0, upper));
  }
  return worst;
}

}  // namespace tzliq
