#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tzliq/envelopes.hpp"
#include "tzliq/grid.hpp"
#include "tzliq/model.hpp"
#include "tzliq/surface.hpp"

namespace tzliq {

/// Nonlinear / scheme failures during a solve (non-convergent step,
/// negative value produced). Never clamped silently.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ladder acceptance failures (gap not closed, monotonicity broken).
class LadderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TimeScheme {
  trbdf2,      ///< L-stable two-stage scheme, second order (default)
  imex_euler,  ///< one linearized backward step per level, first order
};

struct SolverOptions {
  TimeScheme scheme = TimeScheme::trbdf2;
  NeumannOrder neumann = NeumannOrder::second;
  /// Picard sweeps per implicit stage; each sweep re-linearizes the power
  /// term at the latest iterate and costs one tridiagonal solve.
  int picard_sweeps = 2;
  /// Relative update below which Picard iteration stops early.
  double picard_tol = 1e-12;
};

/// Solves the truncated Neumann problem backward from u_T = M:
///   d_t u + alpha D^2 u + beta D u + F0(t, y, u) = 0 on [a, y_max],
///   Du(a) = Du(y_max) = 0,
/// where F0 is the zeroth-order reaction term. Diffusion and advection are
/// implicit (one tridiagonal solve per stage); the power term is
/// linearized as u_hat^{q*-1} u / ((q*-1) eta^{q*-1}) and re-frozen per
/// Picard sweep; the jump and decay terms ride along semi-implicitly.
/// Advection uses central differences, falling back to one-sided
/// differences at nodes where h |beta| > 2 alpha so the system stays an
/// M-matrix. Accuracy guidance: resolve the diffusion scale, h^2 of the
/// order of alpha * dt; the scheme is unconditionally stable either way.
/// M = 0 is accepted (the zero surface is an exact fixed point).
///
/// Throws SolveError if a step fails to converge or produces a negative
/// value.
ValueSurface solve_truncated(const ModelParams& p, const Grid& grid, double M,
                             const SolverOptions& opts = {});

struct LadderResult {
  std::vector<ValueSurface> rungs;
  std::vector<double> m_schedule;
  /// Worst monotonicity defect max(u^{M_i} - u^{M_{i+1}}) between adjacent
  /// rungs, relative with unit floor; nonpositive means clean.
  double monotonicity_violation = 0.0;
  /// Relative sup gap between the last two rungs as a function of the time
  /// index (gap_profile[k] covers node t_k).
  std::vector<double> gap_profile;

  /// Largest gap over nodes with t <= t_cut.
  double gap_on(double t_cut) const;
};

/// Solves the increasing ladder of truncated problems. The schedule must be
/// strictly increasing. Monotonicity defects are measured and reported in
/// the result rather than silently accepted; callers gate on them with a
/// tolerance tied to the measured scheme error.
LadderResult solve_ladder(const ModelParams& p, const Grid& grid,
                          std::span<const double> m_schedule, const SolverOptions& opts = {});

struct SingularLimitOptions {
  double eps_ladder = 1e-3;  ///< relative gap accepted between top rungs
  double tau_env = 1e-3;     ///< envelope slack, relative with unit floor
  double tau_mono = 1e-3;    ///< ladder monotonicity slack
};

/// Restriction of the highest ladder rung to [0, t_cut], accepted only if
/// (i) the last two rungs differ by less than eps_ladder in relative
/// sup-norm there and (ii) the surface sits inside the envelopes computed
/// with the largest M. The returned surface covers [0, t_hi] where t_hi is
/// the smallest grid time >= t_cut, and is tagged as a ladder limit.
/// Throws LadderError when not converged, SolveError on envelope breach.
ValueSurface singular_limit(const ModelParams& p, const Grid& grid,
                            std::span<const double> m_schedule, double t_cut,
                            const SolverOptions& opts = {},
                            const SingularLimitOptions& lim = {});

struct ComparisonVerdict {
  /// max over nodes of u1 - u2, relative with unit floor; <= tau means the
  /// ordering holds.
  double max_violation = 0.0;
  double worst_t = 0.0, worst_y = 0.0;
  ValueSurface u1, u2;
};

/// Solves both parameter sets on the same grid with the same terminal M
/// and measures max(u1 - u2). Requires the coefficient ordering
/// lam1 <= lam2, eta1 <= eta2, gamma1 <= gamma2 with identical q, beta,
/// sigma, sigma_bar and marks (audited on the grid first); an ordering
/// breach throws std::invalid_argument, which is distinct from a
/// comparison failure.
ComparisonVerdict comparison_harness(const ModelParams& p1, const ModelParams& p2,
                                     const Grid& grid, double M,
                                     const SolverOptions& opts = {});

/// Relative sup distance (unit floor) between a solve on `grid` and one on
/// grid.refined(), taken over the coarse nodes. Anchors test tolerances to
/// the measured discretization error.
double scheme_error_estimate(const ModelParams& p, const Grid& grid, double M,
                             const SolverOptions& opts = {});

/// Centered-difference PDE residual of a stored surface over interior
/// nodes with t <= t_hi, sup-norm relative to max(1, |u|). An independent
/// consistency diagnostic, O(dt + h^2) for smooth solutions.
double pde_residual_sup(const ValueSurface& s, const ModelParams& p, double t_hi);

/// Envelope sandwich defect of a surface against the pair for its own M:
/// max over time nodes of how far min_y u dips below lower(t) or max_y u
/// exceeds upper(t), relative with unit floor. Nonpositive means the
/// sandwich holds strictly.
double envelope_defect(const ValueSurface& s, const EnvelopePair& env);

}  // namespace tzliq
