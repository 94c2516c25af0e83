#pragma once

#include <limits>
#include <vector>

#include "tzliq/model.hpp"

namespace tzliq {

/// Closed-form solution of -u' = -u^{q*}/((q*-1) c^{q*-1}) with terminal
/// value M at T, evaluated at t: ((T-t)/c^{q*-1} + M^{-(q*-1)})^{-(q-1)}.
/// Accepts M = +inf. This is the lambda = 0, mu = 0 decay profile.
double power_decay_bound(double c, double q, double T, double M, double t);

/// Space-independent envelopes sandwiching every truncated solution with
/// the same terminal level M: lower is the closed form for coefficients
/// (0, kappa0, 0), upper is Gamma^M for (Lambda, Lambda, +inf), solving
///   -dGamma/dt = Lambda - |Gamma|^{q*} / ((q*-1) Lambda^{q*-1}),
///   Gamma_T = M.
/// Gamma is integrated by RK4 in the transformed variable w = Gamma^{-(q*-1)},
/// which removes the terminal stiffness and admits M = +inf exactly; values
/// come from a dense table with linear interpolation.
class EnvelopePair {
 public:
  EnvelopePair(double q, double T, double M, double kappa0, double Lambda, double mu_total,
               std::size_t table_steps = 20000);

  /// Lower envelope; equals M at t = T for finite M.
  double lower(double t) const;
  /// Upper envelope Gamma^M_t; equals M at t = T for finite M.
  double upper(double t) const;

  double truncation_level() const { return M_; }
  double horizon() const { return T_; }

 private:
  double q_, q_star_, T_, M_, kappa0_, Lambda_, mu_;
  double dt_table_;
  std::vector<double> w_;  ///< w(t_i) on the uniform table grid, t_i = i*dt
};

/// Envelopes for the given model at truncation level M (M may be +inf,
/// passed as std::numeric_limits<double>::infinity()).
EnvelopePair ode_envelopes(const ModelParams& p, double M);

}  // namespace tzliq
