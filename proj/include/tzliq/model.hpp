#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tzliq {

/// Deterministic coefficient of (t, y). The closed families are evaluated
/// inline so path kernels stay cheap; `custom` is the escape hatch for
/// arbitrary callables (tests, exotic fixtures).
class Coefficient {
 public:
  enum class Kind { constant, affine_y, sinusoidal_t, custom };

  Coefficient() = default;  // the zero constant

  static Coefficient constant(double c) {
    Coefficient f;
    f.kind_ = Kind::constant;
    f.c0_ = c;
    return f;
  }

  /// c0 + c1*(y - a), clipped to [lo, hi].
  static Coefficient affine_y(double c0, double c1, double a, double lo, double hi) {
    Coefficient f;
    f.kind_ = Kind::affine_y;
    f.c0_ = c0;
    f.c1_ = c1;
    f.c2_ = a;
    f.lo_ = lo;
    f.hi_ = hi;
    return f;
  }

  /// c0 + amp*sin(omega*t).
  static Coefficient sinusoidal_t(double c0, double amp, double omega) {
    Coefficient f;
    f.kind_ = Kind::sinusoidal_t;
    f.c0_ = c0;
    f.c1_ = amp;
    f.c2_ = omega;
    return f;
  }

  static Coefficient custom(std::function<double(double, double)> fn) {
    Coefficient f;
    f.kind_ = Kind::custom;
    f.fn_ = std::move(fn);
    return f;
  }

  double operator()(double t, double y) const {
    switch (kind_) {
      case Kind::constant:
        return c0_;
      case Kind::affine_y:
        return std::clamp(c0_ + c1_ * (y - c2_), lo_, hi_);
      case Kind::sinusoidal_t:
        return c0_ + c1_ * std::sin(c2_ * t);
      case Kind::custom:
        return fn_(t, y);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }

  /// Structurally zero coefficients let the path kernel skip the matching
  /// Gaussian draw; the law is unchanged but the draw sequence differs, so
  /// reproducibility is per fixed model.
  bool is_zero() const { return kind_ == Kind::constant && c0_ == 0.0; }

  bool is_time_independent() const { return kind_ != Kind::sinusoidal_t && kind_ != Kind::custom; }
  bool is_space_independent() const { return kind_ != Kind::affine_y && kind_ != Kind::custom; }

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double clip_lo() const { return lo_; }
  double clip_hi() const { return hi_; }

 private:
  Kind kind_ = Kind::constant;
  double c0_ = 0, c1_ = 0, c2_ = 0;
  double lo_ = -std::numeric_limits<double>::infinity();
  double hi_ = std::numeric_limits<double>::infinity();
  std::function<double(double, double)> fn_;
};

/// One atom of the mark measure: mu({z}) = weight.
struct Mark {
  double z = 0.0;
  double weight = 1.0;
  bool operator==(const Mark&) const = default;
};

/// All market/model coefficients of the liquidation problem. Immutable
/// after construction and safe to share read-only across workers.
struct ModelParams {
  double q = 2.0;   ///< cost power, q > 1
  double T = 1.0;   ///< horizon
  double a = 0.0;   ///< reflection barrier

  Coefficient beta;       ///< factor drift
  Coefficient sigma;      ///< diffusion driven by W
  Coefficient sigma_bar;  ///< diffusion driven by B (superparabolic floor)
  Coefficient eta;        ///< impact cost, >= kappa0
  Coefficient lam;        ///< risk aversion, >= 0

  std::vector<Mark> marks;         ///< finite mark measure atoms
  std::vector<Coefficient> gamma;  ///< slippage per mark, values in [0, +inf]

  double Lambda = 1.0;  ///< uniform bound on all coefficients
  double kappa = 1.0;   ///< superparabolicity floor: sigma_bar^2 >= kappa
  double kappa0 = 1.0;  ///< impact floor: eta >= kappa0

  double q_star() const { return q / (q - 1.0); }

  double mu_total() const {
    double s = 0.0;
    for (const auto& m : marks) s += m.weight;
    return s;
  }

  bool space_independent() const {
    bool si = beta.is_space_independent() && sigma.is_space_independent() &&
              sigma_bar.is_space_independent() && eta.is_space_independent() &&
              lam.is_space_independent();
    for (const auto& g : gamma) si = si && g.is_space_independent();
    return si;
  }
};

/// alpha = (sigma^2 + sigma_bar^2) / 2, the diffusion coefficient of the
/// value PDE; bounded below by kappa/2 for valid parameters.
inline double alpha(const ModelParams& p, double t, double y) {
  const double s = p.sigma(t, y);
  const double sb = p.sigma_bar(t, y);
  return 0.5 * (s * s + sb * sb);
}

/// Weight 1/(1 + (y-a)^2), used as a diagnostic transform only.
inline double theta(const ModelParams& p, double y) {
  const double d = y - p.a;
  return 1.0 / (1.0 + d * d);
}

/// One summand of the dark-pool term: gamma*u / ((gamma^{q*-1} + u^{q*-1})^{q-1}),
/// with the exact limit conventions gamma = +inf -> u and gamma = 0 -> 0.
/// Always in [0, u].
inline double jump_summand(double gamma_val, double u, double q, double q_star) {
  if (u <= 0.0) return 0.0;
  if (gamma_val <= 0.0) return 0.0;
  if (std::isinf(gamma_val)) return u;
  const double e = q_star - 1.0;
  const double den = std::pow(std::pow(gamma_val, e) + std::pow(u, e), q - 1.0);
  return gamma_val * u / den;
}

/// Zeroth-order reaction term of the value PDE:
///   lam - u^{q*}/((q*-1) eta^{q*-1}) - mu(Z) u + sum_i w_i gamma_i u /
///   ((gamma_i^{q*-1} + u^{q*-1})^{q-1}).
/// Rejects u < 0 (the solution is nonnegative).
inline double hamiltonian_zeroth(const ModelParams& p, double t, double y, double u) {
  if (u < 0.0) throw std::invalid_argument("hamiltonian_zeroth: negative u");
  const double qs = p.q_star();
  const double eta_v = p.eta(t, y);
  double value = p.lam(t, y) - std::pow(u, qs) / ((qs - 1.0) * std::pow(eta_v, qs - 1.0));
  value -= p.mu_total() * u;
  for (std::size_t i = 0; i < p.marks.size(); ++i) {
    value += p.marks[i].weight * jump_summand(p.gamma[i](t, y), u, p.q, qs);
  }
  return value;
}

/// One failed parameter audit, with the offending sample.
struct Violation {
  std::string rule;
  double t = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Sample points on which coefficient bounds and Lipschitz slopes are audited.
struct AuditGrid {
  std::vector<double> t;
  std::vector<double> y;

  static AuditGrid make(const ModelParams& p, double y_max, std::size_t nt = 17,
                        std::size_t ny = 33);
};

/// Audits every model invariant on the grid and returns all violations
/// (empty means valid). Throws std::invalid_argument for q <= 1 and
/// propagates exceptions from non-evaluable coefficients.
std::vector<Violation> validate(const ModelParams& p, const AuditGrid& audit);

}  // namespace tzliq
