#include "tzliq/envelopes.hpp"

#include <cmath>
#include <stdexcept>

namespace tzliq {

double power_decay_bound(double c, double q, double T, double M, double t) {
  const double e = q / (q - 1.0) - 1.0;  // q* - 1
  const double minv = std::isinf(M) ? 0.0 : std::pow(M, -e);
  const double base = (T - t) / std::pow(c, e) + minv;
  if (base <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(base, -(q - 1.0));
}

EnvelopePair::EnvelopePair(double q, double T, double M, double kappa0, double Lambda,
                           double mu_total, std::size_t table_steps)
    : q_(q),
      q_star_(q / (q - 1.0)),
      T_(T),
      M_(M),
      kappa0_(kappa0),
      Lambda_(Lambda),
      mu_(mu_total) {
  if (!(q > 1.0)) throw std::invalid_argument("EnvelopePair: q must exceed 1");
  if (!(M > 0.0)) throw std::invalid_argument("EnvelopePair: M must be positive");
  if (table_steps < 2) throw std::invalid_argument("EnvelopePair: table too coarse");

  // Backward RK4 for w' = (q*-1) Lambda w^q - Lambda^{1-q*}, w(T) = M^{-(q*-1)}.
  const double e = q_star_ - 1.0;
  const double src = std::pow(Lambda_, 1.0 - q_star_);
  auto f = [&](double w) { return e * Lambda_ * std::pow(std::max(w, 0.0), q_) - src; };

  w_.assign(table_steps + 1, 0.0);
  dt_table_ = T_ / static_cast<double>(table_steps);
  double w = std::isinf(M_) ? 0.0 : std::pow(M_, -e);
  w_[table_steps] = w;
  for (std::size_t i = table_steps; i-- > 0;) {
    const double hh = -dt_table_;  // stepping toward t = 0
    const double k1 = f(w);
    const double k2 = f(w + 0.5 * hh * k1);
    const double k3 = f(w + 0.5 * hh * k2);
    const double k4 = f(w + hh * k3);
    w += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    w_[i] = w;
  }
}

double EnvelopePair::lower(double t) const {
  if (t > T_) throw std::out_of_range("EnvelopePair::lower: t beyond horizon");
  if (mu_ <= 0.0) {
    // mu(Z) = 0 degenerates the closed form; fall back to the lambda = 0,
    // mu = 0 decay profile with the impact floor.
    return power_decay_bound(kappa0_, q_, T_, M_, t);
  }
  const double e = q_star_ - 1.0;
  const double c = e * std::pow(kappa0_, e) * mu_;
  const double minv = std::isinf(M_) ? 0.0 : c * std::pow(M_, -e);
  const double den = (1.0 + minv) * std::exp(e * mu_ * (T_ - t)) - 1.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(c / den, q_ - 1.0);
}

double EnvelopePair::upper(double t) const {
  if (t > T_) throw std::out_of_range("EnvelopePair::upper: t beyond horizon");
  if (t < 0.0) throw std::out_of_range("EnvelopePair::upper: negative t");
  const double pos = t / dt_table_;
  std::size_t i = static_cast<std::size_t>(pos);
  if (i >= w_.size() - 1) i = w_.size() - 2;
  const double frac = pos - static_cast<double>(i);
  const double w = (1.0 - frac) * w_[i] + frac * w_[i + 1];
  if (w <= 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(w, -(q_ - 1.0));
}

EnvelopePair ode_envelopes(const ModelParams& p, double M) {
  return EnvelopePair(p.q, p.T, M, p.kappa0, p.Lambda, p.mu_total());
}

}  // namespace tzliq
