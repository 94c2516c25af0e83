// Shared test fixtures and independent closed-form oracles.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "tzliq/model.hpp"

namespace tzliq::testfix {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Space-constant model with lam = 0, eta = kappa0 = 1, one unit mark with
/// gamma = 0, q = 2. The truncated solution has the closed form
/// u^M(t) = 1 / ((1 + 1/M) e^{T-t} - 1).
inline ModelParams oracle_model() {
  ModelParams p;
  p.q = 2.0;
  p.T = 1.0;
  p.a = 0.0;
  p.beta = Coefficient::constant(0.0);
  p.sigma = Coefficient::constant(0.0);
  p.sigma_bar = Coefficient::constant(1.0);
  p.eta = Coefficient::constant(1.0);
  p.lam = Coefficient::constant(0.0);
  p.marks = {{0.0, 1.0}};
  p.gamma = {Coefficient::constant(0.0)};
  p.Lambda = 1.0;
  p.kappa = 1.0;
  p.kappa0 = 1.0;
  return p;
}

/// lam = eta = Lambda, gamma = +inf: the solution is Gamma^M.
inline ModelParams gamma_model(double Lambda = 1.0) {
  ModelParams p = oracle_model();
  p.lam = Coefficient::constant(Lambda);
  p.eta = Coefficient::constant(Lambda);
  p.gamma = {Coefficient::constant(kInf)};
  p.Lambda = Lambda;
  p.kappa0 = Lambda;
  return p;
}

/// y-dependent risk aversion lam = clip(y - a, 0, 1), mild drift and both
/// noises active.
inline ModelParams ydep_model() {
  ModelParams p = oracle_model();
  p.beta = Coefficient::constant(-0.1);
  p.sigma = Coefficient::constant(0.3);
  p.lam = Coefficient::affine_y(0.0, 1.0, 0.0, 0.0, 1.0);
  p.gamma = {Coefficient::constant(kInf)};
  p.Lambda = 1.5;
  return p;
}

/// Finite-gamma dark pool with two marks.
inline ModelParams darkpool_model() {
  ModelParams p = oracle_model();
  p.lam = Coefficient::constant(0.2);
  p.marks = {{0.0, 0.6}, {1.0, 0.9}};
  p.gamma = {Coefficient::constant(0.5), Coefficient::constant(1.0)};
  p.Lambda = 1.5;
  return p;
}

/// Closed form for the truncated solution of the (lam, eta, gamma) =
/// (0, kappa0, 0) model with mu = mu_total > 0 and terminal level M
/// (M = +inf allowed).
inline double closed_form_u(double t, double M, double q, double T, double kappa0, double mu) {
  const double qs = q / (q - 1.0);
  const double e = qs - 1.0;
  const double c = e * std::pow(kappa0, e) * mu;
  const double minv = std::isinf(M) ? 0.0 : c * std::pow(M, -e);
  return std::pow(c / ((1.0 + minv) * std::exp(e * mu * (T - t)) - 1.0), q - 1.0);
}

/// Independent oracle: direct RK4 on the Gamma^M equation
///   dGamma/dt = -Lambda + Gamma^{q*} / ((q*-1) Lambda^{q*-1}),
/// integrated backward from Gamma_T = M with substeps capped at h_max.
inline double rk4_gamma(double t, double M, double q, double T, double Lambda,
                        double h_max = 1e-4) {
  const double qs = q / (q - 1.0);
  const double cpow = (qs - 1.0) * std::pow(Lambda, qs - 1.0);
  auto f = [&](double g) { return -(Lambda - std::pow(g, qs) / cpow); };
  double g = M;
  double s = T;
  while (s > t + 1e-15) {
    // step inside the local decay scale of the stiff terminal layer
    const double local = 0.02 * cpow / std::pow(std::max(g, Lambda), qs - 1.0);
    const double h = std::min({h_max, s - t, std::max(local, 1e-10)});
    const double k1 = f(g);
    const double k2 = f(g - 0.5 * h * k1);
    const double k3 = f(g - 0.5 * h * k2);
    const double k4 = f(g - h * k3);
    g -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s -= h;
  }
  return g;
}

}  // namespace tzliq::testfix
