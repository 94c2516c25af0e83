#include <cmath>
#include <doctest.h>

#include "tzliq/model.hpp"

using namespace tzliq;

namespace {

ModelParams unit_params() {
  ModelParams p;
  p.q = 2.0;
  p.T = 1.0;
  p.a = 0.0;
  p.beta = Coefficient::constant(0.0);
  p.sigma = Coefficient::constant(0.0);
  p.sigma_bar = Coefficient::constant(1.0);
  p.eta = Coefficient::constant(1.0);
  p.lam = Coefficient::constant(1.0);
  p.marks = {{0.0, 1.0}};
  p.gamma = {Coefficient::constant(1.0)};
  p.Lambda = 1.0;
  p.kappa = 1.0;
  p.kappa0 = 1.0;
  return p;
}

}  // namespace

TEST_CASE("validate accepts constant coefficients meeting every bound with equality") {
  ModelParams p = unit_params();
  const auto audit = AuditGrid::make(p, 3.0);
  CHECK(validate(p, audit).empty());
}

TEST_CASE("validate flags superparabolicity at every sample when sigma_bar is zero") {
  ModelParams p = unit_params();
  p.sigma_bar = Coefficient::constant(0.0);
  const auto audit = AuditGrid::make(p, 3.0, 5, 7);
  const auto violations = validate(p, audit);
  std::size_t superparabolic = 0;
  for (const auto& v : violations) superparabolic += v.rule == "superparabolicity";
  CHECK(superparabolic == 5 * 7);
}

TEST_CASE("validate flags the eta floor") {
  ModelParams p = unit_params();
  p.eta = Coefficient::constant(0.5);
  const auto audit = AuditGrid::make(p, 3.0);
  const auto violations = validate(p, audit);
  bool found = false;
  for (const auto& v : violations) found = found || v.rule == "eta floor";
  CHECK(found);
}

TEST_CASE("validate rejects q <= 1") {
  ModelParams p = unit_params();
  p.q = 1.0;
  const auto audit = AuditGrid::make(p, 3.0);
  CHECK_THROWS_AS(validate(p, audit), std::invalid_argument);
}

TEST_CASE("validate audits Lipschitz slopes") {
  ModelParams p = unit_params();
  p.Lambda = 1.0;
  p.lam = Coefficient::custom([](double, double y) { return std::min(1.0, 3.0 * y); });
  const auto audit = AuditGrid::make(p, 3.0);
  const auto violations = validate(p, audit);
  bool found = false;
  for (const auto& v : violations) found = found || v.rule == "lam Lipschitz";
  CHECK(found);
}

TEST_CASE("validate propagates exceptions from non-evaluable coefficients") {
  ModelParams p = unit_params();
  p.lam = Coefficient::custom(
      [](double, double) -> double { throw std::runtime_error("bad user function"); });
  const auto audit = AuditGrid::make(p, 3.0);
  CHECK_THROWS_AS(validate(p, audit), std::runtime_error);
}

TEST_CASE("alpha is the half sum of squared diffusions") {
  ModelParams p = unit_params();
  CHECK(alpha(p, 0.3, 1.0) == doctest::Approx(0.5));
  p.sigma = Coefficient::constant(1.0);
  CHECK(alpha(p, 0.0, 0.0) == doctest::Approx(1.0));
  p.sigma = Coefficient::constant(0.3);
  p.sigma_bar = Coefficient::constant(0.4);
  CHECK(alpha(p, 0.0, 2.0) == doctest::Approx(0.125));
}

TEST_CASE("theta weight values") {
  ModelParams p = unit_params();
  p.a = 2.0;
  CHECK(theta(p, 2.0) == doctest::Approx(1.0));
  CHECK(theta(p, 3.0) == doctest::Approx(0.5));
  CHECK(theta(p, 5.0) == doctest::Approx(0.1));
}

TEST_CASE("theta stays within the weighted-transform bounds") {
  // |D theta| <= 3 sqrt(3)/8, |D^2 theta| <= 2, theta (y-a) <= 1/2, sampled
  ModelParams p = unit_params();
  const double h = 1e-4;
  double max_d1 = 0.0, max_d2 = 0.0, max_prod = 0.0;
  for (double y = 0.0; y <= 8.0; y += 0.01) {
    const double tm = theta(p, y - h), t0 = theta(p, y), tp = theta(p, y + h);
    max_d1 = std::max(max_d1, std::abs((tp - tm) / (2 * h)));
    max_d2 = std::max(max_d2, std::abs((tp - 2 * t0 + tm) / (h * h)));
    max_prod = std::max(max_prod, std::abs(t0 * (y - p.a)));
  }
  CHECK(max_d1 <= 3.0 * std::sqrt(3.0) / 8.0 + 1e-6);
  CHECK(max_d2 <= 2.0 + 1e-5);
  CHECK(max_prod <= 0.5 + 1e-12);
}

TEST_CASE("hamiltonian_zeroth at u = 0 returns lam") {
  ModelParams p = unit_params();
  p.lam = Coefficient::constant(0.7);
  CHECK(hamiltonian_zeroth(p, 0.1, 0.5, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("hamiltonian_zeroth hand-computed sample") {
  // q = 2, lam = 0.5, eta = 1, one mark w = 1 with gamma = 1, u = 1:
  // 0.5 - 1 - 1 + 0.5 = -1
  ModelParams p = unit_params();
  p.lam = Coefficient::constant(0.5);
  CHECK(hamiltonian_zeroth(p, 0.0, 0.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("hamiltonian_zeroth with gamma = +inf cancels the decay term") {
  // q = 2, lam = 0, eta = 1, gamma = +inf, u = 2: -u^2/eta = -4
  ModelParams p = unit_params();
  p.lam = Coefficient::constant(0.0);
  p.gamma = {Coefficient::constant(std::numeric_limits<double>::infinity())};
  CHECK(hamiltonian_zeroth(p, 0.0, 0.0, 2.0) == doctest::Approx(-4.0));
}

TEST_CASE("hamiltonian_zeroth rejects negative u") {
  ModelParams p = unit_params();
  CHECK_THROWS_AS(hamiltonian_zeroth(p, 0.0, 0.0, -0.1), std::invalid_argument);
}

TEST_CASE("jump summand stays between 0 and u and the reaction term is sandwiched") {
  ModelParams p = unit_params();
  p.lam = Coefficient::constant(0.5);
  const double qs = p.q_star();
  const double mu = p.mu_total();
  for (double u = 0.0; u < 40.0; u = u == 0.0 ? 1e-3 : u * 2.3) {
    const double js = jump_summand(1.0, u, p.q, qs);
    CHECK(js >= 0.0);
    CHECK(js <= u + 1e-15);
    const double f = hamiltonian_zeroth(p, 0.2, 0.4, u);
    const double power = std::pow(u, qs) / ((qs - 1.0) * 1.0);
    CHECK(f >= 0.5 - power - mu * u - 1e-12);
    CHECK(f <= 0.5 - power + 1e-12);
  }
}

TEST_CASE("hamiltonian_zeroth is nonincreasing in u for constant gamma") {
  ModelParams p = unit_params();
  p.lam = Coefficient::constant(0.5);
  double prev = hamiltonian_zeroth(p, 0.0, 0.0, 0.0);
  for (double u = 1e-4; u < 1e3; u *= 1.7) {
    const double cur = hamiltonian_zeroth(p, 0.0, 0.0, u);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("q_star is the Holder conjugate") {
  ModelParams p = unit_params();
  p.q = 1.5;
  CHECK(1.0 / p.q + 1.0 / p.q_star() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.q_star() == doctest::Approx(3.0));
}
