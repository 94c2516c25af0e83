#include "tzliq/model.hpp"

namespace tzliq {

AuditGrid AuditGrid::make(const ModelParams& p, double y_max, std::size_t nt, std::size_t ny) {
  AuditGrid g;
  g.t.reserve(nt);
  g.y.reserve(ny);
  for (std::size_t i = 0; i < nt; ++i) g.t.push_back(p.T * static_cast<double>(i) / (nt - 1));
  for (std::size_t j = 0; j < ny; ++j)
    g.y.push_back(p.a + (y_max - p.a) * static_cast<double>(j) / (ny - 1));
  return g;
}

namespace {

// roundoff slack so bounds met with equality do not flag
constexpr double kSlack = 1e-12;

void check_bound(std::vector<Violation>& out, const char* rule, double t, double y, double v,
                 bool ok) {
  if (!ok) out.push_back({rule, t, y, v});
}

}  // namespace

std::vector<Violation> validate(const ModelParams& p, const AuditGrid& audit) {
  if (!(p.q > 1.0)) throw std::invalid_argument("validate: q must exceed 1");
  if (audit.t.empty() || audit.y.empty())
    throw std::invalid_argument("validate: empty audit grid");
  if (p.gamma.size() != p.marks.size())
    throw std::invalid_argument("validate: gamma list must match marks list");

  std::vector<Violation> out;

  // Holder conjugacy of the derived exponent, up to machine rounding.
  const double conj = 1.0 / p.q + 1.0 / p.q_star();
  if (std::abs(conj - 1.0) > 64 * std::numeric_limits<double>::epsilon())
    out.push_back({"q_star conjugacy", 0, 0, conj});

  if (!(p.Lambda > 0.0)) out.push_back({"Lambda positive", 0, 0, p.Lambda});
  if (!(p.kappa > 0.0)) out.push_back({"kappa positive", 0, 0, p.kappa});
  if (!(p.kappa0 > 0.0)) out.push_back({"kappa0 positive", 0, 0, p.kappa0});
  if (!(p.T > 0.0)) out.push_back({"horizon positive", 0, 0, p.T});

  double mu = 0.0;
  for (const auto& m : p.marks) {
    if (!(m.weight > 0.0)) out.push_back({"mark weight positive", 0, m.z, m.weight});
    mu += m.weight;
  }
  if (!std::isfinite(mu)) out.push_back({"mark measure finite", 0, 0, mu});

  const double lim = p.Lambda * (1.0 + kSlack) + kSlack;
  for (double t : audit.t) {
    for (double y : audit.y) {
      const double b = p.beta(t, y);
      const double s = p.sigma(t, y);
      const double sb = p.sigma_bar(t, y);
      const double e = p.eta(t, y);
      const double l = p.lam(t, y);
      check_bound(out, "beta bound", t, y, b, std::isfinite(b) && std::abs(b) <= lim);
      check_bound(out, "sigma bound", t, y, s, std::isfinite(s) && std::abs(s) <= lim);
      check_bound(out, "sigma_bar bound", t, y, sb, std::isfinite(sb) && std::abs(sb) <= lim);
      check_bound(out, "eta bound", t, y, e, std::isfinite(e) && e <= lim);
      check_bound(out, "lam bound", t, y, l, std::isfinite(l) && l <= lim);
      check_bound(out, "lam nonnegative", t, y, l, l >= -kSlack);
      check_bound(out, "eta floor", t, y, e, e >= p.kappa0 * (1.0 - kSlack));
      check_bound(out, "superparabolicity", t, y, sb * sb,
                  sb * sb >= p.kappa * (1.0 - kSlack));
      for (std::size_t i = 0; i < p.gamma.size(); ++i) {
        const double g = p.gamma[i](t, y);
        check_bound(out, "gamma range", t, y, g, g >= 0.0 && !std::isnan(g));
      }
    }
  }

  // Sampled Lipschitz audit in y: finite-difference slopes bounded by Lambda.
  if (audit.y.size() >= 2) {
    const double slope_lim = p.Lambda * (1.0 + 1e-9) + 1e-9;
    auto slope_audit = [&](const Coefficient& c, const char* rule) {
      for (double t : audit.t) {
        for (std::size_t j = 0; j + 1 < audit.y.size(); ++j) {
          const double y0 = audit.y[j], y1 = audit.y[j + 1];
          const double slope = (c(t, y1) - c(t, y0)) / (y1 - y0);
          if (std::isfinite(slope) || !c.is_space_independent()) {
            check_bound(out, rule, t, y0, slope,
                        !std::isfinite(slope) ? false : std::abs(slope) <= slope_lim);
          }
        }
      }
    };
    slope_audit(p.beta, "beta Lipschitz");
    slope_audit(p.sigma, "sigma Lipschitz");
    slope_audit(p.sigma_bar, "sigma_bar Lipschitz");
    slope_audit(p.eta, "eta Lipschitz");
    slope_audit(p.lam, "lam Lipschitz");
    // gamma may be +inf; only audit slopes where both samples are finite
    for (std::size_t i = 0; i < p.gamma.size(); ++i) {
      for (double t : audit.t) {
        for (std::size_t j = 0; j + 1 < audit.y.size(); ++j) {
          const double g0 = p.gamma[i](t, audit.y[j]);
          const double g1 = p.gamma[i](t, audit.y[j + 1]);
          if (std::isfinite(g0) && std::isfinite(g1)) {
            const double slope = (g1 - g0) / (audit.y[j + 1] - audit.y[j]);
            check_bound(out, "gamma Lipschitz", t, audit.y[j], slope,
                        std::abs(slope) <= slope_lim);
          }
        }
      }
    }
  }

  return out;
}

}  // namespace tzliq
