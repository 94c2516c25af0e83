#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tzliq/envelopes.hpp"
#include "tzliq/hjb_solver.hpp"
#include "tzliq/liquidation.hpp"
#include "tzliq/model.hpp"
#include "tzliq/parallel.hpp"

namespace tzliq {

struct McOptions {
  std::size_t n_paths = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 12345;
  Exec exec = Exec::openmp;
};

/// Monte Carlo cost estimate for one strategy, with the dynamic-programming
/// reference u_0(y0) |x0|^q when available. mean_total always equals the
/// sum of the decomposition means (impact + risk + slippage + terminal).
struct CostReport {
  std::string strategy;
  std::size_t n_paths = 0;
  double mean_total = 0.0;
  double mean_impact = 0.0, mean_risk = 0.0, mean_slippage = 0.0, mean_terminal = 0.0;
  double stderr_total = 0.0;
  double reference = std::numeric_limits<double>::quiet_NaN();
  double allowance = 0.0;
  double diff = 0.0;   ///< mean_total - reference
  double z = 0.0;      ///< diff in standard-error units (0 when stderr = 0)
  bool pass = false;
};

/// Thrown when the Monte Carlo noise is too large to resolve the check.
class InsufficientPaths : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dynamic-programming identity at an interior horizon: runs optimal
/// feedback on [0, t_cut] and checks
///   u_0(y0) |x0|^q  vs  MC[cost on [0, t_cut]] + MC[u_{t_cut}(y) |x|^q].
/// Passes when |difference| <= 3 stderr + allowance. The singular endpoint
/// is never evaluated. Throws InsufficientPaths when 3 stderr exceeds the
/// reference scale.
CostReport verify_value(const ModelParams& p, const ValueSurface& surface,
                        const EnvelopePair& envelopes, double x0, double y0,
                        const McOptions& mc, double t_cut, double allowance);

/// Paired comparison of strategies on a common path set (common random
/// numbers). The first strategy is the candidate optimum; pairs report the
/// per-path difference candidate - other in paired standard errors.
struct DominanceReport {
  std::vector<CostReport> reports;  ///< input order
  struct Pair {
    std::string a, b;
    double mean_diff = 0.0;    ///< total_a - total_b, path-paired
    double stderr_diff = 0.0;
    double z = 0.0;
  };
  std::vector<Pair> pairs;          ///< first strategy vs each other
  bool optimal_dominates = false;   ///< every pair mean_diff <= allowance
};
DominanceReport verify_dominance(const ModelParams& p, const ValueSurface& surface,
                                 const std::vector<Strategy>& strategies, double x0, double y0,
                                 const McOptions& mc, double t_cut, double allowance = 0.0);

/// Consistency of a finite-M surface with its expectation representation
/// along the reflected process:
///   u_t(y) = E[ u_tau(y_tau) + int_t^tau F0(s, y_s, u_s(y_s)) ds ],
/// valid because the Neumann condition kills the local-time term. Each
/// probe reports the z-score of the Monte Carlo right side against the
/// interpolated left side plus a discrete local-time diagnostic
/// E[sum Du(s, a) dL] (should be near zero).
struct FkProbe {
  double t = 0.0, y = 0.0;
};
struct FkReport {
  struct Row {
    double t = 0.0, y = 0.0;
    double left = 0.0;
    double right_mean = 0.0;
    double stderr_right = 0.0;
    double z = 0.0;
    double local_time_term = 0.0;
    bool pass = false;
  };
  std::vector<Row> rows;
  double tau = 0.0;
  double allowance = 0.0;
  bool all_pass = false;
};
FkReport verify_feynman_kac(const ModelParams& p, const ValueSurface& surface,
                            const std::vector<FkProbe>& probes, double tau, const McOptions& mc,
                            double allowance);

/// Measured ingredients for the discretization allowance: 3x the surface's
/// grid-convergence error contribution plus 3x the Euler weak-error
/// estimate from step-halving at a reduced path count.
struct AllowanceBreakdown {
  double surface_component = 0.0;
  double euler_component = 0.0;
  double total() const { return surface_component + euler_component; }
};
AllowanceBreakdown dp_identity_allowance(const ModelParams& p, const ValueSurface& surface,
                                         const EnvelopePair& envelopes, double x0, double y0,
                                         const McOptions& mc, double t_cut,
                                         double rel_scheme_error);
AllowanceBreakdown fk_allowance(const ModelParams& p, const ValueSurface& surface,
                                const std::vector<FkProbe>& probes, double tau,
                                const McOptions& mc, double rel_scheme_error);

/// One named parameter fixture for the property suites.
struct Fixture {
  std::string name;
  ModelParams params;
  double y_max = 4.0;
  std::size_t n_space = 120;
  std::size_t n_time_uniform = 160;
  std::size_t n_time_refine = 60;
  double time_refine_ratio = 0.9;
  std::vector<double> m_schedule = {1.0, 10.0, 100.0};
  double t_cut = 0.9;
  McOptions mc{2000, 1e-3, 20240601, Exec::openmp};
};

/// The catalog used by the verify pipeline: the closed-form oracle model,
/// a y-dependent risk-aversion model and a finite-gamma dark-pool model.
std::vector<Fixture> builtin_catalog();
/// Fixture with sigma_bar = 0: fails validation, everything else skipped.
Fixture broken_fixture();

/// Aggregated machine-readable verdicts of the property suites.
struct SuiteResult {
  std::string fixture;
  std::string suite;
  std::string statistic_name;
  double statistic = 0.0;
  double tolerance = 0.0;
  std::string verdict;  ///< "pass" | "fail" | "skipped"
};
struct PropertyReport {
  std::vector<SuiteResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (r.verdict == "fail") return false;
    return true;
  }
  std::optional<std::string> first_failing_suite() const {
    for (const auto& r : results)
      if (r.verdict == "fail") return r.suite;
    return std::nullopt;
  }
};

/// Executes the validate, envelope, monotonicity, comparison, skorokhod,
/// decay and Holder suites per fixture. A failed validate suite gates the
/// rest of that fixture (reported as skipped).
PropertyReport run_property_suites(const std::vector<Fixture>& catalog);

}  // namespace tzliq
