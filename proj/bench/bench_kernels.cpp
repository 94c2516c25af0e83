// Timing comparison of the OpenMP batch kernels against their serial
// reference implementations. Not a correctness test (the unit suite checks
// bit-exact agreement); this reports wall-clock speedups.

#include <chrono>
#include <cstdio>

#include "tzliq/hjb_solver.hpp"
#include "tzliq/parallel.hpp"
#include "tzliq/pathsim.hpp"
#include "tzliq/verification.hpp"

using namespace tzliq;

namespace {

ModelParams bench_model() {
  ModelParams p;
  p.q = 2.0;
  p.T = 1.0;
  p.a = 0.0;
  p.beta = Coefficient::constant(0.0);
  p.sigma = Coefficient::constant(0.0);
  p.sigma_bar = Coefficient::constant(1.0);
  p.eta = Coefficient::constant(1.0);
  p.lam = Coefficient::constant(0.2);
  p.marks = {{0.0, 0.6}, {1.0, 0.9}};
  p.gamma = {Coefficient::constant(0.5), Coefficient::constant(1.0)};
  p.Lambda = 1.5;
  p.kappa = 1.0;
  p.kappa0 = 1.0;
  return p;
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  const ModelParams p = bench_model();
  std::printf("threads available: %d\n\n", max_threads());

  {
    const std::size_t n = 20000;
    const double dt = 1e-4;
    double ts = 0, tp = 0;
    ts = seconds([&] { simulate_batch_stats(p, 1.0, dt, n, 1, Exec::serial); });
    tp = seconds([&] { simulate_batch_stats(p, 1.0, dt, n, 1, Exec::openmp); });
    std::printf("simulate_batch_stats  %zu paths x %g dt : serial %.3fs  openmp %.3fs  (%.2fx)\n",
                n, dt, ts, tp, ts / tp);
  }

  {
    const Grid g = make_grid(0.0, 4.0, 100, 150, 60, 0.9, 1.0);
    const ValueSurface s = solve_truncated(p, g, 200.0);
    const std::vector<Strategy> strategies = {Strategy::optimal(s), Strategy::twap(),
                                              Strategy::no_dark_pool(s)};
    McOptions mc{5000, 5e-4, 2, Exec::serial};
    double ts = 0, tp = 0;
    ts = seconds([&] { verify_dominance(p, s, strategies, 1.0, 1.0, mc, 0.9); });
    mc.exec = Exec::openmp;
    tp = seconds([&] { verify_dominance(p, s, strategies, 1.0, 1.0, mc, 0.9); });
    std::printf("verify_dominance      %zu paths x 3 strategies: serial %.3fs  openmp %.3fs  (%.2fx)\n",
                mc.n_paths, ts, tp, ts / tp);
  }

  {
    const Grid g = make_grid(0.0, 4.0, 100, 150, 60, 0.9, 1.0);
    const ValueSurface s = solve_truncated(p, g, 200.0);
    McOptions mc{20000, 5e-4, 3, Exec::serial};
    const std::vector<FkProbe> probes = {{0.0, 1.0}};
    double ts = 0, tp = 0;
    ts = seconds([&] { verify_feynman_kac(p, s, probes, 0.9, mc, 1.0); });
    mc.exec = Exec::openmp;
    tp = seconds([&] { verify_feynman_kac(p, s, probes, 0.9, mc, 1.0); });
    std::printf("verify_feynman_kac    %zu paths: serial %.3fs  openmp %.3fs  (%.2fx)\n",
                mc.n_paths, ts, tp, ts / tp);
  }
  return 0;
}
