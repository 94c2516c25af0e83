#include <doctest.h>

#include "fixtures.hpp"
#include "tzliq/hjb_solver.hpp"
#include "tzliq/verification.hpp"

using namespace tzliq;
using namespace tzliq::testfix;

// The OpenMP kernels must agree bit for bit with their serial twins:
// per-path work is independent and reductions run serially in index order.

TEST_CASE("simulate_batch_stats: serial and openmp agree exactly") {
  const ModelParams p = darkpool_model();
  const PathBatchStats a = simulate_batch_stats(p, 1.0, 1e-3, 500, 321, Exec::serial);
  const PathBatchStats b = simulate_batch_stats(p, 1.0, 1e-3, 500, 321, Exec::openmp);
  CHECK(a.y_end == b.y_end);
  CHECK(a.mean_y_end == b.mean_y_end);
  CHECK(a.stderr_y_end == b.stderr_y_end);
  CHECK(a.max_skorokhod_product == b.max_skorokhod_product);
  CHECK(a.mean_event_count == b.mean_event_count);
  CHECK(a.mean_local_time == b.mean_local_time);
}

TEST_CASE("verify_dominance: serial and openmp agree exactly") {
  const ModelParams p = darkpool_model();
  const Grid g = make_grid(0.0, 4.0, 50, 80, 30, 0.9, 1.0);
  const ValueSurface s = solve_truncated(p, g, 100.0);
  const std::vector<Strategy> strategies = {Strategy::optimal(s), Strategy::twap()};
  McOptions serial{300, 2e-3, 17, Exec::serial};
  McOptions openmp = serial;
  openmp.exec = Exec::openmp;
  const DominanceReport a = verify_dominance(p, s, strategies, 1.0, 1.0, serial, 0.5);
  const DominanceReport b = verify_dominance(p, s, strategies, 1.0, 1.0, openmp, 0.5);
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].mean_total == b.reports[i].mean_total);
    CHECK(a.reports[i].stderr_total == b.reports[i].stderr_total);
  }
  CHECK(a.pairs[0].mean_diff == b.pairs[0].mean_diff);
  CHECK(a.pairs[0].stderr_diff == b.pairs[0].stderr_diff);
}

TEST_CASE("verify_feynman_kac: serial and openmp agree exactly") {
  const ModelParams p = ydep_model();
  const Grid g = make_grid(0.0, 4.0, 50, 80, 30, 0.9, 1.0);
  const ValueSurface s = solve_truncated(p, g, 50.0);
  McOptions serial{300, 2e-3, 23, Exec::serial};
  McOptions openmp = serial;
  openmp.exec = Exec::openmp;
  const FkReport a = verify_feynman_kac(p, s, {{0.0, 1.0}}, 0.8, serial, 1.0);
  const FkReport b = verify_feynman_kac(p, s, {{0.0, 1.0}}, 0.8, openmp, 1.0);
  CHECK(a.rows[0].right_mean == b.rows[0].right_mean);
  CHECK(a.rows[0].stderr_right == b.rows[0].stderr_right);
  CHECK(a.rows[0].local_time_term == b.rows[0].local_time_term);
}
