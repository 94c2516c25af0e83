#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tzliq/model.hpp"
#include "tzliq/parallel.hpp"
#include "tzliq/rng.hpp"

namespace tzliq {

/// Discretized reflected factor path with per-step local-time increments
/// and the Poisson mark events. local_time[k] covers the step
/// (times[k], times[k+1]] and is positive only when y[k+1] sits on the
/// barrier, so (y[k+1] - a) * local_time[k] = 0 identically.
struct ReflectedPath {
  struct Event {
    double t = 0.0;
    std::size_t mark = 0;
    std::size_t node = 0;  ///< index into times with times[node] == t
  };

  std::vector<double> times;
  std::vector<double> y;
  std::vector<double> local_time;
  std::vector<Event> events;
};

namespace detail {

/// Precomputed immutables shared by every path of a batch. Constant
/// coefficient triples are hoisted so the hot loop avoids dispatch.
struct PathKernel {
  const ModelParams* p = nullptr;
  double mu_total = 0.0;
  std::vector<double> cum_weights;
  bool draw_w = true;  ///< false when sigma is structurally zero
  bool constant_coeffs = false;
  double beta0 = 0.0, sigma0 = 0.0, sigma_bar0 = 0.0;

  explicit PathKernel(const ModelParams& params) : p(&params) {
    mu_total = params.mu_total();
    double c = 0.0;
    cum_weights.reserve(params.marks.size());
    for (const auto& m : params.marks) {
      c += m.weight;
      cum_weights.push_back(c);
    }
    draw_w = !params.sigma.is_zero();
    constant_coeffs = params.beta.kind() == Coefficient::Kind::constant &&
                      params.sigma.kind() == Coefficient::Kind::constant &&
                      params.sigma_bar.kind() == Coefficient::Kind::constant;
    if (constant_coeffs) {
      beta0 = params.beta(0.0, 0.0);
      sigma0 = params.sigma(0.0, 0.0);
      sigma_bar0 = params.sigma_bar(0.0, 0.0);
    }
  }
};

}  // namespace detail

/// Streams one path through the visitors without materializing it:
///   on_step(t0, t1, y0, y1, dL) per Euler step,
///   on_event(t, mark) whenever a dark-pool execution time is crossed
///   (event times are inserted as extra grid points, so they coincide with
///   a step boundary and fire after the step that lands on them).
///
/// Projected Euler-Maruyama: yhat = y + beta dt + sigma dW + sigma_bar dB;
/// the next value is max(a, yhat) and dL = max(0, a - yhat). Event times
/// come from an exact exponential skeleton drawn up front, which avoids
/// O(dt) thinning bias in event placement. Draw order per stream: the
/// event skeleton (interarrival, mark, interarrival, ...), then per step
/// dW (skipped when sigma is structurally zero) followed by dB.
template <class StepVisitor, class EventVisitor>
void walk_path(const detail::PathKernel& kernel, double y0, double dt, rng::Stream stream,
               StepVisitor&& on_step, EventVisitor&& on_event, double t_start = 0.0,
               double t_end = -1.0) {
  const ModelParams& p = *kernel.p;
  if (t_end < 0.0) t_end = p.T;
  if (!(y0 >= p.a)) throw std::invalid_argument("walk_path: y0 must be at or above the barrier");
  if (!(dt > 0.0)) throw std::invalid_argument("walk_path: dt must be positive");
  if (!(t_start >= 0.0 && t_end <= p.T + 1e-12 * (1.0 + p.T) && t_start < t_end))
    throw std::invalid_argument("walk_path: bad time window");

  rng::Xoshiro256 gen(stream);

  // exact exponential event skeleton on [t_start, t_end)
  std::vector<std::pair<double, std::size_t>> events;
  if (kernel.mu_total > 0.0) {
    double te = t_start;
    for (;;) {
      te += gen.exponential(kernel.mu_total);
      if (te >= t_end) break;
      events.emplace_back(te, gen.categorical(kernel.cum_weights, kernel.mu_total));
    }
  }

  const double eps = 1e-12 * p.T;
  const double sq_dt = std::sqrt(dt);

  // tight loop for the common constant-coefficient case without marks
  if (events.empty() && kernel.constant_coeffs) {
    const std::size_t full_steps = static_cast<std::size_t>((t_end - t_start + eps) / dt);
    double y = y0;
    double t0 = t_start;
    for (std::size_t k = 1; k <= full_steps; ++k) {
      const double t1 = t_start + dt * static_cast<double>(k);
      double inc = kernel.beta0 * dt;
      if (kernel.draw_w) inc += kernel.sigma0 * sq_dt * gen.normal();
      inc += kernel.sigma_bar0 * sq_dt * gen.normal();
      const double yhat = y + inc;
      const double ynext = yhat < p.a ? p.a : yhat;
      on_step(t0, t1, y, ynext, yhat < p.a ? p.a - yhat : 0.0);
      y = ynext;
      t0 = t1;
    }
    if (t0 < t_end - eps) {  // short final step
      const double step = t_end - t0;
      const double sq = std::sqrt(step);
      double inc = kernel.beta0 * step;
      if (kernel.draw_w) inc += kernel.sigma0 * sq * gen.normal();
      inc += kernel.sigma_bar0 * sq * gen.normal();
      const double yhat = y + inc;
      const double ynext = yhat < p.a ? p.a : yhat;
      on_step(t0, t_end, y, ynext, yhat < p.a ? p.a - yhat : 0.0);
    }
    return;
  }

  double t = t_start;
  double y = y0;
  std::size_t next_event = 0;
  std::size_t kbase = 1;  // next node of the uniform base grid
  while (t < t_end - eps) {
    double tb = std::min(t_start + dt * static_cast<double>(kbase), t_end);
    double t1 = tb;
    bool fire = false;
    bool advance_base = true;
    if (next_event < events.size()) {
      const double te = events[next_event].first;
      if (te < tb - eps) {
        t1 = te;  // inserted as an extra grid point
        fire = true;
        advance_base = false;
      } else if (te <= tb + eps) {
        fire = true;
      }
    }
    const double step = std::max(t1 - t, 0.0);
    const double sq = step == dt ? sq_dt : std::sqrt(step);
    double inc;
    if (kernel.constant_coeffs) {
      inc = kernel.beta0 * step;
      if (kernel.draw_w) inc += kernel.sigma0 * sq * gen.normal();
      inc += kernel.sigma_bar0 * sq * gen.normal();
    } else {
      inc = p.beta(t, y) * step;
      if (kernel.draw_w) inc += p.sigma(t, y) * sq * gen.normal();
      inc += p.sigma_bar(t, y) * sq * gen.normal();
    }
    const double yhat = y + inc;
    const double ynext = yhat < p.a ? p.a : yhat;
    const double dl = yhat < p.a ? p.a - yhat : 0.0;
    on_step(t, t1, y, ynext, dl);
    y = ynext;
    t = t1;
    if (fire) {
      on_event(t1, events[next_event].second);
      ++next_event;
    }
    if (advance_base) ++kbase;
  }
}

/// Simulates one reflected path with the Poisson mark stream. See
/// walk_path for the scheme; identical (seed, id) streams reproduce
/// identical paths bit-exactly.
ReflectedPath simulate_path(const ModelParams& p, double y0, double dt, rng::Stream stream);

/// Per-batch law statistics gathered without storing the paths.
struct PathBatchStats {
  std::size_t n_paths = 0;
  double max_skorokhod_product = 0.0;  ///< max over paths/steps of (y_{k+1}-a) dL_k
  double min_y = 0.0;                  ///< min over paths/steps of y
  double mean_y_end = 0.0;
  double stderr_y_end = 0.0;
  double mean_event_count = 0.0;
  double mean_local_time = 0.0;
  std::vector<double> y_end;  ///< terminal values, one per path (stream order)
};

/// Simulates n_paths paths (stream ids 0..n-1) and accumulates law
/// statistics. The OpenMP and serial policies produce identical results:
/// per-path values land in preallocated slots and are reduced in index
/// order.
PathBatchStats simulate_batch_stats(const ModelParams& p, double y0, double dt,
                                    std::size_t n_paths, std::uint64_t seed,
                                    Exec exec = Exec::openmp);

/// Discrete Skorokhod audit plus empirical law summaries of an in-memory
/// batch: max (y_{k+1}-a) dL_k (zero by construction), terminal mean and
/// quantiles, event counts.
struct OccupationStats {
  double max_skorokhod_product = 0.0;
  double min_y = 0.0;
  double mean_y_end = 0.0;
  double q05_y_end = 0.0, q50_y_end = 0.0, q95_y_end = 0.0;
  double mean_event_count = 0.0;
  double total_local_time_mean = 0.0;
};
OccupationStats occupation_check(std::span<const ReflectedPath> paths, double barrier);

}  // namespace tzliq
