#include "tzliq/pathsim.hpp"

#include <algorithm>
#include <cmath>

namespace tzliq {

ReflectedPath simulate_path(const ModelParams& p, double y0, double dt, rng::Stream stream) {
  detail::PathKernel kernel(p);
  ReflectedPath path;
  const std::size_t hint = static_cast<std::size_t>(p.T / dt) + p.marks.size() + 4;
  path.times.reserve(hint);
  path.y.reserve(hint);
  path.local_time.reserve(hint);
  path.times.push_back(0.0);
  path.y.push_back(y0);
  walk_path(
      kernel, y0, dt, stream,
      [&](double, double t1, double, double y1, double dl) {
        path.times.push_back(t1);
        path.y.push_back(y1);
        path.local_time.push_back(dl);
      },
      [&](double t, std::size_t mark) {
        path.events.push_back({t, mark, path.times.size() - 1});
      });
  return path;
}

PathBatchStats simulate_batch_stats(const ModelParams& p, double y0, double dt,
                                    std::size_t n_paths, std::uint64_t seed, Exec exec) {
  detail::PathKernel kernel(p);
  PathBatchStats stats;
  stats.n_paths = n_paths;
  stats.y_end.assign(n_paths, 0.0);
  std::vector<double> max_prod(n_paths, 0.0), min_y(n_paths, y0), events(n_paths, 0.0),
      ltime(n_paths, 0.0);

  parallel_for(n_paths, exec, [&](std::size_t i) {
    double yT = y0;
    double prod = 0.0, ymin = y0, lt = 0.0;
    std::size_t nev = 0;
    walk_path(
        kernel, y0, dt, rng::Stream{seed, i},
        [&](double, double, double, double y1, double dl) {
          yT = y1;
          lt += dl;
          const double pr = (y1 - p.a) * dl;
          if (pr > prod) prod = pr;
          if (y1 < ymin) ymin = y1;
        },
        [&](double, std::size_t) { ++nev; });
    stats.y_end[i] = yT;
    max_prod[i] = prod;
    min_y[i] = ymin;
    events[i] = static_cast<double>(nev);
    ltime[i] = lt;
  });

  double sum = 0.0, ev = 0.0, lt = 0.0;
  stats.min_y = y0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    sum += stats.y_end[i];
    ev += events[i];
    lt += ltime[i];
    stats.max_skorokhod_product = std::max(stats.max_skorokhod_product, max_prod[i]);
    stats.min_y = std::min(stats.min_y, min_y[i]);
  }
  if (n_paths > 0) {
    stats.mean_y_end = sum / static_cast<double>(n_paths);
    stats.mean_event_count = ev / static_cast<double>(n_paths);
    stats.mean_local_time = lt / static_cast<double>(n_paths);
    if (n_paths > 1) {
      double ss = 0.0;
      for (double v : stats.y_end) ss += (v - stats.mean_y_end) * (v - stats.mean_y_end);
      stats.stderr_y_end =
          std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
    }
  }
  return stats;
}

OccupationStats occupation_check(std::span<const ReflectedPath> paths, double barrier) {
  if (paths.empty()) throw std::invalid_argument("occupation_check: empty path set");
  OccupationStats s;
  s.min_y = paths[0].y.empty() ? barrier : paths[0].y[0];
  std::vector<double> ends;
  ends.reserve(paths.size());
  double ev = 0.0, lt = 0.0;
  for (const auto& path : paths) {
    for (std::size_t k = 0; k + 1 < path.y.size(); ++k) {
      const double pr = (path.y[k + 1] - barrier) * path.local_time[k];
      s.max_skorokhod_product = std::max(s.max_skorokhod_product, pr);
      lt += path.local_time[k];
    }
    for (double v : path.y) s.min_y = std::min(s.min_y, v);
    ends.push_back(path.y.back());
    ev += static_cast<double>(path.events.size());
  }
  std::sort(ends.begin(), ends.end());
  const auto q = [&](double f) {
    const double pos = f * static_cast<double>(ends.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return i + 1 < ends.size() ? (1.0 - w) * ends[i] + w * ends[i + 1] : ends.back();
  };
  double sum = 0.0;
  for (double v : ends) sum += v;
  s.mean_y_end = sum / static_cast<double>(ends.size());
  s.q05_y_end = q(0.05);
  s.q50_y_end = q(0.50);
  s.q95_y_end = q(0.95);
  s.mean_event_count = ev / static_cast<double>(paths.size());
  s.total_local_time_mean = lt / static_cast<double>(paths.size());
  return s;
}

}  // namespace tzliq
