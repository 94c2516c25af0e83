#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tzliq {

/// Uniform spatial mesh on [a, y_max] with a strictly increasing time grid
/// 0 = t_0 < ... < t_K = T. Geometric step shrinkage toward T resolves the
/// steep terminal layer of the truncated problems.
struct Grid {
  double y_min = 0.0;
  double y_max = 1.0;
  std::size_t n_space = 3;  ///< number of spatial nodes, >= 3
  std::vector<double> t_grid;

  double h() const { return (y_max - y_min) / static_cast<double>(n_space - 1); }
  double y(std::size_t j) const { return y_min + h() * static_cast<double>(j); }
  std::size_t n_time_steps() const { return t_grid.size() - 1; }
  double t_begin() const { return t_grid.front(); }
  double t_end() const { return t_grid.back(); }

  void check() const {
    if (n_space < 3) throw std::invalid_argument("Grid: n_space must be >= 3");
    if (!(y_max > y_min)) throw std::invalid_argument("Grid: y_max must exceed y_min");
    if (t_grid.size() < 2) throw std::invalid_argument("Grid: need at least two time nodes");
    for (std::size_t k = 0; k + 1 < t_grid.size(); ++k)
      if (!(t_grid[k] < t_grid[k + 1]))
        throw std::invalid_argument("Grid: time grid must be strictly increasing");
  }

  /// Bisects every time step and halves the spatial spacing; original nodes
  /// are preserved, which keeps convergence studies clean.
  Grid refined() const {
    Grid g;
    g.y_min = y_min;
    g.y_max = y_max;
    g.n_space = 2 * n_space - 1;
    g.t_grid.reserve(2 * t_grid.size() - 1);
    for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
      g.t_grid.push_back(t_grid[k]);
      g.t_grid.push_back(0.5 * (t_grid[k] + t_grid[k + 1]));
    }
    g.t_grid.push_back(t_grid.back());
    return g;
  }
};

/// Time grid with n_uniform equal steps followed by n_refine steps whose
/// sizes shrink geometrically by `ratio` toward T. ratio = 1 or
/// n_refine = 0 gives a uniform grid.
inline std::vector<double> make_time_grid(double T, std::size_t n_uniform, std::size_t n_refine,
                                          double ratio) {
  if (!(T > 0.0)) throw std::invalid_argument("make_time_grid: T must be positive");
  if (n_uniform + n_refine == 0) throw std::invalid_argument("make_time_grid: no steps");
  if (!(ratio > 0.0) || ratio > 1.0)
    throw std::invalid_argument("make_time_grid: ratio must lie in (0, 1]");
  double tail = 0.0, r = 1.0;
  for (std::size_t j = 0; j < n_refine; ++j) {
    r *= ratio;
    tail += r;
  }
  const double d = T / (static_cast<double>(n_uniform) + tail);
  std::vector<double> t;
  t.reserve(n_uniform + n_refine + 1);
  t.push_back(0.0);
  for (std::size_t k = 0; k < n_uniform; ++k) t.push_back(t.back() + d);
  r = 1.0;
  for (std::size_t j = 0; j < n_refine; ++j) {
    r *= ratio;
    t.push_back(t.back() + d * r);
  }
  t.back() = T;
  return t;
}

inline Grid make_grid(double a, double y_max, std::size_t n_space, std::size_t n_uniform,
                      std::size_t n_refine, double ratio, double T) {
  Grid g;
  g.y_min = a;
  g.y_max = y_max;
  g.n_space = n_space;
  g.t_grid = make_time_grid(T, n_uniform, n_refine, ratio);
  g.check();
  return g;
}

}  // namespace tzliq
