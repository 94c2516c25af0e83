#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tzliq/grid.hpp"

namespace tzliq {

/// Which discrete Neumann treatment produced a surface.
enum class NeumannOrder { first, second };

/// Value-function surface u on a time x space grid, row-major by time.
/// A finite truncation_level means the terminal row equals that level;
/// ladder_limit marks a singular-limit approximation restricted to
/// [0, t_end]. psi_zero records that the martingale component of the
/// stochastic equation vanishes identically in the Markovian scope.
struct ValueSurface {
  Grid grid;
  std::vector<double> values;  ///< size (K+1) * n_space
  double truncation_level = 0.0;
  bool ladder_limit = false;
  NeumannOrder boundary = NeumannOrder::second;
  bool psi_zero = true;

  double& at(std::size_t k, std::size_t j) { return values[k * grid.n_space + j]; }
  double at(std::size_t k, std::size_t j) const { return values[k * grid.n_space + j]; }
  std::size_t n_time_nodes() const { return grid.t_grid.size(); }
  double t_max() const { return grid.t_end(); }

  /// Largest one-sided Neumann residual |u[k][1]-u[k][0]|/h over all rows.
  double neumann_residual() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < n_time_nodes(); ++k)
      worst = std::max(worst, std::abs(at(k, 1) - at(k, 0)) / grid.h());
    return worst;
  }
};

/// Bilinear sample assuming t is inside coverage, with a monotone
/// time-bracket hint (amortized O(1) along nondecreasing t sweeps; reset
/// the hint to 0 for each sweep). Clamps y to the domain edges.
inline double interpolate_hinted(const ValueSurface& s, double t, double y, std::size_t& hint) {
  const auto& tg = s.grid.t_grid;
  while (hint + 2 < tg.size() && tg[hint + 1] <= t) ++hint;
  const std::size_t k = hint;
  const double wt = std::clamp((t - tg[k]) / (tg[k + 1] - tg[k]), 0.0, 1.0);
  const double h = s.grid.h();
  double jr = (y - s.grid.y_min) / h;
  if (jr < 0.0) jr = 0.0;
  std::size_t j = static_cast<std::size_t>(jr);
  if (j >= s.grid.n_space - 1) j = s.grid.n_space - 2;
  const double wy = std::clamp(jr - static_cast<double>(j), 0.0, 1.0);
  return (1.0 - wt) * ((1.0 - wy) * s.at(k, j) + wy * s.at(k, j + 1)) +
         wt * ((1.0 - wy) * s.at(k + 1, j) + wy * s.at(k + 1, j + 1));
}

/// Bilinear interpolation in (t, y); exact on grid nodes. Queries outside
/// the covered rectangle throw std::out_of_range (with a tiny roundoff
/// slack at the edges).
inline double interpolate(const ValueSurface& s, double t, double y) {
  const auto& tg = s.grid.t_grid;
  const double slack_t = 1e-12 * (std::abs(tg.back()) + 1.0);
  const double slack_y = 1e-12 * (std::abs(s.grid.y_max) + 1.0);
  if (t < tg.front() - slack_t || t > tg.back() + slack_t)
    throw std::out_of_range("interpolate: t outside surface coverage");
  if (y < s.grid.y_min - slack_y || y > s.grid.y_max + slack_y)
    throw std::out_of_range("interpolate: y outside surface domain");
  t = std::min(std::max(t, tg.front()), tg.back());
  y = std::min(std::max(y, s.grid.y_min), s.grid.y_max);

  std::size_t k = 0, hi = tg.size() - 1;
  while (k + 1 < hi) {
    const std::size_t mid = (k + hi) / 2;
    if (tg[mid] <= t) {
      k = mid;
    } else {
      hi = mid;
    }
  }
  const double wt = (t - tg[k]) / (tg[k + 1] - tg[k]);

  const double h = s.grid.h();
  double jr = (y - s.grid.y_min) / h;
  std::size_t j = static_cast<std::size_t>(jr);
  if (j >= s.grid.n_space - 1) j = s.grid.n_space - 2;
  const double wy = jr - static_cast<double>(j);

  const double u00 = s.at(k, j), u01 = s.at(k, j + 1);
  const double u10 = s.at(k + 1, j), u11 = s.at(k + 1, j + 1);
  return (1.0 - wt) * ((1.0 - wy) * u00 + wy * u01) + wt * ((1.0 - wy) * u10 + wy * u11);
}

}  // namespace tzliq
