#include "tzliq/liquidation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tzliq {

std::string Strategy::name() const {
  switch (kind) {
    case Kind::optimal_feedback:
      return "optimal-feedback";
    case Kind::twap:
      return "twap";
    case Kind::no_dark_pool_feedback:
      return "no-dark-pool-feedback";
    case Kind::custom:
      return "custom";
  }
  return "?";
}

FeedbackControls feedback_controls(const ModelParams& p, const ValueSurface& surface, double t,
                                   double y, double x) {
  const double u = interpolate(surface, t, y);
  if (u < 0.0) throw std::invalid_argument("feedback_controls: surface value is negative");
  const double e = p.q_star() - 1.0;
  const double ue = std::pow(u, e);
  FeedbackControls c;
  c.xi = ue * x / std::pow(p.eta(t, y), e);
  c.rho.resize(p.marks.size());
  for (std::size_t i = 0; i < p.marks.size(); ++i) {
    const double g = p.gamma[i](t, y);
    if (std::isinf(g)) {
      c.rho[i] = 0.0;
    } else if (g <= 0.0) {
      c.rho[i] = x;
    } else {
      c.rho[i] = ue * x / (std::pow(g, e) + ue);
    }
  }
  return c;
}

namespace detail {

StrategyEngine::StrategyEngine(const ModelParams& p, const Strategy& strategy, double x0,
                               double t_cut, LiquidationRun* record)
    : p_(p), strat_(strategy), t_cut_(t_cut), rec_(record), qs_e_(p.q_star() - 1.0), x_(x0) {
  if (!(t_cut > 0.0) || t_cut > p.T + 1e-12 * (1.0 + p.T))
    throw std::invalid_argument("run_strategy: t_cut must lie in (0, T]");
  if (strat_.uses_surface()) {
    if (strat_.surface == nullptr)
      throw std::invalid_argument("run_strategy: feedback strategy without surface");
    if (strat_.surface->t_max() < t_cut - 1e-12 * (1.0 + p.T))
      throw std::invalid_argument("run_strategy: surface coverage shorter than t_cut");
  }
  if (strat_.kind == Strategy::Kind::custom && !strat_.custom_rate)
    throw std::invalid_argument("run_strategy: custom strategy without rate function");
}

double StrategyEngine::surface_u(double t, double y) {
  const double u = interpolate_hinted(*strat_.surface, t, y, time_hint_);
  if (u < 0.0) throw std::invalid_argument("run_strategy: surface value is negative");
  return u;
}

void StrategyEngine::on_step(double t0, double t1, double y0, double y1) {
  if (done_) return;
  const double eps = 1e-12 * (1.0 + p_.T);
  const double te = std::min(t1, t_cut_);
  if (te <= t0 + 0.0) {
    done_ = true;
    return;
  }
  const double dt = te - t0;

  if (rec_ && rec_->times.empty()) {
    rec_->times.push_back(t0);
    rec_->y.push_back(y0);
    rec_->x.push_back(x_);
    rec_->cost_impact.push_back(0.0);
    rec_->cost_risk.push_back(0.0);
    rec_->cost_slippage.push_back(0.0);
  }

  const double q = p_.q;
  double xi_abs = 0.0;
  double rate_rel = 0.0;
  bool proportional = false;
  switch (strat_.kind) {
    case Strategy::Kind::optimal_feedback:
    case Strategy::Kind::no_dark_pool_feedback: {
      const double u = surface_u(t0, y0);
      rate_rel = std::pow(u, qs_e_) / std::pow(p_.eta(t0, y0), qs_e_);
      xi_abs = rate_rel * x_;
      proportional = true;
      if (strat_.kind == Strategy::Kind::optimal_feedback) {
        const double ue = std::pow(u, qs_e_);
        double density = 0.0;
        for (std::size_t i = 0; i < p_.marks.size(); ++i) {
          const double g = p_.gamma[i](t0, y0);
          if (std::isinf(g) || g <= 0.0) continue;  // rho = 0 or free block: no slippage
          const double rho = ue * x_ / (std::pow(g, qs_e_) + ue);
          density += p_.marks[i].weight * g * std::pow(std::abs(rho), q);
        }
        slip_ += dt * density;
      }
      break;
    }
    case Strategy::Kind::twap:
      xi_abs = x_ / (p_.T - t0);
      break;
    case Strategy::Kind::custom:
      xi_abs = strat_.custom_rate(t0, y0, x_);
      break;
  }

  impact_ += dt * p_.eta(t0, y0) * std::pow(std::abs(xi_abs), q);
  risk_ += dt * p_.lam(t0, y0) * std::pow(std::abs(x_), q);

  if (proportional) {
    x_ *= std::exp(-rate_rel * dt);
  } else {
    x_ -= xi_abs * dt;
  }

  t_ = te;
  y_ = te < t1 - eps ? y0 : y1;  // partial final step freezes y at the left node
  if (rec_) {
    rec_->xi.push_back(xi_abs);
    rec_->times.push_back(t_);
    rec_->y.push_back(y_);
    rec_->x.push_back(x_);
    rec_->cost_impact.push_back(impact_);
    rec_->cost_risk.push_back(risk_);
    rec_->cost_slippage.push_back(slip_);
  }
  if (te >= t_cut_ - eps) done_ = true;
}

void StrategyEngine::on_event(double t, std::size_t mark) {
  const double eps = 1e-12 * (1.0 + p_.T);
  if (t >= t_cut_ - eps) return;  // runs stop at t_cut; boundary events excluded
  if (done_ || strat_.kind != Strategy::Kind::optimal_feedback) return;
  const double u = surface_u(t, y_);
  const double ue = std::pow(u, qs_e_);
  const double g = p_.gamma[mark](t, y_);
  double rho;
  if (std::isinf(g)) {
    rho = 0.0;
  } else if (g <= 0.0) {
    rho = x_;
  } else {
    rho = ue * x_ / (std::pow(g, qs_e_) + ue);
  }
  if (rho == 0.0) return;  // a zero block order executes nothing
  x_ -= rho;
  if (rec_) {
    rec_->executions.push_back({t, mark, rho});
    if (!rec_->x.empty()) rec_->x.back() = x_;  // node shows post-execution inventory
  }
}

void StrategyEngine::finish() {
  if (rec_) {
    if (rec_->times.empty()) {
      rec_->times.push_back(0.0);
      rec_->y.push_back(y_);
      rec_->x.push_back(x_);
      rec_->cost_impact.push_back(0.0);
      rec_->cost_risk.push_back(0.0);
      rec_->cost_slippage.push_back(0.0);
    }
    while (rec_->xi.size() < rec_->times.size()) rec_->xi.push_back(0.0);
  }
}

}  // namespace detail

LiquidationRun run_strategy(const ModelParams& p, const Strategy& strategy,
                            const ReflectedPath& path, double x0, double t_cut) {
  LiquidationRun run;
  detail::StrategyEngine engine(p, strategy, x0, t_cut, &run);
  std::size_t next_event = 0;
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    engine.on_step(path.times[k], path.times[k + 1], path.y[k], path.y[k + 1]);
    while (next_event < path.events.size() && path.events[next_event].node == k + 1) {
      engine.on_event(path.events[next_event].t, path.events[next_event].mark);
      ++next_event;
    }
  }
  engine.finish();
  return run;
}

DecayVerdict terminal_decay_check(const LiquidationRun& run, const ModelParams& p,
                                  const EnvelopePair& envelopes) {
  DecayVerdict v;
  const double e = p.q_star() - 1.0;
  const double x0 = std::abs(run.x.front());
  double accum = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  const double scale = std::max(x0, 1e-300);
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double bound = x0 * std::exp(-accum);
    const double margin = (bound - std::abs(run.x[k])) / scale;
    worst = std::min(worst, margin);
    if (k + 1 < run.times.size()) {
      const double dt = run.times[k + 1] - run.times[k];
      const double lo = envelopes.lower(run.times[k]);
      accum += dt * std::pow(lo / p.Lambda, e);
    }
    if (k + 1 == run.times.size()) {
      v.bound_end = bound;
      v.x_abs_end = std::abs(run.x[k]);
    }
  }
  v.worst_margin = worst;
  v.pass = worst >= -1e-9;
  return v;
}

DecayVerdict terminal_decay_check(const LiquidationRun& run, const ModelParams& p,
                                  const ValueSurface& surface) {
  return terminal_decay_check(run, p, ode_envelopes(p, surface.truncation_level));
}

HolderVerdict holder_inventory_check(const LiquidationRun& run, const ModelParams& p) {
  if (!run.executions.empty())
    throw std::invalid_argument("holder_inventory_check: run has dark-pool executions");
  const double q = p.q;
  const std::size_t n = run.times.size();
  // tail quadrature of |xi|^q from each node to the end of the run
  std::vector<double> tail(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double dt = run.times[k + 1] - run.times[k];
    tail[k] = tail[k + 1] + dt * std::pow(std::abs(run.xi[k]), q);
  }
  double xmax = 0.0;
  for (double v : run.x) xmax = std::max(xmax, std::abs(v));
  const double resid = std::abs(run.x_end());
  HolderVerdict v;
  v.tolerance = q * resid * std::pow(std::max(xmax, resid), q - 1.0) +
                1e-10 * std::pow(std::max(xmax, 1e-300), q);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = std::pow(std::abs(run.x[k]), q);
    const double rhs = std::pow(p.T - run.times[k], q - 1.0) * tail[k];
    if (k == 0) v.margin_at_start = rhs - lhs;
    worst = std::min(worst, rhs - lhs + v.tolerance);
  }
  v.worst_margin = worst;
  v.pass = worst >= 0.0;
  return v;
}

}  // namespace tzliq
