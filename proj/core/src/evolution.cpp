#include "quenchlab/evolution.hpp"

#include "quenchlab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace quenchlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// A few ulps of slack for converged, stationary stretches.
constexpr double kRoundoff = 64 * std::numeric_limits<double>::epsilon();

double field_max(const PairField& s) { return std::max(s.u.maxCoeff(), s.v.maxCoeff()); }

ScalarField apply_pointwise(const Nonlinearity& nl, const ScalarField& s) {
  ScalarField out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) out[k] = nl.value(s[k]);
  return out;
}

ScalarField antiderivative(const Nonlinearity& nl, const ScalarField& s) {
  ScalarField out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) out[k] = nl.antideriv(s[k]);
  return out;
}

}  // namespace

void validate(const StepperConfig& cfg) {
  if (!(cfg.dt_min > 0.0 && cfg.dt_min <= cfg.dt_init && cfg.dt_init <= cfg.dt_max)) {
    throw PreconditionViolation("need 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(cfg.delta_q > 0.0 && cfg.delta_q < 1.0)) throw PreconditionViolation("need 0 < delta_q < 1");
  if (!(cfg.safety > 0.0 && cfg.safety <= 1.0)) throw PreconditionViolation("need 0 < safety <= 1");
  if (!(cfg.tol_step > 0.0)) throw PreconditionViolation("need tol_step > 0");
  if (!(cfg.quench_cap > 0.0)) throw PreconditionViolation("need quench_cap > 0");
  if (cfg.snapshot_stride < 0) throw PreconditionViolation("need snapshot_stride >= 0");
}

std::string status_name(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::ReachedHorizon: return "ReachedHorizon";
    case TerminalStatus::Quenched: return "Quenched";
    case TerminalStatus::StepUnderflow: return "StepUnderflow";
  }
  return "?";
}

std::string component_name(QuenchedComponent c) {
  switch (c) {
    case QuenchedComponent::U: return "u";
    case QuenchedComponent::V: return "v";
    case QuenchedComponent::Both: return "both";
  }
  return "?";
}

PairField step(const Discretization& disc, const Model& model, const ParamPoint& params,
               const PairField& state, double dt) {
  const auto n = static_cast<Eigen::Index>(disc.grid.size());
  if (state.u.size() != n || state.v.size() != n) throw GridMismatch("state does not match the grid");
  if (!(dt > 0.0)) throw PreconditionViolation("dt must be positive");
  const ScalarField la = params.lambda * model.alpha.sample(disc.grid);
  const ScalarField mb = params.mu * model.beta.sample(disc.grid);
  // apply_pointwise rejects inputs outside [0, 1).
  const ScalarField fu = la.cwiseProduct(apply_pointwise(model.f, state.v));
  const ScalarField gv = mb.cwiseProduct(apply_pointwise(model.g, state.u));
  const double shift = 1.0 / dt;
  PairField out{disc.laplacian.solve(state.u * shift + fu, shift),
                disc.laplacian.solve(state.v * shift + gv, shift)};
  if (field_max(out) >= 1.0 || !out.u.allFinite() || !out.v.allFinite()) {
    throw DomainError(fmt::format("step reached the blow-up level (max {:.17g})", field_max(out)));
  }
  // Round-off from the iterative 2D solve.
  out.u = out.u.cwiseMax(0.0);
  out.v = out.v.cwiseMax(0.0);
  return out;
}

namespace {

struct Stepper {
  const Discretization& disc;
  const Model& model;
  const ParamPoint& params;
  const StepperConfig& cfg;

  PairField single(const PairField& s, double dt) const { return step(disc, model, params, s, dt); }
  PairField doubled(const PairField& s, double dt) const {
    return single(single(s, 0.5 * dt), 0.5 * dt);
  }
  PairField advance(const PairField& s, double dt) const {
    return cfg.adaptive ? doubled(s, dt) : single(s, dt);
  }
};

StepDiagnostics diagnose(const Discretization& disc, const Model& model, const ParamPoint& params,
                         const PairField& prev, const PairField& now, double t, double dt,
                         const PairField* reference) {
  StepDiagnostics d;
  d.t = t;
  d.dt = dt;
  d.max_u = now.u.maxCoeff();
  d.max_v = now.v.maxCoeff();
  if (dt > 0.0) {
    const ScalarField ut = (now.u - prev.u) / dt;
    const ScalarField vt = (now.v - prev.v) / dt;
    d.ut_l2 = std::sqrt(norm2_squared(ut, disc.grid));
    d.vt_l2 = std::sqrt(norm2_squared(vt, disc.grid));
    d.ut_vt_integral = disc.grid.cell_measure() * ut.dot(vt);
  }
  d.energy = lyapunov_energy(disc, model, params, now);
  if (reference != nullptr) {
    d.dist2_u = norm2_squared(now.u - reference->u, disc.grid);
    d.dist2_v = norm2_squared(now.v - reference->v, disc.grid);
  } else {
    d.dist2_u = kNaN;
    d.dist2_v = kNaN;
  }
  return d;
}

// Time for the max to climb from m to 1 if dm/dt = rate * nl(m') / nl(m).
double extrapolate_to_one(const Nonlinearity& nl, double m, double rate) {
  if (!(rate > 0.0) || m >= 1.0) return 0.0;
  const double fm = nl.value(m);
  auto integrand = [&](double s) { return s >= 1.0 ? 0.0 : fm / (rate * nl.value(s)); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, m, 1.0, 15, 1e-10);
}

}  // namespace

Trajectory simulate(const Discretization& disc, const Model& model, const ParamPoint& params,
                    const PairField& initial, const StepperConfig& cfg, double horizon,
                    const PairField* reference) {
  validate(cfg);
  require_valid(params);
  if (!(horizon > 0.0)) throw PreconditionViolation("horizon must be positive");
  const auto n = static_cast<Eigen::Index>(disc.grid.size());
  if (initial.u.size() != n || initial.v.size() != n) throw GridMismatch("initial data does not match the grid");
  if (std::min(initial.u.minCoeff(), initial.v.minCoeff()) < 0.0 || field_max(initial) >= 1.0) {
    throw DomainError("initial data outside [0, 1)");
  }

  const Stepper stepper{disc, model, params, cfg};
  const double quench_level = 1.0 - cfg.delta_q;

  Trajectory traj;
  PairField state = initial;
  double t = 0.0;
  double dt = cfg.dt_init;
  traj.snapshots.push_back({t, state});
  traj.diagnostics.push_back(diagnose(disc, model, params, state, state, t, 0.0, reference));

  auto finish = [&](TerminalStatus status) {
    traj.status = status;
    if (traj.snapshots.back().t != t) traj.snapshots.push_back({t, state});
  };

  if (field_max(state) >= quench_level) {
    traj.quench = QuenchInfo{0.0,
                             state.u.maxCoeff() >= quench_level
                                 ? (state.v.maxCoeff() >= quench_level ? QuenchedComponent::Both
                                                                       : QuenchedComponent::U)
                                 : QuenchedComponent::V,
                             0.0};
    finish(TerminalStatus::Quenched);
    return traj;
  }

  while (t < horizon) {
    const double remaining = horizon - t;
    double h = cfg.adaptive ? std::min(dt, cfg.dt_max) : cfg.dt_init;
    const double gap = 1.0 - field_max(state);
    h = std::min(h, cfg.quench_cap * gap * gap);
    if (h < cfg.dt_min && h < remaining) {
      finish(TerminalStatus::StepUnderflow);
      return traj;
    }
    const bool last = h >= remaining;
    if (last) h = remaining;

    PairField next;
    double err = 0.0;
    try {
      if (cfg.adaptive) {
        const PairField coarse = stepper.single(state, h);
        next = stepper.doubled(state, h);
        err = std::max((next.u - coarse.u).lpNorm<Eigen::Infinity>(),
                       (next.v - coarse.v).lpNorm<Eigen::Infinity>());
      } else {
        next = stepper.single(state, h);
      }
    } catch (const DomainError&) {
      ++traj.rejected_steps;
      dt = 0.5 * h;
      if (!cfg.adaptive) {
        finish(TerminalStatus::StepUnderflow);
        return traj;
      }
      continue;
    }
    if (cfg.adaptive && err > cfg.tol_step) {
      ++traj.rejected_steps;
      dt = 0.5 * h;
      continue;
    }

    const PairField prev = std::move(state);
    const double t_prev = t;
    state = std::move(next);
    t = last ? horizon : t + h;
    ++traj.accepted_steps;

    if (field_max(state) >= quench_level) {
      // First crossing of the quench level inside the last step.
      double lo = 0.0;
      double hi = h;
      PairField hi_state = state;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(t, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        try {
          PairField trial = stepper.advance(prev, mid);
          if (field_max(trial) >= quench_level) {
            hi = mid;
            hi_state = std::move(trial);
          } else {
            lo = mid;
          }
        } catch (const DomainError&) {
          hi = mid;
        }
      }
      state = std::move(hi_state);
      t = t_prev + hi;
      traj.diagnostics.push_back(diagnose(disc, model, params, prev, state, t, hi, reference));
      const bool u_hit = state.u.maxCoeff() >= quench_level;
      const bool v_hit = state.v.maxCoeff() >= quench_level;
      QuenchInfo q;
      q.t_q = t;
      q.which = u_hit && v_hit ? QuenchedComponent::Both : (u_hit ? QuenchedComponent::U : QuenchedComponent::V);
      // u is driven by f(v), v by g(u).
      const bool use_u = state.u.maxCoeff() >= state.v.maxCoeff();
      const double m = use_u ? state.u.maxCoeff() : state.v.maxCoeff();
      const double m_prev = use_u ? prev.u.maxCoeff() : prev.v.maxCoeff();
      const double rate = (m - m_prev) / hi;
      q.t_estimate = t + extrapolate_to_one(use_u ? model.f : model.g, m, rate);
      traj.quench = q;
      finish(TerminalStatus::Quenched);
      return traj;
    }

    traj.diagnostics.push_back(diagnose(disc, model, params, prev, state, t, h, reference));
    if (cfg.snapshot_stride > 0 && traj.accepted_steps % cfg.snapshot_stride == 0) {
      traj.snapshots.push_back({t, state});
    }
    if (cfg.adaptive) {
      const double grow = err > 0.0 ? cfg.safety * std::sqrt(cfg.tol_step / err) : 2.0;
      dt = h * std::clamp(grow, 1.0, 2.0);
      if (last) dt = std::max(dt, cfg.dt_init);
    }
  }
  finish(TerminalStatus::ReachedHorizon);
  return traj;
}

double lyapunov_energy(const Discretization& disc, const Model& model, const ParamPoint& params,
                       const PairField& state) {
  const Grid& g = disc.grid;
  const double gradient = g.cell_measure() * state.u.dot(disc.laplacian.apply(state.v));
  const ScalarField la = params.lambda * model.alpha.sample(g);
  const ScalarField mb = params.mu * model.beta.sample(g);
  const ScalarField potential =
      la.cwiseProduct(antiderivative(model.f, state.v)) + mb.cwiseProduct(antiderivative(model.g, state.u));
  return gradient - g.cell_measure() * potential.sum();
}

LyapunovReport lyapunov_residuals(const Trajectory& traj, const Grid& grid) {
  LyapunovReport r;
  const double h2 = grid.dimension() == 1 ? grid.hx() * grid.hx()
                                          : std::max(grid.hx(), grid.hy()) * std::max(grid.hx(), grid.hy());
  const auto& d = traj.diagnostics;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (!(d[k].dt > 0.0)) continue;
    const double res = (d[k].energy - d[k - 1].energy) / d[k].dt + 2.0 * d[k].ut_vt_integral;
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, std::abs(res));
    r.observed_constant = std::max(r.observed_constant, std::abs(res) / (d[k].dt + h2));
    // the energy is a sum over all nodes; its rounding grows with their number
    const double slack = std::max(kRoundoff, grid.size() * std::numeric_limits<double>::epsilon()) *
                         std::max(std::abs(d[k].energy), std::abs(d[k - 1].energy));
    if (d[k].energy > d[k - 1].energy + slack) r.energy_nonincreasing = false;
  }
  return r;
}

MonotonicityReport max_monotonicity(const Trajectory& traj) {
  MonotonicityReport r;
  const auto& d = traj.diagnostics;
  for (std::size_t k = 1; k < d.size(); ++k) {
    const double du = d[k].max_u - d[k - 1].max_u;
    const double dv = d[k].max_v - d[k - 1].max_v;
    r.worst_decrease = std::max({r.worst_decrease, -du, -dv});
    r.worst_increase = std::max({r.worst_increase, du, dv});
    const double slack = kRoundoff * std::max({d[k].max_u, d[k].max_v, d[k - 1].max_u, d[k - 1].max_v});
    if (du < -slack || dv < -slack) r.nondecreasing = false;
    if (du > slack || dv > slack) r.nonincreasing = false;
  }
  return r;
}

OrderingReport compare_ordering(const Trajectory& low, const Trajectory& high) {
  OrderingReport r;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (const Snapshot& a : low.snapshots) {
    while (j < high.snapshots.size() && high.snapshots[j].t < a.t) ++j;
    if (j == high.snapshots.size()) break;
    if (high.snapshots[j].t != a.t) continue;
    const PairField& b = high.snapshots[j].state;
    r.worst_violation =
        std::max({r.worst_violation, (a.state.u - b.u).maxCoeff(), (a.state.v - b.v).maxCoeff()});
    ++r.shared_times;
  }
  if (r.shared_times == 0) r.worst_violation = kNaN;
  return r;
}

RatioConstants ratio_constants(const Discretization& disc, const Model& model,
                               const ParamPoint& params, const PairField& initial,
                               const StationarySolution& minimal) {
  const Grid& g = disc.grid;
  const ScalarField alpha = model.alpha.sample(g);
  const ScalarField beta = model.beta.sample(g);

  RatioConstants r;
  double inf_ab = std::numeric_limits<double>::infinity();
  double inf_ba = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    inf_ab = std::min(inf_ab, beta[k] > 0.0 ? alpha[k] / beta[k] : std::numeric_limits<double>::infinity());
    inf_ba = std::min(inf_ba, alpha[k] > 0.0 ? beta[k] / alpha[k] : std::numeric_limits<double>::infinity());
  }
  r.sqrt_term_1 = std::sqrt(params.lambda / params.mu * inf_ab * model.f.d1(0.0) /
                            model.g.d1(minimal.w.maxCoeff()));
  r.sqrt_term_2 = std::sqrt(params.mu / params.lambda * inf_ba * model.g.d1(0.0) /
                            model.f.d1(minimal.z.maxCoeff()));

  // Delta_h u0 + lambda alpha f(v0), i.e. the time derivative at t = 0.
  const ScalarField top = params.lambda * alpha.cwiseProduct(apply_pointwise(model.f, initial.v)) -
                          disc.laplacian.apply(initial.u);
  const ScalarField bottom = params.mu * beta.cwiseProduct(apply_pointwise(model.g, initial.u)) -
                             disc.laplacian.apply(initial.v);
  auto inf_ratio = [](const ScalarField& num, const ScalarField& den) -> std::optional<double> {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < num.size(); ++k) {
      if (den[k] == 0.0) return std::nullopt;
      best = std::min(best, num[k] / den[k]);
    }
    return best;
  };
  r.ratio_term_1 = inf_ratio(top, bottom);
  r.ratio_term_2 = inf_ratio(bottom, top);
  if (r.ratio_term_1) {
    r.c1 = std::min(r.sqrt_term_1, *r.ratio_term_1);
  } else {
    r.note += "c1 omitted: Delta v0 + mu beta g(u0) vanishes at a node. ";
  }
  if (r.ratio_term_2) {
    r.c2 = std::min(r.sqrt_term_2, *r.ratio_term_2);
  } else {
    r.note += "c2 omitted: Delta u0 + lambda alpha f(v0) vanishes at a node. ";
  }
  return r;
}

RatioCheck check_ratio_bound(const Trajectory& traj, const RatioConstants& c, double tol) {
  RatioCheck r;
  r.worst_u = std::numeric_limits<double>::infinity();
  r.worst_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const double dt = traj.snapshots[k].t - traj.snapshots[k - 1].t;
    if (!(dt > 0.0)) continue;
    const ScalarField ut = (traj.snapshots[k].state.u - traj.snapshots[k - 1].state.u) / dt;
    const ScalarField vt = (traj.snapshots[k].state.v - traj.snapshots[k - 1].state.v) / dt;
    if (c.c1) r.worst_u = std::min(r.worst_u, (ut - *c.c1 * vt).minCoeff());
    if (c.c2) r.worst_v = std::min(r.worst_v, (vt - *c.c2 * ut).minCoeff());
  }
  r.pass = r.worst_u >= -tol && r.worst_v >= -tol;
  return r;
}

}  // namespace quenchlab
