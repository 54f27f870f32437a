#include "quenchlab/stationary.hpp"

#include "quenchlab/errors.hpp"
#include "quenchlab/parallel.hpp"
#include "quenchlab/spectra.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace quenchlab {

namespace {

ScalarField apply_pointwise(const Nonlinearity& nl, const ScalarField& s) {
  ScalarField out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) out[k] = nl.value(s[k]);
  return out;
}

double sup(const ScalarField& a) { return a.lpNorm<Eigen::Infinity>(); }

}  // namespace

std::string verdict_name(const MembershipVerdict& v) {
  if (std::holds_alternative<InLambda>(v)) return "InLambda";
  if (std::holds_alternative<NotInLambda>(v)) return "NotInLambda";
  return "Undetermined";
}

ScaledResidual stationary_residual(const Discretization& disc, const Model& model,
                                   const ParamPoint& params, const ScalarField& w,
                                   const ScalarField& z) {
  const ScalarField alpha = model.alpha.sample(disc.grid);
  const ScalarField beta = model.beta.sample(disc.grid);
  const ScalarField rw = disc.laplacian.apply(w) - params.lambda * alpha.cwiseProduct(apply_pointwise(model.f, z));
  const ScalarField rz = disc.laplacian.apply(z) - params.mu * beta.cwiseProduct(apply_pointwise(model.g, w));
  const double scale_w = params.lambda * sup(alpha) * model.f.value(std::max(z.maxCoeff(), 0.0));
  const double scale_z = params.mu * sup(beta) * model.g.value(std::max(w.maxCoeff(), 0.0));
  return {sup(rw) / scale_w, sup(rz) / scale_z};
}

NonexistenceBound analytic_nonexistence_bound(const Discretization& disc, const Model& model) {
  const ScalarField& phi = disc.eigen.phi;
  const double lambda1 = disc.eigen.lambda1;
  const ScalarField alpha = model.alpha.sample(disc.grid);
  const ScalarField beta = model.beta.sample(disc.grid);
  NonexistenceBound b;
  b.lambda_bar = lambda1 / (model.f.value(0.0) * integrate(alpha.cwiseProduct(phi), disc.grid));
  b.mu_bar = lambda1 / (model.g.value(0.0) * integrate(beta.cwiseProduct(phi), disc.grid));
  return b;
}

MembershipVerdict monotone_minimal_solution(const Discretization& disc, const Model& model,
                                            const ParamPoint& params, const MonotoneOptions& opts) {
  require_valid(params);
  const NonexistenceBound bound = analytic_nonexistence_bound(disc, model);
  if (bound.excludes(params)) {
    return NotInLambda{EscapeEvidence::AnalyticBound, 0, 0.0,
                       fmt::format("outside [0,{:.17g}] x [0,{:.17g}]", bound.lambda_bar,
                                   bound.mu_bar)};
  }

  const DiscreteOperator& op = disc.laplacian;
  const ScalarField la = params.lambda * model.alpha.sample(disc.grid);
  const ScalarField mb = params.mu * model.beta.sample(disc.grid);
  const double escape_level = 1.0 - opts.delta_blow;

  // The iteration is run on increments: the forcing differences are
  // nonnegative, so each increment is a nonnegative solve and the iterates
  // are nondecreasing without relying on cancellation.
  ScalarField f_prev = la * model.f.value(0.0);
  ScalarField g_prev = mb * model.g.value(0.0);
  ScalarField w = op.solve(f_prev);
  ScalarField z = op.solve(g_prev);
  double change = std::max(sup(w), sup(z));

  for (int n = 1; n <= opts.max_iter; ++n) {
    if (n > 1) {
      const ScalarField f_now = la.cwiseProduct(apply_pointwise(model.f, z));
      const ScalarField g_now = mb.cwiseProduct(apply_pointwise(model.g, w));
      ScalarField dw = op.solve((f_now - f_prev).cwiseMax(0.0));
      ScalarField dz = op.solve((g_now - g_prev).cwiseMax(0.0));
      const double scale = std::max({sup(dw), sup(dz), std::numeric_limits<double>::min()});
      if (std::min(dw.minCoeff(), dz.minCoeff()) < -1e-6 * scale) {
        throw std::logic_error(fmt::format("monotone iteration decreased at step {}", n));
      }
      dw = dw.cwiseMax(0.0);
      dz = dz.cwiseMax(0.0);
      w += dw;
      z += dz;
      f_prev = f_now;
      g_prev = g_now;
      change = std::max(sup(dw), sup(dz));
    }
    if (opts.observer) opts.observer(n, w, z);

    const double top = std::max(w.maxCoeff(), z.maxCoeff());
    if (top >= escape_level) {
      return NotInLambda{EscapeEvidence::IterateEscape, n, top,
                         fmt::format("iterate {} reached max {:.17g}", n, top)};
    }
    if (change <= opts.tol_stat) {
      const ScaledResidual res = stationary_residual(disc, model, params, w, z);
      if (res.w <= opts.tol_res && res.z <= opts.tol_res) {
        StationarySolution sol;
        sol.w = std::move(w);
        sol.z = std::move(z);
        sol.params = params;
        sol.iterations = n;
        sol.final_change = change;
        sol.residual_w = res.w;
        sol.residual_z = res.z;
        return InLambda{std::move(sol)};
      }
    }
  }
  return Undetermined{opts.max_iter, change,
                      "iteration cap reached; increase max_iter or refine near the critical curve"};
}

namespace {

MembershipVerdict classify_with_retries(const Discretization& disc, const Model& model,
                                        const ParamPoint& p, const CurveOptions& opts,
                                        int& max_iter) {
  for (;;) {
    MonotoneOptions mo;
    mo.max_iter = max_iter;
    mo.delta_blow = opts.delta_blow;
    mo.tol_stat = opts.tol_stat;
    MembershipVerdict v = monotone_minimal_solution(disc, model, p, mo);
    if (!std::holds_alternative<Undetermined>(v) || 2 * max_iter > opts.max_iter_cap) return v;
    max_iter *= 2;
  }
}

}  // namespace

Bracket bisect_boundary(const Discretization& disc, const Model& model,
                        const std::function<ParamPoint(double)>& point, double t_inside,
                        double t_outside, const CurveOptions& opts) {
  Bracket b;
  b.inside = t_inside;
  b.outside = t_outside;
  int max_iter = opts.max_iter;
  while (b.outside - b.inside > opts.bisect_tol * b.outside) {
    const double mid = 0.5 * (b.inside + b.outside);
    const MembershipVerdict v = classify_with_retries(disc, model, point(mid), opts, max_iter);
    if (in_lambda(v)) {
      b.inside = mid;
    } else if (not_in_lambda(v)) {
      b.outside = mid;
    } else {
      b.status = BracketStatus::AcceptedAtWidth;
      b.note = fmt::format("undetermined at {:.17g} with max_iter {}", mid, max_iter);
      break;
    }
  }
  return b;
}

namespace {

Bracket failed_bracket(std::string note) {
  Bracket b;
  b.status = BracketStatus::BracketFailure;
  b.inside = std::nan("");
  b.outside = std::nan("");
  b.note = std::move(note);
  return b;
}

// Slightly beyond the analytic bound, where nonexistence is certain.
constexpr double kBeyondBound = 1.0 + 1e-6;

Bracket bracket_along(const Discretization& disc, const Model& model,
                      const std::function<ParamPoint(double)>& point, double t_inside,
                      double t_outside, const CurveOptions& opts) {
  int max_iter = opts.max_iter;
  const MembershipVerdict v = classify_with_retries(disc, model, point(t_inside), opts, max_iter);
  if (!in_lambda(v)) {
    const ParamPoint p = point(t_inside);
    return failed_bracket(fmt::format("no existence at floor point ({:.17g}, {:.17g}): {}",
                                      p.lambda, p.mu, verdict_name(v)));
  }
  return bisect_boundary(disc, model, point, t_inside, t_outside, opts);
}

}  // namespace

Bracket lambda_intercept(const Discretization& disc, const Model& model, const CurveOptions& opts) {
  const NonexistenceBound bound = analytic_nonexistence_bound(disc, model);
  const double mu_floor = opts.floor_fraction * bound.mu_bar;
  return bracket_along(
      disc, model, [mu_floor](double l) { return ParamPoint{l, mu_floor}; },
      opts.floor_fraction * bound.lambda_bar, bound.lambda_bar * kBeyondBound, opts);
}

Bracket mu_intercept(const Discretization& disc, const Model& model, const CurveOptions& opts) {
  const NonexistenceBound bound = analytic_nonexistence_bound(disc, model);
  const double lambda_floor = opts.floor_fraction * bound.lambda_bar;
  return bracket_along(
      disc, model, [lambda_floor](double m) { return ParamPoint{lambda_floor, m}; },
      opts.floor_fraction * bound.mu_bar, bound.mu_bar * kBeyondBound, opts);
}

std::vector<double> even_lambda_samples(const Bracket& lambda_star, int count) {
  if (count < 1) throw PreconditionViolation("sample count must be positive");
  if (lambda_star.status == BracketStatus::BracketFailure) {
    throw PreconditionViolation("lambda intercept unavailable: " + lambda_star.note);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) out.push_back(lambda_star.inside * k / (count + 1.0));
  return out;
}

CriticalCurve trace_critical_curve(const Discretization& disc, const Model& model,
                                   const std::vector<double>& lambda_samples,
                                   const CurveOptions& opts) {
  const NonexistenceBound bound = analytic_nonexistence_bound(disc, model);
  const double mu_floor = opts.floor_fraction * bound.mu_bar;

  CriticalCurve curve;
  curve.samples.resize(lambda_samples.size());
  // Two extra tasks for the axis intercepts.
  parallel_for(lambda_samples.size() + 2, opts.threads, [&](std::size_t i) {
    if (i < lambda_samples.size()) {
      const double lambda = lambda_samples[i];
      CurveSample& s = curve.samples[i];
      s.lambda = lambda;
      if (!(lambda > 0.0)) {
        s.mu = failed_bracket("lambda sample must be positive");
        return;
      }
      s.mu = bracket_along(
          disc, model, [lambda](double mu) { return ParamPoint{lambda, mu}; }, mu_floor,
          bound.mu_bar * kBeyondBound, opts);
    } else if (i == lambda_samples.size()) {
      curve.lambda_star = lambda_intercept(disc, model, opts);
    } else {
      curve.mu_star = mu_intercept(disc, model, opts);
    }
  });
  return curve;
}

Bracket ray_intercept(const Discretization& disc, const Model& model, double dl, double dm,
                      const CurveOptions& opts) {
  if (!(dl > 0.0 && dm > 0.0)) throw PreconditionViolation("ray direction must be positive");
  const NonexistenceBound bound = analytic_nonexistence_bound(disc, model);
  const double t_out = std::min(bound.lambda_bar / dl, bound.mu_bar / dm) * kBeyondBound;
  return bracket_along(
      disc, model, [dl, dm](double t) { return ParamPoint{t * dl, t * dm}; },
      opts.floor_fraction * t_out, t_out, opts);
}

namespace {

struct NewtonState {
  ScalarField w;
  ScalarField z;
};

Eigen::VectorXd stationary_map(const Discretization& disc, const Model& model,
                               const ParamPoint& params, const ScalarField& alpha,
                               const ScalarField& beta, const NewtonState& s) {
  const auto n = s.w.size();
  Eigen::VectorXd out(2 * n);
  out.head(n) = disc.laplacian.apply(s.w) - params.lambda * alpha.cwiseProduct(apply_pointwise(model.f, s.z));
  out.tail(n) = disc.laplacian.apply(s.z) - params.mu * beta.cwiseProduct(apply_pointwise(model.g, s.w));
  return out;
}

bool admissible(const NewtonState& s, double top) {
  return s.w.minCoeff() >= 0.0 && s.z.minCoeff() >= 0.0 && s.w.maxCoeff() < top &&
         s.z.maxCoeff() < top;
}

std::optional<StationarySolution> newton_from(const Discretization& disc, const Model& model,
                                              const ParamPoint& params, NewtonState s,
                                              const SecondSolutionOptions& opts) {
  const auto n = s.w.size();
  const ScalarField alpha = model.alpha.sample(disc.grid);
  const ScalarField beta = model.beta.sample(disc.grid);
  const double top = 1.0 - opts.delta_blow;

  Eigen::VectorXd residual = stationary_map(disc, model, params, alpha, beta, s);
  double merit = residual.lpNorm<Eigen::Infinity>();
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_newton; ++it) {
    const LinearizedOperator jac = assemble_linearization(disc, model, params, s.w, s.z);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(jac.matrix());
    if (lu.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd step = lu.solve(-residual);
    if (!step.allFinite()) return std::nullopt;

    double tau = 1.0;
    bool accepted = false;
    while (tau > 1e-12) {
      NewtonState trial{s.w + tau * step.head(n), s.z + tau * step.tail(n)};
      if (admissible(trial, top)) {
        Eigen::VectorXd r = stationary_map(disc, model, params, alpha, beta, trial);
        const double m = r.lpNorm<Eigen::Infinity>();
        if (m < (1.0 - 1e-4 * tau) * merit) {
          s = std::move(trial);
          residual = std::move(r);
          merit = m;
          last_step = tau * step.lpNorm<Eigen::Infinity>();
          accepted = true;
          break;
        }
      }
      tau *= 0.5;
    }

    const ScaledResidual scaled = stationary_residual(disc, model, params, s.w, s.z);
    const bool tight = std::max(scaled.w, scaled.z) <= 1e-3 * opts.tol_res;
    if (tight || (!accepted && std::max(scaled.w, scaled.z) <= opts.tol_res)) {
      StationarySolution sol;
      sol.w = std::move(s.w);
      sol.z = std::move(s.z);
      sol.params = params;
      sol.iterations = it;
      sol.final_change = last_step;
      sol.residual_w = scaled.w;
      sol.residual_z = scaled.z;
      return sol;
    }
    if (!accepted) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<StationarySolution> second_solution_search(const Discretization& disc,
                                                         const Model& model,
                                                         const MembershipVerdict& minimal,
                                                         const SecondSolutionOptions& opts) {
  const auto* in = std::get_if<InLambda>(&minimal);
  if (in == nullptr) {
    throw PreconditionViolation("second solution search needs an InLambda verdict, got " +
                                verdict_name(minimal));
  }
  const StationarySolution& base = in->solution;
  const ScalarField shape = disc.eigen.phi / disc.eigen.phi.maxCoeff();
  const ScalarField ones = ScalarField::Ones(base.w.size());

  double amplitude = opts.seed_amplitude;
  for (int k = 0; k < opts.seeds; ++k, amplitude = 0.5 * (1.0 + amplitude)) {
    NewtonState seed{base.w + amplitude * (ones - base.w).cwiseProduct(shape),
                     base.z + amplitude * (ones - base.z).cwiseProduct(shape)};
    std::optional<StationarySolution> found = newton_from(disc, model, base.params, seed, opts);
    if (!found) continue;
    const double below = std::min((found->w - base.w).minCoeff(), (found->z - base.z).minCoeff());
    const double separation = std::max(sup(found->w - base.w), sup(found->z - base.z));
    if (below >= 0.0 && separation >= opts.min_separation) return found;
  }
  return std::nullopt;
}

MassBoundReport mass_bound_check(const Discretization& disc, const Model& model,
                                 const ParamPoint& params, const ScalarField& w,
                                 const ScalarField& z) {
  const ScalarField& phi = disc.eigen.phi;
  const double lambda1 = disc.eigen.lambda1;
  const ScalarField alpha = model.alpha.sample(disc.grid);
  const ScalarField beta = model.beta.sample(disc.grid);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto weighted_inverse = [&](const ScalarField& profile) {
    if (profile.minCoeff() <= 0.0) return kInf;
    return integrate(phi.cwiseQuotient(profile), disc.grid);
  };

  MassBoundReport r;
  r.w_mass = integrate(w.cwiseProduct(phi), disc.grid);
  r.z_mass = integrate(z.cwiseProduct(phi), disc.grid);
  r.w_bound = lambda1 * weighted_inverse(alpha) / (params.lambda * model.f.value(0.0));
  r.z_bound = lambda1 * weighted_inverse(beta) / (params.mu * model.g.value(0.0));
  r.pass = (r.w_bound - r.w_mass) >= -1e-8 && (r.z_bound - r.z_mass) >= -1e-8;
  return r;
}

TripleReport ordered_triple_diagnostic(const Grid& grid, const PairField& low,
                                       const PairField& middle, const PairField& high,
                                       double gamma) {
  TripleReport r;
  r.gap_low = std::numeric_limits<double>::infinity();
  r.gap_high = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double d = grid.distance_to_boundary(k);
    r.gap_low = std::min({r.gap_low, (middle.u[i] - low.u[i]) / d, (middle.v[i] - low.v[i]) / d});
    r.gap_high = std::min({r.gap_high, (high.u[i] - middle.u[i]) / d, (high.v[i] - middle.v[i]) / d});
  }
  r.ordered_triple = r.gap_low >= gamma && r.gap_high >= gamma;
  return r;
}

}  // namespace quenchlab
