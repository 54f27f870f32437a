#pragma once

// Minimal stationary solutions of
//   -Delta w = lambda alpha f(z),  -Delta z = mu beta g(w),  w = z = 0 on the boundary
// by monotone iteration from zero, the existence region and its boundary
// curve Gamma, a Newton search for a second solution, and mass bounds.

#include "quenchlab/grid.hpp"
#include "quenchlab/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace quenchlab {

struct StationarySolution {
  ScalarField w;
  ScalarField z;
  ParamPoint params;
  int iterations = 0;
  double final_change = 0.0;  // sup norm of the last iterate difference
  // Sup-norm residuals of -Delta_h w - lambda alpha f(z) and of the z
  // equation, each scaled by lambda |alpha|_inf f(max z) (resp. mu |beta|_inf g(max w)).
  double residual_w = 0.0;
  double residual_z = 0.0;

  double residual() const { return std::max(residual_w, residual_z); }
  PairField pair() const { return {w, z}; }
};

struct ScaledResidual {
  double w = 0.0;
  double z = 0.0;
};

// Throws DomainError if either field reaches 1.
ScaledResidual stationary_residual(const Discretization& disc, const Model& model,
                                   const ParamPoint& params, const ScalarField& w,
                                   const ScalarField& z);

enum class EscapeEvidence { AnalyticBound, IterateEscape };

struct InLambda {
  StationarySolution solution;
};
struct NotInLambda {
  EscapeEvidence evidence = EscapeEvidence::IterateEscape;
  int iterations = 0;      // 0 for the analytic bound
  double escape_max = 0.0;  // max(w, z) of the escaping iterate
  std::string detail;
};
struct Undetermined {
  int iterations = 0;
  double last_change = 0.0;
  std::string hint;
};

using MembershipVerdict = std::variant<InLambda, NotInLambda, Undetermined>;

inline bool in_lambda(const MembershipVerdict& v) { return std::holds_alternative<InLambda>(v); }
inline bool not_in_lambda(const MembershipVerdict& v) {
  return std::holds_alternative<NotInLambda>(v);
}
std::string verdict_name(const MembershipVerdict& v);

struct MonotoneOptions {
  double tol_stat = 1e-10;  // sup-norm change
  int max_iter = 10000;
  double delta_blow = 1e-4;
  double tol_res = 1e-8;
  // Called with (n, w_n, z_n) after each iterate.
  std::function<void(int, const ScalarField&, const ScalarField&)> observer;
};

// Rectangle outside of which no stationary solution exists:
//   lambda_bar = lambda1 / integral(alpha f(0) phi), mu_bar likewise.
struct NonexistenceBound {
  double lambda_bar = 0.0;
  double mu_bar = 0.0;
  bool excludes(const ParamPoint& p) const { return p.lambda > lambda_bar || p.mu > mu_bar; }
};

NonexistenceBound analytic_nonexistence_bound(const Discretization& disc, const Model& model);

// w_0 = z_0 = 0, -Delta w_{n+1} = lambda alpha f(z_n), -Delta z_{n+1} = mu beta g(w_n).
// Iterates are pointwise nondecreasing; a violation throws std::logic_error.
MembershipVerdict monotone_minimal_solution(const Discretization& disc, const Model& model,
                                            const ParamPoint& params,
                                            const MonotoneOptions& opts = {});

struct CurveOptions {
  double bisect_tol = 1e-3;      // relative bracket width
  double floor_fraction = 1e-6;  // parameter floor relative to the analytic bound
  int max_iter = 10000;
  int max_iter_cap = 160000;  // doubling limit for undetermined verdicts
  double delta_blow = 1e-4;
  double tol_stat = 1e-10;
  int threads = 1;
};

enum class BracketStatus { Converged, AcceptedAtWidth, BracketFailure };

struct Bracket {
  double inside = 0.0;   // last parameter value known to be in the existence set
  double outside = 0.0;  // first value known to be outside
  BracketStatus status = BracketStatus::Converged;
  std::string note;
  double value() const { return 0.5 * (inside + outside); }
  double width() const { return outside - inside; }
};

struct CurveSample {
  double lambda = 0.0;
  Bracket mu;
};

struct CriticalCurve {
  std::vector<CurveSample> samples;
  Bracket lambda_star;  // intercept with mu at the floor
  Bracket mu_star;      // intercept with lambda at the floor
};

// Bisection along t -> point(t) between a known inside value and a known
// outside value. Undetermined verdicts double max_iter up to the cap; if the
// cap is hit, the current bracket is accepted.
Bracket bisect_boundary(const Discretization& disc, const Model& model,
                        const std::function<ParamPoint(double)>& point, double t_inside,
                        double t_outside, const CurveOptions& opts);

// Gamma(lambda) by bisection in mu for each lambda sample, plus both axis
// intercepts. Samples run on opts.threads workers.
CriticalCurve trace_critical_curve(const Discretization& disc, const Model& model,
                                   const std::vector<double>& lambda_samples,
                                   const CurveOptions& opts = {});

// Gamma's intercepts: bisection in lambda with mu at the floor, and in mu
// with lambda at the floor.
Bracket lambda_intercept(const Discretization& disc, const Model& model,
                         const CurveOptions& opts = {});
Bracket mu_intercept(const Discretization& disc, const Model& model, const CurveOptions& opts = {});

// count values lambda_star.inside * k / (count + 1), k = 1..count.
std::vector<double> even_lambda_samples(const Bracket& lambda_star, int count);

// Boundary crossing along the ray t * (dl, dm).
Bracket ray_intercept(const Discretization& disc, const Model& model, double dl, double dm,
                      const CurveOptions& opts = {});

struct SecondSolutionOptions {
  double seed_amplitude = 0.5;  // seed = w + a (1 - w) phi / |phi|_inf
  int seeds = 4;                // amplitudes a, then halfway toward 1 each time
  int max_newton = 200;
  double tol_res = 1e-8;
  double delta_blow = 1e-4;
  double min_separation = 1e-6;  // sup-norm distance from the minimal solution
};

// Damped Newton from elevated seeds, with the linearized coupled operator as
// Jacobian. Returns a solution ordered above the minimal one, or nothing.
// Throws PreconditionViolation unless the verdict is InLambda.
std::optional<StationarySolution> second_solution_search(const Discretization& disc,
                                                         const Model& model,
                                                         const MembershipVerdict& minimal,
                                                         const SecondSolutionOptions& opts = {});

struct MassBoundReport {
  double w_mass = 0.0;  // integral of w phi
  double z_mass = 0.0;
  double w_bound = 0.0;  // lambda1 integral(phi/alpha) / (lambda f(0)); +inf if alpha vanishes
  double z_bound = 0.0;
  bool pass = false;
};

MassBoundReport mass_bound_check(const Discretization& disc, const Model& model,
                                 const ParamPoint& params, const ScalarField& w,
                                 const ScalarField& z);

struct TripleReport {
  bool ordered_triple = false;  // true means a numerical artifact
  double gap_low = 0.0;         // min over nodes of (middle - low) / dist
  double gap_high = 0.0;        // min over nodes of (high - middle) / dist
};

// Flags low << middle << high, strict by gamma * dist(x, boundary) in both
// components. Three ordered stationary solutions cannot coexist, so a true
// flag marks at least one of them as spurious.
TripleReport ordered_triple_diagnostic(const Grid& grid, const PairField& low,
                                       const PairField& middle, const PairField& high,
                                       double gamma);

}  // namespace quenchlab
