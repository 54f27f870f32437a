#pragma once

// Singular nonlinearities, permittivity profiles, parameter points and
// initial-data recipes for the coupled system
//   u_t - Delta u = lambda alpha(x) f(v),  v_t - Delta v = mu beta(x) g(u).

#include "quenchlab/grid.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace quenchlab {

enum class NonlinearityFamily { Log, Exp, Power };
enum class EvalOrder { Value, D1, D2, Antiderivative };

// Positive, increasing, strictly convex on [0,1) with blow-up at 1.
//   Log:   1 - ln(1-s)
//   Exp:   exp(1/(1-s))
//   Power: (1-s)^(-p), p > 0
struct Nonlinearity {
  NonlinearityFamily family = NonlinearityFamily::Power;
  double exponent = 2.0;  // Power family only

  static Nonlinearity log_family() { return {NonlinearityFamily::Log, 0.0}; }
  static Nonlinearity exp_family() { return {NonlinearityFamily::Exp, 0.0}; }
  static Nonlinearity power(double p);

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  // Integral of value over [0, s].
  double antideriv(double s) const;

  std::string name() const;
};

// Throws DomainError unless 0 <= s < 1.
double eval(const Nonlinearity& nl, double s, EvalOrder order);

enum class ProfileFamily { Constant, Bump, PowerDist };

//   Constant:  c
//   Bump:      c * exp(-k |x - x0|^2)
//   PowerDist: c * dist(x, boundary)^kappa
struct Profile {
  ProfileFamily family = ProfileFamily::Constant;
  double c = 1.0;
  double k = 1.0;
  double x0 = 0.5;
  double y0 = 0.5;
  double kappa = 1.0;

  static Profile constant(double c) { return {ProfileFamily::Constant, c}; }
  static Profile bump(double c, double k, double x0, double y0 = 0.5) {
    return {ProfileFamily::Bump, c, k, x0, y0};
  }
  static Profile power_dist(double c, double kappa) {
    Profile p{ProfileFamily::PowerDist, c};
    p.kappa = kappa;
    return p;
  }

  ScalarField sample(const Grid& grid) const;
  std::string name() const;
};

struct ParamPoint {
  double lambda = 1.0;
  double mu = 1.0;
};

// Throws PreconditionViolation unless both parameters are positive and finite.
void require_valid(const ParamPoint& p);

struct Model {
  Nonlinearity f = Nonlinearity::power(2.0);
  Nonlinearity g = Nonlinearity::power(2.0);
  Profile alpha = Profile::constant(1.0);
  Profile beta = Profile::constant(1.0);
};

struct PairField {
  ScalarField u;
  ScalarField v;
};

// Recipes for the initial pair. Recipes that reference the minimal or the
// second stationary solution need them supplied in InitialContext.
namespace initial {
struct Zero {};
// s * (w, z), s in [0, 1].
struct ScaledMinimal {
  double s = 1.0;
};
// s * (w, z) + (1 - s) * (w1, z1), s in (0, 1): between the two solutions.
struct ConvexCombo {
  double s = 0.5;
};
// (1 + eps) * (w1, z1) - eps * (w, z), eps > 0: above the second solution.
struct AboveSecond {
  double eps = 0.1;
};
// amplitude * (product of sines vanishing on the boundary), per component.
struct Sine {
  double u_amplitude = 0.0;
  double v_amplitude = 0.0;
};
struct Explicit {
  PairField fields;
};
}  // namespace initial

using InitialData = std::variant<initial::Zero, initial::ScaledMinimal, initial::ConvexCombo,
                                 initial::AboveSecond, initial::Sine, initial::Explicit>;

struct InitialContext {
  std::optional<PairField> minimal;
  std::optional<PairField> second;
};

std::string recipe_name(const InitialData& recipe);

// Throws PreconditionViolation when a needed solution is missing, DomainError
// when the resulting pair leaves [0, 1).
PairField materialize_initial(const InitialData& recipe, const Grid& grid,
                              const InitialContext& context = {});

struct HypothesisReport {
  bool pass = true;
  std::string violated;  // first violated predicate, empty on pass
  std::string detail;
};

// Lattice check of positivity, monotonicity and convexity of f and g on
// [0, 1 - 1e-6], nonnegativity and nontriviality of the profiles, and the
// range 0 <= u0, v0 < 1 of the initial data when supplied.
HypothesisReport validate_hypotheses(const Grid& grid, const Model& model,
                                     const ParamPoint& params,
                                     const PairField* initial = nullptr);

}  // namespace quenchlab
