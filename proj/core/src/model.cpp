#include "quenchlab/model.hpp"

#include "quenchlab/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace quenchlab {

namespace {

void require_unit_range(double s) {
  if (!(s >= 0.0 && s < 1.0)) {
    throw DomainError(fmt::format("nonlinearity evaluated at s = {:.17g}, outside [0, 1)", s));
  }
}

}  // namespace

Nonlinearity Nonlinearity::power(double p) {
  if (!(p > 0.0)) throw PreconditionViolation("power nonlinearity needs exponent p > 0");
  return {NonlinearityFamily::Power, p};
}

double Nonlinearity::value(double s) const {
  require_unit_range(s);
  switch (family) {
    case NonlinearityFamily::Log:
      return 1.0 - std::log1p(-s);
    case NonlinearityFamily::Exp:
      return std::exp(1.0 / (1.0 - s));
    case NonlinearityFamily::Power:
      return std::pow(1.0 - s, -exponent);
  }
  return 0.0;
}

double Nonlinearity::d1(double s) const {
  require_unit_range(s);
  const double r = 1.0 - s;
  switch (family) {
    case NonlinearityFamily::Log:
      return 1.0 / r;
    case NonlinearityFamily::Exp:
      return std::exp(1.0 / r) / (r * r);
    case NonlinearityFamily::Power:
      return exponent * std::pow(r, -exponent - 1.0);
  }
  return 0.0;
}

double Nonlinearity::d2(double s) const {
  require_unit_range(s);
  const double r = 1.0 - s;
  switch (family) {
    case NonlinearityFamily::Log:
      return 1.0 / (r * r);
    case NonlinearityFamily::Exp:
      return std::exp(1.0 / r) * (1.0 / (r * r * r * r) + 2.0 / (r * r * r));
    case NonlinearityFamily::Power:
      return exponent * (exponent + 1.0) * std::pow(r, -exponent - 2.0);
  }
  return 0.0;
}

double Nonlinearity::antideriv(double s) const {
  require_unit_range(s);
  switch (family) {
    case NonlinearityFamily::Log:
      // d/ds [(1-s) ln(1-s)] = -ln(1-s) - 1
      return 2.0 * s + (1.0 - s) * std::log1p(-s);
    case NonlinearityFamily::Exp: {
      // With y = 1/(1-s): integral of e^y / y^2 dy = Ei(y) - e^y / y.
      const double y = 1.0 / (1.0 - s);
      return (std::expint(y) - std::expint(1.0)) - (std::exp(y) / y - std::exp(1.0));
    }
    case NonlinearityFamily::Power:
      if (exponent == 1.0) return -std::log1p(-s);
      return std::expm1((1.0 - exponent) * std::log1p(-s)) / (exponent - 1.0);
  }
  return 0.0;
}

std::string Nonlinearity::name() const {
  switch (family) {
    case NonlinearityFamily::Log:
      return "log";
    case NonlinearityFamily::Exp:
      return "exp";
    case NonlinearityFamily::Power:
      return fmt::format("power(p={:.17g})", exponent);
  }
  return "unknown";
}

double eval(const Nonlinearity& nl, double s, EvalOrder order) {
  switch (order) {
    case EvalOrder::Value:
      return nl.value(s);
    case EvalOrder::D1:
      return nl.d1(s);
    case EvalOrder::D2:
      return nl.d2(s);
    case EvalOrder::Antiderivative:
      return nl.antideriv(s);
  }
  return 0.0;
}

ScalarField Profile::sample(const Grid& grid) const {
  return quenchlab::sample(grid, [&](double px, double py) {
    switch (family) {
      case ProfileFamily::Constant:
        return c;
      case ProfileFamily::Bump: {
        double r2 = (px - x0) * (px - x0);
        if (grid.dimension() == 2) r2 += (py - y0) * (py - y0);
        return c * std::exp(-k * r2);
      }
      case ProfileFamily::PowerDist: {
        const Extent ex = grid.x_extent();
        double d = std::min(px - ex.lo, ex.hi - px);
        if (grid.dimension() == 2) {
          const Extent ey = grid.y_extent();
          d = std::min({d, py - ey.lo, ey.hi - py});
        }
        return c * std::pow(d, kappa);
      }
    }
    return 0.0;
  });
}

std::string Profile::name() const {
  switch (family) {
    case ProfileFamily::Constant:
      return fmt::format("constant(c={:.17g})", c);
    case ProfileFamily::Bump:
      return fmt::format("bump(c={:.17g},k={:.17g},x0={:.17g},y0={:.17g})", c, k, x0, y0);
    case ProfileFamily::PowerDist:
      return fmt::format("powerdist(c={:.17g},kappa={:.17g})", c, kappa);
  }
  return "unknown";
}

void require_valid(const ParamPoint& p) {
  if (!(p.lambda > 0.0 && std::isfinite(p.lambda) && p.mu > 0.0 && std::isfinite(p.mu))) {
    throw PreconditionViolation(
        fmt::format("parameters must be positive: lambda={:.17g}, mu={:.17g}", p.lambda, p.mu));
  }
}

std::string recipe_name(const InitialData& recipe) {
  struct Namer {
    std::string operator()(const initial::Zero&) const { return "zero"; }
    std::string operator()(const initial::ScaledMinimal& r) const {
      return fmt::format("scaled_minimal(s={:.17g})", r.s);
    }
    std::string operator()(const initial::ConvexCombo& r) const {
      return fmt::format("convex_combo(s={:.17g})", r.s);
    }
    std::string operator()(const initial::AboveSecond& r) const {
      return fmt::format("above_second(eps={:.17g})", r.eps);
    }
    std::string operator()(const initial::Sine& r) const {
      return fmt::format("sine(u={:.17g},v={:.17g})", r.u_amplitude, r.v_amplitude);
    }
    std::string operator()(const initial::Explicit&) const { return "explicit"; }
  };
  return std::visit(Namer{}, recipe);
}

namespace {

const PairField& need(const std::optional<PairField>& p, const char* what) {
  if (!p) throw PreconditionViolation(fmt::format("initial recipe needs the {} solution", what));
  return *p;
}

ScalarField sine_shape(const Grid& grid) {
  return sample(grid, [&](double px, double py) {
    double s = std::sin(M_PI * (px - grid.x_extent().lo) / grid.x_extent().length());
    if (grid.dimension() == 2) {
      s *= std::sin(M_PI * (py - grid.y_extent().lo) / grid.y_extent().length());
    }
    return s;
  });
}

}  // namespace

PairField materialize_initial(const InitialData& recipe, const Grid& grid,
                              const InitialContext& context) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  PairField out;
  if (std::holds_alternative<initial::Zero>(recipe)) {
    out = {ScalarField::Zero(n), ScalarField::Zero(n)};
  } else if (const auto* r = std::get_if<initial::ScaledMinimal>(&recipe)) {
    if (!(r->s >= 0.0 && r->s <= 1.0)) throw PreconditionViolation("scaled_minimal needs s in [0,1]");
    const PairField& m = need(context.minimal, "minimal");
    out = {r->s * m.u, r->s * m.v};
  } else if (const auto* r = std::get_if<initial::ConvexCombo>(&recipe)) {
    if (!(r->s > 0.0 && r->s < 1.0)) throw PreconditionViolation("convex_combo needs s in (0,1)");
    const PairField& m = need(context.minimal, "minimal");
    const PairField& s2 = need(context.second, "second");
    out = {r->s * m.u + (1.0 - r->s) * s2.u, r->s * m.v + (1.0 - r->s) * s2.v};
  } else if (const auto* r = std::get_if<initial::AboveSecond>(&recipe)) {
    if (!(r->eps > 0.0)) throw PreconditionViolation("above_second needs eps > 0");
    const PairField& m = need(context.minimal, "minimal");
    const PairField& s2 = need(context.second, "second");
    out = {(1.0 + r->eps) * s2.u - r->eps * m.u, (1.0 + r->eps) * s2.v - r->eps * m.v};
  } else if (const auto* r = std::get_if<initial::Sine>(&recipe)) {
    const ScalarField shape = sine_shape(grid);
    out = {r->u_amplitude * shape, r->v_amplitude * shape};
  } else {
    out = std::get<initial::Explicit>(recipe).fields;
  }

  if (static_cast<std::size_t>(out.u.size()) != grid.size() ||
      static_cast<std::size_t>(out.v.size()) != grid.size()) {
    throw GridMismatch("initial fields do not match the grid");
  }
  const double lo = std::min(out.u.minCoeff(), out.v.minCoeff());
  const double hi = std::max(out.u.maxCoeff(), out.v.maxCoeff());
  if (!(lo >= 0.0 && hi < 1.0)) {
    throw DomainError(fmt::format("initial data {} leaves [0,1): min {:.17g}, max {:.17g}",
                                  recipe_name(recipe), lo, hi));
  }
  return out;
}

namespace {

// Scans a lattice of [0, 1 - 1e-6]; stops at the first overflow (the
// exponential family leaves double range near s = 0.9986).
std::optional<std::string> check_nonlinearity(const Nonlinearity& nl, const char* label) {
  constexpr int kPoints = 2000;
  constexpr double kTop = 1.0 - 1e-6;
  double prev_value = -1.0;
  double prev_d1 = -1.0;
  for (int i = 0; i <= kPoints; ++i) {
    const double s = kTop * i / kPoints;
    const double v = nl.value(s);
    const double d1 = nl.d1(s);
    const double d2 = nl.d2(s);
    if (!std::isfinite(v) || !std::isfinite(d1) || !std::isfinite(d2)) break;
    if (!(v > 0.0)) return fmt::format("{} positive", label);
    if (!(d1 > 0.0) || (i > 0 && !(v > prev_value))) return fmt::format("{} increasing", label);
    if (!(d2 > 0.0) || (i > 0 && !(d1 > prev_d1))) return fmt::format("{} strictly convex", label);
    prev_value = v;
    prev_d1 = d1;
  }
  return std::nullopt;
}

std::optional<std::string> check_profile(const Profile& p, const Grid& grid, const char* label) {
  const ScalarField s = p.sample(grid);
  if (!s.allFinite() || s.minCoeff() < 0.0) return fmt::format("{} nonnegative", label);
  if (!(s.maxCoeff() > 0.0)) return fmt::format("{} nontrivial", label);
  return std::nullopt;
}

}  // namespace

HypothesisReport validate_hypotheses(const Grid& grid, const Model& model,
                                     const ParamPoint& params, const PairField* initial) {
  HypothesisReport report;
  auto fail = [&](std::string predicate, std::string detail) {
    report.pass = false;
    report.violated = std::move(predicate);
    report.detail = std::move(detail);
    return report;
  };

  if (!(params.lambda > 0.0 && params.mu > 0.0)) {
    return fail("parameters positive", "lambda and mu must both be > 0");
  }
  if (auto v = check_nonlinearity(model.f, "f")) return fail(*v, model.f.name());
  if (auto v = check_nonlinearity(model.g, "g")) return fail(*v, model.g.name());
  if (auto v = check_profile(model.alpha, grid, "alpha")) return fail(*v, model.alpha.name());
  if (auto v = check_profile(model.beta, grid, "beta")) return fail(*v, model.beta.name());

  if (initial != nullptr) {
    for (const auto* field : {&initial->u, &initial->v}) {
      if (static_cast<std::size_t>(field->size()) != grid.size()) {
        return fail("initial data on grid", "field size differs from the grid");
      }
      if (!field->allFinite() || field->minCoeff() < 0.0) {
        return fail("initial data nonnegative", fmt::format("min {:.17g}", field->minCoeff()));
      }
      if (!(field->maxCoeff() < 1.0)) {
        return fail("initial data below blow-up level",
                    fmt::format("max {:.17g}", field->maxCoeff()));
      }
    }
  }
  return report;
}

}  // namespace quenchlab
