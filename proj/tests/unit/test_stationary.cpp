#include "quenchlab/errors.hpp"
#include "quenchlab/stationary.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace quenchlab;
using std::numbers::pi;

namespace {

const Discretization& unit_disc() {
  static const Discretization d(Grid::interval(0.0, 1.0, 199));
  return d;
}

}  // namespace

TEST(Monotone, FirstIterateAndConvergence) {
  const Discretization& d = unit_disc();
  ScalarField first;
  std::vector<ScalarField> history;
  MonotoneOptions opts;
  opts.observer = [&](int n, const ScalarField& w, const ScalarField&) {
    if (n == 1) first = w;
    history.push_back(w);
  };
  const MembershipVerdict v = monotone_minimal_solution(d, Model{}, {0.5, 0.5}, opts);
  ASSERT_TRUE(in_lambda(v));
  const auto& s = std::get<InLambda>(v).solution;
  ASSERT_EQ(first.size(), 199);
  EXPECT_NEAR(first[99], 0.0625, 1e-12);
  for (int i = 0; i < 199; ++i) EXPECT_NEAR(first[i], 0.25 * d.grid.x(i) * (1 - d.grid.x(i)), 1e-12);
  EXPECT_TRUE((s.w.array() >= first.array()).all());
  for (std::size_t k = 1; k < history.size(); ++k) {
    EXPECT_TRUE((history[k].array() >= history[k - 1].array()).all()) << "step " << k;
  }
  EXPECT_LE(s.residual(), 1e-8);
  EXPECT_LT(s.w.maxCoeff(), 1.0 - 1e-4);
  EXPECT_TRUE(s.w.isApprox(s.z, 1e-14));
}

TEST(Monotone, OutsideTheBound) {
  const MembershipVerdict v = monotone_minimal_solution(unit_disc(), Model{}, {12.0, 12.0});
  ASSERT_TRUE(not_in_lambda(v));
  EXPECT_EQ(std::get<NotInLambda>(v).evidence, EscapeEvidence::AnalyticBound);
  EXPECT_EQ(verdict_name(v), "NotInLambda");
}

TEST(Monotone, IterateEscapeInsideBound) {
  // below the analytic bound but above the curve
  const MembershipVerdict v = monotone_minimal_solution(unit_disc(), Model{}, {3.0, 3.0});
  ASSERT_TRUE(not_in_lambda(v));
  EXPECT_EQ(std::get<NotInLambda>(v).evidence, EscapeEvidence::IterateEscape);
  EXPECT_GE(std::get<NotInLambda>(v).escape_max, 1.0 - 1e-4);
}

TEST(Monotone, UndeterminedAtCap) {
  MonotoneOptions opts;
  opts.max_iter = 3;
  const MembershipVerdict v = monotone_minimal_solution(unit_disc(), Model{}, {1.0, 1.0}, opts);
  ASSERT_TRUE(std::holds_alternative<Undetermined>(v));
  EXPECT_GT(std::get<Undetermined>(v).last_change, 0.0);
}

TEST(Monotone, VanishingForcing) {
  double prev = 1.0;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto v = monotone_minimal_solution(unit_disc(), Model{}, {t, t});
    ASSERT_TRUE(in_lambda(v));
    const double m = std::get<InLambda>(v).solution.w.maxCoeff();
    EXPECT_LT(m, prev);
    EXPECT_LT(m, t / 7.0);
    prev = m;
  }
}

TEST(Monotone, RejectsBadParameters) {
  EXPECT_THROW(monotone_minimal_solution(unit_disc(), Model{}, {0.0, 1.0}), PreconditionViolation);
}

TEST(NonexistenceBound, Examples) {
  const Discretization& d = unit_disc();
  Model m;
  EXPECT_NEAR(analytic_nonexistence_bound(d, m).lambda_bar, pi * pi, 1e-3);
  m.alpha = Profile::constant(2.0);
  EXPECT_NEAR(analytic_nonexistence_bound(d, m).lambda_bar, pi * pi / 2.0, 1e-3);
  m.f = Nonlinearity::exp_family();
  m.alpha = Profile::constant(1.0);
  EXPECT_NEAR(analytic_nonexistence_bound(d, m).lambda_bar, pi * pi / std::numbers::e, 1e-3);
  EXPECT_NEAR(analytic_nonexistence_bound(d, m).mu_bar, pi * pi, 1e-3);
}

TEST(Curve, DiagonalMatchesShootingOracle) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  const Bracket b = ray_intercept(d, Model{}, 1.0, 1.0);
  ASSERT_NE(b.status, BracketStatus::BracketFailure);
  const double scalar = oracle::scalar_pull_in().lambda;
  EXPECT_NEAR(b.value() / scalar, 1.0, 0.01) << b.value() << " vs " << scalar;
  EXPECT_LE(b.width(), 1e-3 * b.outside);
}

TEST(Curve, MonotoneAndBracketed) {
  const Discretization d(Grid::interval(0.0, 1.0, 49));
  const Model m;
  CurveOptions opts;
  opts.threads = 2;
  const Bracket ls = lambda_intercept(d, m, opts);
  const CriticalCurve c = trace_critical_curve(d, m, even_lambda_samples(ls, 6), opts);
  ASSERT_EQ(c.samples.size(), 6u);
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const Bracket& b = c.samples[i].mu;
    ASSERT_NE(b.status, BracketStatus::BracketFailure);
    EXPECT_LE(b.width(), opts.bisect_tol * b.outside * (1 + 1e-12));
    if (i > 0) EXPECT_LE(b.inside, c.samples[i - 1].mu.outside);
  }
  // bisection contract: a point safely below the curve is inside
  for (const auto& s : c.samples) {
    const ParamPoint p{s.lambda, s.mu.value() * (1 - 2 * opts.bisect_tol)};
    EXPECT_TRUE(in_lambda(monotone_minimal_solution(d, m, p))) << s.lambda;
  }
  // symmetric model: the intercepts agree
  EXPECT_NEAR(c.lambda_star.value() / c.mu_star.value(), 1.0, 2e-3);
}

TEST(Curve, SampleBeyondInterceptFailsInRow) {
  const Discretization d(Grid::interval(0.0, 1.0, 49));
  const CriticalCurve c = trace_critical_curve(d, Model{}, {9.0});
  ASSERT_EQ(c.samples.size(), 1u);
  EXPECT_EQ(c.samples[0].mu.status, BracketStatus::BracketFailure);
  EXPECT_FALSE(c.samples[0].mu.note.empty());
}

TEST(Curve, EvenSamples) {
  Bracket b;
  b.inside = 8.0;
  b.outside = 8.01;
  const auto s = even_lambda_samples(b, 3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0], 2.0);
  EXPECT_DOUBLE_EQ(s[2], 6.0);
  b.status = BracketStatus::BracketFailure;
  EXPECT_THROW(even_lambda_samples(b, 3), PreconditionViolation);
}

TEST(SecondSolution, UpperBranchBelowCurve) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  const Model m;
  const auto v = monotone_minimal_solution(d, m, {0.5, 0.5});
  const auto second = second_solution_search(d, m, v);
  ASSERT_TRUE(second.has_value());
  const auto& w = std::get<InLambda>(v).solution;
  EXPECT_LE(second->residual(), 1e-8);
  EXPECT_GE((second->w - w.w).minCoeff(), 0.0);
  EXPECT_GE((second->z - w.z).minCoeff(), 0.0);
  EXPECT_GT((second->w - w.w).maxCoeff(), 1e-3);
  EXPECT_LT(second->w.maxCoeff(), 1.0);

  // cross-check with the scalar branch: lambda(s) at the upper solution's max
  // value is the diagonal parameter, to discretization accuracy
  EXPECT_NEAR(oracle::scalar_branch_lambda(second->w.maxCoeff()), 0.5, 0.01);
}

TEST(SecondSolution, RequiresMembership) {
  const Discretization& d = unit_disc();
  const auto v = monotone_minimal_solution(d, Model{}, {12.0, 12.0});
  EXPECT_THROW(second_solution_search(d, Model{}, v), PreconditionViolation);
}

TEST(MassBound, Examples) {
  const Discretization& d = unit_disc();
  const Model m;
  const auto v = monotone_minimal_solution(d, m, {1.0, 1.0});
  const auto& s = std::get<InLambda>(v).solution;
  const MassBoundReport r = mass_bound_check(d, m, {1.0, 1.0}, s.w, s.z);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.w_bound, pi * pi, 1e-3);
  EXPECT_LT(r.w_mass, 1.0);
  ScalarField zero = ScalarField::Zero(199);
  EXPECT_NEAR(mass_bound_check(d, m, {5.0, 5.0}, zero, zero).w_bound, pi * pi / 5.0, 1e-3);
  // a profile large enough to violate the bound
  ScalarField big = ScalarField::Constant(199, 0.99);
  EXPECT_FALSE(mass_bound_check(d, m, {12.0, 12.0}, big, big).pass);
}

TEST(MassBound, SecondSolutionPasses) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  const Model m;
  const auto v = monotone_minimal_solution(d, m, {1.0, 1.0});
  const auto second = second_solution_search(d, m, v);
  ASSERT_TRUE(second.has_value());
  EXPECT_TRUE(mass_bound_check(d, m, {1.0, 1.0}, second->w, second->z).pass);
}

TEST(TripleDiagnostic, FlagsStrictOrdering) {
  const Grid g = Grid::interval(0.0, 1.0, 49);
  const ScalarField dist = sample(g, [](double x, double) { return std::min(x, 1 - x); });
  const PairField low{0.1 * dist, 0.1 * dist};
  const PairField mid{0.3 * dist, 0.3 * dist};
  const PairField high{0.6 * dist, 0.6 * dist};
  EXPECT_TRUE(ordered_triple_diagnostic(g, low, mid, high, 0.1).ordered_triple);
  EXPECT_FALSE(ordered_triple_diagnostic(g, low, mid, high, 0.25).ordered_triple);
  EXPECT_FALSE(ordered_triple_diagnostic(g, low, low, high, 0.1).ordered_triple);
}

TEST(TripleDiagnostic, NoTripleFromNewtonSeeds) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  const Model m;
  const auto v = monotone_minimal_solution(d, m, {0.5, 0.5});
  SecondSolutionOptions a, b;
  a.seed_amplitude = 0.3;
  b.seed_amplitude = 0.8;
  const auto s1 = second_solution_search(d, m, v, a);
  const auto s2 = second_solution_search(d, m, v, b);
  ASSERT_TRUE(s1 && s2);
  const auto& w = std::get<InLambda>(v).solution;
  const PairField& hi = s1->w.maxCoeff() >= s2->w.maxCoeff() ? s1->pair() : s2->pair();
  const PairField& lo = s1->w.maxCoeff() >= s2->w.maxCoeff() ? s2->pair() : s1->pair();
  EXPECT_FALSE(ordered_triple_diagnostic(d.grid, w.pair(), lo, hi, 1e-3).ordered_triple);
}

// Properties over random models.

TEST(StationaryProperty, IteratesNondecreasingAndResidualSmall) {
  gen::Source src(301);
  const Discretization d(Grid::interval(0.0, 1.0, 79));
  for (int c = 0; c < 12; ++c) {
    ScalarField pw, pz;
    bool ok = true;
    MonotoneOptions opts;
    opts.observer = [&](int n, const ScalarField& w, const ScalarField& z) {
      if (n > 1) ok = ok && (w.array() >= pw.array()).all() && (z.array() >= pz.array()).all();
      pw = w;
      pz = z;
    };
    const auto draw = gen::inside_point(src, d, opts);
    const auto& s = std::get<InLambda>(draw.verdict).solution;
    EXPECT_TRUE(ok) << gen::describe(draw.model, draw.params);
    EXPECT_LE(s.residual(), 1e-8) << gen::describe(draw.model, draw.params);
    EXPECT_GE(s.w.minCoeff(), 0.0);
    EXPECT_LT(std::max(s.w.maxCoeff(), s.z.maxCoeff()), 1.0 - 1e-4);
    EXPECT_TRUE(mass_bound_check(d, draw.model, draw.params, s.w, s.z).pass);
  }
}

TEST(StationaryProperty, OrderedInParameters) {
  gen::Source src(302);
  const Discretization d(Grid::interval(0.0, 1.0, 59));
  for (int c = 0; c < 10; ++c) {
    const auto draw = gen::inside_point(src, d);
    const ParamPoint smaller{draw.params.lambda * src.uniform(0.1, 1.0),
                             draw.params.mu * src.uniform(0.1, 1.0)};
    const auto v2 = monotone_minimal_solution(d, draw.model, smaller);
    ASSERT_TRUE(in_lambda(v2));
    const auto& big = std::get<InLambda>(draw.verdict).solution;
    const auto& small = std::get<InLambda>(v2).solution;
    EXPECT_LE((small.w - big.w).maxCoeff(), 1e-12) << gen::describe(draw.model, draw.params);
    EXPECT_LE((small.z - big.z).maxCoeff(), 1e-12) << gen::describe(draw.model, draw.params);
  }
}

TEST(StationaryProperty, TwoDimensionalMinimalSolutions) {
  gen::Source src(303);
  const Discretization d(Grid::rectangle({0, 1}, 15, {0, 1.5}, 19));
  for (int c = 0; c < 4; ++c) {
    const auto draw = gen::inside_point(src, d);
    const auto& s = std::get<InLambda>(draw.verdict).solution;
    EXPECT_LE(s.residual(), 1e-8);
    EXPECT_GE(s.w.minCoeff(), 0.0);
  }
}
