#include "quenchlab/certificates.hpp"
#include "quenchlab/errors.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace quenchlab;
using std::numbers::pi;

namespace {

const Discretization& disc199() {
  static const Discretization d(Grid::interval(0.0, 1.0, 199));
  return d;
}

PairField sine_u(const Grid& g, double a) {
  return {sample(g, [a](double x, double) { return a * std::sin(pi * x); }), ScalarField::Zero(long(g.size()))};
}

// Closed form with the exact continuum constants.
double continuum_bound(double lambda, double F0) {
  const double l1 = pi * pi;
  return std::log((lambda - l1) / (lambda - l1 / F0)) / l1;
}

}  // namespace

TEST(QuenchBound, LargeDataExample) {
  const Discretization& d = disc199();
  const QuenchBound b = quench_time_bound(d, Model{}, {20.0, 20.0}, sine_u(d.grid, 0.9));
  EXPECT_NEAR(b.F0, 0.9 * pi / 4.0, 1e-4);
  EXPECT_NEAR(b.threshold_u, pi * pi / 20.0, 1e-4);
  ASSERT_TRUE(b.applicable_u);
  EXPECT_FALSE(b.applicable_v);
  EXPECT_TRUE(std::isnan(b.bound_v));
  EXPECT_NEAR(b.bound_u, continuum_bound(20.0, 0.9 * pi / 4.0), 1e-4);
  EXPECT_NEAR(b.bound_u, 0.0524, 5e-4);
  EXPECT_DOUBLE_EQ(b.best(), b.bound_u);
}

TEST(QuenchBound, ZeroDataNotApplicable) {
  const Discretization& d = disc199();
  const PairField z{ScalarField::Zero(199), ScalarField::Zero(199)};
  const QuenchBound b = quench_time_bound(d, Model{}, {20.0, 20.0}, z);
  EXPECT_FALSE(b.applicable());
  EXPECT_EQ(b.F0, 0.0);
  EXPECT_TRUE(std::isinf(b.best()));
}

TEST(QuenchBound, ProfileHalvesThreshold) {
  const Discretization& d = disc199();
  Model m;
  const QuenchBound one = quench_time_bound(d, m, {20.0, 20.0}, sine_u(d.grid, 0.5));
  m.alpha = Profile::constant(2.0);
  const QuenchBound two = quench_time_bound(d, m, {20.0, 20.0}, sine_u(d.grid, 0.5));
  EXPECT_NEAR(two.K_alpha, 0.5, 1e-12);
  EXPECT_NEAR(two.threshold_u, 0.5 * one.threshold_u, 1e-12);
}

TEST(QuenchBoundProperty, DecreasesWithInitialMass) {
  gen::Source src(601);
  const Discretization& d = disc199();
  for (int c = 0; c < 50; ++c) {
    const double lambda = src.uniform(10.5, 60.0);
    const double a1 = src.uniform(0.0, 0.99), a2 = src.uniform(0.0, 0.99);
    const QuenchBound b1 = quench_time_bound(d, Model{}, {lambda, 1.0}, sine_u(d.grid, std::min(a1, a2)));
    const QuenchBound b2 = quench_time_bound(d, Model{}, {lambda, 1.0}, sine_u(d.grid, std::max(a1, a2)));
    EXPECT_EQ(b1.applicable_u, b1.F0 > b1.threshold_u);
    if (b1.applicable_u && a1 != a2) {
      EXPECT_TRUE(b2.applicable_u);
      EXPECT_GT(b1.bound_u, b2.bound_u);
      EXPECT_GT(b2.bound_u, 0.0);
    }
  }
}

TEST(Verify, Outcomes) {
  QuenchBound applicable;
  applicable.applicable_u = true;
  applicable.bound_u = 0.05;
  applicable.bound_v = std::nan("");
  Trajectory quenched;
  quenched.status = TerminalStatus::Quenched;
  quenched.quench = QuenchInfo{0.052, QuenchedComponent::U, 0.053};
  EXPECT_TRUE(verify_quench_bound(applicable, quenched).pass);
  quenched.quench->t_q = 0.0526;
  EXPECT_FALSE(verify_quench_bound(applicable, quenched).pass);

  Trajectory horizon;
  horizon.status = TerminalStatus::ReachedHorizon;
  EXPECT_FALSE(verify_quench_bound(applicable, horizon).pass);

  const QuenchBound none;
  const QuenchVerification vacuous = verify_quench_bound(none, horizon);
  EXPECT_TRUE(vacuous.pass);
  EXPECT_EQ(vacuous.outcome, Outcome::Inapplicable);
  quenched.quench->t_q = 3.0;
  const QuenchVerification noted = verify_quench_bound(none, quenched);
  EXPECT_TRUE(noted.pass);
  EXPECT_FALSE(noted.note.empty());
}

TEST(Verify, LargeDataRunQuenchesInTime) {
  const Discretization& d = disc199();
  const PairField u0 = sine_u(d.grid, 0.9);
  const QuenchBound b = quench_time_bound(d, Model{}, {20.0, 20.0}, u0);
  const Trajectory t = simulate(d, Model{}, {20.0, 20.0}, u0, {}, 1.0);
  const QuenchVerification v = verify_quench_bound(b, t);
  EXPECT_TRUE(v.pass);
  EXPECT_LE(v.t_q, 0.0524 * 1.05);
}

TEST(RateFit, SyntheticExponential) {
  std::vector<double> t, y;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.1 * i);
    y.push_back(5.0 * std::exp(-3.0 * t.back()));
  }
  const RateFit f = fit_decay_rate(t, y);
  EXPECT_NEAR(f.slope, 3.0, 1e-10);
  EXPECT_NEAR(std::exp(f.intercept), 5.0, 1e-9);
  EXPECT_THROW(fit_decay_rate({1.0, 1.0}, {1.0, 2.0}), PreconditionViolation);
  EXPECT_THROW(fit_decay_rate({0.0, 1.0}, {1.0, 0.0}), PreconditionViolation);
}

TEST(Rate, ConvergedRunPassesProofConstant) {
  const Discretization& d = disc199();
  const auto v = monotone_minimal_solution(d, Model{}, {0.5, 0.5});
  const auto& s = std::get<InLambda>(v).solution;
  const EigenPair eig = principal_eigenpair(assemble_linearization(d, Model{}, s));
  const PairField ref = s.pair();
  const Trajectory t = simulate(d, Model{}, {0.5, 0.5}, {ScalarField::Zero(199), ScalarField::Zero(199)},
                                {}, 5.0, &ref);
  const RateCertificate c = rate_certificate(t, eig, d);
  EXPECT_TRUE(c.pass);
  EXPECT_DOUBLE_EQ(c.gamma_proof, std::min(c.lambda1, 0.5 * c.nu1));
  EXPECT_DOUBLE_EQ(c.gamma_theorem, std::min(2 * c.lambda1, 0.5 * c.nu1));
  EXPECT_GE(c.fitted_slope, 0.95 * c.gamma_proof);
  EXPECT_GE(c.t_lo, c.t_onset);
  EXPECT_GT(c.window_points, 3);
  EXPECT_FALSE(c.discrepancy_note.empty());
  // asymptotic slope is 2 nu1 for the squared distance
  EXPECT_NEAR(c.fitted_slope / (2.0 * c.nu1), 1.0, 0.05);

  const RateCertificate again = rate_certificate(t, eig, d);
  EXPECT_EQ(again.fitted_slope, c.fitted_slope);
  EXPECT_EQ(again.C0_empirical, c.C0_empirical);
}

TEST(Rate, SupersolutionStartDecaysFromAbove) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  const Model m;
  const auto v = monotone_minimal_solution(d, m, {0.5, 0.5});
  const auto& s = std::get<InLambda>(v).solution;
  const auto second = second_solution_search(d, m, v);
  ASSERT_TRUE(second.has_value());
  const PairField u0 = materialize_initial(initial::ConvexCombo{0.5}, d.grid, {s.pair(), second->pair()});
  const PairField ref = s.pair();
  const Trajectory t = simulate(d, m, {0.5, 0.5}, u0, {}, 6.0, &ref);
  EXPECT_EQ(t.status, TerminalStatus::ReachedHorizon);
  EXPECT_TRUE(max_monotonicity(t).nonincreasing);
  const RateCertificate c = rate_certificate(t, principal_eigenpair(assemble_linearization(d, m, s)), d);
  EXPECT_TRUE(c.pass) << c.fitted_slope << " vs " << c.gamma_proof;
}

TEST(Rate, InsufficientDecay) {
  const Discretization d(Grid::interval(0.0, 1.0, 49));
  const auto v = monotone_minimal_solution(d, Model{}, {0.5, 0.5});
  const auto& s = std::get<InLambda>(v).solution;
  const PairField ref = s.pair();
  const Trajectory t = simulate(d, Model{}, {0.5, 0.5}, {ScalarField::Zero(49), ScalarField::Zero(49)},
                                {}, 0.05, &ref);
  const EigenPair eig = principal_eigenpair(assemble_linearization(d, Model{}, s));
  EXPECT_THROW(rate_certificate(t, eig, d), InsufficientDecay);
  const Trajectory no_ref = simulate(d, Model{}, {0.5, 0.5}, {ScalarField::Zero(49), ScalarField::Zero(49)},
                                     {}, 0.05);
  EXPECT_THROW(rate_certificate(no_ref, eig, d), PreconditionViolation);
}

TEST(Classify, Examples) {
  const Discretization d(Grid::interval(0.0, 1.0, 99));
  EXPECT_EQ(classify_case(d, Model{}, {12.0, 12.0}, initial::Zero{}).which, TheoremCase::B);
  EXPECT_EQ(classify_case(d, Model{}, {0.5, 0.5}, initial::Zero{}).which, TheoremCase::A1);
  const CaseReport c = classify_case(d, Model{}, {20.0, 20.0}, initial::Sine{0.9, 0.0});
  EXPECT_EQ(c.which, TheoremCase::C);
  EXPECT_EQ(case_name(c.which), "c");
  EXPECT_FALSE(c.evidence.empty());
  EXPECT_EQ(classify_case(d, Model{}, {0.5, 0.5}, initial::ConvexCombo{0.5}).which, TheoremCase::A21);
  EXPECT_EQ(classify_case(d, Model{}, {0.5, 0.5}, initial::AboveSecond{0.1}).which, TheoremCase::A22);
}

TEST(ClassifyProperty, ThresholdBranchIffBoundApplies) {
  gen::Source src(602);
  const Discretization d(Grid::interval(0.0, 1.0, 49));
  CaseOptions opts;
  opts.search_second = false;
  for (int c = 0; c < 30; ++c) {
    const ParamPoint p{src.uniform(0.2, 40.0), src.uniform(0.2, 40.0)};
    const initial::Sine recipe{src.uniform(0.0, 0.99), src.uniform(0.0, 0.99)};
    const CaseReport r = classify_case(d, Model{}, p, recipe, opts);
    const QuenchBound b = quench_time_bound(d, Model{}, p, materialize_initial(recipe, d.grid));
    EXPECT_EQ(r.which == TheoremCase::C, b.applicable()) << p.lambda << " " << p.mu;
  }
}
