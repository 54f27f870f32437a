#pragma once

// Closed-form quench-time bounds for large initial data, convergence-rate
// certificates, and classification of a configuration by which global
// behaviour is guaranteed for it.

#include "quenchlab/evolution.hpp"
#include "quenchlab/spectra.hpp"
#include "quenchlab/stationary.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quenchlab {

struct QuenchBound {
  bool applicable_u = false;
  bool applicable_v = false;
  double F0 = 0.0;  // integral of u0 phi, with integral(phi) = 1
  double G0 = 0.0;
  double K_alpha = 0.0;  // integral of phi / alpha, +inf if alpha vanishes
  double K_beta = 0.0;
  double threshold_u = 0.0;  // lambda1 K_alpha / (lambda f(0))
  double threshold_v = 0.0;
  double bound_u = 0.0;  // NaN unless applicable
  double bound_v = 0.0;

  bool applicable() const { return applicable_u || applicable_v; }
  // Smallest applicable bound, +inf if none.
  double best() const;
};

// bound = (1/lambda1) ln[(lambda f(0) - lambda1 K) / (lambda f(0) - lambda1 K / F0)],
// applicable iff F0 > threshold.
QuenchBound quench_time_bound(const Discretization& disc, const Model& model,
                              const ParamPoint& params, const PairField& initial);

inline constexpr double kCertSlack = 0.05;

enum class Outcome { Pass, Fail, Inapplicable };

std::string outcome_name(Outcome o);

struct QuenchVerification {
  Outcome outcome = Outcome::Fail;
  bool pass = false;
  double t_q = 0.0;    // NaN unless quenched
  double limit = 0.0;  // best bound times (1 + slack), +inf if inapplicable
  std::string note;
};

// Pass iff the run quenched no later than the bound times 1.05. Without an
// applicable bound a horizon run passes vacuously and a quenched run passes
// with a note.
QuenchVerification verify_quench_bound(const QuenchBound& bound, const Trajectory& traj);

struct RateFit {
  double slope = 0.0;  // decay rate, -d/dt log y
  double intercept = 0.0;
};

// Least squares of log y against t, returned as a decay rate. Needs two
// distinct times and positive y.
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y);

struct RateCertificate {
  double lambda1 = 0.0;
  double nu1 = 0.0;
  double gamma_theorem = 0.0;  // min{2 lambda1, nu1/2}
  double gamma_proof = 0.0;    // min{lambda1, nu1/2}
  double fitted_slope = 0.0;
  double t_onset = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double C0_empirical = 0.0;  // max over the window of d(t) exp(gamma_proof t)
  int window_points = 0;
  bool pass = false;
  std::string discrepancy_note;
};

// Fits the tail of log(dist2_u + dist2_v). Throws InsufficientDecay when the
// distance never drops to 1e-4 of its initial value (squared sum 1e-8),
// PreconditionViolation when the trajectory carries no distances.
RateCertificate rate_certificate(const Trajectory& traj, const EigenPair& eig,
                                 const Discretization& disc);

enum class TheoremCase { A1, A21, A22, B, C, NoneEstablished };

std::string case_name(TheoremCase c);

struct CaseOptions {
  MonotoneOptions monotone;
  SecondSolutionOptions second;
  bool search_second = true;
};

struct CaseReport {
  TheoremCase which = TheoremCase::NoneEstablished;
  MembershipVerdict verdict;
  QuenchBound bound;
  std::optional<StationarySolution> second;
  std::vector<std::string> evidence;
};

// Threshold check first, then the membership verdict and the position of the
// initial data relative to the minimal and, when found, a second solution.
CaseReport classify_case(const Discretization& disc, const Model& model, const ParamPoint& params,
                         const InitialData& recipe, const CaseOptions& opts = {});

}  // namespace quenchlab
