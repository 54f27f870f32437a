#include "quenchlab/certificates.hpp"

#include "quenchlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace quenchlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double weighted_inverse(const ScalarField& phi, const ScalarField& profile, const Grid& grid) {
  if (profile.minCoeff() <= 0.0) return kInf;
  return integrate(phi.cwiseQuotient(profile), grid);
}

double side_bound(double lambda1, double k, double drive, double mass) {
  return std::log((drive - lambda1 * k) / (drive - lambda1 * k / mass)) / lambda1;
}

}  // namespace

double QuenchBound::best() const {
  double b = kInf;
  if (applicable_u) b = std::min(b, bound_u);
  if (applicable_v) b = std::min(b, bound_v);
  return b;
}

QuenchBound quench_time_bound(const Discretization& disc, const Model& model,
                              const ParamPoint& params, const PairField& initial) {
  require_valid(params);
  const Grid& g = disc.grid;
  const ScalarField& phi = disc.eigen.phi;
  const double lambda1 = disc.eigen.lambda1;

  QuenchBound b;
  b.F0 = integrate(initial.u.cwiseProduct(phi), g);
  b.G0 = integrate(initial.v.cwiseProduct(phi), g);
  b.K_alpha = weighted_inverse(phi, model.alpha.sample(g), g);
  b.K_beta = weighted_inverse(phi, model.beta.sample(g), g);
  const double drive_u = params.lambda * model.f.value(0.0);
  const double drive_v = params.mu * model.g.value(0.0);
  b.threshold_u = lambda1 * b.K_alpha / drive_u;
  b.threshold_v = lambda1 * b.K_beta / drive_v;
  b.applicable_u = b.F0 > b.threshold_u;
  b.applicable_v = b.G0 > b.threshold_v;
  b.bound_u = b.applicable_u ? side_bound(lambda1, b.K_alpha, drive_u, b.F0) : kNaN;
  b.bound_v = b.applicable_v ? side_bound(lambda1, b.K_beta, drive_v, b.G0) : kNaN;
  return b;
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Inapplicable: return "inapplicable";
  }
  return "?";
}

QuenchVerification verify_quench_bound(const QuenchBound& bound, const Trajectory& traj) {
  QuenchVerification r;
  const bool quenched = traj.status == TerminalStatus::Quenched && traj.quench.has_value();
  r.t_q = quenched ? traj.quench->t_q : kNaN;
  if (!bound.applicable()) {
    r.outcome = Outcome::Inapplicable;
    r.pass = true;
    r.limit = kInf;
    r.note = quenched ? "no applicable bound; the run quenched anyway (the bound is sufficient only)"
                      : "no applicable bound; vacuous pass";
    return r;
  }
  r.limit = bound.best() * (1.0 + kCertSlack);
  if (!quenched) {
    r.outcome = Outcome::Fail;
    r.note = fmt::format("run ended with status {} before quenching", status_name(traj.status));
    return r;
  }
  r.pass = r.t_q <= r.limit;
  r.outcome = r.pass ? Outcome::Pass : Outcome::Fail;
  r.note = fmt::format("t_q {:.17g} against limit {:.17g}", r.t_q, r.limit);
  return r;
}

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw PreconditionViolation("need at least two samples");
  const auto n = static_cast<double>(t.size());
  double st = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(y[k] > 0.0)) throw PreconditionViolation("decay fit needs positive values");
    st += t[k];
    sy += std::log(y[k]);
  }
  const double tm = st / n;
  const double ym = sy / n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    sty += (t[k] - tm) * (std::log(y[k]) - ym);
  }
  if (!(stt > 0.0)) throw PreconditionViolation("decay fit needs distinct times");
  const double slope = sty / stt;
  return {-slope, ym - slope * tm};
}

RateCertificate rate_certificate(const Trajectory& traj, const EigenPair& eig,
                                 const Discretization& disc) {
  const auto& d = traj.diagnostics;
  if (d.empty() || std::isnan(d.front().dist2_u)) {
    throw PreconditionViolation("trajectory carries no distances to a reference solution");
  }
  RateCertificate c;
  c.lambda1 = disc.eigen.lambda1;
  c.nu1 = eig.nu1;
  c.gamma_theorem = std::min(2.0 * c.lambda1, 0.5 * c.nu1);
  c.gamma_proof = std::min(c.lambda1, 0.5 * c.nu1);
  c.discrepancy_note = fmt::format(
      "theorem statement rate min{{2 lambda1, nu1/2}} = {:.17g}; proof concludes with "
      "min{{lambda1, nu1/2}} = {:.17g}; certified against the latter",
      c.gamma_theorem, c.gamma_proof);

  std::vector<double> sum(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) sum[k] = d[k].dist2_u + d[k].dist2_v;
  const double initial = sum.front();
  if (!(initial > 0.0)) throw InsufficientDecay("initial distance is zero");
  const double floor_ratio = 1e-8;
  if (!(sum.back() <= floor_ratio * initial)) {
    throw InsufficientDecay(fmt::format("terminal distance ratio {:.3e} above 1e-4",
                                        std::sqrt(sum.back() / initial)));
  }

  std::size_t onset = 0;
  while (onset < d.size() && !(sum[onset] < 0.1 * initial)) ++onset;
  std::size_t hi = onset;
  while (hi < d.size() && !(sum[hi] <= floor_ratio * initial)) ++hi;
  hi = std::min(hi, d.size() - 1);
  c.t_onset = d[onset].t;
  c.t_hi = d[hi].t;
  c.t_lo = c.t_hi - 0.6 * (c.t_hi - c.t_onset);

  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t k = onset; k <= hi; ++k) {
    if (d[k].t >= c.t_lo && sum[k] > 0.0) {
      ts.push_back(d[k].t);
      ys.push_back(sum[k]);
    }
  }
  if (ts.size() < 2) throw InsufficientDecay("tail window holds fewer than two samples");
  c.window_points = static_cast<int>(ts.size());
  c.fitted_slope = fit_decay_rate(ts, ys).slope;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    c.C0_empirical = std::max(c.C0_empirical, ys[k] * std::exp(c.gamma_proof * ts[k]));
  }
  c.pass = c.fitted_slope >= (1.0 - kCertSlack) * c.gamma_proof;
  return c;
}

std::string case_name(TheoremCase c) {
  switch (c) {
    case TheoremCase::A1: return "a1";
    case TheoremCase::A21: return "a21";
    case TheoremCase::A22: return "a22";
    case TheoremCase::B: return "b";
    case TheoremCase::C: return "c";
    case TheoremCase::NoneEstablished: return "none-established";
  }
  return "?";
}

namespace {

bool below(const PairField& a, const PairField& b) {
  return (a.u - b.u).maxCoeff() <= 0.0 && (a.v - b.v).maxCoeff() <= 0.0;
}

bool differs(const PairField& a, const PairField& b) {
  return std::max((a.u - b.u).lpNorm<Eigen::Infinity>(), (a.v - b.v).lpNorm<Eigen::Infinity>()) >
         1e-12;
}

}  // namespace

CaseReport classify_case(const Discretization& disc, const Model& model, const ParamPoint& params,
                         const InitialData& recipe, const CaseOptions& opts) {
  CaseReport r;
  r.verdict = monotone_minimal_solution(disc, model, params, opts.monotone);
  r.evidence.push_back("membership: " + verdict_name(r.verdict));

  InitialContext ctx;
  if (const auto* in = std::get_if<InLambda>(&r.verdict)) {
    ctx.minimal = in->solution.pair();
    if (opts.search_second) {
      r.second = second_solution_search(disc, model, r.verdict, opts.second);
      if (r.second) {
        ctx.second = r.second->pair();
        r.evidence.push_back("second solution found by Newton");
      } else {
        r.evidence.push_back("no second solution found");
      }
    }
  }

  std::optional<PairField> init;
  try {
    init = materialize_initial(recipe, disc.grid, ctx);
  } catch (const std::exception& e) {
    r.evidence.push_back(std::string("initial data unavailable: ") + e.what());
  }

  if (init) {
    r.bound = quench_time_bound(disc, model, params, *init);
    if (r.bound.applicable()) {
      r.which = TheoremCase::C;
      r.evidence.push_back(fmt::format("eigen-mass threshold exceeded (F0 {:.6g} vs {:.6g}, G0 {:.6g} vs {:.6g})",
                                       r.bound.F0, r.bound.threshold_u, r.bound.G0, r.bound.threshold_v));
      return r;
    }
  }

  if (not_in_lambda(r.verdict)) {
    r.which = TheoremCase::B;
    return r;
  }
  if (!init || !in_lambda(r.verdict)) return r;

  if (below(*init, *ctx.minimal)) {
    r.which = TheoremCase::A1;
    r.evidence.push_back("initial data below the minimal solution");
  } else if (ctx.second && below(*init, *ctx.second) && differs(*init, *ctx.second)) {
    r.which = TheoremCase::A21;
    r.evidence.push_back("initial data below the second solution");
  } else if (ctx.second && below(*ctx.second, *init) && differs(*init, *ctx.second)) {
    r.which = TheoremCase::A22;
    r.evidence.push_back("initial data above the second solution");
  }
  return r;
}

}  // namespace quenchlab
