#include "commands.hpp"

#include "quenchlab/certificates.hpp"
#include "quenchlab/errors.hpp"
#include "quenchlab/io.hpp"
#include "quenchlab/spectra.hpp"

#include <fmt/format.h>

#include <functional>
#include <map>

namespace quenchlab::cli {

namespace {

using nlohmann::json;

json document(const CommandContext& ctx) {
  json j;
  j["config"] = ctx.config.echo();
  return j;
}

void emit(const CommandContext& ctx, const std::string& file, CsvTable table) {
  auto comments = ctx.config.comment_lines();
  comments.insert(comments.end(), table.comments.begin(), table.comments.end());
  table.comments = std::move(comments);
  write_csv(ctx.out / file, table);
}

void emit(const CommandContext& ctx, const std::string& file, const json& doc) {
  write_json(ctx.out / file, doc);
}

bool needs_second(const InitialData& recipe) {
  return std::holds_alternative<initial::ConvexCombo>(recipe) ||
         std::holds_alternative<initial::AboveSecond>(recipe);
}

struct Setup {
  MembershipVerdict verdict;
  std::optional<StationarySolution> second;
  InitialContext context;
};

Setup stationary_setup(const Discretization& disc, const RunConfig& cfg, bool want_second) {
  Setup s{monotone_minimal_solution(disc, cfg.model, cfg.params, cfg.monotone), std::nullopt, {}};
  if (const auto* in = std::get_if<InLambda>(&s.verdict)) {
    s.context.minimal = in->solution.pair();
    if (want_second) {
      s.second = second_solution_search(disc, cfg.model, s.verdict, cfg.second);
      if (s.second) s.context.second = s.second->pair();
    }
  }
  return s;
}

const StationarySolution& require_minimal(const Setup& s, const char* command) {
  const auto* in = std::get_if<InLambda>(&s.verdict);
  if (in == nullptr) {
    throw PreconditionViolation(fmt::format("{} needs a parameter point with a stationary solution; verdict {}",
                                            command, verdict_name(s.verdict)));
  }
  return in->solution;
}

std::vector<double> lambda_samples(const Discretization& disc, const RunConfig& cfg,
                                   const CurveOptions& opts) {
  if (!cfg.lambda_samples.empty() && cfg.lambda_samples.front() < 0.0) {
    return even_lambda_samples(lambda_intercept(disc, cfg.model, opts),
                               static_cast<int>(cfg.lambda_samples.size()));
  }
  return cfg.lambda_samples;
}

int cmd_stationary(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const Discretization disc(cfg.domain.grid());
  const MembershipVerdict v = monotone_minimal_solution(disc, cfg.model, cfg.params, cfg.monotone);
  json doc = document(ctx);
  doc["lambda1"] = disc.eigen.lambda1;
  doc["nonexistence_bound"] = to_json(analytic_nonexistence_bound(disc, cfg.model));
  doc["membership"] = to_json(v);
  if (const auto* in = std::get_if<InLambda>(&v)) {
    const auto& s = in->solution;
    doc["mass_bound"] = to_json(mass_bound_check(disc, cfg.model, cfg.params, s.w, s.z));
    emit(ctx, "fields.csv", fields_table(disc.grid, s.w, s.z));
  }
  emit(ctx, "verdict.json", doc);
  return kOk;
}

int cmd_curve(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const Discretization disc(cfg.domain.grid());
  CurveOptions opts = cfg.curve;
  opts.threads = ctx.threads;
  const CriticalCurve curve = trace_critical_curve(disc, cfg.model, lambda_samples(disc, cfg, opts), opts);
  emit(ctx, "curve.csv", curve_table(curve));
  json doc = document(ctx);
  doc["nonexistence_bound"] = to_json(analytic_nonexistence_bound(disc, cfg.model));
  doc["lambda_star"] = to_json(curve.lambda_star);
  doc["mu_star"] = to_json(curve.mu_star);
  doc["diagonal"] = to_json(ray_intercept(disc, cfg.model, 1.0, 1.0, opts));
  emit(ctx, "curve.json", doc);
  return kOk;
}

int cmd_eigen(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const Discretization disc(cfg.domain.grid());
  const Setup s = stationary_setup(disc, cfg, false);
  const StationarySolution& sol = require_minimal(s, "eigen");
  const EigenPair eig =
      principal_eigenpair(assemble_linearization(disc, cfg.model, sol, cfg.coupling_scale));
  emit(ctx, "eigenfunctions.csv", eigenfunctions_table(disc.grid, eig));
  json doc = document(ctx);
  doc.update(to_json(eig));
  doc["lambda1"] = disc.eigen.lambda1;
  emit(ctx, "eigen.json", doc);
  return kOk;
}

Trajectory run_simulation(const Discretization& disc, const RunConfig& cfg, const Setup& s) {
  const PairField init = materialize_initial(cfg.initial, disc.grid, s.context);
  const PairField* ref = s.context.minimal ? &*s.context.minimal : nullptr;
  return simulate(disc, cfg.model, cfg.params, init, cfg.stepper, cfg.horizon, ref);
}

void emit_trajectory(const CommandContext& ctx, const Discretization& disc, const Trajectory& traj) {
  emit(ctx, "trajectory.csv", trajectory_table(traj));
  emit(ctx, "snapshots.csv", snapshots_table(traj, disc.grid));
}

int cmd_simulate(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const Discretization disc(cfg.domain.grid());
  const Setup s = stationary_setup(disc, cfg, needs_second(cfg.initial));
  const Trajectory traj = run_simulation(disc, cfg, s);
  emit_trajectory(ctx, disc, traj);
  json doc = document(ctx);
  doc["membership"] = verdict_name(s.verdict);
  doc["initial"] = recipe_name(cfg.initial);
  doc["trajectory"] = trajectory_summary(traj);
  emit(ctx, "summary.json", doc);
  return kOk;
}

RateCertificate certify_rate(const CommandContext& ctx, const Discretization& disc, const Setup& s,
                             json& doc) {
  const RunConfig& cfg = ctx.config;
  const StationarySolution& sol = require_minimal(s, "rate");
  const EigenPair eig = principal_eigenpair(assemble_linearization(disc, cfg.model, sol));
  const Trajectory traj = run_simulation(disc, cfg, s);
  emit(ctx, "trajectory.csv", trajectory_table(traj));
  doc["trajectory"] = trajectory_summary(traj);
  const RateCertificate cert = rate_certificate(traj, eig, disc);
  doc["rate"] = to_json(cert);
  return cert;
}

int cmd_rate(const CommandContext& ctx) {
  const Discretization disc(ctx.config.domain.grid());
  const Setup s = stationary_setup(disc, ctx.config, needs_second(ctx.config.initial));
  json doc = document(ctx);
  const RateCertificate cert = certify_rate(ctx, disc, s, doc);
  emit(ctx, "rate.json", doc);
  return cert.pass ? kOk : kFail;
}

int cmd_certify(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const Discretization disc(cfg.domain.grid());
  CaseOptions opts;
  opts.monotone = cfg.monotone;
  opts.second = cfg.second;
  const CaseReport report = classify_case(disc, cfg.model, cfg.params, cfg.initial, opts);

  json doc = document(ctx);
  doc["case"] = to_json(report);
  int code = kInapplicable;
  std::string outcome = "inapplicable";

  Setup s{report.verdict, report.second, {}};
  if (const auto* in = std::get_if<InLambda>(&report.verdict)) s.context.minimal = in->solution.pair();
  if (report.second) s.context.second = report.second->pair();

  switch (report.which) {
    case TheoremCase::C: {
      const Trajectory traj = run_simulation(disc, cfg, s);
      emit(ctx, "trajectory.csv", trajectory_table(traj));
      doc["trajectory"] = trajectory_summary(traj);
      const QuenchVerification v = verify_quench_bound(report.bound, traj);
      doc["verification"] = to_json(v);
      code = v.pass ? kOk : kFail;
      outcome = outcome_name(v.outcome);
      break;
    }
    case TheoremCase::B: {
      const Trajectory traj = run_simulation(disc, cfg, s);
      emit(ctx, "trajectory.csv", trajectory_table(traj));
      doc["trajectory"] = trajectory_summary(traj);
      const bool quenched = traj.status == TerminalStatus::Quenched;
      code = quenched ? kOk : kFail;
      outcome = quenched ? "pass" : "fail";
      break;
    }
    case TheoremCase::A1:
    case TheoremCase::A21: {
      const RateCertificate cert = certify_rate(ctx, disc, s, doc);
      code = cert.pass ? kOk : kFail;
      outcome = cert.pass ? "pass" : "fail";
      break;
    }
    case TheoremCase::A22:
    case TheoremCase::NoneEstablished:
      break;
  }
  doc["outcome"] = outcome;
  doc["exit_code"] = code;
  emit(ctx, "certificate.json", doc);
  return code;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"stationary", "curve", "eigen", "simulate", "rate", "certify"};
  return names;
}

int run_command(const std::string& name, const CommandContext& ctx) {
  static const std::map<std::string, std::function<int(const CommandContext&)>> table = {
      {"stationary", cmd_stationary}, {"curve", cmd_curve},
      {"eigen", cmd_eigen},           {"simulate", cmd_simulate},
      {"rate", cmd_rate},             {"certify", cmd_certify},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("command", "unknown command " + name);
  std::filesystem::create_directories(ctx.out);
  return it->second(ctx);
}

}  // namespace quenchlab::cli
