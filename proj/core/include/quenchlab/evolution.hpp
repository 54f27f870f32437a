#pragma once

// Time integration of
//   u_t - Delta u = lambda alpha f(v),  v_t - Delta v = mu beta g(u)
// by IMEX Euler with step-doubling error control, quench detection, and
// the energy, ordering and ratio diagnostics along trajectories.

#include "quenchlab/grid.hpp"
#include "quenchlab/model.hpp"
#include "quenchlab/stationary.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quenchlab {

struct StepperConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double safety = 0.9;
  double tol_step = 1e-6;    // sup-norm local error per step
  double delta_q = 1e-3;     // quench when max(u, v) >= 1 - delta_q
  double quench_cap = 0.25;  // dt <= quench_cap * (1 - max)^2
  int snapshot_stride = 0;   // 0 keeps only the first and last state
  bool adaptive = true;      // false: single steps of dt_init
};

// Throws PreconditionViolation on an inconsistent config.
void validate(const StepperConfig& cfg);

// One IMEX Euler step: (I - dt Delta_h) u+ = u + dt lambda alpha f(v), same for v.
// Throws DomainError if the input or the result reaches 1.
PairField step(const Discretization& disc, const Model& model, const ParamPoint& params,
               const PairField& state, double dt);

enum class TerminalStatus { ReachedHorizon, Quenched, StepUnderflow };
enum class QuenchedComponent { U, V, Both };

std::string status_name(TerminalStatus s);
std::string component_name(QuenchedComponent c);

struct StepDiagnostics {
  double t = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
  double ut_l2 = 0.0;  // difference quotients of the accepted step
  double vt_l2 = 0.0;
  double energy = 0.0;
  double dist2_u = 0.0;  // squared L2 distance to the reference, NaN without one
  double dist2_v = 0.0;
  double dt = 0.0;             // 0 on the initial row
  double ut_vt_integral = 0.0;  // cell sum of u_t v_t
};

struct Snapshot {
  double t = 0.0;
  PairField state;
};

struct QuenchInfo {
  double t_q = 0.0;  // first time max(u, v) reaches 1 - delta_q
  QuenchedComponent which = QuenchedComponent::Both;
  // Extrapolation of the time at which the max would reach 1, assuming the
  // last growth rate scales with the nonlinearity. An estimate only.
  double t_estimate = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> diagnostics;  // row 0 is the initial state
  TerminalStatus status = TerminalStatus::ReachedHorizon;
  std::optional<QuenchInfo> quench;
  int accepted_steps = 0;
  int rejected_steps = 0;

  const PairField& final_state() const { return snapshots.back().state; }
  double final_time() const { return snapshots.back().t; }
};

// Runs to the horizon, to quench, or until the step size falls below dt_min.
// The reference pair, when given, fills the distance columns.
Trajectory simulate(const Discretization& disc, const Model& model, const ParamPoint& params,
                    const PairField& initial, const StepperConfig& cfg, double horizon,
                    const PairField* reference = nullptr);

// E = integral(grad u . grad v - lambda alpha F(v) - mu beta G(u)); the
// gradient term is h u^T (-Delta_h) v by summation by parts, and the
// potential uses the same plain cell sum so that the discrete identity
// dE/dt + 2 sum(u_t v_t) h = O(dt) holds without boundary terms.
double lyapunov_energy(const Discretization& disc, const Model& model, const ParamPoint& params,
                       const PairField& state);

struct LyapunovReport {
  // Per accepted step: (E_k - E_{k-1}) / dt_k + 2 h sum(u_t v_t).
  std::vector<double> residuals;
  double max_residual = 0.0;
  // max over steps of |residual| / (dt + h^2)
  double observed_constant = 0.0;
  bool energy_nonincreasing = true;  // up to max(64, nodes) ulps of |E|
};

LyapunovReport lyapunov_residuals(const Trajectory& traj, const Grid& grid);

// Flags compare against 64 ulps of the current max; worst_* are raw.
struct MonotonicityReport {
  bool nondecreasing = true;
  bool nonincreasing = true;
  double worst_decrease = 0.0;  // largest drop of max(u) or max(v) between rows
  double worst_increase = 0.0;
};

MonotonicityReport max_monotonicity(const Trajectory& traj);

struct OrderingReport {
  int shared_times = 0;
  double worst_violation = 0.0;  // max over shared times of max(low - high), both components
  bool ordered(double tol = 1e-10) const { return worst_violation <= tol; }
};

// Compares snapshots taken at identical times.
OrderingReport compare_ordering(const Trajectory& low, const Trajectory& high);

struct RatioConstants {
  std::optional<double> c1;
  std::optional<double> c2;
  double sqrt_term_1 = 0.0;
  double sqrt_term_2 = 0.0;
  std::optional<double> ratio_term_1;  // empty when the denominator vanishes somewhere
  std::optional<double> ratio_term_2;
  std::string note;
};

// c1 = min{ sqrt((lambda/mu) inf(alpha/beta) f'(0)/g'(|w|_inf)),
//           inf (Delta u0 + lambda alpha f(v0)) / (Delta v0 + mu beta g(u0)) },
// c2 symmetric with |z|_inf. A ratio term whose denominator vanishes at some
// node is dropped together with its constant.
RatioConstants ratio_constants(const Discretization& disc, const Model& model,
                               const ParamPoint& params, const PairField& initial,
                               const StationarySolution& minimal);

struct RatioCheck {
  double worst_u = 0.0;  // min over snapshots and nodes of u_t - c1 v_t
  double worst_v = 0.0;  // min of v_t - c2 u_t
  bool pass = false;
};

// Difference quotients between consecutive snapshots; needs snapshot_stride 1
// for a step-by-step check.
RatioCheck check_ratio_bound(const Trajectory& traj, const RatioConstants& c, double tol);

}  // namespace quenchlab
