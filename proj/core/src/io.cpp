#include "quenchlab/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quenchlab {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no column " + name);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, table);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (!line.empty() && line.back() == ',') parts.emplace_back();
  return parts;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("bad number '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return x;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
      continue;
    }
    const auto parts = split(line);
    if (parts.size() != t.columns.size()) throw std::runtime_error("ragged csv row: " + line);
    std::vector<double> row;
    row.reserve(parts.size());
    for (const auto& p : parts) row.push_back(parse_number(p));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_csv(in);
}

namespace {

std::vector<std::string> coordinate_columns(const Grid& grid) {
  if (grid.dimension() == 1) return {"x"};
  return {"x", "y"};
}

void push_coordinates(std::vector<double>& row, const Grid& grid, std::size_t k) {
  const auto p = grid.node(k);
  row.push_back(p[0]);
  if (grid.dimension() == 2) row.push_back(p[1]);
}

}  // namespace

CsvTable fields_table(const Grid& grid, const ScalarField& w, const ScalarField& z) {
  CsvTable t;
  t.columns = coordinate_columns(grid);
  t.columns.insert(t.columns.end(), {"w", "z"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row;
    push_coordinates(row, grid, k);
    row.push_back(w[static_cast<Eigen::Index>(k)]);
    row.push_back(z[static_cast<Eigen::Index>(k)]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable curve_table(const CriticalCurve& curve) {
  CsvTable t;
  t.columns = {"lambda", "mu_gamma", "bracket_lo", "bracket_hi", "status"};
  for (const auto& s : curve.samples) {
    t.rows.push_back({s.lambda, s.mu.value(), s.mu.inside, s.mu.outside,
                      static_cast<double>(static_cast<int>(s.mu.status))});
    if (!s.mu.note.empty()) t.comments.push_back(fmt::format("lambda {}: {}", format_number(s.lambda), s.mu.note));
  }
  return t;
}

CsvTable eigenfunctions_table(const Grid& grid, const EigenPair& eig) {
  CsvTable t;
  t.columns = coordinate_columns(grid);
  t.columns.insert(t.columns.end(), {"phi1", "psi1"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row;
    push_coordinates(row, grid, k);
    row.push_back(eig.phi1[static_cast<Eigen::Index>(k)]);
    row.push_back(eig.psi1[static_cast<Eigen::Index>(k)]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.columns = {"t", "max_u", "max_v", "ut_l2", "vt_l2", "energy", "dist2_u", "dist2_v", "dt"};
  for (const auto& d : traj.diagnostics) {
    t.rows.push_back({d.t, d.max_u, d.max_v, d.ut_l2, d.vt_l2, d.energy, d.dist2_u, d.dist2_v, d.dt});
  }
  return t;
}

CsvTable snapshots_table(const Trajectory& traj, const Grid& grid) {
  CsvTable t;
  t.columns = {"t"};
  for (const auto& c : coordinate_columns(grid)) t.columns.push_back(c);
  t.columns.insert(t.columns.end(), {"u", "v"});
  for (const auto& s : traj.snapshots) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::vector<double> row{s.t};
      push_coordinates(row, grid, k);
      row.push_back(s.state.u[static_cast<Eigen::Index>(k)]);
      row.push_back(s.state.v[static_cast<Eigen::Index>(k)]);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

namespace {

// JSON has no inf or nan.
json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

std::string status_label(BracketStatus s) {
  switch (s) {
    case BracketStatus::Converged: return "Converged";
    case BracketStatus::AcceptedAtWidth: return "AcceptedAtWidth";
    case BracketStatus::BracketFailure: return "BracketFailure";
  }
  return "?";
}

}  // namespace

json to_json(const MembershipVerdict& v) {
  json j;
  j["verdict"] = verdict_name(v);
  if (const auto* in = std::get_if<InLambda>(&v)) {
    const auto& s = in->solution;
    j["lambda"] = s.params.lambda;
    j["mu"] = s.params.mu;
    j["iterations"] = s.iterations;
    j["final_change"] = number(s.final_change);
    j["residual_w"] = number(s.residual_w);
    j["residual_z"] = number(s.residual_z);
    j["max_w"] = s.w.maxCoeff();
    j["max_z"] = s.z.maxCoeff();
  } else if (const auto* out = std::get_if<NotInLambda>(&v)) {
    j["evidence"] = out->evidence == EscapeEvidence::AnalyticBound ? "AnalyticBound" : "IterateEscape";
    j["iterations"] = out->iterations;
    j["escape_max"] = number(out->escape_max);
    j["detail"] = out->detail;
  } else {
    const auto& u = std::get<Undetermined>(v);
    j["iterations"] = u.iterations;
    j["last_change"] = number(u.last_change);
    j["hint"] = u.hint;
  }
  return j;
}

json to_json(const Bracket& b) {
  return {{"value", number(b.value())},
          {"inside", number(b.inside)},
          {"outside", number(b.outside)},
          {"status", status_label(b.status)},
          {"note", b.note}};
}

json to_json(const EigenPair& e) {
  return {{"nu1", e.nu1}, {"residual", number(e.residual)}, {"iterations", e.iterations}};
}

json to_json(const NonexistenceBound& b) {
  return {{"lambda_bar", number(b.lambda_bar)}, {"mu_bar", number(b.mu_bar)}};
}

json to_json(const MassBoundReport& m) {
  return {{"w_mass", number(m.w_mass)}, {"z_mass", number(m.z_mass)}, {"w_bound", number(m.w_bound)},
          {"z_bound", number(m.z_bound)}, {"pass", m.pass}};
}

json trajectory_summary(const Trajectory& traj) {
  json j;
  j["status"] = status_name(traj.status);
  j["final_time"] = traj.final_time();
  j["accepted_steps"] = traj.accepted_steps;
  j["rejected_steps"] = traj.rejected_steps;
  const auto& last = traj.diagnostics.back();
  j["max_u"] = last.max_u;
  j["max_v"] = last.max_v;
  j["energy"] = number(last.energy);
  j["dist2_u"] = number(last.dist2_u);
  j["dist2_v"] = number(last.dist2_v);
  if (traj.quench) {
    j["t_q"] = traj.quench->t_q;
    j["quenched"] = component_name(traj.quench->which);
    j["t_q_extrapolated_estimate"] = number(traj.quench->t_estimate);
  }
  return j;
}

json to_json(const RateCertificate& c) {
  return {{"lambda1", number(c.lambda1)},
          {"nu1", number(c.nu1)},
          {"gamma_theorem", number(c.gamma_theorem)},
          {"gamma_proof", number(c.gamma_proof)},
          {"fitted_slope", number(c.fitted_slope)},
          {"t_onset", number(c.t_onset)},
          {"window", {number(c.t_lo), number(c.t_hi)}},
          {"window_points", c.window_points},
          {"C0_empirical", number(c.C0_empirical)},
          {"pass", c.pass},
          {"discrepancy_note", c.discrepancy_note}};
}

json to_json(const QuenchBound& b) {
  return {{"applicable_u", b.applicable_u}, {"applicable_v", b.applicable_v},
          {"F0", number(b.F0)},             {"G0", number(b.G0)},
          {"K_alpha", number(b.K_alpha)},   {"K_beta", number(b.K_beta)},
          {"threshold_u", number(b.threshold_u)}, {"threshold_v", number(b.threshold_v)},
          {"bound_u", number(b.bound_u)},   {"bound_v", number(b.bound_v)}};
}

json to_json(const QuenchVerification& v) {
  return {{"outcome", outcome_name(v.outcome)},
          {"pass", v.pass},
          {"t_q", number(v.t_q)},
          {"limit", number(v.limit)},
          {"note", v.note}};
}

json to_json(const CaseReport& r) {
  json j;
  j["case"] = case_name(r.which);
  j["membership"] = to_json(r.verdict);
  j["quench_bound"] = to_json(r.bound);
  j["second_solution_found"] = r.second.has_value();
  if (r.second) {
    j["second_max_w"] = r.second->w.maxCoeff();
    j["second_max_z"] = r.second->z.maxCoeff();
  }
  j["evidence"] = r.evidence;
  return j;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace quenchlab
