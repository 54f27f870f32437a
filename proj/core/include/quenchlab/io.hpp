#pragma once

// CSV tables with '#' comment lines and 17 significant digits, and JSON
// views of the solver results.

#include "quenchlab/certificates.hpp"
#include "quenchlab/evolution.hpp"
#include "quenchlab/spectra.hpp"
#include "quenchlab/stationary.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace quenchlab {

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> comments;  // written as "# ..." before the header
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Throws std::out_of_range for an unknown column.
  std::size_t column(const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
// Throws std::runtime_error on ragged rows or unparsable numbers.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

// x[,y],w,z
CsvTable fields_table(const Grid& grid, const ScalarField& w, const ScalarField& z);
// lambda,mu_gamma,bracket_lo,bracket_hi,status (0 converged, 1 accepted at width, 2 failure)
CsvTable curve_table(const CriticalCurve& curve);
// x[,y],phi1,psi1
CsvTable eigenfunctions_table(const Grid& grid, const EigenPair& eig);
// t,max_u,max_v,ut_l2,vt_l2,energy,dist2_u,dist2_v,dt
CsvTable trajectory_table(const Trajectory& traj);
// t,x[,y],u,v
CsvTable snapshots_table(const Trajectory& traj, const Grid& grid);

nlohmann::json to_json(const MembershipVerdict& v);
nlohmann::json to_json(const Bracket& b);
nlohmann::json to_json(const EigenPair& e);
nlohmann::json to_json(const NonexistenceBound& b);
nlohmann::json to_json(const MassBoundReport& m);
nlohmann::json trajectory_summary(const Trajectory& traj);
nlohmann::json to_json(const RateCertificate& c);
nlohmann::json to_json(const QuenchBound& b);
nlohmann::json to_json(const QuenchVerification& v);
nlohmann::json to_json(const CaseReport& r);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace quenchlab
