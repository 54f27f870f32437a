#pragma once

// Linearization of the stationary system at a solution (w, z):
//   [ -Delta_h                  -lambda diag(alpha f'(z)) ] [phi]       [phi]
//   [ -mu diag(beta g'(w))      -Delta_h                  ] [psi] = nu  [psi]
// and its principal eigenpair.

#include "quenchlab/grid.hpp"
#include "quenchlab/model.hpp"
#include "quenchlab/stationary.hpp"

#include <Eigen/Sparse>

namespace quenchlab {

class LinearizedOperator {
 public:
  // Stacked unknowns: the first grid.size() entries are phi, the rest psi.
  // coupling_scale multiplies both off-diagonal blocks; 0 decouples them.
  LinearizedOperator(const Discretization& disc, const ScalarField& coupling_phi_psi,
                     const ScalarField& coupling_psi_phi);

  std::size_t block_size() const { return n_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  // Off-diagonal block entries, -lambda alpha f'(z) and -mu beta g'(w).
  const ScalarField& upper_coupling() const { return upper_; }
  const ScalarField& lower_coupling() const { return lower_; }
  const Grid& grid() const { return grid_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix_ * x; }

 private:
  std::size_t n_;
  Grid grid_;
  ScalarField upper_;
  ScalarField lower_;
  Eigen::SparseMatrix<double> matrix_;
};

// Throws DomainError if w or z reaches 1.
LinearizedOperator assemble_linearization(const Discretization& disc, const Model& model,
                                          const ParamPoint& params, const ScalarField& w,
                                          const ScalarField& z, double coupling_scale = 1.0);

inline LinearizedOperator assemble_linearization(const Discretization& disc, const Model& model,
                                                 const StationarySolution& sol,
                                                 double coupling_scale = 1.0) {
  return assemble_linearization(disc, model, sol.params, sol.w, sol.z, coupling_scale);
}

struct EigenPair {
  double nu1 = 0.0;
  ScalarField phi1;  // positive; integrate(phi1^2 + psi1^2) == 1
  ScalarField psi1;
  double residual = 0.0;  // |x - nu L^{-1} x|_inf / |x|_inf
  int iterations = 0;
};

struct SpectraOptions {
  double tol = 1e-10;
  int max_iter = 20000;
};

// Inverse power iteration; L^{-1} is entrywise positive exactly when nu1 > 0.
// Throws IndefiniteOperator (carrying nu1 from a shifted iteration) when the
// limit has nu <= 0 or changes sign, NonConvergence at the iteration cap.
EigenPair principal_eigenpair(const LinearizedOperator& op, const SpectraOptions& opts = {});

}  // namespace quenchlab
