#include "quenchlab/spectra.hpp"

#include "quenchlab/errors.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace quenchlab {

LinearizedOperator::LinearizedOperator(const Discretization& disc,
                                       const ScalarField& coupling_phi_psi,
                                       const ScalarField& coupling_psi_phi)
    : n_(disc.grid.size()), grid_(disc.grid), upper_(coupling_phi_psi), lower_(coupling_psi_phi) {
  const auto n = static_cast<Eigen::Index>(n_);
  if (upper_.size() != n || lower_.size() != n) {
    throw GridMismatch("coupling vectors do not match the grid");
  }
  const Eigen::SparseMatrix<double>& a = disc.laplacian.sparse();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(2 * a.nonZeros() + 2 * n));
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::Index offset = pass * n;
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
        entries.emplace_back(it.row() + offset, it.col() + offset, it.value());
      }
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (upper_[k] != 0.0) entries.emplace_back(k, n + k, upper_[k]);
    if (lower_[k] != 0.0) entries.emplace_back(n + k, k, lower_[k]);
  }
  matrix_.resize(2 * n, 2 * n);
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
}

LinearizedOperator assemble_linearization(const Discretization& disc, const Model& model,
                                          const ParamPoint& params, const ScalarField& w,
                                          const ScalarField& z, double coupling_scale) {
  const auto n = static_cast<Eigen::Index>(disc.grid.size());
  if (w.size() != n || z.size() != n) throw GridMismatch("solution does not match the grid");
  if (std::max(w.maxCoeff(), z.maxCoeff()) >= 1.0) {
    throw DomainError("linearization needs max(w, z) < 1");
  }
  const ScalarField alpha = model.alpha.sample(disc.grid);
  const ScalarField beta = model.beta.sample(disc.grid);
  ScalarField upper(n);
  ScalarField lower(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    upper[k] = -coupling_scale * params.lambda * alpha[k] * model.f.d1(z[k]);
    lower[k] = -coupling_scale * params.mu * beta[k] * model.g.d1(w[k]);
  }
  return LinearizedOperator(disc, upper, lower);
}

namespace {

using SparseLU = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

struct PowerResult {
  double nu = 0.0;
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool sign_change = false;
  bool converged = false;
};

// Inverse power iteration on (M + shift I). Stops early on a significant
// sign change, which cannot happen when the inverse is nonnegative.
PowerResult inverse_power(const Eigen::SparseMatrix<double>& m, double shift,
                          const SpectraOptions& opts) {
  Eigen::SparseMatrix<double> shifted = m;
  if (shift != 0.0) {
    for (Eigen::Index k = 0; k < shifted.rows(); ++k) shifted.coeffRef(k, k) += shift;
  }
  SparseLU lu;
  lu.compute(shifted);
  PowerResult out;
  if (lu.info() != Eigen::Success) {
    out.sign_change = true;
    return out;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Ones(m.rows());
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd y = lu.solve(x);
    if (!y.allFinite()) {
      out.sign_change = true;
      return out;
    }
    const double scale = y.cwiseAbs().maxCoeff();
    if (y.sum() < 0.0) y = -y;
    // Round-off-sized negatives are folded back; anything larger is a genuine
    // sign change of the iterate.
    if (y.minCoeff() < -1e-12 * scale) {
      out.sign_change = true;
      out.iterations = it;
      return out;
    }
    y = y.cwiseAbs();
    const double mu = y.dot(x) / y.dot(y);
    const double residual = (x - mu * y).lpNorm<Eigen::Infinity>() / x.lpNorm<Eigen::Infinity>();
    x = y / scale;
    out.nu = mu;
    out.residual = residual;
    out.iterations = it;
    if (residual <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

}  // namespace

EigenPair principal_eigenpair(const LinearizedOperator& op, const SpectraOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.block_size());
  PowerResult direct = inverse_power(op.matrix(), 0.0, opts);

  const bool positive_limit =
      !direct.sign_change && direct.converged && direct.nu > 0.0 && direct.x.minCoeff() > 0.0;
  if (!positive_limit) {
    if (!direct.sign_change && !direct.converged) {
      throw NonConvergence(fmt::format("inverse iteration stalled at residual {:.3e} after {} steps",
                                       direct.residual, direct.iterations));
    }
    // Collatz-Wielandt with the Laplacian eigenvector in both blocks gives
    // nu1 >= lambda1 - max coupling, so this shift makes M + shift I an M-matrix.
    const double coupling =
        std::max(op.upper_coupling().cwiseAbs().maxCoeff(), op.lower_coupling().cwiseAbs().maxCoeff());
    const double shift = coupling + 1.0;
    PowerResult shifted = inverse_power(op.matrix(), shift, opts);
    double nu_estimate = std::nan("");
    if (shifted.converged && !shifted.sign_change) nu_estimate = shifted.nu - shift;
    throw IndefiniteOperator(
        fmt::format("linearized operator is not a nonsingular M-matrix (nu1 = {:.17g})", nu_estimate),
        nu_estimate);
  }

  EigenPair out;
  out.nu1 = direct.nu;
  out.residual = direct.residual;
  out.iterations = direct.iterations;
  out.phi1 = direct.x.head(n);
  out.psi1 = direct.x.tail(n);
  const double mass = integrate(out.phi1.cwiseProduct(out.phi1) + out.psi1.cwiseProduct(out.psi1),
                                op.grid());
  const double norm = std::sqrt(mass);
  out.phi1 /= norm;
  out.psi1 /= norm;
  return out;
}

}  // namespace quenchlab
