#pragma once

// Reference computations that share no code with the library solvers.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <functional>

namespace oracle {

// Scalar pull-in value of -u'' = lambda (1-u)^-2 on (0,1), u(0)=u(1)=0.
// Shoots U'' = -(1-U)^-2, U(0) = s, U'(0) = 0 with RK4 until U = 0 at xi = X(s);
// the branch through max u = s has lambda(s) = 4 X(s)^2.
double scalar_branch_lambda(double s, double dxi = 1e-5);
struct PullIn {
  double lambda = 0.0;
  double s = 0.0;  // max u at the fold
};
PullIn scalar_pull_in();

// Eigenvalue of smallest real part from the full dense spectrum.
std::complex<double> smallest_real_eigenvalue(const Eigen::SparseMatrix<double>& m);

// Adaptive Simpson; the tolerance is relative to the first coarse estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12);

}  // namespace oracle
