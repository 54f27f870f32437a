#pragma once

// Structured Dirichlet grids on intervals and rectangles, the 5/3-point
// Laplacian, linear solves and quadrature.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace quenchlab {

// Values at interior nodes. Node k of a 2D grid is (i, j) with k = i + nx*j.
using ScalarField = Eigen::VectorXd;

struct Extent {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

class Grid {
 public:
  static Grid interval(double a, double b, int n_interior);
  static Grid rectangle(Extent x, int nx, Extent y, int ny);

  int dimension() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double hx() const { return hx_; }
  double hy() const { return hy_; }
  // hx in 1D, hx*hy in 2D.
  double cell_measure() const { return dim_ == 1 ? hx_ : hx_ * hy_; }
  Extent x_extent() const { return x_; }
  Extent y_extent() const { return y_; }
  double measure() const { return dim_ == 1 ? x_.length() : x_.length() * y_.length(); }

  double x(int i) const { return x_.lo + (i + 1) * hx_; }
  double y(int j) const { return dim_ == 1 ? 0.0 : y_.lo + (j + 1) * hy_; }
  std::array<double, 2> node(std::size_t k) const;
  double distance_to_boundary(std::size_t k) const;

  const ScalarField& weights() const { return weights_; }

  bool same_shape(const Grid& other) const;

 private:
  Grid() = default;
  void build_weights();

  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  Extent x_;
  Extent y_{0.0, 0.0};
  double hx_ = 0.0;
  double hy_ = 1.0;
  ScalarField weights_;
};

// Samples fn(x, y) at every interior node (y = 0 in 1D).
ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn);

// Composite quadrature with the implicit zero boundary values.
double integrate(const ScalarField& field, const Grid& grid);
// Squared grid L2 norm.
double norm2_squared(const ScalarField& field, const Grid& grid);

struct SolveOptions {
  double tol = 1e-12;  // relative residual, iterative path only
  int max_iter = 0;    // 0: 10 * number of unknowns
};

// -Delta_h with homogeneous Dirichlet data folded in. Immutable.
class DiscreteOperator {
 public:
  explicit DiscreteOperator(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  ScalarField apply(const ScalarField& u) const;
  // Solves (shift * I - Delta_h) u = rhs for shift >= 0.
  ScalarField solve(const ScalarField& rhs, double shift = 0.0,
                    const SolveOptions& opts = {}) const;

  double diagonal() const { return diag_; }
  const Eigen::SparseMatrix<double>& sparse() const { return matrix_; }

 private:
  ScalarField thomas(const ScalarField& rhs, double shift) const;
  ScalarField conjugate_gradient(const ScalarField& rhs, double shift,
                                 const SolveOptions& opts) const;

  Grid grid_;
  double diag_;
  double off_x_;
  double off_y_;
  Eigen::SparseMatrix<double> matrix_;
};

DiscreteOperator assemble_laplacian(const Grid& grid);

ScalarField solve_poisson(const DiscreteOperator& op, const ScalarField& rhs,
                          const SolveOptions& opts = {});

struct LaplacianEigenpair {
  double lambda1 = 0.0;
  ScalarField phi;  // positive, integrate(phi) == 1
  double residual = 0.0;
  int iterations = 0;
};

struct EigenIterationOptions {
  double tol = 1e-10;
  int max_iter = 2000;
};

// Smallest eigenvalue of -Delta_h and its Perron eigenvector by inverse
// power iteration. Throws NonConvergence at the iteration cap.
LaplacianEigenpair principal_laplacian_eigenpair(const DiscreteOperator& op, const Grid& grid,
                                                 const EigenIterationOptions& opts = {});

// Grid, operator and first eigenpair bundled once; most solvers need all three.
struct Discretization {
  explicit Discretization(const Grid& g);

  Grid grid;
  DiscreteOperator laplacian;
  LaplacianEigenpair eigen;
};

}  // namespace quenchlab
