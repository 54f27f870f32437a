#include "quenchlab/grid.hpp"

#include "quenchlab/errors.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <string>

namespace quenchlab {

namespace {

// Trapezoid with the boundary cell's half attributed to its interior
// neighbour: constants integrate exactly, boundary-vanishing integrands stay
// second order.
double axis_weight(int i, int n, double h) {
  double w = h;
  if (i == 0) w += 0.5 * h;
  if (i == n - 1) w += 0.5 * h;
  return w;
}

void require_field(const ScalarField& field, const Grid& grid) {
  if (static_cast<std::size_t>(field.size()) != grid.size()) {
    throw GridMismatch("field has " + std::to_string(field.size()) + " values, grid has " +
                       std::to_string(grid.size()) + " interior nodes");
  }
}

}  // namespace

Grid Grid::interval(double a, double b, int n_interior) {
  if (!(b > a) || n_interior < 1) {
    throw PreconditionViolation("interval grid needs b > a and at least one interior node");
  }
  Grid g;
  g.dim_ = 1;
  g.nx_ = n_interior;
  g.ny_ = 1;
  g.x_ = {a, b};
  g.hx_ = (b - a) / (n_interior + 1);
  g.build_weights();
  return g;
}

Grid Grid::rectangle(Extent x, int nx, Extent y, int ny) {
  if (!(x.hi > x.lo) || !(y.hi > y.lo) || nx < 1 || ny < 1) {
    throw PreconditionViolation("rectangle grid needs positive extents and interior nodes");
  }
  Grid g;
  g.dim_ = 2;
  g.nx_ = nx;
  g.ny_ = ny;
  g.x_ = x;
  g.y_ = y;
  g.hx_ = x.length() / (nx + 1);
  g.hy_ = y.length() / (ny + 1);
  g.build_weights();
  return g;
}

void Grid::build_weights() {
  weights_.resize(static_cast<Eigen::Index>(size()));
  for (int j = 0; j < ny_; ++j) {
    const double wy = dim_ == 1 ? 1.0 : axis_weight(j, ny_, hy_);
    for (int i = 0; i < nx_; ++i) {
      weights_[i + nx_ * j] = axis_weight(i, nx_, hx_) * wy;
    }
  }
}

std::array<double, 2> Grid::node(std::size_t k) const {
  const int i = static_cast<int>(k % nx_);
  const int j = static_cast<int>(k / nx_);
  return {x(i), y(j)};
}

double Grid::distance_to_boundary(std::size_t k) const {
  const auto [px, py] = node(k);
  double d = std::min(px - x_.lo, x_.hi - px);
  if (dim_ == 2) d = std::min({d, py - y_.lo, y_.hi - py});
  return d;
}

bool Grid::same_shape(const Grid& other) const {
  return dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ && x_.lo == other.x_.lo &&
         x_.hi == other.x_.hi && y_.lo == other.y_.lo && y_.hi == other.y_.hi;
}

ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn) {
  ScalarField out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [px, py] = grid.node(k);
    out[static_cast<Eigen::Index>(k)] = fn(px, py);
  }
  return out;
}

double integrate(const ScalarField& field, const Grid& grid) {
  require_field(field, grid);
  return grid.weights().dot(field);
}

double norm2_squared(const ScalarField& field, const Grid& grid) {
  require_field(field, grid);
  return grid.weights().dot(field.cwiseProduct(field));
}

DiscreteOperator::DiscreteOperator(const Grid& grid) : grid_(grid) {
  const double ix = 1.0 / (grid.hx() * grid.hx());
  off_x_ = -ix;
  if (grid.dimension() == 1) {
    diag_ = 2.0 * ix;
    off_y_ = 0.0;
  } else {
    const double iy = 1.0 / (grid.hy() * grid.hy());
    diag_ = 2.0 * ix + 2.0 * iy;
    off_y_ = -iy;
  }

  const int nx = grid.nx();
  const int ny = grid.ny();
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) * (grid.dimension() == 1 ? 3 : 5));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = i + nx * j;
      entries.emplace_back(k, k, diag_);
      if (i > 0) entries.emplace_back(k, k - 1, off_x_);
      if (i + 1 < nx) entries.emplace_back(k, k + 1, off_x_);
      if (grid.dimension() == 2) {
        if (j > 0) entries.emplace_back(k, k - nx, off_y_);
        if (j + 1 < ny) entries.emplace_back(k, k + nx, off_y_);
      }
    }
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
}

ScalarField DiscreteOperator::apply(const ScalarField& u) const {
  require_field(u, grid_);
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  ScalarField out(u.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = i + nx * j;
      double acc = diag_ * u[k];
      if (i > 0) acc += off_x_ * u[k - 1];
      if (i + 1 < nx) acc += off_x_ * u[k + 1];
      if (ny > 1 || grid_.dimension() == 2) {
        if (j > 0) acc += off_y_ * u[k - nx];
        if (j + 1 < ny) acc += off_y_ * u[k + nx];
      }
      out[k] = acc;
    }
  }
  return out;
}

ScalarField DiscreteOperator::solve(const ScalarField& rhs, double shift,
                                    const SolveOptions& opts) const {
  require_field(rhs, grid_);
  if (!rhs.allFinite()) throw SolverBreakdown("right-hand side is not finite");
  if (shift < 0.0) throw PreconditionViolation("negative shift makes the system indefinite");
  if (grid_.dimension() == 1) return thomas(rhs, shift);
  return conjugate_gradient(rhs, shift, opts);
}

// Constant-coefficient tridiagonal elimination. All coefficients entering the
// sweeps are nonnegative for a nonnegative rhs, so the result is exactly
// nonnegative in floating point.
ScalarField DiscreteOperator::thomas(const ScalarField& rhs, double shift) const {
  const Eigen::Index n = rhs.size();
  const double b = diag_ + shift;
  const double a = off_x_;
  ScalarField cprime(n);
  ScalarField x(n);
  double denom = b;
  cprime[0] = a / denom;
  x[0] = rhs[0] / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = b - a * cprime[i - 1];
    if (!(denom > 0.0)) throw SolverBreakdown("tridiagonal elimination lost its pivot");
    cprime[i] = a / denom;
    x[i] = (rhs[i] - a * x[i - 1]) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= cprime[i] * x[i + 1];
  return x;
}

ScalarField DiscreteOperator::conjugate_gradient(const ScalarField& rhs, double shift,
                                                 const SolveOptions& opts) const {
  if (rhs.isZero(0.0)) return ScalarField::Zero(rhs.size());
  Eigen::SparseMatrix<double> system = matrix_;
  if (shift != 0.0) {
    for (Eigen::Index k = 0; k < system.rows(); ++k) system.coeffRef(k, k) += shift;
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(opts.tol);
  cg.setMaxIterations(opts.max_iter > 0 ? opts.max_iter : 10 * static_cast<int>(rhs.size()));
  cg.compute(system);
  ScalarField x = cg.solve(rhs);
  if (cg.info() != Eigen::Success || cg.error() > opts.tol) {
    throw SolverBreakdown("conjugate gradient stopped at relative residual " +
                          std::to_string(cg.error()) + " after " +
                          std::to_string(cg.iterations()) + " iterations");
  }
  return x;
}

DiscreteOperator assemble_laplacian(const Grid& grid) { return DiscreteOperator(grid); }

ScalarField solve_poisson(const DiscreteOperator& op, const ScalarField& rhs,
                          const SolveOptions& opts) {
  return op.solve(rhs, 0.0, opts);
}

LaplacianEigenpair principal_laplacian_eigenpair(const DiscreteOperator& op, const Grid& grid,
                                                 const EigenIterationOptions& opts) {
  if (!grid.same_shape(op.grid())) throw GridMismatch("operator was assembled on another grid");

  // Start from the positive product of sines; any positive vector works.
  ScalarField x = sample(grid, [&](double px, double py) {
    const double sx = std::sin(M_PI * (px - grid.x_extent().lo) / grid.x_extent().length());
    if (grid.dimension() == 1) return sx;
    return sx * std::sin(M_PI * (py - grid.y_extent().lo) / grid.y_extent().length());
  });
  x /= x.lpNorm<Eigen::Infinity>();

  LaplacianEigenpair out;
  for (int it = 1; it <= opts.max_iter; ++it) {
    ScalarField y = op.solve(x);
    // Perron structure: A^{-1} is entrywise positive. Anything else is round-off.
    const double floor = y.maxCoeff() * 1e-300;
    y = y.cwiseMax(floor);
    // A y = x, so y.x / y.y is the Rayleigh quotient of y.
    const double lambda = y.dot(x) / y.dot(y);
    const double residual = (x - lambda * y).lpNorm<Eigen::Infinity>() / x.lpNorm<Eigen::Infinity>();
    x = y / y.lpNorm<Eigen::Infinity>();
    if (residual <= opts.tol) {
      out.lambda1 = lambda;
      out.residual = residual;
      out.iterations = it;
      out.phi = x / integrate(x, grid);
      return out;
    }
  }
  throw NonConvergence("inverse power iteration for the Laplacian did not converge");
}

Discretization::Discretization(const Grid& g)
    : grid(g), laplacian(g), eigen(principal_laplacian_eigenpair(laplacian, g)) {}

}  // namespace quenchlab
