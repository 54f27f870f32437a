#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace oracle {

namespace {

struct State {
  double u;
  double p;
};

State rhs(const State& s) { return {s.p, -1.0 / ((1.0 - s.u) * (1.0 - s.u))}; }

State rk4(const State& s, double h) {
  const State k1 = rhs(s);
  const State k2 = rhs({s.u + 0.5 * h * k1.u, s.p + 0.5 * h * k1.p});
  const State k3 = rhs({s.u + 0.5 * h * k2.u, s.p + 0.5 * h * k2.p});
  const State k4 = rhs({s.u + h * k3.u, s.p + h * k3.p});
  return {s.u + h / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          s.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double scalar_branch_lambda(double s, double dxi) {
  State st{s, 0.0};
  double xi = 0.0;
  while (true) {
    const State next = rk4(st, dxi);
    if (next.u <= 0.0) {
      // Root of the cubic Hermite interpolant on the last step, by bisection.
      const double h = dxi;
      auto hermite = [&](double t) {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * st.u + (t3 - 2 * t2 + t) * h * st.p +
               (-2 * t3 + 3 * t2) * next.u + (t3 - t2) * h * next.p;
      };
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (hermite(mid) > 0.0 ? lo : hi) = mid;
      }
      const double X = xi + 0.5 * (lo + hi) * h;
      return 4.0 * X * X;
    }
    st = next;
    xi += dxi;
  }
}

PullIn scalar_pull_in() {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.05, b = 0.9;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = scalar_branch_lambda(c), fd = scalar_branch_lambda(d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = scalar_branch_lambda(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = scalar_branch_lambda(d);
    }
  }
  const double s = 0.5 * (a + b);
  return {scalar_branch_lambda(s), s};
}

std::complex<double> smallest_real_eigenvalue(const Eigen::SparseMatrix<double>& m) {
  const Eigen::MatrixXd dense(m);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
  const auto& ev = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev[i].real() < ev[best].real()) best = i;
  }
  return ev[best];
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, rel_tol * std::abs(whole), 40);
}

}  // namespace oracle
