#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/nullspace.hpp"

namespace testhelpers {

inline std::mt19937& rng() {
  static std::mt19937 gen(20240811u);
  return gen;
}

inline double uniform(double a, double b) {
  std::uniform_real_distribution<double> dist(a, b);
  return dist(rng());
}

inline double gauss() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng());
}

// Independent natural cubic spline oracle (tridiagonal solve), used against
// the r^3-kernel RBF fit.
class NaturalSpline {
 public:
  NaturalSpline(const std::vector<double>& x, const std::vector<double>& y)
      : x_(x), y_(y) {
    const int n = static_cast<int>(x.size());
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // Thomas algorithm on the interior unknowns (natural: m_0 = m_{n-1} = 0)
    for (int i = 2; i < n - 1; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    for (int i = n - 2; i >= 1; --i) {
      m_[i] = (r[i] - c[i] * (i + 1 <= n - 2 ? m_[i + 1] : 0.0)) / b[i];
    }
  }

  double operator()(double t) const {
    const int n = static_cast<int>(x_.size());
    int i = 0;
    while (i < n - 2 && t > x_[i + 1]) ++i;
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_;
  std::vector<double> m_;
};

// Biorthogonality matrix <m_k, m*_n> by tensor quadrature; d = 1 uses the
// full grid, d = 2 a midpoint quadrant grid with parity assembly.
inline Eigen::MatrixXd biorthogonality_matrix(const radonreg::IsoWindow& win, int n0,
                                              double R, double step) {
  using namespace radonreg;
  const auto basis = multi_indices(win.dim(), n0);
  const int K = static_cast<int>(basis.size());
  Eigen::MatrixXd B(K, K);
  if (win.dim() == 1) {
    std::vector<double> g;
    for (double t = -R; t <= R; t += step) g.push_back(t);
    for (int nn = 0; nn < K; ++nn) {
      Eigen::MatrixXd mk = win.dual_basis_grid(basis[nn], g);
      for (int kk = 0; kk < K; ++kk) {
        double s = 0.0;
        Eigen::VectorXd x(1);
        for (std::size_t i = 0; i < g.size(); ++i) {
          x[0] = g[i];
          s += mk(static_cast<int>(i), 0) * monomial_eval(basis[kk], x) * step;
        }
        B(kk, nn) = s;
      }
    }
    return B;
  }
  // d = 2: quadrant midpoint grid; odd per-axis parity pairs vanish exactly.
  std::vector<double> g;
  for (double t = step / 2; t <= R; t += step) g.push_back(t);
  const int N = static_cast<int>(g.size());
  for (int nn = 0; nn < K; ++nn) {
    Eigen::MatrixXd mk = win.dual_basis_grid(basis[nn], g);
    for (int kk = 0; kk < K; ++kk) {
      const int px = basis[kk].k[0] + basis[nn].k[0];
      const int py = basis[kk].k[1] + basis[nn].k[1];
      if (px % 2 == 1 || py % 2 == 1) {
        B(kk, nn) = 0.0;  // antipodal cancellation, exact on symmetric grids
        continue;
      }
      double s = 0.0;
      Eigen::VectorXd x(2);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          x << g[i], g[j];
          s += mk(i, j) * monomial_eval(basis[kk], x);
        }
      B(kk, nn) = 4.0 * s * step * step;
    }
  }
  return B;
}

}  // namespace testhelpers
