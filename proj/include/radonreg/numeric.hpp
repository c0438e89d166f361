#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace radonreg {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1, 1], nodes by Newton iteration.
// ---------------------------------------------------------------------------

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, p2 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      const double dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p1 = 1.0;
    p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
    }
    const double dp = n * (x * p1 - p2) / (x * x - 1.0);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[n - 1 - i] = q.weights[i];
  }
  return q;
}

// Cached nodes on [-1, 1]; sizes are bucketed upward to multiples of 32 so the
// cache stays small.
inline const QuadRule& gauss_legendre_cached(int n) {
  n = ((n + 31) / 32) * 32;
  thread_local std::vector<std::pair<int, QuadRule>> cache;
  for (auto& e : cache)
    if (e.first == n) return e.second;
  cache.emplace_back(n, gauss_legendre(n));
  return cache.back().second;
}

// Same rule mapped to [a, b].
inline QuadRule gauss_legendre(int n, double a, double b) {
  const QuadRule& base = gauss_legendre_cached(n);
  QuadRule q = base;
  const int nn = static_cast<int>(q.nodes.size());
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < nn; ++i) {
    q.nodes[i] = c + h * q.nodes[i];
    q.weights[i] *= h;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Uniformly sampled function with Catmull-Rom cubic interpolation.
// ---------------------------------------------------------------------------

class UniformTable {
 public:
  UniformTable() = default;
  UniformTable(double t0, double dt, std::vector<double> values)
      : t0_(t0), dt_(dt), v_(std::move(values)) {
    if (v_.size() < 4) throw std::invalid_argument("UniformTable: need >= 4 samples");
  }

  double t_min() const { return t0_; }
  double t_max() const { return t0_ + dt_ * (static_cast<double>(v_.size()) - 1.0); }
  double dt() const { return dt_; }
  const std::vector<double>& values() const { return v_; }
  bool empty() const { return v_.empty(); }

  // Cubic interpolation; returns 0 outside the sampled range.
  double operator()(double t) const {
    const double u = (t - t0_) / dt_;
    const auto n = static_cast<std::ptrdiff_t>(v_.size());
    if (u < 0.0 || u > static_cast<double>(n - 1)) return 0.0;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 1, n - 3);
    const double x = u - static_cast<double>(i);
    const double ym1 = v_[i - 1], y0 = v_[i], y1 = v_[i + 1], y2 = v_[i + 2];
    const double a = 0.5 * (-ym1 + 3.0 * y0 - 3.0 * y1 + y2);
    const double b = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    const double c = 0.5 * (y1 - ym1);
    return ((a * x + b) * x + c) * x + y0;
  }

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> v_;
};

// ---------------------------------------------------------------------------
// Small dense least-squares helpers.
// ---------------------------------------------------------------------------

// Slope/intercept/R^2 of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need matching x/y with >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0;
  const double ss_tot = syy - sy * sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Exact integer factorial for small n.
inline double factorial(int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("factorial: n out of [0, 20]");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return static_cast<double>(f);
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace radonreg
