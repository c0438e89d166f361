#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/fourier.hpp"
#include "radonreg/numeric.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// Multi-indices and the monomial/Taylor basis m_k(x) = x^k / k!
// ---------------------------------------------------------------------------

struct MultiIndex {
  std::vector<int> k;

  int dim() const { return static_cast<int>(k.size()); }
  int order() const {
    int s = 0;
    for (int v : k) s += v;
    return s;
  }
  double factorial_prod() const {
    double f = 1.0;
    for (int v : k) f *= factorial(v);
    return f;
  }
  bool operator==(const MultiIndex& o) const { return k == o.k; }
  bool operator<(const MultiIndex& o) const {
    if (order() != o.order()) return order() < o.order();
    return k < o.k;
  }
};

// All multi-indices with |k| <= n0 in dimension d, graded order.
inline std::vector<MultiIndex> multi_indices(int d, int n0) {
  std::vector<MultiIndex> out;
  if (n0 < 0) return out;
  std::vector<int> cur(d, 0);
  for (int total = 0; total <= n0; ++total) {
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
      if (pos == d - 1) {
        cur[pos] = remaining;
        out.push_back(MultiIndex{cur});
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        cur[pos] = v;
        rec(pos + 1, remaining - v);
      }
    };
    rec(0, total);
  }
  return out;
}

inline double monomial_eval(const MultiIndex& k, const Eigen::VectorXd& x) {
  if (k.dim() != x.size()) throw std::invalid_argument("monomial_eval: dimension mismatch");
  if (k.order() > 12) throw std::invalid_argument("monomial_eval: |k| > 12 unsupported");
  double prod = 1.0;
  for (int i = 0; i < x.size(); ++i) {
    for (int j = 0; j < k.k[i]; ++j) prod *= x[i];
  }
  return prod / k.factorial_prod();
}

// Element of P_{n0}: p(x) = sum b_k x^k/k!, coefficients aligned with
// multi_indices(d, n0).
struct Polynomial {
  int d = 1;
  int n0 = -1;
  Eigen::VectorXd coeffs;  // size dim P_{n0}; empty when n0 < 0

  static Polynomial zero(int d, int n0) {
    Polynomial p;
    p.d = d;
    p.n0 = n0;
    p.coeffs = Eigen::VectorXd::Zero(static_cast<int>(multi_indices(d, n0).size()));
    return p;
  }

  double eval(const Eigen::VectorXd& x) const {
    if (n0 < 0) return 0.0;
    const auto basis = multi_indices(d, n0);
    double s = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) s += coeffs[static_cast<int>(i)] * monomial_eval(basis[i], x);
    return s;
  }
  double norm() const { return coeffs.size() ? coeffs.norm() : 0.0; }
};

// ---------------------------------------------------------------------------
// Isotropic dual window
// ---------------------------------------------------------------------------

// kappa_iso is the d-dimensional inverse transform of kappa_hat(|w|); the dual
// basis is m*_k = (-1)^|k| d^k kappa_iso, evaluated spectrally.
class IsoWindow {
 public:
  explicit IsoWindow(int d, int spectral_samples = 512) : d_(d) {
    if (d < 1 || d > 2) throw std::invalid_argument("IsoWindow: d in {1,2} supported");
    if (spectral_samples < 256)
      throw std::invalid_argument("IsoWindow: spectral grid must have >= 256 samples");
    quad_ = gauss_legendre(spectral_samples, 0.0, 1.0);
    build_kappa_rad();
    build_kappa_iso_radial();
    find_truncation_radius();
  }

  int dim() const { return d_; }

  // Spectral profile of kappa_iso in the classical convention, so that
  // kappa_hat(0) = 1 means unit mass and the dual basis is exactly
  // biorthonormal to the monomials.
  double spectral_profile(double rho) const { return kappa_hat(rho); }
  double truncation_radius() const { return trunc_radius_; }

  // Smallest R such that sup_{r>=R} (1+r)^weight |kappa_iso(r)| < tol * peak.
  // Used to size moment quadratures, where polynomial weights make the plain
  // truncation radius insufficient.
  double weighted_truncation_radius(int weight, double tol) const {
    const double peak = std::abs(kappa_iso_table_(0.0));
    const double dr = env_dr_;
    for (std::size_t i = 0; i < env_.size(); ++i) {
      const double r = static_cast<double>(i) * dr;
      if (env_[i] * std::pow(1.0 + r, weight) < tol * peak) return r;
    }
    return kappa_iso_table_.t_max();
  }

  // 1D inverse transform of the radial spectral profile.
  double kappa_rad(double t) const { return kappa_rad_table_(std::abs(t)); }

  // Radial profile of kappa_iso in dimension d.
  double kappa_iso_radial(double r) const { return kappa_iso_table_(std::abs(r)); }

  double kappa_iso(const Eigen::VectorXd& x) const { return kappa_iso_radial(x.norm()); }

  // m*_k(x) by spectral quadrature over the window support.
  double dual_basis(const MultiIndex& k, const Eigen::VectorXd& x) const {
    if (k.dim() != d_ || x.size() != d_)
      throw std::invalid_argument("dual_basis: dimension mismatch");
    if (k.order() > 4) throw std::invalid_argument("dual_basis: derivative order beyond budget");
    if (d_ == 1) return dual_basis_1d(k.k[0], x[0]);
    if (d_ == 2) return dual_basis_2d(k.k[0], k.k[1], x[0], x[1]);
    throw std::invalid_argument("dual_basis: d=3 scattered evaluation unsupported");
  }

  // m*_k on a tensor grid {g} x {g} (d=2) or {g} (d=1); used by the projectors
  // and by quadrature-heavy tests.  Grid points must satisfy the band-limit
  // sampling condition (spacing < pi/2 is plenty).
  Eigen::MatrixXd dual_basis_grid(const MultiIndex& k, const std::vector<double>& g) const;

  // Number of Gauss nodes needed for e^{jwx} accuracy up to |x| <= R.
  static int quad_nodes_for_extent(double R) {
    return std::min(4096, std::max(96, static_cast<int>(0.8 * R) + 64));
  }

 private:
  void build_kappa_rad() {
    // kappa_rad = classical 1D inverse of kappa_hat, FFT-tabulated so the far
    // tail is as accurate as the near field.
    const double T = 2048.0;
    const int n = 1 << 17;
    kappa_rad_table_ = tabulate_inverse_transform(
        [](double w) { return complexd(kappa_hat(w) / kTwoPi, 0.0); }, n, T);
  }

  void build_kappa_iso_radial() {
    if (d_ == 1) {
      kappa_iso_table_ = kappa_rad_table_;
      return;
    }
    // d = 2 radial profile by inverse Abel transform of the window's Radon
    // projection p = kappa_rad:
    //   kappa_iso(r) = -(1/pi) int_r^inf p'(t) / sqrt(t^2 - r^2) dt.
    // p' is band-limited with the same fast decay as the window, so this
    // avoids both Bessel quadrature and algebraic projection tails.
    const double T = 2048.0;
    const int nt = 1 << 20;
    UniformTable dp = tabulate_inverse_transform(
        [](double w) { return complexd(0.0, w * kappa_hat(w) / kTwoPi); }, nt, T);

    const double r_max = 1600.0;
    const int n = 16384;
    std::vector<double> vals(n);
    const double dr = r_max / (n - 1);
    const double t_dec = 1200.0;  // p' is numerically zero beyond this
    for (int i = 0; i < n; ++i) {
      const double r = i * dr;
      if (r >= t_dec) {
        vals[i] = 0.0;
        continue;
      }
      // substitute t = r + s^2 to remove the sqrt singularity
      const double s_max = std::sqrt(t_dec - r);
      const int nq = std::max(192, static_cast<int>(s_max * 24.0));
      const QuadRule q = gauss_legendre(nq, 0.0, s_max);
      double acc = 0.0;
      for (std::size_t a = 0; a < q.nodes.size(); ++a) {
        const double s = q.nodes[a];
        const double t = r + s * s;
        acc += q.weights[a] * dp(t) * 2.0 / std::sqrt(s * s + 2.0 * r);
      }
      vals[i] = -acc / kPi;
    }
    kappa_iso_table_ = UniformTable(0.0, dr, std::move(vals));
  }

  void find_truncation_radius() {
    const double peak = std::abs(kappa_iso_table_(0.0));
    env_dr_ = 0.25;
    const int n = static_cast<int>(kappa_iso_table_.t_max() / env_dr_);
    env_.assign(n, 0.0);
    double suffix_max = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      suffix_max = std::max(suffix_max, std::abs(kappa_iso_table_(i * env_dr_)));
      env_[i] = suffix_max;
    }
    trunc_radius_ = kappa_iso_table_.t_max();
    for (int i = 0; i < n; ++i) {
      if (env_[i] < 1e-10 * peak) {
        trunc_radius_ = i * env_dr_;
        break;
      }
    }
  }

  double dual_basis_1d(int k, double x) const {
    const int nq = quad_nodes_for_extent(std::abs(x));
    const QuadRule q = gauss_legendre(nq, 0.0, 1.0);
    // (-1)^k (1/2pi) int (jw)^k kappa e^{jwx} dw; symmetrized to w >= 0.
    complexd s(0.0, 0.0);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double w = q.nodes[i];
      const complexd jw(0.0, w);
      const complexd term = std::pow(jw, k) * kappa_hat(w) * std::polar(1.0, w * x);
      s += q.weights[i] * (term + std::conj(term));
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * s.real() / kTwoPi;
  }

  double dual_basis_2d(int k1, int k2, double x, double y) const {
    const double R = std::max(std::abs(x), std::abs(y));
    const int nq = quad_nodes_for_extent(R);
    const QuadRule q = gauss_legendre(nq, -1.0, 1.0);
    complexd s(0.0, 0.0);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double w1 = q.nodes[i];
      complexd inner(0.0, 0.0);
      for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const double w2 = q.nodes[j];
        const double kh = kappa_hat(std::hypot(w1, w2));
        if (kh == 0.0) continue;
        inner += q.weights[j] * std::pow(complexd(0.0, w2), k2) * kh *
                 std::polar(1.0, w2 * y);
      }
      s += q.weights[i] * std::pow(complexd(0.0, w1), k1) * std::polar(1.0, w1 * x) * inner;
    }
    const double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
    return sign * s.real() / (kTwoPi * kTwoPi);
  }

  int d_;
  QuadRule quad_;
  UniformTable kappa_rad_table_;
  UniformTable kappa_iso_table_;
  std::vector<double> env_;
  double env_dr_ = 0.25;
  double trunc_radius_ = 0.0;
};

inline Eigen::MatrixXd IsoWindow::dual_basis_grid(const MultiIndex& k,
                                                  const std::vector<double>& g) const {
  const int N = static_cast<int>(g.size());
  double R = 0.0;
  for (double v : g) R = std::max(R, std::abs(v));
  const int nq = quad_nodes_for_extent(R);
  if (d_ == 1) {
    Eigen::MatrixXd out(N, 1);
    for (int i = 0; i < N; ++i) out(i, 0) = dual_basis_1d(k.k[0], g[i]);
    return out;
  }
  if (d_ != 2) throw std::invalid_argument("dual_basis_grid: d must be 1 or 2");

  const QuadRule q = gauss_legendre(nq, -1.0, 1.0);
  using CMat = Eigen::MatrixXcd;
  CMat K(nq, nq);
  for (int a = 0; a < nq; ++a)
    for (int b = 0; b < nq; ++b) K(a, b) = kappa_hat(std::hypot(q.nodes[a], q.nodes[b]));
  // Row/column powers of (jw) fold the derivative order into the kernel.
  for (int a = 0; a < nq; ++a) {
    const complexd f = std::pow(complexd(0.0, q.nodes[a]), k.k[0]) * q.weights[a];
    K.row(a) *= f;
  }
  for (int b = 0; b < nq; ++b) {
    const complexd f = std::pow(complexd(0.0, q.nodes[b]), k.k[1]) * q.weights[b];
    K.col(b) *= f;
  }
  CMat Ex(nq, N), Ey(nq, N);
  for (int a = 0; a < nq; ++a)
    for (int i = 0; i < N; ++i) {
      Ex(a, i) = std::polar(1.0, q.nodes[a] * g[i]);
      Ey(a, i) = std::polar(1.0, q.nodes[a] * g[i]);
    }
  CMat tmp = K * Ey;          // (nq x N)
  CMat full = Ex.transpose() * tmp;  // (N x N)
  const double sign = (k.order() % 2 == 0) ? 1.0 : -1.0;
  return (sign / (kTwoPi * kTwoPi)) * full.real();
}

// ---------------------------------------------------------------------------
// Projectors
// ---------------------------------------------------------------------------

struct ProjectionOptions {
  double grid_step = 0.5;  // spatial quadrature step (band limit is 1)
  double radius = 0.0;     // 0 -> window truncation radius
};

namespace detail {
inline std::vector<double> symmetric_grid(double R, double step) {
  const int half = static_cast<int>(std::ceil(R / step));
  std::vector<double> g;
  g.reserve(2 * half + 1);
  for (int i = -half; i <= half; ++i) g.push_back(i * step);
  return g;
}
}  // namespace detail

// Proj_P{f} = sum <f, m*_k> m_k by tensor-product quadrature over the window
// support.  f is an arbitrary callable on R^d.
inline Polynomial project_to_nullspace(
    const std::function<double(const Eigen::VectorXd&)>& f, const IsoWindow& window,
    int n0, const ProjectionOptions& opt = {}) {
  const int d = window.dim();
  const double R = (opt.radius > 0.0) ? opt.radius : window.truncation_radius();
  const auto g = detail::symmetric_grid(R, opt.grid_step);
  const auto basis = multi_indices(d, n0);
  Polynomial out = Polynomial::zero(d, n0);
  if (n0 < 0) return out;

  if (d == 1) {
    Eigen::VectorXd x(1);
    std::vector<double> fv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      x[0] = g[i];
      fv[i] = f(x);
    }
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Eigen::MatrixXd mk = window.dual_basis_grid(basis[b], g);
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += fv[i] * mk(static_cast<int>(i), 0);
      out.coeffs[static_cast<int>(b)] = s * opt.grid_step;
    }
    return out;
  }
  if (d != 2) throw std::invalid_argument("project_to_nullspace: d must be 1 or 2");

  const int N = static_cast<int>(g.size());
  Eigen::MatrixXd fv(N, N);
  Eigen::VectorXd x(2);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      x[0] = g[i];
      x[1] = g[j];
      fv(i, j) = f(x);
    }
  const double cell = opt.grid_step * opt.grid_step;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const Eigen::MatrixXd mk = window.dual_basis_grid(basis[b], g);
    out.coeffs[static_cast<int>(b)] = cell * (fv.array() * mk.array()).sum();
  }
  return out;
}

struct DualProjection {
  Eigen::VectorXd moments;  // <m_k, nu> aligned with multi_indices(d, n0)
  double tail_fraction = 0.0;
  bool tail_warning = false;
};

// Moments <m_k, nu> of a decaying field by quadrature over [-R, R]^d.
inline DualProjection project_dual(const std::function<double(const Eigen::VectorXd&)>& nu,
                                   int d, int n0, double R, double step = 0.25) {
  const auto basis = multi_indices(d, n0);
  DualProjection out;
  out.moments = Eigen::VectorXd::Zero(static_cast<int>(basis.size()));
  const auto g = detail::symmetric_grid(R, step);
  const int N = static_cast<int>(g.size());
  double total_mass = 0.0, edge_mass = 0.0;
  const double edge = 0.9 * R;

  if (d == 1) {
    Eigen::VectorXd x(1);
    for (int i = 0; i < N; ++i) {
      x[0] = g[i];
      const double v = nu(x);
      const double wgt = std::pow(1.0 + std::abs(g[i]), n0 < 0 ? 0 : n0) * std::abs(v);
      total_mass += wgt;
      if (std::abs(g[i]) > edge) edge_mass += wgt;
      for (std::size_t b = 0; b < basis.size(); ++b)
        out.moments[static_cast<int>(b)] += step * v * monomial_eval(basis[b], x);
    }
  } else if (d == 2) {
    Eigen::VectorXd x(2);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        x[0] = g[i];
        x[1] = g[j];
        const double v = nu(x);
        const double wgt = std::pow(1.0 + x.norm(), n0 < 0 ? 0 : n0) * std::abs(v);
        total_mass += wgt;
        if (x.norm() > edge) edge_mass += wgt;
        for (std::size_t b = 0; b < basis.size(); ++b)
          out.moments[static_cast<int>(b)] += step * step * v * monomial_eval(basis[b], x);
      }
  } else {
    throw std::invalid_argument("project_dual: d must be 1 or 2");
  }
  out.tail_fraction = (total_mass > 0.0) ? edge_mass / total_mass : 0.0;
  out.tail_warning = out.tail_fraction > 1e-4;
  return out;
}

}  // namespace radonreg
