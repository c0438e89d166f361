#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/radon_lab.hpp"
#include "radonreg/rbf_fitter.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// The intermediate p in (1, 2] branch: duality map J_q, the forward solution
// map of the representer form on the d=2 Radon grid, and coefficient fitting.
// ---------------------------------------------------------------------------

// Pointwise duality map J_q: |v|^{q-1} sign(v) / ||v||_q^{q-2}, an isometry
// L_q -> L_p with J_p = J_q^{-1}.
inline Sinogram duality_map_Jq(const Sinogram& nu, double q) {
  if (q < 1.0) throw std::invalid_argument("duality_map_Jq: q >= 1 required");
  const double norm = nu.lq_norm(q);
  if (norm == 0.0) throw std::invalid_argument("duality_map_Jq: zero field");
  Sinogram out = nu;
  if (q == 2.0) return out;  // J = identity
  const double dennorm = std::pow(norm, q - 2.0);
  for (int j = 0; j < nu.spec.n_theta; ++j)
    for (int i = 0; i < nu.spec.n_t; ++i) {
      const double v = nu.values(i, j);
      out.values(i, j) = std::pow(std::abs(v), q - 1.0) * ((v > 0) - (v < 0)) / dennorm;
    }
  return out;
}

namespace detail {

// 2D FFT of an n x n real field (paper convention on [-L, L]^2 with pixel
// centers), returned on fft-ordered bins.
inline Eigen::MatrixXcd fft2_forward(const Eigen::MatrixXd& f, double dx) {
  const int n = static_cast<int>(f.rows());
  Eigen::MatrixXcd tmp(n, n);
  auto& fft = fft_engine();
  std::vector<complexd> in(n), out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) in[i] = complexd(f(i, j), 0.0);
    fft.fwd(out, in);
    for (int i = 0; i < n; ++i) tmp(i, j) = out[i];
  }
  Eigen::MatrixXcd spec(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) in[j] = tmp(i, j);
    fft.fwd(out, in);
    for (int j = 0; j < n; ++j) spec(i, j) = out[j];
  }
  (void)dx;
  return spec;
}

inline Eigen::MatrixXd fft2_inverse(const Eigen::MatrixXcd& spec) {
  const int n = static_cast<int>(spec.rows());
  Eigen::MatrixXcd tmp(n, n);
  auto& fft = fft_engine();
  std::vector<complexd> in(n), out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) in[j] = spec(i, j);
    fft.inv(out, in);
    for (int j = 0; j < n; ++j) tmp(i, j) = out[j];
  }
  Eigen::MatrixXd f(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) in[i] = tmp(i, j);
    fft.inv(out, in);
    for (int i = 0; i < n; ++i) f(i, j) = out[i].real();
  }
  return f;
}

}  // namespace detail

struct LpGrid {
  double L = 4.0;    // field box [-L, L]^2
  int n_px = 96;     // field resolution
  SinogramSpec sino{8.0, 512, 120};
};

// Precomputed forward machinery for fixed centers: the nu-basis atoms sampled
// on the sinogram grid and the linear tail L_R^dagger realized as
// backprojection, windowed spectral division and null-space removal.
class LpForward {
 public:
  LpForward(const OperatorProfile& profile, const IsoWindow& window,
            const Eigen::MatrixXd& centers, const LpGrid& grid)
      : profile_(profile), grid_(grid), centers_(centers) {
    const int M = static_cast<int>(centers.rows());
    if (centers.cols() != 2) throw std::invalid_argument("LpForward: d = 2 only");
    atoms_.reserve(M);
    for (int m = 0; m < M; ++m) {
      NuBasis nu(profile, window, centers.row(m).transpose());
      atoms_.push_back(sample_nu(nu));
    }
    build_poly_projector();
  }

  const LpGrid& grid() const { return grid_; }
  int n_centers() const { return static_cast<int>(atoms_.size()); }
  const Sinogram& atom(int m) const { return atoms_[m]; }

  // s = sum a_m nu_m on the sinogram grid.
  Sinogram assemble(const Eigen::VectorXd& a) const {
    Sinogram s(grid_.sino, SinoParity::even);
    for (int m = 0; m < a.size(); ++m) s.values += a[m] * atoms_[m].values;
    return s;
  }

  // L_R^dagger: backproject, divide the padded 2D spectrum by the windowed
  // profile, remove the discrete polynomial component.
  Image apply_linear_tail(const Sinogram& g, int n0) const {
    Image bp = backproject(g, grid_.L, grid_.n_px);
    const int n = grid_.n_px;
    const int np = 2 * n;
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(np, np);
    padded.block(n / 2, n / 2, n, n) = bp.values;
    Eigen::MatrixXcd spec = detail::fft2_forward(padded, bp.dx());
    const double dx = bp.dx();
    for (int i = 0; i < np; ++i) {
      const double wx = fft_omega(i, np, dx);
      for (int j = 0; j < np; ++j) {
        const double wy = fft_omega(j, np, dx);
        const double rho = std::hypot(wx, wy);
        double mult;
        if (profile_.trivial_null_space()) {
          mult = 1.0 / (kTwoPi * profile_.eval(rho));
        } else {
          mult = (rho == 0.0) ? 0.0 : (1.0 - kappa_hat(rho)) / (kTwoPi * profile_.eval(rho));
        }
        spec(i, j) *= mult;
      }
    }
    Eigen::MatrixXd field = detail::fft2_inverse(spec);
    Image out(grid_.L, n);
    out.values = field.block(n / 2, n / 2, n, n);
    if (n0 >= 0) remove_poly(out, n0);
    return out;
  }

  Image forward(const Eigen::VectorXd& a, const Polynomial& poly, double p) const {
    const double q = p / (p - 1.0);
    Sinogram s = assemble(a);
    const bool zero = s.values.cwiseAbs().maxCoeff() == 0.0;
    Sinogram js = (p == 2.0 || zero) ? s : duality_map_Jq(s, q);
    Image f = apply_linear_tail(js, poly.n0);
    for (int i = 0; i < grid_.n_px; ++i)
      for (int j = 0; j < grid_.n_px; ++j) {
        Eigen::VectorXd x(2);
        x << f.coord(i), f.coord(j);
        f.values(i, j) += poly.eval(x);
      }
    return f;
  }

  // Derivative of J_q{s} in the direction h (pointwise + rank-one norm term).
  Sinogram duality_map_derivative(const Sinogram& s, const Sinogram& h, double q) const {
    if (q == 2.0) return h;
    const double w = s.quad_weight();
    const double norm = s.lq_norm(q);
    Sinogram out = h;
    double inner_phi_h = 0.0;
    Eigen::MatrixXd phi(s.spec.n_t, s.spec.n_theta);
    for (int j = 0; j < s.spec.n_theta; ++j)
      for (int i = 0; i < s.spec.n_t; ++i) {
        const double v = s.values(i, j);
        phi(i, j) = std::pow(std::abs(v), q - 1.0) * ((v > 0) - (v < 0));
        inner_phi_h += phi(i, j) * h.values(i, j);
      }
    inner_phi_h *= w;
    const double n2q = std::pow(norm, 2.0 - q);
    const double n22q = (2.0 - q) * std::pow(norm, 2.0 - 2.0 * q);
    for (int j = 0; j < s.spec.n_theta; ++j)
      for (int i = 0; i < s.spec.n_t; ++i) {
        const double v = s.values(i, j);
        const double dphi = (q - 1.0) * std::pow(std::abs(v), q - 2.0);
        out.values(i, j) = dphi * h.values(i, j) * n2q + n22q * inner_phi_h * phi(i, j);
      }
    return out;
  }

 private:
  Sinogram sample_nu(const NuBasis& nu) const {
    Sinogram s(grid_.sino, SinoParity::even);
    const int nt = grid_.sino.n_t;
    for (int j = 0; j < grid_.sino.n_theta; ++j) {
      Eigen::VectorXd xi(2);
      const double th = grid_.sino.theta(j);
      xi << std::cos(th), std::sin(th);
      const double t0 = xi.dot(nu.center());
      // one inverse FFT per angle from the spectral form
      std::vector<complexd> spec(nt);
      for (int k = 0; k < nt; ++k)
        spec[k] = nu.spectral_t0(fft_omega(k, nt, grid_.sino.dt()), t0);
      auto vals = inverse_fft_real(spec, grid_.sino.T);
      for (int i = 0; i < nt; ++i) s.values(i, j) = vals[i];
    }
    return s;
  }

  void build_poly_projector() {
    const int n = grid_.n_px;
    const auto basis = multi_indices(2, 4);  // up to the supported budget
    Eigen::MatrixXd B(n * n, static_cast<int>(basis.size()));
    Eigen::VectorXd x(2);
    Image ref(grid_.L, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        x << ref.coord(i), ref.coord(j);
        for (std::size_t k = 0; k < basis.size(); ++k)
          B(i * n + j, static_cast<int>(k)) = monomial_eval(basis[k], x);
      }
    poly_basis_ = B;
  }

  void remove_poly(Image& f, int n0) const {
    const int K = static_cast<int>(multi_indices(2, n0).size());
    if (K == 0) return;
    const int n = grid_.n_px;
    Eigen::VectorXd flat(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat[i * n + j] = f.values(i, j);
    const Eigen::MatrixXd B = poly_basis_.leftCols(K);
    Eigen::VectorXd c = (B.transpose() * B).ldlt().solve(B.transpose() * flat);
    flat -= B * c;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.values(i, j) = flat[i * n + j];
  }

  OperatorProfile profile_;
  LpGrid grid_;
  Eigen::MatrixXd centers_;
  std::vector<Sinogram> atoms_;
  Eigen::MatrixXd poly_basis_;
};

struct LpModel {
  Eigen::MatrixXd centers;
  Eigen::VectorXd coeffs;
  Polynomial poly;
  double p = 2.0;
  double lambda = 0.0;
  int n0 = -1;
  std::string profile_name;
  LpGrid grid;
  // diagnostics
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  double q() const { return p / (p - 1.0); }
};

struct LpOptions {
  int max_iter = 120;
  double grad_tol = 1e-7;
  unsigned seed = 1;
  bool square_psi = false;  // psi(t) = lambda t^2 instead of lambda t
};

// Objective and gradient machinery shared by fit_lp and the gradient checks.
class LpObjective {
 public:
  LpObjective(const LpForward& fwd, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              double p, double lambda, int n0, bool square_psi)
      : fwd_(fwd), X_(X), y_(y), p_(p), q_(p / (p - 1.0)), lambda_(lambda), n0_(n0),
        square_psi_(square_psi) {
    K_ = static_cast<int>(multi_indices(2, n0).size());
  }

  int n_params() const { return static_cast<int>(fwd_.n_centers()) + K_; }

  double value(const Eigen::VectorXd& z) const {
    Eigen::VectorXd resid;
    return value_impl(z, &resid);
  }

  double value_and_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const {
    const int M = fwd_.n_centers();
    const Eigen::VectorXd a = z.head(M);
    Polynomial poly = make_poly(z);
    Sinogram s = fwd_.assemble(a);
    const bool zero = s.values.cwiseAbs().maxCoeff() == 0.0;
    Sinogram js = (p_ == 2.0 || zero) ? s : duality_map_Jq(s, q_);
    Image f = fwd_.apply_linear_tail(js, n0_);

    Eigen::VectorXd pred(X_.rows());
    for (int m = 0; m < X_.rows(); ++m) {
      Eigen::VectorXd x = X_.row(m).transpose();
      pred[m] = f.sample(x[0], x[1]) + poly.eval(x);
    }
    const Eigen::VectorXd r = pred - y_;
    const double R = s.lq_norm(q_);
    const double obj =
        r.squaredNorm() + (square_psi_ ? lambda_ * R * R : lambda_ * R);

    grad = Eigen::VectorXd::Zero(n_params());
    // data term through the forward map, one linear pass per coefficient
    for (int k = 0; k < M; ++k) {
      Sinogram djs = fwd_.duality_map_derivative(s, fwd_.atom(k), q_);
      Image df = fwd_.apply_linear_tail(djs, n0_);
      double g = 0.0;
      for (int m = 0; m < X_.rows(); ++m)
        g += 2.0 * r[m] * df.sample(X_(m, 0), X_(m, 1));
      grad[k] = g;
    }
    // regularizer gradient d||s||_q / da_k = <phi(s), nu_k> / ||s||^{q-1}
    const double w = s.quad_weight();
    for (int k = 0; k < M; ++k) {
      double inner = 0.0;
      const Sinogram& nk = fwd_.atom(k);
      for (int j = 0; j < s.spec.n_theta; ++j)
        for (int i = 0; i < s.spec.n_t; ++i) {
          const double v = s.values(i, j);
          inner += std::pow(std::abs(v), q_ - 1.0) * ((v > 0) - (v < 0)) * nk.values(i, j);
        }
      inner *= w;
      const double dR = inner / std::pow(R, q_ - 1.0);
      grad[k] += square_psi_ ? lambda_ * 2.0 * R * dR : lambda_ * dR;
    }
    // polynomial block
    const auto basis = multi_indices(2, n0_);
    for (int kk = 0; kk < K_; ++kk) {
      double g = 0.0;
      for (int m = 0; m < X_.rows(); ++m)
        g += 2.0 * r[m] * monomial_eval(basis[kk], X_.row(m).transpose());
      grad[static_cast<int>(fwd_.n_centers()) + kk] = g;
    }
    return obj;
  }

  Polynomial make_poly(const Eigen::VectorXd& z) const {
    Polynomial poly = Polynomial::zero(2, n0_);
    if (K_ > 0) poly.coeffs = z.tail(K_);
    return poly;
  }

 private:
  double value_impl(const Eigen::VectorXd& z, Eigen::VectorXd* resid) const {
    const int M = fwd_.n_centers();
    const Eigen::VectorXd a = z.head(M);
    Polynomial poly = make_poly(z);
    Image f = fwd_.forward(a, poly, p_);
    Eigen::VectorXd pred(X_.rows());
    for (int m = 0; m < X_.rows(); ++m)
      pred[m] = f.sample(X_(m, 0), X_(m, 1));
    const Eigen::VectorXd r = pred - y_;
    if (resid) *resid = r;
    Sinogram s = fwd_.assemble(a);
    const double R = s.lq_norm(q_);
    return r.squaredNorm() + (square_psi_ ? lambda_ * R * R : lambda_ * R);
  }

  const LpForward& fwd_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  double p_, q_, lambda_;
  int n0_;
  int K_;
  bool square_psi_;
};

// L-BFGS with Armijo backtracking.
inline LpModel fit_lp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const OperatorProfile& profile, const IsoWindow& window, double p,
                      double lambda, const LpGrid& grid, const LpOptions& opt = {}) {
  if (p <= 1.0 || p > 2.0) throw std::invalid_argument("fit_lp: p in (1, 2]");
  if (X.rows() > 20) throw std::invalid_argument("fit_lp: M <= 20 (forward map cost)");
  LpForward fwd(profile, window, X, grid);
  LpObjective obj(fwd, X, y, p, lambda, profile.n0, opt.square_psi);
  const int n = obj.n_params();

  Eigen::VectorXd z(n);
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i) z[i] = 0.05 * gauss(rng);

  Eigen::VectorXd g(n);
  double f = obj.value_and_gradient(z, g);
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  int iter = 0;
  bool converged = false;
  for (; iter < opt.max_iter; ++iter) {
    if (g.norm() <= opt.grad_tol * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      alpha[i] = rho * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      d *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      const double beta = rho * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    if (d.dot(g) > 0) d = -g;  // safeguard

    double step = 1.0;
    const double slope = g.dot(d);
    double fn = f;
    Eigen::VectorXd zn;
    for (int ls = 0; ls < 30; ++ls) {
      zn = z + step * d;
      fn = obj.value(zn);
      if (fn <= f + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    Eigen::VectorXd gn(n);
    fn = obj.value_and_gradient(zn, gn);
    const Eigen::VectorXd sv = zn - z, yv = gn - g;
    if (sv.dot(yv) > 1e-12 * sv.norm() * yv.norm()) {
      s_hist.push_back(sv);
      y_hist.push_back(yv);
      if (s_hist.size() > 8) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    z = zn;
    g = gn;
    f = fn;
  }

  LpModel model;
  model.centers = X;
  model.coeffs = z.head(X.rows());
  model.poly = obj.make_poly(z);
  model.p = p;
  model.lambda = lambda;
  model.n0 = profile.n0;
  model.profile_name = profile.name;
  model.grid = grid;
  model.objective = f;
  model.iterations = iter;
  model.converged = converged;
  return model;
}

struct P2ConsistencyReport {
  double rms_rel_diff = 0.0;        // vs the window-consistent kernel oracle
  double rms_rel_diff_raw = 0.0;    // vs the unregularized closed-form kernel
  bool orthogonality_ok = true;
  double orthogonality_residual = 0.0;
};

// Compares forward_solution at p = 2 against the closed-form superposition of
// the window-regularized kernel, after removing the degree-n0 polynomial
// ambiguity shared by both sides.
inline P2ConsistencyReport p2_consistency(const Eigen::VectorXd& a,
                                          const Eigen::MatrixXd& X,
                                          const OperatorProfile& profile,
                                          const IsoWindow& window, const LpGrid& grid) {
  LpForward fwd(profile, window, X, grid);
  Image f = fwd.apply_linear_tail(fwd.assemble(a), profile.n0);

  IsotropicKernel k_reg = synth_rbf_kernel(profile, 2, KernelMode::radon,
                                           KernelGrid{4.0 * grid.L, 1 << 14}, true);
  IsotropicKernel k_raw = synth_rbf_kernel(profile, 2, KernelMode::radon);

  const int n = grid.n_px;
  Image oracle(grid.L, n), oracle_raw(grid.L, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0, sr = 0.0;
      for (int m = 0; m < X.rows(); ++m) {
        const double r = std::hypot(oracle.coord(i) - X(m, 0), oracle.coord(j) - X(m, 1));
        s += a[m] * k_reg.radial(r);
        sr += a[m] * k_raw.radial(r);
      }
      oracle.values(i, j) = s;
      oracle_raw.values(i, j) = sr;
    }

  // remove the degree-n0 polynomial from each field before comparing
  const auto basis = multi_indices(2, std::max(profile.n0, 0));
  auto depoly = [&](Image& img) {
    Eigen::MatrixXd B(n * n, static_cast<int>(basis.size()));
    Eigen::VectorXd v(n * n);
    Eigen::VectorXd x(2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        x << img.coord(i), img.coord(j);
        for (std::size_t k = 0; k < basis.size(); ++k)
          B(i * n + j, static_cast<int>(k)) = monomial_eval(basis[k], x);
        v[i * n + j] = img.values(i, j);
      }
    Eigen::VectorXd c = (B.transpose() * B).ldlt().solve(B.transpose() * v);
    v -= B * c;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) img.values(i, j) = v[i * n + j];
  };
  depoly(f);
  depoly(oracle);
  depoly(oracle_raw);

  P2ConsistencyReport rep;
  rep.rms_rel_diff = std::sqrt((f.values - oracle.values).squaredNorm() /
                               oracle.values.squaredNorm());
  rep.rms_rel_diff_raw = std::sqrt((f.values - oracle_raw.values).squaredNorm() /
                                   oracle_raw.values.squaredNorm());
  const Eigen::MatrixXd P = poly_design(X, profile.n0);
  if (P.cols() > 0) {
    rep.orthogonality_residual = (P.transpose() * a).norm() / std::max(a.norm(), 1e-300);
    rep.orthogonality_ok = rep.orthogonality_residual < 1e-8;
  }
  return rep;
}

}  // namespace radonreg
