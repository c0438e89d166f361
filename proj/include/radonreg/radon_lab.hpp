#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/activations.hpp"
#include "radonreg/fourier.hpp"
#include "radonreg/nullspace.hpp"
#include "radonreg/numeric.hpp"
#include "radonreg/operator_catalog.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

// Square pixel grid on [-L, L]^2, pixel centers x_i = -L + (i + 1/2) dx.
struct Image {
  double L = 1.0;
  int n = 256;
  Eigen::MatrixXd values;  // (ix, iy)

  Image() = default;
  Image(double L_, int n_) : L(L_), n(n_), values(Eigen::MatrixXd::Zero(n_, n_)) {}

  double dx() const { return 2.0 * L / n; }
  double coord(int i) const { return -L + (i + 0.5) * dx(); }

  static Image from_function(double L, int n,
                             const std::function<double(double, double)>& f) {
    Image img(L, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) img.values(i, j) = f(img.coord(i), img.coord(j));
    return img;
  }

  // Bilinear interpolation, zero outside the grid.
  double sample(double x, double y) const {
    const double u = (x + L) / dx() - 0.5;
    const double v = (y + L) / dx() - 0.5;
    const int i = static_cast<int>(std::floor(u));
    const int j = static_cast<int>(std::floor(v));
    if (i < 0 || j < 0 || i >= n - 1 || j >= n - 1) return 0.0;
    const double fu = u - i, fv = v - j;
    return values(i, j) * (1 - fu) * (1 - fv) + values(i + 1, j) * fu * (1 - fv) +
           values(i, j + 1) * (1 - fu) * fv + values(i + 1, j + 1) * fu * fv;
  }

  double rel_l2_error(const Image& ref) const {
    return std::sqrt((values - ref.values).squaredNorm() / ref.values.squaredNorm());
  }
};

enum class SinoParity { even, odd };

struct SinogramSpec {
  double T = 1.5 * std::sqrt(2.0);  // half-extent of the offset axis
  int n_t = 1024;                   // power of two
  int n_theta = 360;                // angles on [0, pi)

  double dt() const { return 2.0 * T / n_t; }
  double t_coord(int i) const { return -T + i * dt(); }
  double theta(int j) const { return kPi * j / n_theta; }
};

// Even/odd grid function on R x S^1, stored on theta in [0, pi) with the
// parity extension g(t, theta + pi) = sign * g(-t, theta).
struct Sinogram {
  SinogramSpec spec;
  SinoParity parity = SinoParity::even;
  Eigen::MatrixXd values;  // (n_t, n_theta)

  Sinogram() = default;
  Sinogram(const SinogramSpec& s, SinoParity p)
      : spec(s), parity(p), values(Eigen::MatrixXd::Zero(s.n_t, s.n_theta)) {}

  double parity_sign() const { return parity == SinoParity::even ? 1.0 : -1.0; }

  // Cubic interpolation in t at a stored angle index.
  double sample_col(double t, int j) const {
    const double u = (t + spec.T) / spec.dt();
    const int n = spec.n_t;
    if (u < 0.0 || u > n - 1) return 0.0;
    int i = std::clamp(static_cast<int>(std::floor(u)), 1, n - 3);
    const double x = u - i;
    const double ym1 = values(i - 1, j), y0 = values(i, j), y1 = values(i + 1, j),
                 y2 = values(i + 2, j);
    const double a = 0.5 * (-ym1 + 3 * y0 - 3 * y1 + y2);
    const double b = ym1 - 2.5 * y0 + 2 * y1 - 0.5 * y2;
    const double c = 0.5 * (y1 - ym1);
    return ((a * x + b) * x + c) * x + y0;
  }

  // Parity-aware sample at arbitrary angle theta in [0, 2 pi).
  double sample(double t, double theta) const {
    if (theta >= kPi) {
      theta -= kPi;
      t = -t;
      const int j = angle_index(theta);
      return parity_sign() * sample_col(t, j);
    }
    return sample_col(t, angle_index(theta));
  }

  int angle_index(double theta) const {
    int j = static_cast<int>(std::llround(theta / kPi * spec.n_theta));
    if (j == spec.n_theta) j = 0;
    return j;
  }

  // Quadrature weight of one stored sample for integrals over R x S^1 (the
  // full circle; stored half-circle counts twice by parity).
  double quad_weight() const { return spec.dt() * (kPi / spec.n_theta) * 2.0; }

  double lq_norm(double q) const {
    const double w = quad_weight();
    double s = 0.0;
    for (int j = 0; j < spec.n_theta; ++j)
      for (int i = 0; i < spec.n_t; ++i) s += std::pow(std::abs(values(i, j)), q);
    return std::pow(w * s, 1.0 / q);
  }

  double inner(const Sinogram& other) const {
    return quad_weight() * (values.array() * other.values.array()).sum();
  }
};

// ---------------------------------------------------------------------------
// Forward transform, filtering, backprojection, Fourier slice
// ---------------------------------------------------------------------------

struct RadonForwardResult {
  Sinogram sino;
  double boundary_mass_fraction = 0.0;
  bool truncation_warning = false;
};

// Line-integral quadrature by sampled interpolation along each line.
inline RadonForwardResult radon_forward(const Image& img, const SinogramSpec& spec) {
  RadonForwardResult out;
  out.sino = Sinogram(spec, SinoParity::even);
  const double step = 0.5 * img.dx();
  const double S = img.L * std::sqrt(2.0) + 2.0 * step;
  const int ns = static_cast<int>(std::ceil(2.0 * S / step));
  for (int j = 0; j < spec.n_theta; ++j) {
    const double th = spec.theta(j);
    const double cx = std::cos(th), sx = std::sin(th);
    for (int i = 0; i < spec.n_t; ++i) {
      const double t = spec.t_coord(i);
      double acc = 0.0;
      for (int k = 0; k <= ns; ++k) {
        const double s = -S + k * (2.0 * S / ns);
        const double w = (k == 0 || k == ns) ? 0.5 : 1.0;
        acc += w * img.sample(t * cx - s * sx, t * sx + s * cx);
      }
      out.sino.values(i, j) = acc * (2.0 * S / ns);
    }
  }
  // support truncation diagnostic: mass on the outermost pixel ring
  double total = 0.0, ring = 0.0;
  for (int i = 0; i < img.n; ++i)
    for (int j = 0; j < img.n; ++j) {
      const double v = std::abs(img.values(i, j));
      total += v;
      if (i == 0 || j == 0 || i == img.n - 1 || j == img.n - 1) ring += v;
    }
  out.boundary_mass_fraction = (total > 0) ? ring / total : 0.0;
  out.truncation_warning = out.boundary_mass_fraction > 1e-6;
  return out;
}

enum class FilterVariant { symmetric, antisymmetric };

// Filtering operator along t: multiplier c_d |w|^{d-1} (symmetric) or
// -j sign(w) c_d |w|^{d-1} (antisymmetric).  Parity flips in the
// antisymmetric case.
inline Sinogram kfilter(const Sinogram& g, int d, FilterVariant variant, int pad = 16) {
  const int n = g.spec.n_t;
  if ((n & (n - 1)) != 0) throw std::invalid_argument("kfilter: n_t must be a power of two");
  if (pad < 1 || (pad & (pad - 1)) != 0)
    throw std::invalid_argument("kfilter: pad must be a power of two");
  const double cd = 1.0 / (2.0 * std::pow(kTwoPi, d - 1));
  Sinogram out(g.spec,
               variant == FilterVariant::symmetric
                   ? g.parity
                   : (g.parity == SinoParity::even ? SinoParity::odd : SinoParity::even));
  // Zero padding refines the frequency sampling across the |w|^{d-1} kink at
  // the origin, which otherwise dominates the reconstruction error.
  const int np = n * pad;
  std::vector<complexd> col(np), spec(np);
  auto& fft = detail::fft_engine();
  for (int j = 0; j < g.spec.n_theta; ++j) {
    for (int i = 0; i < np; ++i)
      col[i] = (i < n) ? complexd(g.values(i, j), 0.0) : complexd(0.0, 0.0);
    fft.fwd(spec, col);
    for (int k = 0; k < np; ++k) {
      const double w = fft_omega(k, np, g.spec.dt());
      double mag = cd * std::pow(std::abs(w), d - 1);
      if (k == np / 2 && variant != FilterVariant::symmetric) mag = 0.0;
      if (variant == FilterVariant::symmetric) {
        spec[k] *= mag;
      } else {
        const double sgn = (w > 0) - (w < 0);
        spec[k] *= complexd(0.0, -sgn * mag);
      }
    }
    fft.inv(col, spec);
    for (int i = 0; i < n; ++i) out.values(i, j) = col[i].real();
  }
  return out;
}

// R*{g}(x) = integral over S^1 of g(xi' x, xi); odd parity integrates to zero.
inline Image backproject(const Sinogram& g, double L, int n) {
  Image out(L, n);
  const double dtheta = kPi / g.spec.n_theta;
  const double pf = 1.0 + g.parity_sign();  // 2 for even, 0 for odd
  if (pf == 0.0) return out;
  std::vector<double> cs(g.spec.n_theta), sn(g.spec.n_theta);
  for (int j = 0; j < g.spec.n_theta; ++j) {
    cs[j] = std::cos(g.spec.theta(j));
    sn[j] = std::sin(g.spec.theta(j));
  }
  for (int i = 0; i < n; ++i) {
    const double x = out.coord(i);
    for (int k = 0; k < n; ++k) {
      const double y = out.coord(k);
      double acc = 0.0;
      for (int j = 0; j < g.spec.n_theta; ++j) acc += g.sample_col(x * cs[j] + y * sn[j], j);
      out.values(i, k) = pf * dtheta * acc;
    }
  }
  return out;
}

// Restriction of the image spectrum along the ray w * xi0 (library Fourier
// convention; the matching slice of the sinogram is its per-angle 1D
// transform divided by (2 pi)^(d-1)).
inline Eigen::VectorXcd fourier_slice(const Image& img, double theta0,
                                      const std::vector<double>& omegas) {
  const int n = img.n;
  const double c = std::cos(theta0), s = std::sin(theta0);
  Eigen::VectorXcd out(static_cast<int>(omegas.size()));
  const double cell = img.dx() * img.dx();
  std::vector<complexd> ex(n), ey(n);
  for (std::size_t q = 0; q < omegas.size(); ++q) {
    const double w = omegas[q];
    for (int i = 0; i < n; ++i) {
      ex[i] = std::polar(1.0, -w * c * img.coord(i));
      ey[i] = std::polar(1.0, -w * s * img.coord(i));
    }
    complexd acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      complexd row(0.0, 0.0);
      for (int j = 0; j < n; ++j) row += img.values(i, j) * ey[j];
      acc += ex[i] * row;
    }
    out[static_cast<int>(q)] = acc * cell / (kTwoPi * kTwoPi);
  }
  return out;
}

// 1D spectrum of a sinogram column on the FFT bins (library convention).
inline Eigen::VectorXcd column_spectrum(const Sinogram& g, int j) {
  std::vector<double> col(g.spec.n_t);
  for (int i = 0; i < g.spec.n_t; ++i) col[i] = g.values(i, j);
  auto spec = forward_fft(col, g.spec.T);
  Eigen::VectorXcd out(g.spec.n_t);
  for (int i = 0; i < g.spec.n_t; ++i) out[i] = spec[i];
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form Radon transforms of isotropic functions (Prop. IsoRad)
// ---------------------------------------------------------------------------

// Sampled sinogram of an isotropic function with classical radial spectrum
// rho_hat; filtered = true applies the c_d |w|^{d-1} multiplier.
inline Sinogram radon_of_isotropic(const std::function<double(double)>& rho_hat,
                                   const Eigen::Vector2d& x0, bool filtered,
                                   const SinogramSpec& spec, int d = 2) {
  const double cd = 1.0 / (2.0 * std::pow(kTwoPi, d - 1));
  auto spectrum = [&](double w) -> complexd {
    double v = rho_hat(std::abs(w)) / kTwoPi;  // classical 1D inverse
    if (filtered) v *= cd * std::pow(std::abs(w), d - 1);
    return complexd(v, 0.0);
  };
  // profile on a grid wide enough to cover all offsets
  const double Tp = spec.T + x0.norm() + 16.0;
  int np = 1024;
  while (np < 8 * static_cast<int>(Tp)) np *= 2;
  UniformTable prof = tabulate_inverse_transform(spectrum, np, Tp);
  Sinogram out(spec, SinoParity::even);
  for (int j = 0; j < spec.n_theta; ++j) {
    const double proj = x0[0] * std::cos(spec.theta(j)) + x0[1] * std::sin(spec.theta(j));
    for (int i = 0; i < spec.n_t; ++i) out.values(i, j) = prof(spec.t_coord(i) - proj);
  }
  return out;
}

// ---------------------------------------------------------------------------
// r_N remainder and the nu basis
// ---------------------------------------------------------------------------

// The Radon-domain Dirac image nu_x0: spatial and spectral forms of the
// kernel of L_R^{*dagger}, with the window-regularized Taylor correction.
class NuBasis {
 public:
  NuBasis(const OperatorProfile& profile, const IsoWindow& window,
          const Eigen::VectorXd& x0, double table_T = 0.0, int table_n = 0)
      : profile_(profile), x0_(x0), n0_(profile.n0) {
    (void)window;  // the spectral window is the shared kappa_hat
    if (profile_.gamma0 > n0_ + 1 + 1e-9)
      throw std::invalid_argument("nu_basis: pole order gamma0 > n0 + 1");
    table_T_ = (table_T > 0.0) ? table_T : 64.0;
    table_n_ = (table_n > 0) ? table_n : (1 << 18);
    if (n0_ < 0) {
      rho_table_ = tabulate_inverse_transform(
          [this](double w) { return complexd(1.0 / profile_.eval(w), 0.0); }, table_n_,
          table_T_);
    } else {
      rho_table_ = tabulate_inverse_transform(
          [this](double w) {
            if (w == 0.0) return complexd(0.0, 0.0);
            return complexd((1.0 - kappa_hat(w)) / profile_.eval(w), 0.0);
          },
          table_n_, table_T_);
    }
  }

  const Eigen::VectorXd& center() const { return x0_; }
  int n0() const { return n0_; }

  // nu_hat(w, xi) per the spectral formula, numerator through r_N near the
  // origin where the Taylor cancellation is catastrophic.
  complexd spectral(double w, const Eigen::VectorXd& xi) const {
    const double t0 = xi.dot(x0_);
    return spectral_t0(w, t0);
  }

  complexd spectral_t0(double w, double t0) const {
    if (n0_ < 0) {
      if (w == 0.0) {
        const double L0 = profile_.eval(0.0);
        return complexd(1.0 / L0, 0.0);
      }
      return std::polar(1.0, -w * t0) / profile_.eval(w);
    }
    const double aw = std::abs(w);
    if (aw < 1e-13) return spectral_origin_limit(t0, w);
    const double kh = kappa_hat(aw);
    complexd num;
    if (kh >= 1.0) {
      // numerator = r_n0(t0 w) (-j t0 w)^n0 / n0!
      num = remainder_r(n0_, t0 * w) * std::pow(complexd(0.0, -t0 * w), n0_) /
            factorial(n0_);
    } else {
      num = std::polar(1.0, -w * t0) - kh * taylor_exp(n0_, w * t0);
    }
    return num / profile_.eval(w);
  }

  // Spatial form: the regularized activation shifted to t0 plus the
  // band-limited correction W (the window part of the Taylor subtraction).
  double spatial(double t, const Eigen::VectorXd& xi) const {
    const double t0 = xi.dot(x0_);
    return spatial_t0(t, t0);
  }

  double spatial_t0(double t, double t0) const {
    double v = rho_table_(t - t0);
    if (n0_ >= 0) v += correction_w(t, t0);
    return v;
  }

  // W_{t0}(t) = int_{|w|<1} kappa_hat (e^{-jwt0} - T_{n0}(wt0)) / L(w) e^{jwt} dw
  double correction_w(double t, double t0) const {
    const int nq = std::max(256, static_cast<int>(8.0 * (std::abs(t) + std::abs(t0))) + 64);
    const QuadRule q = gauss_legendre(std::min(nq, 16384), 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
      const double w = q.nodes[a];
      const double kh = kappa_hat(w);
      if (kh == 0.0) continue;
      complexd num;
      if (kh >= 1.0) {
        num = remainder_r(n0_, t0 * w) * std::pow(complexd(0.0, -t0 * w), n0_) /
              factorial(n0_);
      } else {
        num = std::polar(1.0, -w * t0) - taylor_exp(n0_, w * t0);
      }
      num *= kh / profile_.eval(w);
      // real part of num * e^{jwt} + conj at -w
      const complexd e = std::polar(1.0, w * t);
      acc += q.weights[a] * 2.0 * (num * e).real();
    }
    return acc;
  }

  // Tabulated spatial profile via the spectral form (one FFT), for
  // consistency tests against the spatial route.
  UniformTable spatial_via_fft(const Eigen::VectorXd& xi, double T, int n) const {
    const double t0 = xi.dot(x0_);
    return tabulate_inverse_transform(
        [this, t0](double w) { return spectral_t0(w, t0); }, n, T);
  }

  // sup_t |nu(t, xi)| scanned over the effective support.
  double sup_norm(const Eigen::VectorXd& xi, double pad = 48.0, double step = 0.05) const {
    const double t0 = xi.dot(x0_);
    // nu has mass both near t = t0 (shifted activation) and near t = 0 (the
    // band-limited window correction).
    const double lo = std::min(0.0, t0) - pad;
    const double hi = std::max(0.0, t0) + pad;
    double m = 0.0;
    for (double t = lo; t <= hi; t += step) m = std::max(m, std::abs(spatial_t0(t, t0)));
    return m;
  }

 private:
  complexd spectral_origin_limit(double t0, double w) const {
    const double eps = n0_ + 1 - profile_.gamma0;
    if (eps > 1e-9) return complexd(0.0, 0.0);
    // gamma0 = n0 + 1: finite limit (-j t0)^(n0+1) / ((n0+1)! C0)
    const double wr = 1e-6;
    const double c0 = profile_.eval(wr) / std::pow(wr, profile_.gamma0);
    complexd num = std::pow(complexd(0.0, -t0), n0_ + 1) / factorial(n0_ + 1);
    (void)w;
    return num / c0;
  }

  OperatorProfile profile_;
  Eigen::VectorXd x0_;
  int n0_;
  double table_T_;
  int table_n_;
  UniformTable rho_table_;
};

inline NuBasis nu_basis(const OperatorProfile& profile, const IsoWindow& window,
                        const Eigen::VectorXd& x0) {
  return NuBasis(profile, window, x0);
}

}  // namespace radonreg
