#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "radonreg/numeric.hpp"

namespace radonreg {

using complexd = std::complex<double>;

// All transforms follow the convention
//   forward:  g_hat(w) = (2*pi)^-d * integral g(t) e^{-j w t} dt
//   inverse:  g(t)     = integral g_hat(w) e^{+j w t} dw
// so the inverse carries no normalization factor.

// Physical angular frequency of FFT bin k for an n-point grid with spacing dt.
inline double fft_omega(int k, int n, double dt) {
  const int kk = (k <= n / 2) ? k : k - n;
  return kTwoPi * static_cast<double>(kk) / (static_cast<double>(n) * dt);
}

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace detail

// Inverse transform of a spectrum sampled on the FFT bins of an n-point grid
// covering t in [-T, T).  spec[k] = g_hat(fft_omega(k, n, dt)), dt = 2T/n.
// Returns complex samples g(t_i), t_i = -T + i*dt.
inline std::vector<complexd> inverse_fft(const std::vector<complexd>& spec, double T) {
  const int n = static_cast<int>(spec.size());
  if (n < 2) throw std::invalid_argument("inverse_fft: spectrum too short");
  const double dt = 2.0 * T / n;
  const double t0 = -T;
  std::vector<complexd> shifted(n);
  for (int k = 0; k < n; ++k) {
    const double w = fft_omega(k, n, dt);
    shifted[k] = spec[k] * std::polar(1.0, w * t0);
  }
  std::vector<complexd> out(n);
  detail::fft_engine().inv(out, shifted);
  const double scale = kTwoPi / dt;  // N * dw
  for (auto& v : out) v *= scale;
  return out;
}

inline std::vector<double> inverse_fft_real(const std::vector<complexd>& spec, double T) {
  auto c = inverse_fft(spec, T);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

// Forward transform of real samples g(t_i), t_i = -T + i*dt, onto the FFT bins.
inline std::vector<complexd> forward_fft(const std::vector<double>& samples, double T) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw std::invalid_argument("forward_fft: too few samples");
  const double dt = 2.0 * T / n;
  const double t0 = -T;
  std::vector<complexd> in(samples.begin(), samples.end());
  std::vector<complexd> spec(n);
  detail::fft_engine().fwd(spec, in);
  const double scale = dt / kTwoPi;
  for (int k = 0; k < n; ++k) {
    const double w = fft_omega(k, n, dt);
    spec[k] *= scale * std::polar(1.0, -w * t0);
  }
  return spec;
}

// Tabulates t -> integral S(w) e^{jwt} dw on [-T, T) for a real-symmetric or
// imaginary-antisymmetric spectrum given on w >= 0 through `spectrum`.
// `odd_imaginary` selects the antisymmetric continuation S(-w) = conj(S(w)).
inline UniformTable tabulate_inverse_transform(
    const std::function<complexd(double)>& spectrum, int n, double T) {
  std::vector<complexd> spec(n);
  const double dt = 2.0 * T / n;
  for (int k = 0; k < n; ++k) {
    const double w = fft_omega(k, n, dt);
    if (w >= 0.0) {
      spec[k] = spectrum(w);
    } else {
      spec[k] = std::conj(spectrum(-w));
    }
  }
  auto vals = inverse_fft_real(spec, T);
  return UniformTable(-T, dt, std::move(vals));
}

// ---------------------------------------------------------------------------
// The smooth low-pass window kappa_hat shared by the null-space projectors,
// the activation synthesis and the nu-basis corrections.  The profile is 1 on
// [0,1/2], 0 on [1,inf) and follows a C^inf partition-of-unity step on the
// transition, flat to all orders at both seams.
// ---------------------------------------------------------------------------

namespace detail {
// Step sharpness; larger values speed up the spatial decay of the window at
// the cost of a steeper mid-transition.
inline constexpr double kKappaBumpBeta = 4.0;

inline double bump_h(double x) {
  return (x <= 0.0) ? 0.0 : std::exp(-kKappaBumpBeta / x);
}
}  // namespace detail

// C^inf monotone step: 0 for x<=0, 1 for x>=1.
inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = detail::bump_h(x);
  const double b = detail::bump_h(1.0 - x);
  return a / (a + b);
}

inline double kappa_hat(double rho) {
  rho = std::abs(rho);
  if (rho < 0.5) return 1.0;
  if (rho >= 1.0) return 0.0;
  return smooth_step(2.0 * (1.0 - rho));
}

// ---------------------------------------------------------------------------
// Maclaurin remainder helpers shared by the nu basis and the activation
// synthesis.
// ---------------------------------------------------------------------------

// r_N(w) = (e^{-jw} - sum_{n<=N} (-jw)^n/n!) / ((-jw)^N / N!), evaluated by
// the tail series for small |w| where the direct form cancels
// catastrophically.  The denominator sign is the one consistent with the
// small-w limit -jw/(N+1) and with the nu-basis regrouping.
inline complexd remainder_r(int N, double w) {
  if (N < 0) throw std::invalid_argument("remainder_r: N >= 0 required");
  if (std::abs(w) < 1.0) {
    // r_N = sum_{m>=1} (-jw)^m N! / (N+m)!
    const complexd mjw(0.0, -w);
    complexd term(1.0, 0.0);
    complexd sum(0.0, 0.0);
    double fac = 1.0;  // N!/(N+m)! accumulated
    for (int m = 1; m <= 40; ++m) {
      term *= mjw;
      fac /= (N + m);
      const complexd contrib = term * fac;
      sum += contrib;
      if (std::abs(contrib) < 1e-18) break;
    }
    return sum;
  }
  complexd taylor(0.0, 0.0);
  complexd term(1.0, 0.0);
  const complexd mjw(0.0, -w);
  for (int n = 0; n <= N; ++n) {
    if (n > 0) term *= mjw / static_cast<double>(n);
    taylor += term;
  }
  const complexd num = std::exp(complexd(0.0, -w)) - taylor;
  const complexd den = std::pow(mjw, N) / factorial(N);
  return num / den;
}

// Taylor polynomial sum_{n<=N} (-jwt)^n / n!.
inline complexd taylor_exp(int N, double wt) {
  complexd term(1.0, 0.0), sum(1.0, 0.0);
  const complexd m(0.0, -wt);
  for (int n = 1; n <= N; ++n) {
    term *= m / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

// e^{-jw} - T_N(-jw), cancellation-safe; N = -1 returns e^{-jw}.
inline complexd remainder_fp_tail(int N, double w) {
  if (N < 0) return std::exp(complexd(0.0, -w));
  return remainder_r(N, w) * std::pow(complexd(0.0, -w), N) / factorial(N);
}

}  // namespace radonreg
