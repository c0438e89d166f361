#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radonreg/numeric.hpp"

namespace radonreg {

// Closed-form families used to dispatch exact activation/kernel formulas.
enum class ProfileFamily {
  exponential,
  tanh_sigmoid,
  arctan_sigmoid,
  ridge_spline,          // |w|^m, integer m >= 1
  fractional_spline,     // |w|^(alpha+1), alpha > 0 non-integer
  fractional_laplacian,  // |w|^alpha, alpha > 0
  custom,
};

// Null-space degree from the order of the zero at the origin: n0 = ceil(g0-1),
// with the integer convention n0 = g0 - 1 absorbed by snapping g0 to the
// nearest integer first.
inline int null_space_degree_for_order(double gamma0) {
  if (gamma0 < 0.0) throw std::invalid_argument("null_space_degree: gamma0 must be >= 0");
  const double snapped = std::round(gamma0);
  if (std::abs(gamma0 - snapped) < 1e-9) return static_cast<int>(snapped) - 1;
  return static_cast<int>(std::ceil(gamma0 - 1.0));
}

// A symmetric radial frequency profile with its admissibility metadata.
struct OperatorProfile {
  std::string name;
  std::string formula;  // display form, as printed in the catalog
  std::function<double(double)> eval;
  // Optional overflow-safe log|L_rad|, used by the admissibility scan for
  // exponentially growing profiles.
  std::function<double(double)> log_abs_eval;

  double gamma0 = 0.0;  // order of the zero at w = 0
  double gamma1 = 2.0;  // ellipticity exponent
  double C0 = 1.0;      // |L(w)| / |w|^gamma0 -> C0 as w -> 0
  double C1 = 1.0;      // |L(w)| >= C1 |w|^gamma1 for |w| > R1
  double R1 = 1.0;
  int n0 = -1;
  bool antisymmetric_variant = false;
  bool satisfies_decay = true;  // condition 3 of the nontrivial definition

  ProfileFamily family = ProfileFamily::custom;
  double param = 0.0;

  double operator()(double w) const { return eval(w); }
  double log_abs(double w) const {
    if (log_abs_eval) return log_abs_eval(w);
    return std::log(std::abs(eval(w)));
  }
  bool trivial_null_space() const { return n0 < 0; }
};

struct AdmissibilityReport {
  bool is_admissible = false;
  double estimated_gamma0 = 0.0;
  double estimated_gamma1 = 0.0;
  int n0 = -1;
  std::vector<std::string> violations;
};

inline int null_space_degree(const OperatorProfile& p) { return p.n0; }

// dim P_{n0} in dimension d.
inline int nullspace_dimension(int n0, int d) {
  if (n0 < 0) return 0;
  return static_cast<int>(std::llround(binomial(n0 + d, d)));
}

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

inline OperatorProfile catalog_profile(const std::string& name,
                                       const std::vector<double>& params = {}) {
  OperatorProfile p;
  p.name = name;
  auto need_param = [&](const char* what) -> double {
    if (params.empty())
      throw std::invalid_argument("catalog_profile: '" + name + "' needs parameter " + what);
    return params[0];
  };

  if (name == "exponential") {
    p.formula = "1 + w^2";
    p.eval = [](double w) { return 1.0 + w * w; };
    p.gamma0 = 0.0;
    p.gamma1 = 2.0;
    p.C0 = 1.0;
    p.C1 = 0.5;
    p.R1 = 2.0;
    p.n0 = -1;
    p.family = ProfileFamily::exponential;
  } else if (name == "tanh_sigmoid") {
    // Printed as sinh(pi w)/pi; stored with |w| so the radial profile is
    // symmetric, the sign multiplier being part of the antisymmetric filter.
    p.formula = "sinh(pi*w)/pi";
    p.eval = [](double w) { return std::sinh(kPi * std::abs(w)) / kPi; };
    p.log_abs_eval = [](double w) {
      const double x = kPi * std::abs(w);
      // log(sinh x) = x + log(1 - e^{-2x}) - log 2
      if (x > 30.0) return x - std::log(2.0) - std::log(kPi);
      return std::log(std::sinh(x)) - std::log(kPi);
    };
    p.gamma0 = 1.0;
    p.gamma1 = 2.0;
    p.C0 = 1.0;
    p.C1 = 1.0;
    p.R1 = 2.0;
    p.n0 = 0;
    p.antisymmetric_variant = true;
    p.family = ProfileFamily::tanh_sigmoid;
  } else if (name == "arctan_sigmoid") {
    p.formula = "w*e^|w|";
    p.eval = [](double w) { return std::abs(w) * std::exp(std::abs(w)); };
    p.log_abs_eval = [](double w) {
      const double x = std::abs(w);
      return std::log(x) + x;
    };
    p.gamma0 = 1.0;
    p.gamma1 = 2.0;
    p.C0 = 1.0;
    p.C1 = 1.0;
    p.R1 = 2.0;
    p.n0 = 0;
    p.antisymmetric_variant = true;
    p.family = ProfileFamily::arctan_sigmoid;
  } else if (name == "ridge_spline_m") {
    const double md = need_param("m");
    const int m = static_cast<int>(std::llround(md));
    if (m < 1 || std::abs(md - m) > 1e-9)
      throw std::invalid_argument("catalog_profile: ridge_spline_m needs integer m >= 1");
    p.formula = "|w|^" + std::to_string(m);
    p.eval = [m](double w) { return std::pow(std::abs(w), m); };
    p.log_abs_eval = [m](double w) { return m * std::log(std::abs(w)); };
    p.gamma0 = m;
    p.gamma1 = m;
    p.C0 = 1.0;
    p.C1 = 0.99;
    p.R1 = 1.0;
    p.n0 = m - 1;
    p.family = ProfileFamily::ridge_spline;
    p.param = m;
  } else if (name == "fractional_spline_alpha") {
    const double a = need_param("alpha");
    if (a <= 0.0) throw std::invalid_argument("catalog_profile: alpha must be > 0");
    if (std::abs(a - std::round(a)) < 1e-9)
      throw std::invalid_argument("catalog_profile: fractional_spline_alpha needs non-integer alpha");
    p.formula = "|w|^" + std::to_string(a + 1.0);
    p.eval = [a](double w) { return std::pow(std::abs(w), a + 1.0); };
    p.log_abs_eval = [a](double w) { return (a + 1.0) * std::log(std::abs(w)); };
    p.gamma0 = a + 1.0;
    p.gamma1 = a + 1.0;
    p.C0 = 1.0;
    p.C1 = 0.99;
    p.R1 = 1.0;
    p.n0 = static_cast<int>(std::ceil(a));
    p.family = ProfileFamily::fractional_spline;
    p.param = a;
  } else if (name == "fractional_laplacian_alpha") {
    const double a = need_param("alpha");
    if (a <= 0.0) throw std::invalid_argument("catalog_profile: alpha must be > 0");
    p.formula = "|w|^" + std::to_string(a);
    p.eval = [a](double w) { return std::pow(std::abs(w), a); };
    p.log_abs_eval = [a](double w) { return a * std::log(std::abs(w)); };
    p.gamma0 = a;
    p.gamma1 = a;
    p.C0 = 1.0;
    p.C1 = 0.99;
    p.R1 = 1.0;
    p.n0 = null_space_degree_for_order(a);
    p.family = ProfileFamily::fractional_laplacian;
    p.param = a;
  } else {
    throw std::invalid_argument("catalog_profile: unknown profile '" + name + "'");
  }
  return p;
}

inline std::vector<std::string> catalog_names() {
  return {"exponential",       "tanh_sigmoid",           "arctan_sigmoid",
          "ridge_spline_m",    "fractional_spline_alpha", "fractional_laplacian_alpha"};
}

// ---------------------------------------------------------------------------
// Numerical admissibility check
// ---------------------------------------------------------------------------

struct AdmissibilityGrid {
  double w_min = 1e-4;
  double w_max = 1e3;
  int n = 400;  // log-spaced
};

inline AdmissibilityReport check_admissibility(const OperatorProfile& p,
                                               const AdmissibilityGrid& grid = {}) {
  if (grid.w_min > 1e-4 || grid.w_max < 1e3 || grid.n < 32)
    throw std::invalid_argument("check_admissibility: grid must cover [1e-4, 1e3]");
  AdmissibilityReport rep;
  rep.n0 = p.n0;

  std::vector<double> w(grid.n), logw(grid.n), logL(grid.n);
  const double lmin = std::log(grid.w_min), lmax = std::log(grid.w_max);
  for (int i = 0; i < grid.n; ++i) {
    logw[i] = lmin + (lmax - lmin) * i / (grid.n - 1);
    w[i] = std::exp(logw[i]);
    logL[i] = p.log_abs(w[i]);
    if (!std::isfinite(logL[i]) && !p.log_abs_eval) {
      rep.violations.push_back("profile evaluation not finite at w=" + std::to_string(w[i]));
    }
  }

  // Non-vanishing away from the origin: flag sign changes or tiny magnitudes.
  double max_abs = 0.0;
  for (int i = 0; i < grid.n; ++i) max_abs = std::max(max_abs, std::abs(p.eval(w[i])));
  for (int i = 1; i < grid.n; ++i) {
    const double a = p.eval(w[i - 1]), b = p.eval(w[i]);
    if (a * b < 0.0 || (w[i] > 10.0 * grid.w_min && std::abs(b) < 1e-13 * max_abs)) {
      rep.violations.push_back("zero away from origin near w=" + std::to_string(w[i]));
      break;
    }
  }

  // gamma0: least-squares slope of log|L| vs log w over the smallest decade.
  {
    std::vector<double> xs, ys;
    for (int i = 0; i < grid.n; ++i)
      if (w[i] <= 10.0 * grid.w_min) {
        xs.push_back(logw[i]);
        ys.push_back(logL[i]);
      }
    const double spread = *std::max_element(ys.begin(), ys.end()) -
                          *std::min_element(ys.begin(), ys.end());
    if (spread < 1e-6) {
      rep.estimated_gamma0 = 0.0;  // flat profile at the origin
    } else {
      const LineFit f = fit_line(xs, ys);
      if (f.r2 < 0.999) {
        rep.violations.push_back("indeterminate order at the origin (R^2 < 0.999)");
      }
      rep.estimated_gamma0 = f.slope;
    }
  }

  // gamma1: infimum finite-difference slope over the largest decade.
  {
    double inf_slope = std::numeric_limits<double>::infinity();
    for (int i = 1; i < grid.n; ++i)
      if (w[i - 1] >= grid.w_max / 10.0) {
        const double s = (logL[i] - logL[i - 1]) / (logw[i] - logw[i - 1]);
        inf_slope = std::min(inf_slope, s);
      }
    rep.estimated_gamma1 = inf_slope;
    if (!(inf_slope > 1.0))
      rep.violations.push_back("ellipticity failure: asymptotic slope <= 1");
  }

  // Declared ellipticity bound |L| >= C1 |w|^gamma1 beyond R1.
  for (int i = 0; i < grid.n; ++i) {
    if (w[i] > p.R1 && logL[i] < std::log(p.C1) + p.gamma1 * logw[i] - 1e-9) {
      rep.violations.push_back("declared bound C1*|w|^gamma1 violated at w=" +
                               std::to_string(w[i]));
      break;
    }
  }

  // Order consistency with the declared metadata.
  if (std::abs(rep.estimated_gamma0 - p.gamma0) > 0.1)
    rep.violations.push_back("estimated gamma0 inconsistent with declared order");
  if (!p.satisfies_decay)
    rep.violations.push_back("declared decay condition (L* phi in L_{1,n0}) not satisfied");

  // Estimation noise: snap the measured order to the nearest integer before
  // applying the ceil rule.
  double g0 = std::max(0.0, rep.estimated_gamma0);
  if (std::abs(g0 - std::round(g0)) < 0.02) g0 = std::round(g0);
  rep.n0 = null_space_degree_for_order(g0);
  rep.is_admissible = rep.violations.empty();
  return rep;
}

}  // namespace radonreg
