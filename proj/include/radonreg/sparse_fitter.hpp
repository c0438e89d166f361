#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/activations.hpp"
#include "radonreg/nullspace.hpp"
#include "radonreg/rbf_fitter.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// The p = 1 (M-norm) branch: sparse ridge-atom network with an unpenalized
// polynomial skip connection, solved by proximal gradient over a finite
// dictionary anchored at the data projections.
// ---------------------------------------------------------------------------

struct RidgeAtom {
  Eigen::VectorXd xi;  // unit direction
  double tau = 0.0;
  double weight = 0.0;
};

struct NeuralModel {
  std::vector<RidgeAtom> atoms;
  Polynomial poly;
  Activation activation;
  int K0 = 0;
  int n0 = -1;
  int d = 1;
  double lambda = 0.0;
  double reg_cost = 0.0;  // sum |a_k|
  // solver diagnostics
  int iterations = 0;
  double duality_gap = 0.0;
  double objective = 0.0;
  int monotonicity_violations = 0;
  bool sparsity_certificate_ok = true;  // K0 <= M - dim P
  bool converged = true;

  double predict(const Eigen::VectorXd& x) const {
    if (x.size() != d) throw std::invalid_argument("predict: dimension mismatch");
    double s = poly.eval(x);
    for (const auto& a : atoms) s += a.weight * activation(a.xi.dot(x) - a.tau);
    return s;
  }
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (int i = 0; i < X.rows(); ++i) {
      const Eigen::VectorXd xi = X.row(i).transpose();
      out[i] = predict(xi);
    }
    return out;
  }
};

struct AtomGrid {
  std::vector<Eigen::VectorXd> dirs;
  std::vector<std::vector<double>> offsets;  // per direction

  int size() const {
    int s = 0;
    for (const auto& o : offsets) s += static_cast<int>(o.size());
    return s;
  }
};

// Directions: d=1 {+1}; d=2 uniform half-circle; d>=3 Fibonacci half-sphere.
// Offsets: deduplicated data projections per direction.
inline AtomGrid build_dictionary(const Eigen::MatrixXd& X, int n_dirs) {
  if (n_dirs < 1) throw std::invalid_argument("build_dictionary: n_dirs >= 1");
  const int d = static_cast<int>(X.cols());
  AtomGrid grid;
  if (d == 1) {
    Eigen::VectorXd e(1);
    e << 1.0;
    grid.dirs.push_back(e);
  } else if (d == 2) {
    for (int i = 0; i < n_dirs; ++i) {
      const double th = kPi * i / n_dirs;
      Eigen::VectorXd xi(2);
      xi << std::cos(th), std::sin(th);
      grid.dirs.push_back(xi);
    }
  } else {
    // Fibonacci sphere, retaining one representative per antipodal pair.
    const int n_full = 2 * n_dirs;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_full && static_cast<int>(grid.dirs.size()) < n_dirs; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n_full;
      if (z < 0.0) continue;  // half sphere
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * i;
      Eigen::VectorXd xi(d);
      xi.setZero();
      xi[0] = r * std::cos(th);
      xi[1] = r * std::sin(th);
      xi[2] = z;
      grid.dirs.push_back(xi.normalized());
    }
  }
  grid.offsets.resize(grid.dirs.size());
  for (std::size_t k = 0; k < grid.dirs.size(); ++k) {
    std::vector<double> taus;
    for (int m = 0; m < X.rows(); ++m) taus.push_back(grid.dirs[k].dot(X.row(m).transpose()));
    std::sort(taus.begin(), taus.end());
    for (double t : taus) {
      if (grid.offsets[k].empty() || t - grid.offsets[k].back() > 1e-9)
        grid.offsets[k].push_back(t);
    }
  }
  return grid;
}

// |w' x - b|^{g0-1} = scale |xi' x - tau|^{g0-1} with xi = w/|w|, tau = b/|w|.
struct HomogeneityNormalization {
  Eigen::VectorXd xi;
  double tau;
  double scale;
};

inline HomogeneityNormalization homogeneity_normalize(const Eigen::VectorXd& w, double b,
                                                      double gamma0) {
  const double nw = w.norm();
  if (nw == 0.0) throw std::invalid_argument("homogeneity_normalize: zero direction");
  return {w / nw, b / nw, std::pow(nw, gamma0 - 1.0)};
}

struct MnormOptions {
  int max_iter = 200000;
  double tol = 1e-11;        // relative duality gap
  double prune = 1e-10;
  unsigned seed = 0;         // nonzero seeds a random start
  bool resolve_on_support = false;
  int inner_steps = 25;      // proximal steps per polynomial update
};

inline NeuralModel fit_mnorm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Activation& activation, int n0, double lambda,
                             const AtomGrid& dict, const MnormOptions& opt = {}) {
  const int M = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  if (y.size() != M) throw std::invalid_argument("fit_mnorm: X/y size mismatch");
  const Eigen::MatrixXd P = poly_design(X, n0);
  const int K = static_cast<int>(P.cols());
  if (M < K) throw std::invalid_argument("fit_mnorm: fewer points than dim P_n0");

  // flatten dictionary and assemble the design matrix
  std::vector<RidgeAtom> atoms;
  for (std::size_t k = 0; k < dict.dirs.size(); ++k)
    for (double tau : dict.offsets[k]) atoms.push_back({dict.dirs[k], tau, 0.0});
  const int Ka = static_cast<int>(atoms.size());
  Eigen::MatrixXd Phi(M, Ka);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < Ka; ++k)
      Phi(m, k) = activation(atoms[k].xi.dot(X.row(m).transpose()) - atoms[k].tau);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pqr(P);

  // Lipschitz constant of the smooth part, 2 ||Phi||_2^2, by power iteration.
  double lip = 0.0;
  {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(Ka).normalized();
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd w = Phi.transpose() * (Phi * v);
      const double nw = w.norm();
      if (nw == 0) break;
      lip = nw;
      v = w / nw;
    }
    lip = std::max(lip, 1e-12);
  }
  const double step = 1.0 / (2.0 * lip);

  Eigen::VectorXd a = Eigen::VectorXd::Zero(Ka);
  if (opt.seed != 0) {
    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < Ka; ++k) a[k] = 0.01 * gauss(rng);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K);

  auto objective = [&](const Eigen::VectorXd& av, const Eigen::VectorXd& bv) {
    const Eigen::VectorXd r = y - Phi * av - (K ? (P * bv).eval() : Eigen::VectorXd::Zero(M));
    return r.squaredNorm() + lambda * av.lpNorm<1>();
  };

  NeuralModel model;
  double prev_obj = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  const double y_scale = y.squaredNorm() + 1.0;
  while (iter < opt.max_iter) {
    // exact least-squares polynomial update
    if (K > 0) b = pqr.solve(y - Phi * a);
    for (int inner = 0; inner < opt.inner_steps && iter < opt.max_iter; ++inner, ++iter) {
      const Eigen::VectorXd r = Phi * a + (K ? (P * b).eval() : Eigen::VectorXd::Zero(M)) - y;
      const Eigen::VectorXd g = 2.0 * (Phi.transpose() * r);
      Eigen::VectorXd an = a - step * g;
      const double thr = step * lambda;
      for (int k = 0; k < Ka; ++k)
        an[k] = (an[k] > thr) ? an[k] - thr : ((an[k] < -thr) ? an[k] + thr : 0.0);
      const double obj_new = objective(an, b);
      if (obj_new > prev_obj + 1e-12 * std::abs(prev_obj)) model.monotonicity_violations++;
      a = an;
      prev_obj = obj_new;
    }
    // duality gap for the lasso with the polynomial block eliminated
    if (K > 0) b = pqr.solve(y - Phi * a);
    Eigen::VectorXd r = y - Phi * a - (K ? (P * b).eval() : Eigen::VectorXd::Zero(M));
    Eigen::VectorXd theta = 2.0 * r;
    const double dual_inf = (Phi.transpose() * theta).lpNorm<Eigen::Infinity>();
    if (dual_inf > lambda && dual_inf > 0.0) theta *= lambda / dual_inf;
    const double primal = r.squaredNorm() + lambda * a.lpNorm<1>();
    const double dual = theta.dot(y - (K ? (P * b).eval() : Eigen::VectorXd::Zero(M))) -
                        0.25 * theta.squaredNorm();
    gap = primal - dual;
    if (gap <= opt.tol * y_scale) break;
  }

  // prune and optionally re-solve on the surviving support
  std::vector<int> support;
  for (int k = 0; k < Ka; ++k)
    if (std::abs(a[k]) > opt.prune) support.push_back(k);
  if (opt.resolve_on_support && !support.empty()) {
    const int S = static_cast<int>(support.size());
    Eigen::MatrixXd D(M, S + K);
    for (int s = 0; s < S; ++s) D.col(s) = Phi.col(support[s]);
    if (K > 0) D.rightCols(K) = P;
    Eigen::VectorXd sol = D.colPivHouseholderQr().solve(y);
    for (int s = 0; s < S; ++s) a[support[s]] = sol[s];
    if (K > 0) b = sol.tail(K);
    support.clear();
    for (int k = 0; k < Ka; ++k)
      if (std::abs(a[k]) > opt.prune) support.push_back(k);
  }

  model.d = d;
  model.n0 = n0;
  model.lambda = lambda;
  model.activation = activation;
  model.poly = Polynomial::zero(d, n0);
  if (K > 0) model.poly.coeffs = b;
  for (int k : support) {
    RidgeAtom at = atoms[k];
    at.weight = a[k];
    model.atoms.push_back(at);
    model.reg_cost += std::abs(a[k]);
  }
  model.K0 = static_cast<int>(model.atoms.size());
  model.iterations = iter;
  model.duality_gap = gap;
  model.objective = prev_obj;
  model.converged = gap <= opt.tol * y_scale;
  model.sparsity_certificate_ok = model.K0 <= M - K;
  return model;
}

}  // namespace radonreg
