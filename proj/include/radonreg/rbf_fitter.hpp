#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radonreg/activations.hpp"
#include "radonreg/nullspace.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// The p = 2 branch: f(x) = p0(x) + sum a_m rho_iso(x - x_m) with the
// orthogonality side constraint P' a = 0.
// ---------------------------------------------------------------------------

struct RbfModel {
  Eigen::MatrixXd centers;  // M x d
  Eigen::VectorXd coeffs;   // a
  Polynomial poly;          // p0, degree <= n0
  IsotropicKernel kernel;
  double kernel_sign = 1.0;  // -1 when the printed kernel is conditionally negative
  double lambda = 0.0;
  int n0 = -1;
  bool negated_kernel = false;
  double condition_estimate = 0.0;
  bool condition_warning = false;

  int dim() const { return static_cast<int>(centers.cols()); }

  double predict(const Eigen::VectorXd& x) const {
    if (x.size() != centers.cols()) throw std::invalid_argument("predict: dimension mismatch");
    double s = poly.eval(x);
    for (int m = 0; m < centers.rows(); ++m)
      s += coeffs[m] * kernel_sign * kernel.radial((x - centers.row(m).transpose()).norm());
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

inline Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const IsotropicKernel& kernel) {
  const int M = static_cast<int>(X.rows());
  Eigen::MatrixXd G(M, M);
  for (int i = 0; i < M; ++i) {
    G(i, i) = kernel.radial(0.0);
    for (int j = i + 1; j < M; ++j) {
      const double r = (X.row(i) - X.row(j)).norm();
      if (r < 1e-12) throw std::invalid_argument("gram_matrix: duplicate centers");
      G(i, j) = G(j, i) = kernel.radial(r);
    }
  }
  return G;
}

// Polynomial design matrix P_{mk} = m_k(x_m) over the graded basis.
inline Eigen::MatrixXd poly_design(const Eigen::MatrixXd& X, int n0) {
  const auto basis = multi_indices(static_cast<int>(X.cols()), n0);
  Eigen::MatrixXd P(X.rows(), static_cast<int>(basis.size()));
  for (int m = 0; m < X.rows(); ++m)
    for (std::size_t k = 0; k < basis.size(); ++k)
      P(m, static_cast<int>(k)) = monomial_eval(basis[k], X.row(m).transpose());
  return P;
}

inline RbfModel fit_rbf(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const IsotropicKernel& kernel, int n0, double lambda) {
  const int M = static_cast<int>(X.rows());
  if (y.size() != M) throw std::invalid_argument("fit_rbf: X/y size mismatch");
  if (lambda < 0.0) throw std::invalid_argument("fit_rbf: lambda must be >= 0");
  const Eigen::MatrixXd P = poly_design(X, n0);
  const int K = static_cast<int>(P.cols());
  if (M < K) throw std::invalid_argument("fit_rbf: fewer points than dim P_n0");
  if (K > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
    if (qr.rank() < K)
      throw std::invalid_argument("fit_rbf: points not unisolvent for P_n0");
  }

  Eigen::MatrixXd G = gram_matrix(X, kernel);

  // Conditional positive definiteness of the printed kernel on the constraint
  // manifold; a consistently negative form flips the kernel sign.
  double sign = 1.0;
  bool negated = false;
  if (M > K) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(M, M);
    if (K > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullU);
      basis = svd.matrixU().rightCols(M - K);  // null(P^T)
    }
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int pos = 0, neg = 0;
    for (int probe = 0; probe < 8; ++probe) {
      Eigen::VectorXd c(basis.cols());
      for (int i = 0; i < c.size(); ++i) c[i] = gauss(rng);
      Eigen::VectorXd a = basis * c;
      const double q = a.dot(G * a);
      (q >= 0 ? pos : neg)++;
    }
    if (neg == 8) {
      sign = -1.0;
      negated = true;
    }
  }
  G *= sign;

  // Saddle system [[G + lambda I, P], [P^T, 0]].
  const int n = M + K;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A.topLeftCorner(M, M) = G + lambda * Eigen::MatrixXd::Identity(M, M);
  if (K > 0) {
    A.topRightCorner(M, K) = P;
    A.bottomLeftCorner(K, M) = P.transpose();
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(M) = y;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd sol = lu.solve(rhs);
  // one step of iterative refinement
  Eigen::VectorXd resid = rhs - A * sol;
  sol += lu.solve(resid);

  RbfModel model;
  model.centers = X;
  model.coeffs = sol.head(M);
  model.poly = Polynomial::zero(static_cast<int>(X.cols()), n0);
  if (K > 0) model.poly.coeffs = sol.tail(K);
  model.kernel = kernel;
  model.kernel_sign = sign;
  model.negated_kernel = negated;
  model.lambda = lambda;
  model.n0 = n0;

  // cheap condition estimate from the LU diagonal
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  model.condition_estimate = d.maxCoeff() / std::max(d.minCoeff(), 1e-300);
  model.condition_warning = model.condition_estimate > 1e12;
  return model;
}

// a^T G a, the quadratic Radon-domain regularization cost.
inline double reg_cost(const RbfModel& model) {
  const Eigen::MatrixXd G = gram_matrix(model.centers, model.kernel) * model.kernel_sign;
  return model.coeffs.dot(G * model.coeffs);
}

}  // namespace radonreg
