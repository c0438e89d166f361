#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "radonreg/rbf_fitter.hpp"

using namespace radonreg;

namespace {

IsotropicKernel linear_kernel_1d() {
  // rho_iso(r) = r, built from the alpha = 2, d = 1 Green branch (-r/2) scaled
  return IsotropicKernel::from_green(green_kernel(2.0, 1), -2.0, 1,
                                     KernelMode::classical, 1, "linear");
}

IsotropicKernel cubic_kernel_1d() {
  // rho_iso(r) = r^3 via the alpha = 4, d = 1 Green branch (r^3 / 12)
  return IsotropicKernel::from_green(green_kernel(4.0, 1), 12.0, 1,
                                     KernelMode::classical, 2, "cubic");
}

}  // namespace

TEST_CASE("gram matrix of the linear kernel") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  Eigen::MatrixXd G = gram_matrix(X, linear_kernel_1d());
  CHECK(G(0, 0) == 0.0);
  CHECK(G(0, 1) == Catch::Approx(1.0));
  CHECK(G(1, 0) == Catch::Approx(1.0));
  CHECK(G(1, 1) == 0.0);

  Eigen::MatrixXd Xdup(2, 1);
  Xdup << 0.5, 0.5;
  CHECK_THROWS_AS(gram_matrix(Xdup, linear_kernel_1d()), std::invalid_argument);
}

TEST_CASE("conditional definiteness on the constraint manifold") {
  // -r is conditionally positive definite of order 1: a' (-G) a > 0 on sum a = 0
  Eigen::MatrixXd X(7, 1);
  for (int i = 0; i < 7; ++i) X(i, 0) = testhelpers::uniform(-2.0, 2.0) + i;
  Eigen::MatrixXd G = gram_matrix(X, linear_kernel_1d());
  for (int probe = 0; probe < 50; ++probe) {
    Eigen::VectorXd a(7);
    for (int i = 0; i < 7; ++i) a[i] = testhelpers::gauss();
    a.array() -= a.mean();  // P^T a = 0 for n0 = 0
    if (a.norm() < 1e-12) continue;
    CHECK(a.dot(-G * a) > 0.0);
  }
}

TEST_CASE("interpolation at lambda = 0") {
  Eigen::MatrixXd X(6, 1);
  X << -2.0, -1.1, 0.0, 0.7, 1.5, 2.4;
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = std::sin(1.7 * X(i, 0));
  RbfModel m = fit_rbf(X, y, cubic_kernel_1d(), 1, 0.0);
  Eigen::VectorXd pred = m.predict(X);
  CHECK((pred - y).cwiseAbs().maxCoeff() < 1e-8 * y.cwiseAbs().maxCoeff());
}

TEST_CASE("polynomial data gives a zero coefficient vector") {
  Eigen::MatrixXd X(8, 2);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = testhelpers::uniform(-1.0, 1.0);
    X(i, 1) = testhelpers::uniform(-1.0, 1.0);
  }
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y[i] = 0.3 - 1.2 * X(i, 0) + 0.8 * X(i, 1);
  auto kernel = synth_rbf_kernel(catalog_profile("ridge_spline_m", {2}), 2,
                                 KernelMode::radon);
  for (double lambda : {0.0, 0.1, 10.0}) {
    RbfModel m = fit_rbf(X, y, kernel, 1, lambda);
    CHECK(m.coeffs.cwiseAbs().maxCoeff() < 1e-8);
    Eigen::VectorXd x(2);
    x << 0.3, -0.4;
    CHECK(m.predict(x) == Catch::Approx(0.3 - 1.2 * 0.3 + 0.8 * (-0.4)).margin(1e-8));
  }
}

TEST_CASE("cubic kernel interpolation matches the natural spline oracle") {
  std::vector<double> xs = {-2.0, -0.9, 0.1, 1.2, 2.3};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::exp(-x * x) + 0.3 * x);
  Eigen::MatrixXd X(static_cast<int>(xs.size()), 1);
  Eigen::VectorXd y(static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    X(static_cast<int>(i), 0) = xs[i];
    y[static_cast<int>(i)] = ys[i];
  }
  RbfModel m = fit_rbf(X, y, cubic_kernel_1d(), 1, 0.0);
  testhelpers::NaturalSpline oracle(xs, ys);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double t = -2.0 + 4.3 * i / 49.0;
    Eigen::VectorXd x(1);
    x << t;
    worst = std::max(worst, std::abs(m.predict(x) - oracle(t)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("prediction formula basics") {
  Eigen::MatrixXd X(3, 1);
  X << -1.0, 0.0, 1.0;
  RbfModel m;
  m.centers = X;
  m.coeffs = Eigen::VectorXd::Zero(3);
  m.kernel = cubic_kernel_1d();
  m.n0 = 1;
  m.poly = Polynomial::zero(1, 1);
  m.poly.coeffs << 2.0, -0.5;  // 2 - 0.5 t
  Eigen::VectorXd x(1);
  x << 0.8;
  CHECK(m.predict(x) == Catch::Approx(2.0 - 0.5 * 0.8));

  m.coeffs << 0.0, 1.0, 0.0;
  m.poly.coeffs.setZero();
  CHECK(m.predict(x) == Catch::Approx(std::pow(0.8, 3)));

  // batch consistency
  Eigen::MatrixXd Q(2, 1);
  Q << 0.8, -0.3;
  Eigen::VectorXd batch = m.predict(Q);
  Eigen::VectorXd q1(1), q2(1);
  q1 << 0.8;
  q2 << -0.3;
  CHECK(batch[0] == m.predict(q1));
  CHECK(batch[1] == m.predict(q2));
}

TEST_CASE("regularization cost") {
  Eigen::MatrixXd X(5, 1);
  X << -2.0, -1.0, 0.0, 1.0, 2.0;
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) y[i] = std::cos(X(i, 0));
  RbfModel m = fit_rbf(X, y, cubic_kernel_1d(), 1, 0.0);
  CHECK(reg_cost(m) >= 0.0);

  RbfModel zero = m;
  zero.coeffs.setZero();
  CHECK(reg_cost(zero) == 0.0);

  // cost depends on a only: shifting the polynomial leaves it unchanged
  RbfModel shifted = m;
  shifted.poly.coeffs[0] += 100.0;
  CHECK(reg_cost(shifted) == Catch::Approx(reg_cost(m)));
}

TEST_CASE("solution is invariant under data permutation") {
  Eigen::MatrixXd X(6, 1);
  X << -2.0, -1.1, 0.0, 0.7, 1.5, 2.4;
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = std::sin(2.0 * X(i, 0)) + 0.2 * X(i, 0);
  RbfModel m1 = fit_rbf(X, y, cubic_kernel_1d(), 1, 0.3);

  std::vector<int> perm = {4, 0, 5, 2, 1, 3};
  Eigen::MatrixXd Xp(6, 1);
  Eigen::VectorXd yp(6);
  for (int i = 0; i < 6; ++i) {
    Xp(i, 0) = X(perm[i], 0);
    yp[i] = y[perm[i]];
  }
  RbfModel m2 = fit_rbf(Xp, yp, cubic_kernel_1d(), 1, 0.3);
  for (int i = 0; i < 6; ++i)
    CHECK(m2.coeffs[i] == Catch::Approx(m1.coeffs[perm[i]]).margin(1e-10));
  CHECK((m2.poly.coeffs - m1.poly.coeffs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lambda path monotonicity") {
  Eigen::MatrixXd X(10, 1);
  for (int i = 0; i < 10; ++i) X(i, 0) = -2.0 + 4.0 * i / 9.0;
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y[i] = std::sin(3.0 * X(i, 0));
  double prev_cost = std::numeric_limits<double>::infinity();
  double prev_loss = -1.0;
  for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    RbfModel m = fit_rbf(X, y, cubic_kernel_1d(), 1, lambda);
    const double cost = reg_cost(m);
    const double loss = (m.predict(X) - y).squaredNorm();
    CHECK(cost <= prev_cost * (1.0 + 1e-10));
    CHECK(loss >= prev_loss - 1e-10);
    prev_cost = cost;
    prev_loss = loss;
  }
}

TEST_CASE("kernel negation notice for the printed linear kernel") {
  Eigen::MatrixXd X(6, 1);
  X << -2.5, -1.0, -0.2, 0.6, 1.3, 2.2;
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = std::abs(X(i, 0));
  RbfModel m = fit_rbf(X, y, linear_kernel_1d(), 0, 1e-6);
  CHECK(m.negated_kernel);
  CHECK(m.kernel_sign == -1.0);
  // interpolation still holds near lambda = 0
  CHECK((m.predict(X) - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("non-unisolvent designs are rejected") {
  Eigen::MatrixXd X(3, 2);
  X << 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;  // collinear: affine design rank-deficient
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  auto kernel = synth_rbf_kernel(catalog_profile("ridge_spline_m", {2}), 2,
                                 KernelMode::radon);
  CHECK_THROWS_AS(fit_rbf(X, y, kernel, 1, 0.0), std::invalid_argument);
}
