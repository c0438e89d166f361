#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "radonreg/activations.hpp"

using namespace radonreg;

namespace {

// scale + degree-n0 polynomial fit of `num` against `cf` on [-5, 5]; returns
// the max residual.
double closed_vs_numeric_residual(const Activation& cf, const Activation& num, int n0) {
  std::vector<double> ts;
  for (double t = -5.0; t <= 5.0; t += 0.01) ts.push_back(t);
  const int K = n0 + 2;  // scale + polynomial coefficients
  Eigen::MatrixXd A(static_cast<int>(ts.size()), K);
  Eigen::VectorXd y(static_cast<int>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    A(static_cast<int>(i), 0) = cf(ts[i]);
    double p = 1.0;
    for (int k = 0; k <= n0; ++k) {
      A(static_cast<int>(i), 1 + k) = p;
      p *= ts[i];
    }
    y[static_cast<int>(i)] = num(ts[i]);
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  return (y - A * c).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("green kernel constants") {
  CHECK(green_kernel(2, 3).constant == Catch::Approx(1.0 / (4.0 * kPi)));
  CHECK(green_kernel(2, 1).constant == Catch::Approx(-0.5));
  auto g31 = green_kernel(3, 1);
  CHECK(g31.branch == GreenBranch::power_log);
  CHECK(g31.n == 1);
  CHECK(g31.constant == Catch::Approx(green_constant_B(1, 1)));
  auto g22 = green_kernel(2, 2);
  CHECK(g22.branch == GreenBranch::power_log);
  CHECK(g22.n == 0);
  CHECK(g22(std::exp(1.0)) == Catch::Approx(green_constant_B(0, 2)));
  CHECK_THROWS_AS(green_kernel(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(green_kernel(-2.0, 2), std::invalid_argument);
}

TEST_CASE("printed closed forms") {
  auto relu = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  CHECK(relu(3.0) == Catch::Approx(1.5));
  CHECK(relu(-3.0) == Catch::Approx(1.5));
  CHECK(relu.derivative(2.0, 1) == Catch::Approx(0.5));

  auto frac = synth_symmetric(catalog_profile("fractional_spline_alpha", {0.5}));
  const double c = std::sin(0.25 * kPi) / (kPi * std::tgamma(0.5));
  CHECK(frac(2.0) == Catch::Approx(c * std::sqrt(2.0)));

  auto frac_a = synth_antisymmetric(catalog_profile("fractional_spline_alpha", {0.5}));
  const double ca = std::cos(0.25 * kPi) / (kPi * std::tgamma(0.5));
  CHECK(frac_a(2.0) == Catch::Approx(ca * std::sqrt(2.0)));
  CHECK(frac_a(-2.0) == Catch::Approx(-ca * std::sqrt(2.0)));

  auto relu_a = synth_antisymmetric(catalog_profile("ridge_spline_m", {2}));
  CHECK(relu_a(2.0) == Catch::Approx(2.0 * std::log(2.0)));

  auto expo = synth_symmetric(catalog_profile("exponential"));
  CHECK(expo(1.0) == Catch::Approx(std::exp(-1.0)));

  CHECK_THROWS_AS(synth_antisymmetric(catalog_profile("exponential")),
                  std::invalid_argument);
}

TEST_CASE("tanh row uses the algebraically correct identity") {
  auto a = synth_antisymmetric(catalog_profile("tanh_sigmoid"));
  for (double t : {-3.0, -1.0, 0.5, 2.0}) {
    CHECK(a(t) == Catch::Approx(1.0 / (1.0 + std::exp(-t)) - 0.5).margin(1e-15));
  }
}

TEST_CASE("closed form vs numerical synthesis") {
  struct Row {
    std::string name;
    std::vector<double> params;
    bool anti;
  };
  const std::vector<Row> rows = {
      {"exponential", {}, false},   {"ridge_spline_m", {2}, false},
      {"tanh_sigmoid", {}, true},   {"arctan_sigmoid", {}, true},
      {"ridge_spline_m", {2}, true},
  };
  for (const auto& row : rows) {
    auto prof = catalog_profile(row.name, row.params);
    Activation cf = row.anti ? synth_antisymmetric(prof) : synth_symmetric(prof);
    Activation num =
        row.anti ? synth_antisymmetric_numeric(prof) : synth_symmetric_numeric(prof);
    const double resid = closed_vs_numeric_residual(cf, num, std::max(prof.n0, 0));
    INFO(row.name << (row.anti ? " (anti)" : ""));
    CHECK(resid < 1e-3);
  }
}

TEST_CASE("numerical synthesis parity") {
  auto prof = catalog_profile("ridge_spline_m", {2});
  Activation s = synth_symmetric_numeric(prof);
  Activation a = synth_antisymmetric_numeric(prof);
  for (double t : {0.3, 1.7, 4.9}) {
    CHECK(s(t) == Catch::Approx(s(-t)).margin(1e-12));
    CHECK(a(t) == Catch::Approx(-a(-t)).margin(1e-12));
  }
}

TEST_CASE("radon-mode kernels of fractional Laplacians") {
  // (-Delta)^{1/2}: alpha = 1, radial law proportional to r in any dimension
  for (int d : {1, 2, 3}) {
    auto k = synth_rbf_kernel(catalog_profile("fractional_laplacian_alpha", {1}), d,
                              KernelMode::radon);
    const double ratio = k.radial(2.0) / k.radial(1.0);
    CHECK(ratio == Catch::Approx(2.0).margin(1e-12));
  }
  // exact constant in d = 2: 2 (2 pi)^{d-1} A_{d+1,d} r
  auto k2 = synth_rbf_kernel(catalog_profile("fractional_laplacian_alpha", {1}), 2,
                             KernelMode::radon);
  CHECK(k2.radial(1.0) == Catch::Approx(2.0 * kTwoPi * green_constant_A(3, 2)));
  CHECK(k2.radial(1.0) == Catch::Approx(-2.0));
}

TEST_CASE("kernel power-law scaling") {
  auto k = synth_rbf_kernel(catalog_profile("fractional_laplacian_alpha", {1.5}), 2,
                            KernelMode::radon);
  const double expo = 2.0 * 1.5 - 1.0;
  for (double c : {0.5, 2.0, 3.7}) {
    CHECK(k.radial(c * 1.3) / k.radial(1.3) ==
          Catch::Approx(std::pow(c, expo)).margin(1e-10));
  }
}

TEST_CASE("classical-mode linear kernel is dimension independent") {
  // |L|^2 = |w|^{d+1}  ->  rho_iso proportional to r
  for (int d : {2, 3}) {
    const double alpha = (d + 1.0) / 2.0;
    auto k = synth_rbf_kernel(catalog_profile("fractional_laplacian_alpha", {alpha}), d,
                              KernelMode::classical);
    CHECK(k.radial(3.0) / k.radial(1.0) == Catch::Approx(3.0).margin(1e-12));
  }
}

TEST_CASE("numerical kernel path against closed forms") {
  // exponential profile, classical mode, d = 1:
  // F_cl^-1 {1/(1+w^2)^2} = (1+|t|) e^{-|t|} / 4
  auto prof = catalog_profile("exponential");
  auto k1 = synth_rbf_kernel(prof, 1, KernelMode::classical, KernelGrid{16.0, 1 << 12});
  for (double r : {0.0, 0.5, 1.5, 3.0}) {
    CHECK(k1.radial(r) == Catch::Approx((1.0 + r) * std::exp(-r) / 4.0).margin(1e-5));
  }
  // d = 2 classical against a Bessel quadrature oracle
  auto k2 = synth_rbf_kernel(prof, 2, KernelMode::classical, KernelGrid{16.0, 1 << 12});
  for (double r : {0.0, 1.0, 2.5}) {
    const QuadRule q = gauss_legendre(2048, 0.0, 60.0);
    double oracle = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double rho = q.nodes[i];
      oracle += q.weights[i] * rho * std::cyl_bessel_j(0, rho * r) /
                std::pow(1.0 + rho * rho, 2.0);
    }
    oracle /= kTwoPi;
    CHECK(k2.radial(r) == Catch::Approx(oracle).margin(2e-5));
  }
}

TEST_CASE("homogeneity identity for power-law activations") {
  for (int i = 0; i < 100; ++i) {
    const double gamma0 = testhelpers::uniform(1.1, 4.0);
    Eigen::VectorXd w(2), x(2);
    w << testhelpers::gauss(), testhelpers::gauss();
    if (w.norm() < 1e-3) continue;
    x << testhelpers::gauss(), testhelpers::gauss();
    const double b = testhelpers::gauss();
    const double lhs = std::pow(std::abs(w.dot(x) - b), gamma0 - 1.0);
    const double xi_dot = (w / w.norm()).dot(x) - b / w.norm();
    const double rhs = std::pow(w.norm(), gamma0 - 1.0) *
                       std::pow(std::abs(xi_dot), gamma0 - 1.0);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-9 * (1.0 + lhs)));
  }
}

TEST_CASE("kernel rejects the unsupported singular corner") {
  CHECK_THROWS_AS(
      synth_rbf_kernel(catalog_profile("exponential"), 2, KernelMode::radon,
                       KernelGrid{}, true),
      std::invalid_argument);
}
