#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "radonreg/sparse_fitter.hpp"

using namespace radonreg;

namespace {

// 3-knot piecewise-linear benchmark: y = affine + sum c_k |t - k| at knots.
struct PwlBench {
  std::vector<double> knots = {-0.5, 0.1, 0.6};
  std::vector<double> c = {1.2, -0.8, 0.5};
  double a0 = 0.3, a1 = -0.4;

  double truth(double t) const {
    double v = a0 + a1 * t;
    for (std::size_t i = 0; i < knots.size(); ++i) v += c[i] * std::abs(t - knots[i]);
    return v;
  }

  void sample(Eigen::MatrixXd& X, Eigen::VectorXd& y) const {
    std::vector<double> pts = {-1.0, -0.75, -0.5, -0.3, -0.1, 0.1,
                               0.25, 0.4,   0.6,  0.8,  1.0};
    X.resize(static_cast<int>(pts.size()), 1);
    y.resize(static_cast<int>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      X(static_cast<int>(i), 0) = pts[i];
      y[static_cast<int>(i)] = truth(pts[i]);
    }
  }
};

}  // namespace

TEST_CASE("dictionary construction") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  AtomGrid g = build_dictionary(X, 1);
  REQUIRE(g.dirs.size() == 1);
  CHECK(g.dirs[0][0] == 1.0);
  REQUIRE(g.offsets[0].size() == 3);
  CHECK(g.offsets[0][0] == 0.0);
  CHECK(g.offsets[0][2] == 2.0);

  Eigen::MatrixXd X2(3, 2);
  X2 << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  AtomGrid g2 = build_dictionary(X2, 4);
  REQUIRE(g2.dirs.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double th = kPi * i / 4;
    CHECK(g2.dirs[i][0] == Catch::Approx(std::cos(th)));
    CHECK(g2.dirs[i][1] == Catch::Approx(std::sin(th)));
  }
  CHECK(g2.size() <= 4 * 3);

  // duplicate projections collapse
  Eigen::MatrixXd X3(4, 1);
  X3 << 0.5, 0.5, 1.0, 1.0;
  AtomGrid g3 = build_dictionary(X3, 1);
  CHECK(g3.offsets[0].size() == 2);
}

TEST_CASE("homogeneity normalization") {
  Eigen::VectorXd w(2);
  w << 3.0, 4.0;
  auto h = homogeneity_normalize(w, 5.0, 2.0);
  CHECK(h.xi[0] == Catch::Approx(0.6));
  CHECK(h.xi[1] == Catch::Approx(0.8));
  CHECK(h.tau == Catch::Approx(1.0));
  CHECK(h.scale == Catch::Approx(5.0));

  Eigen::VectorXd unit(2);
  unit << 0.0, 1.0;
  auto hu = homogeneity_normalize(unit, 0.3, 3.0);
  CHECK(hu.xi[1] == 1.0);
  CHECK(hu.tau == Catch::Approx(0.3));
  CHECK(hu.scale == Catch::Approx(1.0));

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(homogeneity_normalize(zero, 1.0, 2.0), std::invalid_argument);

  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd ww(3), x(3);
    for (int k = 0; k < 3; ++k) {
      ww[k] = testhelpers::gauss();
      x[k] = testhelpers::gauss();
    }
    if (ww.norm() < 1e-6) continue;
    const double b = testhelpers::gauss();
    const double g0 = testhelpers::uniform(1.0, 4.0);
    auto hh = homogeneity_normalize(ww, b, g0);
    const double lhs = std::pow(std::abs(ww.dot(x) - b), g0 - 1.0);
    const double rhs = hh.scale * std::pow(std::abs(hh.xi.dot(x) - hh.tau), g0 - 1.0);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-10 * (1.0 + lhs)));
  }
}

TEST_CASE("large lambda kills all atoms") {
  PwlBench bench;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bench.sample(X, y);
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  AtomGrid dict = build_dictionary(X, 1);
  NeuralModel m = fit_mnorm(X, y, act, 1, 1e6, dict);
  CHECK(m.K0 == 0);
  // the polynomial equals the unconstrained least-squares affine fit
  Eigen::MatrixXd P = poly_design(X, 1);
  Eigen::VectorXd b = P.colPivHouseholderQr().solve(y);
  CHECK((m.poly.coeffs - b).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("three-knot recovery") {
  PwlBench bench;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bench.sample(X, y);
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));  // |t|/2
  AtomGrid dict = build_dictionary(X, 1);
  MnormOptions opt;
  opt.resolve_on_support = true;
  NeuralModel m = fit_mnorm(X, y, act, 1, 1e-7, dict, opt);
  CHECK(m.K0 <= 3);
  CHECK(m.sparsity_certificate_ok);
  double worst = 0.0;
  for (double t = -0.95; t <= 0.95; t += 0.05) {
    Eigen::VectorXd x(1);
    x << t;
    worst = std::max(worst, std::abs(m.predict(x) - bench.truth(t)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("reported cost and monotonicity") {
  PwlBench bench;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bench.sample(X, y);
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  AtomGrid dict = build_dictionary(X, 1);
  NeuralModel m = fit_mnorm(X, y, act, 1, 1e-3, dict);
  double s = 0.0;
  for (const auto& at : m.atoms) s += std::abs(at.weight);
  CHECK(m.reg_cost == s);
  CHECK(m.monotonicity_violations == 0);
  CHECK(m.converged);
}

TEST_CASE("lambda path of the atom mass is non-increasing") {
  PwlBench bench;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bench.sample(X, y);
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  AtomGrid dict = build_dictionary(X, 1);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
    NeuralModel m = fit_mnorm(X, y, act, 1, lambda, dict);
    CHECK(m.reg_cost <= prev * (1.0 + 1e-9) + 1e-12);
    prev = m.reg_cost;
  }
}

TEST_CASE("prediction basics and the skip connection") {
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  NeuralModel m;
  m.d = 2;
  m.n0 = 1;
  m.activation = act;
  m.poly = Polynomial::zero(2, 1);
  m.poly.coeffs << 1.0, 0.5, -0.25;  // graded order {1, x2, x1}
  Eigen::VectorXd x(2);
  x << 0.4, -0.6;
  const auto basis = multi_indices(2, 1);
  double expect = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    expect += m.poly.coeffs[static_cast<int>(k)] * monomial_eval(basis[k], x);
  CHECK(m.predict(x) == Catch::Approx(expect));  // no atoms -> p0

  RidgeAtom at;
  at.xi = Eigen::Vector2d(1.0, 0.0);
  at.tau = 0.1;
  at.weight = 2.0;
  m.atoms.push_back(at);
  // symmetric activation: even about the hyperplane xi' x = tau
  Eigen::VectorXd xp(2), xm(2);
  xp << 0.1 + 0.3, 0.7;
  xm << 0.1 - 0.3, 0.7;
  m.poly.coeffs.setZero();
  CHECK(m.predict(xp) == Catch::Approx(m.predict(xm)));
  // realizes a |.| ridge plus affine when the skip is restored
  m.poly.coeffs << 1.0, 0.5, -0.25;
  CHECK(m.predict(xp) ==
        Catch::Approx(m.poly.eval(xp) + 2.0 * std::abs(xp[0] - 0.1) / 2.0)
            .epsilon(1e-12));
}

TEST_CASE("parity identification of atoms") {
  auto sym = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  auto anti = synth_antisymmetric(catalog_profile("tanh_sigmoid"));
  Eigen::VectorXd x(2);
  x << 0.33, -0.8;
  RidgeAtom at;
  at.xi = Eigen::Vector2d(std::cos(0.5), std::sin(0.5));
  at.tau = 0.27;
  at.weight = 1.4;
  RidgeAtom flipped;
  flipped.xi = -at.xi;
  flipped.tau = -at.tau;
  flipped.weight = at.weight;
  // symmetric: identical predictions
  CHECK(at.weight * sym(at.xi.dot(x) - at.tau) ==
        Catch::Approx(flipped.weight * sym(flipped.xi.dot(x) - flipped.tau)));
  // antisymmetric: sign flip, absorbed by negating the weight
  CHECK(at.weight * anti(at.xi.dot(x) - at.tau) ==
        Catch::Approx(-flipped.weight * anti(flipped.xi.dot(x) - flipped.tau)));
}

TEST_CASE("random restarts share the objective and atom mass") {
  PwlBench bench;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bench.sample(X, y);
  auto act = synth_symmetric(catalog_profile("ridge_spline_m", {2}));
  AtomGrid dict = build_dictionary(X, 1);
  std::vector<double> objs, masses;
  for (unsigned seed : {1u, 7u, 42u, 1234u, 99999u}) {
    MnormOptions opt;
    opt.seed = seed;
    opt.tol = 1e-13;
    NeuralModel m = fit_mnorm(X, y, act, 1, 3e-3, dict, opt);
    objs.push_back(m.objective);
    masses.push_back(m.reg_cost);
  }
  for (std::size_t i = 1; i < objs.size(); ++i) {
    CHECK(std::abs(objs[i] - objs[0]) < 1e-6);
    CHECK(std::abs(masses[i] - masses[0]) < 1e-6);
  }
}
