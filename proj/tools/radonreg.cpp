// radonreg: operator catalog, activation/kernel synthesis, Radon-domain
// verification suites, and the three fitting modes behind one CLI.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radonreg/io.hpp"
#include "radonreg/lp_fitter.hpp"
#include "radonreg/radon_lab.hpp"
#include "radonreg/rbf_fitter.hpp"
#include "radonreg/sparse_fitter.hpp"

using namespace radonreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CheckReport {
  bool ok = true;
  void line(const std::string& name, double metric, double tol, bool pass) {
    std::printf("  [%s] %-40s metric=%-12.4g tol=%-10.3g\n", pass ? "PASS" : "FAIL",
                name.c_str(), metric, tol);
    ok = ok && pass;
  }
};

int cmd_catalog_list(bool as_json) {
  if (as_json) {
    std::printf("[\n");
    bool first = true;
    for (const auto& name : catalog_names()) {
      std::vector<double> params;
      if (name == "ridge_spline_m") params = {2};
      if (name == "fractional_spline_alpha") params = {0.5};
      if (name == "fractional_laplacian_alpha") params = {2};
      auto p = catalog_profile(name, params);
      std::printf("%s  {\"name\": \"%s\", \"formula\": \"%s\", \"gamma0\": %g, "
                  "\"gamma1\": %g, \"n0\": %d, \"antisymmetric_variant\": %s}",
                  first ? "" : ",\n", p.name.c_str(), p.formula.c_str(), p.gamma0,
                  p.gamma1, p.n0, p.antisymmetric_variant ? "true" : "false");
      first = false;
    }
    std::printf("\n]\n");
    return kExitOk;
  }
  std::printf("%-28s %-22s %8s %8s %5s %6s\n", "name", "formula", "gamma0", "gamma1",
              "n0", "anti");
  for (const auto& name : catalog_names()) {
    std::vector<double> params;
    std::string shown = name;
    if (name == "ridge_spline_m") { params = {2}; shown += " (m=2)"; }
    if (name == "fractional_spline_alpha") { params = {0.5}; shown += " (a=0.5)"; }
    if (name == "fractional_laplacian_alpha") { params = {2}; shown += " (a=2)"; }
    auto p = catalog_profile(name, params);
    std::printf("%-28s %-22s %8.3g %8.3g %5d %6s\n", shown.c_str(), p.formula.c_str(),
                p.gamma0, p.gamma1, p.n0, p.antisymmetric_variant ? "yes" : "no");
  }
  return kExitOk;
}

void write_curve(const std::string& path, const std::string& xname,
                 const std::vector<double>& xs, const std::vector<double>& ys) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw DataError("cannot write '" + path + "'");
    out = &file;
  }
  (*out) << xname << ",value\n";
  out->precision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) (*out) << xs[i] << "," << ys[i] << "\n";
}

// ---------------------------------------------------------------------------
// Verification suites (compact counterparts of the acceptance criteria)
// ---------------------------------------------------------------------------

int verify_bounds() {
  CheckReport rep;
  int violations = 0;
  for (int N = 1; N <= 10; ++N)
    for (int i = 0; i < 100000; ++i) {
      const double w = -100.0 + 200.0 * i / 99999.0;
      if (std::abs(remainder_r(N, w)) > std::min(std::abs(w) / 2.0, 1.27) + 1e-12)
        ++violations;
    }
  rep.line("r_N bound min(|w|/2, 1.27), N=1..10", violations, 0, violations == 0);
  double worst = 0.0;
  for (int N = 1; N <= 10; ++N) {
    const complexd lim = remainder_r(N, 1e-6) * static_cast<double>(N + 1) / 1e-6;
    worst = std::max(worst, std::abs(lim - complexd(0.0, -1.0)));
  }
  rep.line("r_N small-w limit -jw/(N+1)", worst, 1e-4, worst < 1e-4);
  const double tail = std::abs(remainder_r(5, 1e4));
  rep.line("|r_5| -> 1 at w=1e4", tail, 0.01, std::abs(tail - 1.0) < 0.01);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int verify_radon() {
  CheckReport rep;
  const double sig = 0.35;
  Image img = Image::from_function(2.0, 256, [sig](double x, double y) {
    return std::exp(-(x * x + y * y) / (2 * sig * sig));
  });
  SinogramSpec spec;
  spec.T = 3.0;
  spec.n_t = 1024;
  spec.n_theta = 360;
  auto fw = radon_forward(img, spec);
  Image rec = backproject(kfilter(fw.sino, 2, FilterVariant::symmetric), 2.0, 256);
  const double err = rec.rel_l2_error(img);
  rep.line("FBP roundtrip rel L2 (256^2/360)", err, 0.02, err < 0.02);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int verify_slice() {
  CheckReport rep;
  const double sig = 0.35;
  Image img = Image::from_function(2.0, 256, [sig](double x, double y) {
    return std::exp(-(x * x + y * y) / (2 * sig * sig));
  });
  SinogramSpec spec;
  spec.T = 3.0;
  spec.n_t = 1024;
  spec.n_theta = 36;
  auto fw = radon_forward(img, spec);
  double worst = 0.0;
  for (int j = 0; j < spec.n_theta; ++j) {
    auto cs = column_spectrum(fw.sino, j);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < spec.n_t; ++k) {
      const double w = fft_omega(k, spec.n_t, spec.dt());
      if (std::abs(w) > 12.0 / sig) continue;
      const double fhat = sig * sig / kTwoPi * std::exp(-sig * sig * w * w / 2.0);
      num += std::norm(cs[k] / kTwoPi - complexd(fhat, 0.0));
      den += fhat * fhat;
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  rep.line("Fourier slice vs analytic spectrum", worst, 1e-3, worst < 1e-3);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int verify_nu() {
  CheckReport rep;
  auto prof = catalog_profile("ridge_spline_m", {2});
  IsoWindow win(2);
  Eigen::VectorXd x0(2);
  x0 << 1.7, -2.6;
  NuBasis nu(prof, win, x0);
  Eigen::VectorXd xi(2);
  xi << std::cos(0.7), std::sin(0.7);
  auto tab = nu.spatial_via_fft(xi, 256.0, 1 << 19);
  double worst = 0.0;
  for (double t = -10.0; t <= 10.0; t += 0.01)
    worst = std::max(worst, std::abs(nu.spatial(t, xi) - tab(t)));
  rep.line("nu spatial vs spectral route", worst, 1e-3, worst < 1e-3);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int verify_duality() {
  CheckReport rep;
  SinogramSpec spec;
  spec.T = 4.0;
  spec.n_t = 128;
  spec.n_theta = 24;
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_iso = 0.0, worst_inv = 0.0;
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1.5, 3.0}, {2.0, 2.0},
                                                            {1.25, 5.0}}) {
    for (int rep_i = 0; rep_i < 30; ++rep_i) {
      Sinogram nu(spec, SinoParity::even);
      for (int j = 0; j < spec.n_theta; ++j)
        for (int i = 0; i < spec.n_t; ++i) nu.values(i, j) = gauss(rng);
      Sinogram mapped = duality_map_Jq(nu, q);
      worst_iso = std::max(worst_iso,
                           std::abs(mapped.lq_norm(p) - nu.lq_norm(q)) /
                               std::max(1.0, nu.lq_norm(q)));
      Sinogram back = duality_map_Jq(mapped, p);
      worst_inv = std::max(
          worst_inv, (back.values - nu.values).cwiseAbs().maxCoeff());
    }
  }
  rep.line("isometry |J_q v|_p = |v|_q", worst_iso, 1e-10, worst_iso < 1e-10);
  rep.line("inverse J_p(J_q v) = v", worst_inv, 1e-10, worst_inv < 1e-10);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int verify_equivalence() {
  CheckReport rep;
  auto prof = catalog_profile("fractional_laplacian_alpha", {1});
  IsoWindow win(2);
  Eigen::MatrixXd X(3, 2);
  X << -1.0, -0.4, 0.8, -0.7, 0.2, 1.1;
  Eigen::VectorXd a(3);
  a << 1.0, -0.4, -0.6;  // sum zero (n0 = 0 orthogonality)
  LpGrid grid;
  auto repdata = p2_consistency(a, X, prof, win, grid);
  rep.line("p=2 forward vs kernel superposition", repdata.rms_rel_diff, 0.05,
           repdata.rms_rel_diff < 0.05);
  return rep.ok ? kExitOk : kExitVerifyFail;
}

int cmd_verify(const std::string& suite) {
  std::printf("verify %s\n", suite.c_str());
  if (suite == "bounds") return verify_bounds();
  if (suite == "radon") return verify_radon();
  if (suite == "slice") return verify_slice();
  if (suite == "nu") return verify_nu();
  if (suite == "duality") return verify_duality();
  if (suite == "equivalence") return verify_equivalence();
  std::fprintf(stderr, "unknown suite '%s'\n", suite.c_str());
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radon-domain regularization toolkit"};
  app.require_subcommand(1);

  // catalog
  auto* catalog = app.add_subcommand("catalog", "operator catalog");
  auto* catalog_list = catalog->add_subcommand("list", "list built-in profiles");
  bool catalog_json = false;
  catalog_list->add_flag("--json", catalog_json, "emit structured output");

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize activations and kernels");
  auto* synth_act = synth->add_subcommand("activation", "1D activation curve");
  auto* synth_ker = synth->add_subcommand("kernel", "radial kernel curve");
  std::string profile_name;
  std::vector<double> profile_params;
  bool antisym = false, numeric = false;
  double tmin = -5.0, tmax = 5.0, rmax = 5.0;
  int samples = 1001, dim = 2;
  std::string mode_str = "radon", out_path;
  for (auto* sc : {synth_act, synth_ker}) {
    sc->add_option("--profile", profile_name, "catalog profile name")->required();
    sc->add_option("--param", profile_params, "profile parameters");
    sc->add_option("--out", out_path, "output CSV (default stdout)");
    sc->add_option("--samples", samples, "number of samples");
  }
  synth_act->add_flag("--antisymmetric", antisym, "antisymmetric variant");
  synth_act->add_flag("--numeric", numeric, "force the numerical synthesis path");
  synth_act->add_option("--tmin", tmin);
  synth_act->add_option("--tmax", tmax);
  synth_ker->add_option("--dim", dim, "ambient dimension")->required();
  synth_ker->add_option("--mode", mode_str, "radon|classical");
  synth_ker->add_option("--rmax", rmax);

  // verify
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  verify->add_option("suite", suite, "radon|slice|nu|bounds|duality|equivalence")
      ->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model");
  std::string fit_mode, data_path, model_out;
  double lambda = 0.0, p_exp = 1.5;
  int n_dirs = 16, grid_size = 96;
  unsigned seed = 1;
  std::string kernel_mode = "radon";
  fit->add_option("--mode", fit_mode, "rbf|mnorm|lp")->required();
  fit->add_option("--profile", profile_name, "catalog profile name")->required();
  fit->add_option("--param", profile_params, "profile parameters");
  fit->add_flag("--antisymmetric", antisym, "antisymmetric activation (mnorm)");
  fit->add_option("--lambda", lambda, "regularization weight")->required();
  fit->add_option("--data", data_path, "training CSV (header x1..xd,y)")->required();
  fit->add_option("--out", model_out, "model JSON path")->required();
  fit->add_option("--p", p_exp, "exponent for lp mode");
  fit->add_option("--dirs", n_dirs, "dictionary directions (mnorm)");
  fit->add_option("--grid-size", grid_size, "field resolution (lp)");
  fit->add_option("--seed", seed, "rng seed for reproducible fits");
  fit->add_option("--kernel-mode", kernel_mode, "radon|classical (rbf)");

  // predict
  auto* predict = app.add_subcommand("predict", "predict from a model file");
  std::string model_path, pred_out, truth_path;
  predict->add_option("--model", model_path, "model JSON")->required();
  predict->add_option("--data", data_path, "feature CSV (header x1..xd)")->required();
  predict->add_option("--out", pred_out, "prediction CSV")->required();
  predict->add_option("--truth", truth_path, "CSV with y column for MSE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*catalog_list) return cmd_catalog_list(catalog_json);

    if (*synth_act) {
      auto profile = catalog_profile(profile_name, profile_params);
      Activation act =
          antisym ? (numeric ? synth_antisymmetric_numeric(profile)
                             : synth_antisymmetric(profile))
                  : (numeric ? synth_symmetric_numeric(profile) : synth_symmetric(profile));
      std::vector<double> ts(samples), vs(samples);
      for (int i = 0; i < samples; ++i) {
        ts[i] = tmin + (tmax - tmin) * i / (samples - 1);
        vs[i] = act(ts[i]);
      }
      write_curve(out_path, "t", ts, vs);
      return kExitOk;
    }
    if (*synth_ker) {
      auto profile = catalog_profile(profile_name, profile_params);
      const KernelMode mode =
          (mode_str == "classical") ? KernelMode::classical : KernelMode::radon;
      IsotropicKernel k = synth_rbf_kernel(profile, dim, mode);
      std::vector<double> rs(samples), vs(samples);
      for (int i = 0; i < samples; ++i) {
        rs[i] = rmax * i / (samples - 1.0);
        vs[i] = k.radial(rs[i]);
      }
      write_curve(out_path, "r", rs, vs);
      return kExitOk;
    }
    if (*verify) return cmd_verify(suite);

    if (*fit) {
      Dataset ds = load_dataset(data_path, true);
      auto profile = catalog_profile(profile_name, profile_params);
      ModelFile mf;
      mf.mode = fit_mode;
      mf.profile = {profile_name, profile_params, antisym};
      mf.d = ds.d;
      mf.n0 = profile.n0;
      mf.lambda = lambda;
      if (fit_mode == "rbf") {
        const KernelMode km =
            (kernel_mode == "classical") ? KernelMode::classical : KernelMode::radon;
        IsotropicKernel k = synth_rbf_kernel(profile, ds.d, km);
        RbfModel model = fit_rbf(ds.X, ds.y, k, profile.n0, lambda);
        if (model.negated_kernel)
          std::fprintf(stderr, "notice: kernel negated (conditionally negative form)\n");
        if (model.condition_warning)
          std::fprintf(stderr, "warning: saddle system condition ~%.2g\n",
                       model.condition_estimate);
        mf.centers = model.centers;
        mf.coeffs = model.coeffs;
        mf.poly_coeffs = model.poly.coeffs;
        mf.kernel_mode = kernel_mode;
        mf.kernel_sign = model.kernel_sign;
      } else if (fit_mode == "mnorm") {
        Activation act =
            antisym ? synth_antisymmetric(profile) : synth_symmetric(profile);
        AtomGrid dict = build_dictionary(ds.X, n_dirs);
        MnormOptions opt;
        opt.seed = seed;
        NeuralModel model = fit_mnorm(ds.X, ds.y, act, profile.n0, lambda, dict, opt);
        if (!model.sparsity_certificate_ok)
          std::fprintf(stderr, "warning: K0 > M - dim P (finite-dictionary minimizer)\n");
        if (!model.converged)
          std::fprintf(stderr, "warning: proximal solver gap %.3g after %d iterations\n",
                       model.duality_gap, model.iterations);
        mf.poly_coeffs = model.poly.coeffs;
        mf.atoms = model.atoms;
      } else if (fit_mode == "lp") {
        if (ds.d != 2) throw DataError("lp mode requires d = 2");
        IsoWindow window(2);
        LpGrid grid;
        grid.n_px = grid_size;
        LpOptions opt;
        opt.seed = seed;
        LpModel model = fit_lp(ds.X, ds.y, profile, window, p_exp, lambda, grid, opt);
        if (!model.converged)
          std::fprintf(stderr, "warning: lp solver stopped at max iterations\n");
        mf.centers = model.centers;
        mf.coeffs = model.coeffs;
        mf.poly_coeffs = model.poly.coeffs;
        mf.p = p_exp;
        mf.lp_grid = grid;
      } else {
        std::fprintf(stderr, "unknown fit mode '%s'\n", fit_mode.c_str());
        return kExitUsage;
      }
      save_model(mf, model_out);
      std::printf("wrote %s\n", model_out.c_str());
      return kExitOk;
    }

    if (*predict) {
      ModelFile mf = load_model(model_path);
      Dataset ds = load_dataset(data_path, false);
      Eigen::VectorXd yhat = predict_from_model(mf, ds.X);
      save_predictions(pred_out, yhat);
      if (!truth_path.empty()) {
        Dataset truth = load_dataset(truth_path, true);
        if (truth.y.size() != yhat.size()) throw DataError("truth size mismatch");
        const double mse = (truth.y - yhat).squaredNorm() / yhat.size();
        std::printf("mse=%.17g\n", mse);
      }
      std::printf("wrote %s\n", pred_out.c_str());
      return kExitOk;
    }
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
