#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "radonreg/lp_fitter.hpp"
#include "radonreg/operator_catalog.hpp"
#include "radonreg/rbf_fitter.hpp"
#include "radonreg/sparse_fitter.hpp"

namespace radonreg {

// ---------------------------------------------------------------------------
// Datasets: CSV with header x1..xd,y
// ---------------------------------------------------------------------------

struct Dataset {
  int d = 0;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::string source;
  bool has_y = true;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_cell(const std::string& cell, int line_no, const std::string& col) {
  std::string s = cell;
  // trim
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty())
    throw DataError("empty cell at line " + std::to_string(line_no) + ", column " + col);
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw DataError("non-numeric cell '" + s + "' at line " + std::to_string(line_no) +
                    ", column " + col);
  if (!std::isfinite(v))
    throw DataError("non-finite cell '" + s + "' at line " + std::to_string(line_no) +
                    ", column " + col);
  return v;
}
}  // namespace detail

// Parses a CSV with header x1..xd[,y].  `require_y` rejects files without the
// target column.
inline Dataset load_dataset(const std::string& path, bool require_y = true) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file '" + path + "'");
  auto header = detail::split_csv_line(line);
  Dataset ds;
  ds.source = path;
  int n_cols = static_cast<int>(header.size());
  ds.has_y = (header.back() == "y");
  ds.d = ds.has_y ? n_cols - 1 : n_cols;
  if (require_y && !ds.has_y) throw DataError("missing 'y' column in '" + path + "'");
  if (ds.d < 1) throw DataError("no feature columns in '" + path + "'");
  for (int i = 0; i < ds.d; ++i) {
    const std::string want = "x" + std::to_string(i + 1);
    if (header[i] != want)
      throw DataError("expected header column '" + want + "', got '" + header[i] + "'");
  }

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) != n_cols)
      throw DataError("malformed row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " cells, got " +
                      std::to_string(cells.size()));
    std::vector<double> row(n_cols);
    for (int c = 0; c < n_cols; ++c) row[c] = detail::parse_cell(cells[c], line_no, header[c]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no data rows in '" + path + "'");
  const int M = static_cast<int>(rows.size());
  ds.X.resize(M, ds.d);
  if (ds.has_y) ds.y.resize(M);
  for (int m = 0; m < M; ++m) {
    for (int c = 0; c < ds.d; ++c) ds.X(m, c) = rows[m][c];
    if (ds.has_y) ds.y[m] = rows[m][ds.d];
  }
  return ds;
}

inline void save_predictions(const std::string& path, const Eigen::VectorXd& yhat) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "yhat\n";
  out.precision(17);
  for (int i = 0; i < yhat.size(); ++i) out << yhat[i] << "\n";
}

// ---------------------------------------------------------------------------
// Model files (JSON, schema_version 1)
// ---------------------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

struct ProfileSpec {
  std::string name;
  std::vector<double> params;
  bool antisymmetric = false;

  OperatorProfile make() const { return catalog_profile(name, params); }
};

struct ModelFile {
  int schema_version = kModelSchemaVersion;
  std::string mode;  // rbf | mnorm | lp
  ProfileSpec profile;
  int d = 0;
  int n0 = -1;
  double lambda = 0.0;
  // rbf / lp payload
  Eigen::MatrixXd centers;
  Eigen::VectorXd coeffs;
  Eigen::VectorXd poly_coeffs;
  std::string kernel_mode = "radon";
  double kernel_sign = 1.0;
  double p = 2.0;
  LpGrid lp_grid;
  // mnorm payload
  std::vector<RidgeAtom> atoms;
};

namespace detail {
inline nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}
inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  return m;
}
inline nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}
inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}
}  // namespace detail

inline void save_model(const ModelFile& m, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["mode"] = m.mode;
  j["profile"] = {{"name", m.profile.name},
                  {"params", m.profile.params},
                  {"antisymmetric", m.profile.antisymmetric}};
  j["d"] = m.d;
  j["n0"] = m.n0;
  j["lambda"] = m.lambda;
  j["poly"] = detail::to_json(m.poly_coeffs);
  if (m.mode == "rbf" || m.mode == "lp") {
    j["centers"] = detail::to_json(m.centers);
    j["coeffs"] = detail::to_json(m.coeffs);
  }
  if (m.mode == "rbf") {
    j["kernel_mode"] = m.kernel_mode;
    j["kernel_sign"] = m.kernel_sign;
  }
  if (m.mode == "lp") {
    j["p"] = m.p;
    j["grid"] = {{"L", m.lp_grid.L},
                 {"n_px", m.lp_grid.n_px},
                 {"T", m.lp_grid.sino.T},
                 {"n_t", m.lp_grid.sino.n_t},
                 {"n_theta", m.lp_grid.sino.n_theta}};
  }
  if (m.mode == "mnorm") {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : m.atoms) {
      nlohmann::json xi = nlohmann::json::array();
      for (int i = 0; i < a.xi.size(); ++i) xi.push_back(a.xi[i]);
      atoms.push_back({{"xi", xi}, {"tau", a.tau}, {"a", a.weight}});
    }
    j["atoms"] = atoms;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  ModelFile m;
  m.schema_version = j.at("schema_version").get<int>();
  if (m.schema_version != kModelSchemaVersion)
    throw DataError("unsupported schema_version " + std::to_string(m.schema_version));
  m.mode = j.at("mode").get<std::string>();
  m.profile.name = j.at("profile").at("name").get<std::string>();
  m.profile.params = j.at("profile").at("params").get<std::vector<double>>();
  m.profile.antisymmetric = j.at("profile").at("antisymmetric").get<bool>();
  m.d = j.at("d").get<int>();
  m.n0 = j.at("n0").get<int>();
  m.lambda = j.at("lambda").get<double>();
  m.poly_coeffs = detail::vector_from_json(j.at("poly"));
  if (j.contains("centers")) m.centers = detail::matrix_from_json(j["centers"]);
  if (j.contains("coeffs")) m.coeffs = detail::vector_from_json(j["coeffs"]);
  if (j.contains("kernel_mode")) m.kernel_mode = j["kernel_mode"].get<std::string>();
  if (j.contains("kernel_sign")) m.kernel_sign = j["kernel_sign"].get<double>();
  if (j.contains("p")) m.p = j["p"].get<double>();
  if (j.contains("grid")) {
    m.lp_grid.L = j["grid"]["L"].get<double>();
    m.lp_grid.n_px = j["grid"]["n_px"].get<int>();
    m.lp_grid.sino.T = j["grid"]["T"].get<double>();
    m.lp_grid.sino.n_t = j["grid"]["n_t"].get<int>();
    m.lp_grid.sino.n_theta = j["grid"]["n_theta"].get<int>();
  }
  if (j.contains("atoms")) {
    for (const auto& ja : j["atoms"]) {
      RidgeAtom a;
      a.xi = detail::vector_from_json(ja.at("xi"));
      a.tau = ja.at("tau").get<double>();
      a.weight = ja.at("a").get<double>();
      m.atoms.push_back(a);
    }
  }
  return m;
}

// Prediction from a persisted model.
inline Eigen::VectorXd predict_from_model(const ModelFile& m, const Eigen::MatrixXd& X) {
  if (static_cast<int>(X.cols()) != m.d)
    throw DataError("dimension mismatch: model d=" + std::to_string(m.d) + ", data d=" +
                    std::to_string(X.cols()));
  OperatorProfile profile = m.profile.make();
  if (m.mode == "rbf") {
    RbfModel model;
    model.centers = m.centers;
    model.coeffs = m.coeffs;
    model.poly = Polynomial::zero(m.d, m.n0);
    if (m.poly_coeffs.size()) model.poly.coeffs = m.poly_coeffs;
    model.kernel = synth_rbf_kernel(profile, m.d,
                                    m.kernel_mode == "classical" ? KernelMode::classical
                                                                 : KernelMode::radon);
    model.kernel_sign = m.kernel_sign;
    model.n0 = m.n0;
    return model.predict(X);
  }
  if (m.mode == "mnorm") {
    NeuralModel model;
    model.d = m.d;
    model.n0 = m.n0;
    model.atoms = m.atoms;
    model.poly = Polynomial::zero(m.d, m.n0);
    if (m.poly_coeffs.size()) model.poly.coeffs = m.poly_coeffs;
    model.activation = m.profile.antisymmetric ? synth_antisymmetric(profile)
                                               : synth_symmetric(profile);
    return model.predict(X);
  }
  if (m.mode == "lp") {
    IsoWindow window(2);
    LpForward fwd(profile, window, m.centers, m.lp_grid);
    Polynomial poly = Polynomial::zero(2, m.n0);
    if (m.poly_coeffs.size()) poly.coeffs = m.poly_coeffs;
    Image f = fwd.forward(m.coeffs, poly, m.p);
    Eigen::VectorXd out(X.rows());
    for (int i = 0; i < X.rows(); ++i) out[i] = f.sample(X(i, 0), X(i, 1));
    return out;
  }
  throw DataError("unknown model mode '" + m.mode + "'");
}

}  // namespace radonreg
