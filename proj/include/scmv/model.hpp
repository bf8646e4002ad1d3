// End-to-end training (precompute, optimize, recover weights), confidence
// based two-view prediction and model persistence.
#pragma once

#include "scmv/common.hpp"
#include "scmv/dataset.hpp"
#include "scmv/objective.hpp"
#include "scmv/stiefel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

namespace scmv {

inline constexpr const char* kFeaturizationTag = "tfidf-rawtf-lnidf";
inline constexpr int kModelVersion = 1;

struct ScmvModel {
  Matrix theta1, theta2;  // d_i x m, orthonormal columns
  Vector w1, w2;          // length m
  double b1 = 0.0, b2 = 0.0;
  Hyperparams hp;
  std::string featurization = kFeaturizationTag;
  std::optional<Vocabulary> vocab1, vocab2;
};

struct Weights {
  Vector w1, w2;
  double b1 = 0.0, b2 = 0.0;
};

/// Closed-form optimum of the full objective at fixed subspaces:
/// w_i = (Theta^T M Theta + alpha I)^{-1} Theta^T z, b_i = mean residual.
inline Weights recover_weights(const ProblemData& pd, const SubspacePair& s) {
  detail::check_shapes(pd, s);
  auto solve_view = [](const Matrix& m, const Vector& z, double alpha,
                       const Matrix& theta, const Vector& col_mean, double label_mean,
                       Vector& w, double& b) {
    Matrix c = theta.transpose() * m * theta;
    c.diagonal().array() += alpha;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
      throw NumericalError("inner m x m system is not positive-definite");
    w = llt.solve(theta.transpose() * z);
    b = label_mean - col_mean.dot(theta * w);
  };
  Weights ws;
  solve_view(pd.m1, pd.z1, pd.hp.alpha1, s.theta1, pd.col_mean1, pd.label_mean, ws.w1, ws.b1);
  solve_view(pd.m2, pd.z2, pd.hp.alpha2, s.theta2, pd.col_mean2, pd.label_mean, ws.w2, ws.b2);
  return ws;
}

/// The two initial subspaces come from one user seed by fixed mixing.
inline SubspacePair initial_pair(Index d1, Index d2, Index m, std::uint64_t seed) {
  return {init_orthonormal(d1, m, seed), init_orthonormal(d2, m, seed ^ 1)};
}

struct TrainResult {
  ScmvModel model;
  IterationTrace trace;
  StopReason reason = StopReason::converged;
  double final_objective = 0.0;
  int iterations = 0;
};

inline TrainResult train(const TwoViewDataset& ds, const Hyperparams& hp,
                         const OptimizerConfig& cfg, std::uint64_t seed) {
  ProblemData pd = precompute(ds, hp);
  ReducedProblem problem{&pd};
  OptimizeResult opt =
      optimize(problem, initial_pair(ds.x1.cols(), ds.x2.cols(), hp.m, seed), cfg);
  Weights ws = recover_weights(pd, opt.pair);

  TrainResult res;
  res.model.theta1 = std::move(opt.pair.theta1);
  res.model.theta2 = std::move(opt.pair.theta2);
  res.model.w1 = std::move(ws.w1);
  res.model.w2 = std::move(ws.w2);
  res.model.b1 = ws.b1;
  res.model.b2 = ws.b2;
  res.model.hp = hp;
  res.trace = std::move(opt.trace);
  res.reason = opt.reason;
  res.final_objective = opt.final_value;
  res.iterations = opt.iterations;
  return res;
}

inline double predict_view(const ScmvModel& m, const Vector& x, int view) {
  if (view != 1 && view != 2)
    throw std::invalid_argument("predict_view: view must be 1 or 2");
  const Matrix& theta = view == 1 ? m.theta1 : m.theta2;
  const Vector& w = view == 1 ? m.w1 : m.w2;
  double b = view == 1 ? m.b1 : m.b2;
  if (x.size() != theta.rows())
    throw std::invalid_argument("predict_view: feature length does not match the view");
  return x.dot(theta * w) + b;
}

struct Prediction {
  double label = 1.0;  // -1 or +1
  double f1 = 0.0, f2 = 0.0;
  int view = 2;  // which score decided
};

/// Predicts with whichever view scores more confidently; ties (including
/// both-zero) fall to view 2, and sign(0) is +1.
inline Prediction predict(const ScmvModel& m, const Vector& x1, const Vector& x2) {
  Prediction p;
  p.f1 = predict_view(m, x1, 1);
  p.f2 = predict_view(m, x2, 2);
  p.view = std::abs(p.f1) > std::abs(p.f2) ? 1 : 2;
  p.label = sign_or_positive(p.view == 1 ? p.f1 : p.f2);
  return p;
}

/// Both views' scores for every row at once.
inline std::pair<Vector, Vector> predict_scores(const ScmvModel& m, const Matrix& x1,
                                                const Matrix& x2) {
  if (x1.cols() != m.theta1.rows() || x2.cols() != m.theta2.rows())
    throw std::invalid_argument("predict: dataset dimensions do not match the model");
  if (x1.rows() != x2.rows())
    throw std::invalid_argument("predict: views have different row counts");
  Vector f1 = (x1 * (m.theta1 * m.w1)).array() + m.b1;
  Vector f2 = (x2 * (m.theta2 * m.w2)).array() + m.b2;
  return {std::move(f1), std::move(f2)};
}

/// Fraction of labeled rows the two-view rule classifies correctly.
inline double accuracy(const ScmvModel& m, const TwoViewDataset& ds) {
  if (ds.l < 1) throw std::invalid_argument("accuracy: no labeled rows");
  auto [f1, f2] = predict_scores(m, ds.x1.topRows(ds.l), ds.x2.topRows(ds.l));
  Index correct = 0;
  for (Index i = 0; i < ds.l; ++i) {
    double f = std::abs(f1(i)) > std::abs(f2(i)) ? f1(i) : f2(i);
    if (sign_or_positive(f) == ds.y(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.l);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols,
                               const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw ParseError("model: field '" + name + "' has wrong row count");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError("model: field '" + name + "' has wrong column count");
    for (Index c = 0; c < cols; ++c) {
      const auto& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) throw ParseError("model: non-numeric entry in '" + name + "'");
      m(i, c) = cell.get<double>();
    }
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Vector vector_from_json(const nlohmann::json& j, Index size, const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size)
    throw ParseError("model: field '" + name + "' has wrong length");
  Vector v(size);
  for (Index i = 0; i < size; ++i) {
    const auto& cell = j[static_cast<std::size_t>(i)];
    if (!cell.is_number()) throw ParseError("model: non-numeric entry in '" + name + "'");
    v(i) = cell.get<double>();
  }
  return v;
}

inline void validate_model(const ScmvModel& m) {
  Index msub = m.theta1.cols();
  if (msub < 1 || m.theta2.cols() != msub || m.w1.size() != msub || m.w2.size() != msub)
    throw std::invalid_argument("model: inconsistent subspace dimensions");
  if (!m.theta1.allFinite() || !m.theta2.allFinite() || !m.w1.allFinite() ||
      !m.w2.allFinite() || !std::isfinite(m.b1) || !std::isfinite(m.b2))
    throw std::invalid_argument("model: non-finite parameter");
}

}  // namespace detail

inline void save_model(const ScmvModel& m, const std::string& path) {
  detail::validate_model(m);
  nlohmann::json j;
  j["format"] = "scmv-model";
  j["version"] = kModelVersion;
  j["d1"] = m.theta1.rows();
  j["d2"] = m.theta2.rows();
  j["m"] = m.theta1.cols();
  j["hyperparams"] = {{"alpha1", m.hp.alpha1}, {"alpha2", m.hp.alpha2}, {"gamma", m.hp.gamma}};
  j["featurization"] = m.featurization;
  j["theta1"] = detail::matrix_to_json(m.theta1);
  j["theta2"] = detail::matrix_to_json(m.theta2);
  j["w1"] = detail::vector_to_json(m.w1);
  j["w2"] = detail::vector_to_json(m.w2);
  j["b1"] = m.b1;
  j["b2"] = m.b2;
  auto vocab_json = [](const Vocabulary& v) {
    return nlohmann::json{{"terms", v.terms}, {"doc_freq", v.doc_freq}};
  };
  if (m.vocab1) j["vocab1"] = vocab_json(*m.vocab1);
  if (m.vocab2) j["vocab2"] = vocab_json(*m.vocab2);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open file for writing");
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error(path + ": write failed");
}

/// In strict mode a feasibility residual above 1e-6 is an error; otherwise it
/// warns and re-orthonormalizes. Residuals between 1e-8 and 1e-6 are repaired
/// silently so the loaded model always satisfies the 1e-8 invariant.
inline ScmvModel load_model(const std::string& path, bool strict = false) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  try {
    if (!j.contains("format") || j["format"] != "scmv-model")
      throw ParseError(path + ": not a model file (missing format tag 'scmv-model')");
    if (!j.contains("version") || !j["version"].is_number_integer())
      throw ParseError(path + ": missing integer 'version'");
    int version = j["version"].get<int>();
    if (version != kModelVersion)
      throw ParseError(path + ": unsupported model version " + std::to_string(version) +
                       ", expected " + std::to_string(kModelVersion));

    ScmvModel m;
    Index d1 = j.at("d1").get<Index>();
    Index d2 = j.at("d2").get<Index>();
    Index msub = j.at("m").get<Index>();
    if (d1 < 1 || d2 < 1 || msub < 1 || msub > std::min(d1, d2))
      throw ParseError(path + ": invalid dimensions in header");
    m.hp.alpha1 = j.at("hyperparams").at("alpha1").get<double>();
    m.hp.alpha2 = j.at("hyperparams").at("alpha2").get<double>();
    m.hp.gamma = j.at("hyperparams").at("gamma").get<double>();
    m.hp.m = msub;
    m.featurization = j.at("featurization").get<std::string>();
    m.theta1 = detail::matrix_from_json(j.at("theta1"), d1, msub, "theta1");
    m.theta2 = detail::matrix_from_json(j.at("theta2"), d2, msub, "theta2");
    m.w1 = detail::vector_from_json(j.at("w1"), msub, "w1");
    m.w2 = detail::vector_from_json(j.at("w2"), msub, "w2");
    m.b1 = j.at("b1").get<double>();
    m.b2 = j.at("b2").get<double>();
    auto vocab_from = [&](const char* key) -> std::optional<Vocabulary> {
      if (!j.contains(key)) return std::nullopt;
      Vocabulary v;
      v.terms = j[key].at("terms").get<std::vector<std::string>>();
      v.doc_freq = j[key].at("doc_freq").get<std::vector<Index>>();
      if (v.terms.size() != v.doc_freq.size())
        throw ParseError(path + ": vocabulary terms and doc_freq lengths differ");
      return v;
    };
    m.vocab1 = vocab_from("vocab1");
    m.vocab2 = vocab_from("vocab2");
    detail::validate_model(m);

    for (Matrix* theta : {&m.theta1, &m.theta2}) {
      double r = orthogonality_residual(*theta);
      if (r > 1e-6) {
        if (strict)
          throw ParseError(path + ": subspace columns are not orthonormal (residual " +
                           format_double(r) + " > 1e-06)");
        std::cerr << "warning: " << path << ": subspace residual " << format_double(r)
                  << " exceeds 1e-06; re-orthonormalizing\n";
        *theta = orthonormalize(*theta);
      } else if (r > 1e-8) {
        *theta = orthonormalize(*theta);
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace scmv
