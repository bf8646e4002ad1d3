// Reduced two-view objective: precomputed centered moments, the value
// L(Theta1, Theta2) and its Euclidean gradient.
#pragma once

#include "scmv/common.hpp"
#include "scmv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace scmv {

struct Hyperparams {
  double alpha1 = 0.1;
  double alpha2 = 0.1;
  double gamma = 1.0 / 6.0;
  Index m = 10;
};

inline void validate_hyperparams(const Hyperparams& hp, Index d1, Index d2) {
  if (!(hp.alpha1 > 0.0) || !(hp.alpha2 > 0.0))
    throw std::invalid_argument("hyperparams: alpha1 and alpha2 must be positive");
  if (!(hp.gamma >= 0.0))
    throw std::invalid_argument("hyperparams: gamma must be non-negative");
  if (hp.m < 1 || hp.m > std::min(d1, d2))
    throw std::invalid_argument("hyperparams: need 1 <= m <= min(d1, d2)");
}

/// Fixed data of the reduced problem. The centering matrix H is never formed;
/// centering is done by column-mean subtraction over the labeled prefix.
/// col_mean_i and label_mean are kept for closed-form bias recovery.
struct ProblemData {
  Matrix m1, m2;            // X_i^l^T H X_i^l, d_i x d_i, SPSD
  Vector z1, z2;            // X_i^l^T H y
  Matrix x1, x2;            // full n x d_i matrices (gamma term)
  Vector col_mean1, col_mean2;
  double label_mean = 0.0;
  double const_term = 0.0;  // 2 y^T H y
  Index l = 0;
  Hyperparams hp;
};

inline ProblemData precompute(const TwoViewDataset& ds, const Hyperparams& hp) {
  validate_dataset(ds);
  validate_hyperparams(hp, ds.x1.cols(), ds.x2.cols());

  ProblemData pd;
  pd.hp = hp;
  pd.l = ds.l;
  pd.x1 = ds.x1;
  pd.x2 = ds.x2;
  pd.label_mean = ds.y.mean();
  Vector yc = ds.y.array() - pd.label_mean;
  pd.const_term = 2.0 * yc.squaredNorm();

  auto moments = [&](const Matrix& x, Matrix& m, Vector& z, Vector& col_mean) {
    auto xl = x.topRows(ds.l);
    col_mean = xl.colwise().mean().transpose();
    Matrix xc = xl.rowwise() - col_mean.transpose();
    m = Matrix::Zero(x.cols(), x.cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    z = xl.transpose() * yc;
  };
  moments(ds.x1, pd.m1, pd.z1, pd.col_mean1);
  moments(ds.x2, pd.m2, pd.z2, pd.col_mean2);

  if (!pd.m1.allFinite() || !pd.m2.allFinite() || !pd.z1.allFinite() ||
      !pd.z2.allFinite() || !std::isfinite(pd.const_term))
    throw NumericalError("precompute: centered moments overflowed to non-finite values");
  return pd;
}

namespace detail {

inline void check_shapes(const ProblemData& pd, const SubspacePair& s) {
  if (s.theta1.rows() != pd.x1.cols() || s.theta2.rows() != pd.x2.cols() ||
      s.theta1.cols() != s.theta2.cols() || s.theta1.cols() < 1)
    throw std::invalid_argument("subspace pair shape does not match problem data");
}

struct ViewEval {
  double z_part = 0.0;  // z^T Theta (Theta^T M Theta + alpha I)^-1 Theta^T z
  Matrix m_theta;       // M Theta, reused by the gradient
  Vector u;             // the inner solve; equals the optimal w for this Theta
};

inline ViewEval view_eval(const Matrix& m, const Vector& z, double alpha,
                          const Matrix& theta, bool with_grad) {
  ViewEval ve;
  ve.m_theta.noalias() = m * theta;
  Matrix c = theta.transpose() * ve.m_theta;
  c.diagonal().array() += alpha;
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success)
    throw NumericalError("inner m x m system is not positive-definite");
  Vector t = theta.transpose() * z;
  ve.u = llt.solve(t);
  ve.z_part = t.dot(ve.u);
  if (!with_grad) ve.m_theta.resize(0, 0);
  return ve;
}

template <bool WithGrad>
Evaluation eval_impl(const ProblemData& pd, const SubspacePair& s) {
  check_shapes(pd, s);
  ViewEval v1 = view_eval(pd.m1, pd.z1, pd.hp.alpha1, s.theta1, WithGrad);
  ViewEval v2 = view_eval(pd.m2, pd.z2, pd.hp.alpha2, s.theta2, WithGrad);

  Evaluation ev;
  ev.value = pd.const_term - v1.z_part - v2.z_part;

  Matrix d;  // X1 Theta1 - X2 Theta2, only needed when gamma > 0
  if (pd.hp.gamma > 0.0) {
    d.noalias() = pd.x1 * s.theta1;
    d.noalias() -= pd.x2 * s.theta2;
    ev.value += pd.hp.gamma * d.squaredNorm();
  }

  if constexpr (WithGrad) {
    ev.g1.noalias() = (-2.0) * pd.z1 * v1.u.transpose();
    ev.g1.noalias() += 2.0 * (v1.m_theta * v1.u) * v1.u.transpose();
    ev.g2.noalias() = (-2.0) * pd.z2 * v2.u.transpose();
    ev.g2.noalias() += 2.0 * (v2.m_theta * v2.u) * v2.u.transpose();
    if (pd.hp.gamma > 0.0) {
      ev.g1.noalias() += (2.0 * pd.hp.gamma) * (pd.x1.transpose() * d);
      ev.g2.noalias() -= (2.0 * pd.hp.gamma) * (pd.x2.transpose() * d);
    }
  }
  return ev;
}

}  // namespace detail

inline double objective(const ProblemData& pd, const SubspacePair& s) {
  return detail::eval_impl<false>(pd, s).value;
}

inline std::pair<Matrix, Matrix> gradient(const ProblemData& pd, const SubspacePair& s) {
  Evaluation ev = detail::eval_impl<true>(pd, s);
  return {std::move(ev.g1), std::move(ev.g2)};
}

/// Value and gradient together; the inner solves and X Theta products are
/// shared, which is what the line search wants.
inline Evaluation evaluate(const ProblemData& pd, const SubspacePair& s) {
  return detail::eval_impl<true>(pd, s);
}

/// Non-owning adapter exposing the reduced objective to the optimizer.
struct ReducedProblem {
  const ProblemData* pd;
  Evaluation evaluate(const SubspacePair& s) const {
    return detail::eval_impl<true>(*pd, s);
  }
  double value(const SubspacePair& s) const { return detail::eval_impl<false>(*pd, s).value; }
};

}  // namespace scmv
