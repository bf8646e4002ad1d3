// Ridge least-squares reference classifiers fit on view-2 row subsets: TB
// (original target-language rows only) and TSB (plus translated rows).
#pragma once

#include "scmv/common.hpp"
#include "scmv/dataset.hpp"

#include <algorithm>
#include <vector>

namespace scmv {

struct RidgeModel {
  Vector w;
  double b = 0.0;
  int view = 2;
  double alpha = 0.1;
};

/// Closed-form ridge fit of ||Xw + b1 - y||^2 + alpha ||w||^2:
/// w = (X^T H X + alpha I)^{-1} X^T H y with H centering the given rows.
inline RidgeModel fit_ridge(const Matrix& x, const Vector& y, double alpha, int view = 2) {
  if (x.rows() < 1 || x.rows() != y.size())
    throw std::invalid_argument("ridge: need matching, nonempty rows and labels");
  if (!(alpha > 0.0)) throw std::invalid_argument("ridge: alpha must be positive");

  Vector col_mean = x.colwise().mean().transpose();
  Matrix xc = x.rowwise() - col_mean.transpose();
  double y_mean = y.mean();
  Vector yc = y.array() - y_mean;

  Matrix gram = Matrix::Zero(x.cols(), x.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
  gram.diagonal().array() += alpha;
  // LLT reads only the lower triangle, which rankUpdate filled.
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("ridge: normal equations are not positive-definite");

  RidgeModel m;
  m.w = llt.solve(x.transpose() * yc);
  m.b = y_mean - col_mean.dot(m.w);
  m.view = view;
  m.alpha = alpha;
  return m;
}

/// Labeled-prefix rows tagged as original target-language documents.
inline std::vector<Index> original_labeled_rows(const TwoViewDataset& ds) {
  std::vector<Index> rows;
  for (Index i = 0; i < ds.l; ++i)
    if (ds.origin[static_cast<std::size_t>(i)] == 'o') rows.push_back(i);
  return rows;
}

/// Labeled-prefix rows tagged as translated documents.
inline std::vector<Index> translated_labeled_rows(const TwoViewDataset& ds) {
  std::vector<Index> rows;
  for (Index i = 0; i < ds.l; ++i)
    if (ds.origin[static_cast<std::size_t>(i)] == 't') rows.push_back(i);
  return rows;
}

namespace detail {

// Row lists are treated as sets: sorted, deduplicated, bounds-checked.
inline std::vector<Index> labeled_subset(const TwoViewDataset& ds, std::vector<Index> rows,
                                         const char* who) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (rows.empty())
    throw std::invalid_argument(std::string(who) + ": empty row selection");
  if (rows.front() < 0 || rows.back() >= ds.l)
    throw std::invalid_argument(std::string(who) + ": rows must lie in the labeled prefix");
  return rows;
}

inline RidgeModel fit_view2_rows(const TwoViewDataset& ds, const std::vector<Index>& rows,
                                 double alpha) {
  Matrix x(static_cast<Index>(rows.size()), ds.x2.cols());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Index>(i)) = ds.x2.row(rows[i]);
    y(static_cast<Index>(i)) = ds.y(rows[i]);
  }
  return fit_ridge(x, y, alpha, 2);
}

}  // namespace detail

/// TB: ridge on view 2 over the selected original target-language rows.
inline RidgeModel train_tb(const TwoViewDataset& ds, const std::vector<Index>& target_rows,
                           double alpha = 0.1) {
  validate_dataset(ds);
  return detail::fit_view2_rows(ds, detail::labeled_subset(ds, target_rows, "train_tb"), alpha);
}

/// TSB: ridge on view 2 over the union of target and translated rows.
inline RidgeModel train_tsb(const TwoViewDataset& ds, const std::vector<Index>& target_rows,
                            const std::vector<Index>& source_translated_rows,
                            double alpha = 0.1) {
  validate_dataset(ds);
  std::vector<Index> rows = target_rows;
  rows.insert(rows.end(), source_translated_rows.begin(), source_translated_rows.end());
  return detail::fit_view2_rows(ds, detail::labeled_subset(ds, rows, "train_tsb"), alpha);
}

inline double predict_ridge_score(const RidgeModel& m, const Vector& x) {
  if (x.size() != m.w.size())
    throw std::invalid_argument("predict_ridge: feature length does not match the model");
  return x.dot(m.w) + m.b;
}

inline double predict_ridge(const RidgeModel& m, const Vector& x) {
  return sign_or_positive(predict_ridge_score(m, x));
}

/// Fraction of the labeled rows of `ds` (view 2) the model gets right.
inline double ridge_accuracy(const RidgeModel& m, const TwoViewDataset& ds) {
  if (ds.l < 1) throw std::invalid_argument("ridge_accuracy: no labeled rows");
  Vector scores = (ds.x2.topRows(ds.l) * m.w).array() + m.b;
  Index correct = 0;
  for (Index i = 0; i < ds.l; ++i)
    if (sign_or_positive(scores(i)) == ds.y(i)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.l);
}

}  // namespace scmv
