#include "support/test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

namespace {

// two-view dataset whose view 2 carries the signal; view 1 is filler
scmv::TwoViewDataset ridge_instance(std::uint64_t seed, scmv::Index n, scmv::Index d) {
  scmv::TwoViewDataset ds = ts::make_random_instance(seed, n, n, 2, d);
  return ds;
}

}  // namespace

TEST_CASE("ridge on the symmetric two-point line") {
  // points (1, +1) and (-1, -1): centered normal equations give w = 2/(2+alpha)
  scmv::Matrix x(2, 1);
  x << 1.0, -1.0;
  scmv::Vector y(2);
  y << 1.0, -1.0;

  scmv::RidgeModel m = scmv::fit_ridge(x, y, 0.1);
  CHECK(ts::rel_err(m.w(0), 20.0 / 21.0) < 1e-14);
  CHECK(std::abs(m.b) < 1e-15);
  CHECK(scmv::predict_ridge(m, x.row(0).transpose()) == 1.0);
  CHECK(scmv::predict_ridge(m, x.row(1).transpose()) == -1.0);
}

TEST_CASE("ridge with constant labels is a pure intercept") {
  scmv::TwoViewDataset ds = ridge_instance(40, 6, 3);
  scmv::Vector y = scmv::Vector::Constant(6, -1.0);
  scmv::RidgeModel m = scmv::fit_ridge(ds.x2, y, 0.1);
  CHECK(m.w.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.b == -1.0);
}

TEST_CASE("closed-form ridge agrees with a conjugate-gradient solve") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    scmv::TwoViewDataset ds = ridge_instance(50 + seed, 10, 4);
    scmv::RidgeModel m = scmv::fit_ridge(ds.x2, ds.y, 0.1);
    auto [w_cg, b_cg] = ts::cg_ridge(ds.x2, ds.y, 0.1);
    CHECK((m.w - w_cg).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(m.b - b_cg) <= 1e-8);
  }
}

TEST_CASE("stronger regularization shrinks the weights") {
  scmv::TwoViewDataset ds = ridge_instance(60, 12, 5);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {0.1, 1.0, 10.0, 100.0}) {
    double norm = scmv::fit_ridge(ds.x2, ds.y, alpha).w.norm();
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("row selectors split the labeled prefix by origin tag") {
  scmv::TwoViewDataset ds = ts::make_random_instance(70, 8, 5, 2, 3);
  ds.origin = {'o', 't', 't', 'o', 'o', 'o', 'o', 'o'};

  std::vector<scmv::Index> orig = scmv::original_labeled_rows(ds);
  std::vector<scmv::Index> trans = scmv::translated_labeled_rows(ds);
  CHECK(orig == std::vector<scmv::Index>{0, 3, 4});
  CHECK(trans == std::vector<scmv::Index>{1, 2});
}

TEST_CASE("target-only and combined baselines differ exactly as the row sets do") {
  scmv::TwoViewDataset ds = ts::make_random_instance(80, 12, 10, 2, 4);
  std::vector<scmv::Index> target{0, 1, 2, 3};
  std::vector<scmv::Index> source{4, 5, 6, 7, 8, 9};

  scmv::RidgeModel tb = scmv::train_tb(ds, target);
  scmv::RidgeModel tsb_empty = scmv::train_tsb(ds, target, {});
  CHECK(tb.w == tsb_empty.w);
  CHECK(tb.b == tsb_empty.b);

  // duplicated and overlapping row ids collapse before fitting
  scmv::RidgeModel tsb = scmv::train_tsb(ds, target, source);
  std::vector<scmv::Index> padded{3, 2, 1, 0, 0, 3};
  std::vector<scmv::Index> overlap{4, 5, 6, 7, 8, 9, 0, 1};
  scmv::RidgeModel tsb_dup = scmv::train_tsb(ds, padded, overlap);
  CHECK(tsb.w == tsb_dup.w);
  CHECK(tsb.b == tsb_dup.b);

  scmv::Matrix all_rows = ds.x2.topRows(10);
  scmv::RidgeModel direct = scmv::fit_ridge(all_rows, ds.y, 0.1);
  CHECK((tsb.w - direct.w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("baseline row selections are validated") {
  scmv::TwoViewDataset ds = ts::make_random_instance(90, 8, 5, 2, 3);
  CHECK_THROWS_AS(scmv::train_tb(ds, {}), std::invalid_argument);
  CHECK_THROWS_AS(scmv::train_tb(ds, {5}), std::invalid_argument);   // unlabeled row
  CHECK_THROWS_AS(scmv::train_tb(ds, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(scmv::train_tsb(ds, {0}, {17}), std::invalid_argument);
}

TEST_CASE("ridge prediction sign convention and shape checks") {
  scmv::RidgeModel m;
  m.w = scmv::Vector::Constant(1, 1.0);
  m.b = 0.0;
  CHECK(scmv::predict_ridge(m, scmv::Vector::Constant(1, 0.0)) == 1.0);  // sign(0) is +1
  CHECK(scmv::predict_ridge(m, scmv::Vector::Constant(1, -2.0)) == -1.0);
  CHECK_THROWS_AS(scmv::predict_ridge_score(m, scmv::Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("ridge accuracy scores view 2 over the labeled prefix") {
  scmv::RidgeModel m;
  m.w = scmv::Vector::Constant(1, 1.0);
  m.b = 0.0;
  scmv::TwoViewDataset ds;
  ds.n = 3;
  ds.l = 2;
  ds.x1 = scmv::Matrix::Zero(3, 1);
  ds.x2.resize(3, 1);
  ds.x2 << 1.0, -1.0, 5.0;
  ds.y.resize(2);
  ds.y << 1.0, 1.0;  // second row scores -1, so one of two is right
  ds.origin = {'o', 'o', 'o'};
  CHECK(scmv::ridge_accuracy(m, ds) == 0.5);
}
