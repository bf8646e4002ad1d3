#include "support/test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f.good());
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("load transcribes labeled and unlabeled rows") {
  const std::string path = "tmp_ds_basic.tsv";
  write_file(path, "#scmv-tsv v1 d1=2 d2=2\n1\t0:1\t1:2\n0\t1:3\t0:1\n");
  scmv::TwoViewDataset ds = scmv::load_dataset(path);
  CHECK(ds.n == 2);
  CHECK(ds.l == 1);
  CHECK(ds.y(0) == 1.0);
  CHECK(ds.x1(0, 0) == 1.0);
  CHECK(ds.x1(0, 1) == 0.0);
  CHECK(ds.x1(1, 1) == 3.0);
  CHECK(ds.x2(0, 1) == 2.0);
  CHECK(ds.x2(1, 0) == 1.0);
  CHECK(ds.origin == std::vector<char>({'o', 'o'}));
}

TEST_CASE("labeled rows move to the front stably") {
  const std::string path = "tmp_ds_partition.tsv";
  write_file(path,
             "#scmv-tsv v1 d1=1 d2=1\n"
             "0\t0:10\t0:10\n"
             "1\t0:11\t0:11\n"
             "0\t0:12\t0:12\n"
             "-1\t0:13\t0:13\n");
  scmv::TwoViewDataset ds = scmv::load_dataset(path);
  REQUIRE(ds.l == 2);
  CHECK(ds.y(0) == 1.0);
  CHECK(ds.y(1) == -1.0);
  // labeled rows 11, 13 first, then unlabeled 10, 12, order preserved
  CHECK(ds.x1(0, 0) == 11.0);
  CHECK(ds.x1(1, 0) == 13.0);
  CHECK(ds.x1(2, 0) == 10.0);
  CHECK(ds.x1(3, 0) == 12.0);
}

TEST_CASE("parse errors name the physical line") {
  const std::string path = "tmp_ds_badlabel.tsv";
  std::string content = "#scmv-tsv v1 d1=1 d2=1\n";
  for (int i = 0; i < 5; ++i) content += "1\t0:1\t0:1\n";
  content += "2\t0:1\t0:1\n";  // physical line 7
  write_file(path, content);
  CHECK_THROWS_WITH(scmv::load_dataset(path), Catch::Matchers::ContainsSubstring("line 7"));
  CHECK_THROWS_AS(scmv::load_dataset(path), scmv::ParseError);
}

TEST_CASE("malformed inputs are rejected with the offending line") {
  using Catch::Matchers::ContainsSubstring;
  auto expect_fail = [](const std::string& body, const std::string& needle) {
    const std::string path = "tmp_ds_reject.tsv";
    write_file(path, body);
    CHECK_THROWS_WITH(scmv::load_dataset(path), ContainsSubstring(needle));
  };
  expect_fail("#scmv-tsv v2 d1=1 d2=1\n1\t0:1\t0:1\n", "version");
  expect_fail("#scmv-tsv v1 d1=1\n", "header");
  expect_fail("not-a-header\n", "#scmv-tsv");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n1\t0:1\n", "line 2");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n1\t0:1\t0:1\t0:1\tx\n", "line 2");
  expect_fail("#scmv-tsv v1 d1=2 d2=1\n1\t0:1 0:2\t0:1\n", "duplicate");
  expect_fail("#scmv-tsv v1 d1=2 d2=1\n1\t5:1\t0:1\n", "outside declared dimension");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n1\t0:abc\t0:1\n", "value");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n1\t0:1\t0:1\tz\n", "origin");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n0\t0:1\t0:1\n", "no labeled rows");
  expect_fail("#scmv-tsv v1 d1=1 d2=1\n1\t0:inf\t0:1\n", "value");
}

TEST_CASE("save/load round-trips exactly, including origin tags") {
  scmv::TwoViewDataset ds = ts::make_random_instance(11, 6, 4, 3, 2);
  ds.x1 *= 1.0 / 3.0;  // exercise long decimal expansions
  ds.x1(2, 1) = 0.0;   // and sparsity
  ds.origin[1] = 't';
  ds.origin[4] = 't';

  const std::string path = "tmp_ds_roundtrip.tsv";
  scmv::save_dataset(ds, path);
  scmv::TwoViewDataset back = scmv::load_dataset(path);
  CHECK(back.n == ds.n);
  CHECK(back.l == ds.l);
  CHECK(back.x1 == ds.x1);
  CHECK(back.x2 == ds.x2);
  CHECK(back.y == ds.y);
  CHECK(back.origin == ds.origin);

  // writer is deterministic: a second save produces identical bytes
  const std::string path2 = "tmp_ds_roundtrip2.tsv";
  scmv::save_dataset(back, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("tfidf featurization matches the hand-computed 2-doc corpus") {
  // view: doc1 = [a b], doc2 = [a]. df(a)=2 -> idf 0; df(b)=1 -> idf ln 2.
  // ranking: b (score ln 2) before a (score 0).
  std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"a"}};
  auto res = scmv::featurize_corpus(docs, docs, {1.0, -1.0}, 2);
  REQUIRE(res.vocab1.terms == std::vector<std::string>({"b", "a"}));
  CHECK(res.vocab1.doc_freq == std::vector<scmv::Index>({1, 2}));
  const double ln2 = std::log(2.0);
  CHECK(res.dataset.x1(0, 0) == ln2);
  CHECK(res.dataset.x1(0, 1) == 0.0);
  CHECK(res.dataset.x1(1, 0) == 0.0);
  CHECK(res.dataset.x1(1, 1) == 0.0);
  CHECK(res.dataset.l == 2);
}

TEST_CASE("tfidf corner cases") {
  std::vector<std::vector<std::string>> uniform = {{"x", "y"}, {"y", "x"}};
  auto res = scmv::featurize_corpus(uniform, uniform, {1.0, -1.0}, 5);
  CHECK(res.dataset.x1.cols() == 2);  // k clamps to the vocabulary size
  CHECK(res.dataset.x1.cwiseAbs().maxCoeff() == 0.0);  // every idf is ln 1 = 0

  std::vector<std::vector<std::string>> docs1 = {{"a"}, {"b"}};
  std::vector<std::vector<std::string>> docs2 = {{"a"}};
  CHECK_THROWS_AS(scmv::featurize_corpus(docs1, docs2, {1.0}, 2), std::invalid_argument);

  // weights are never negative: idf >= 0 because df <= n
  std::vector<std::vector<std::string>> mixed = {{"a", "a", "b"}, {"b", "c"}, {"c"}};
  auto res2 = scmv::featurize_corpus(mixed, mixed, {1.0, -1.0, 1.0}, 3);
  CHECK(res2.dataset.x1.minCoeff() >= 0.0);
  CHECK(res2.dataset.x1.allFinite());
}

TEST_CASE("tfidf ties break lexicographically") {
  // b and a both appear once in one doc: equal scores, a must rank first.
  std::vector<std::vector<std::string>> docs = {{"b", "a"}, {"c"}};
  auto res = scmv::featurize_corpus(docs, docs, {1.0, -1.0}, 3);
  REQUIRE(res.vocab1.terms.size() == 3);
  CHECK(res.vocab1.terms[0] == "a");
  CHECK(res.vocab1.terms[1] == "b");
  CHECK(res.vocab1.terms[2] == "c");
}

TEST_CASE("synthetic generation is deterministic and structured") {
  scmv::SynthConfig cfg;
  cfg.n = 40;
  cfg.l = 12;
  cfg.d1 = 7;
  cfg.d2 = 5;
  cfg.m_true = 3;
  cfg.noise_sigma = 0.3;
  cfg.seed = 7;

  scmv::SynthData sd = scmv::synth_generate_full(cfg);
  scmv::TwoViewDataset again = scmv::synth_generate(cfg);
  CHECK(sd.dataset.x1 == again.x1);
  CHECK(sd.dataset.x2 == again.x2);
  CHECK(sd.dataset.y == again.y);

  cfg.seed = 8;
  scmv::TwoViewDataset other = scmv::synth_generate(cfg);
  CHECK(sd.dataset.x1 != other.x1);

  // view maps are row-orthonormal
  CHECK((sd.a1 * sd.a1.transpose() - scmv::Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK((sd.a2 * sd.a2.transpose() - scmv::Matrix::Identity(3, 3)).norm() < 1e-10);

  // both classes present
  CHECK(sd.dataset.y.maxCoeff() == 1.0);
  CHECK(sd.dataset.y.minCoeff() == -1.0);
  CHECK_NOTHROW(scmv::validate_dataset(sd.dataset));
}

TEST_CASE("noiseless square generation shares the latent exactly") {
  scmv::SynthConfig cfg;
  cfg.n = 30;
  cfg.l = 10;
  cfg.d1 = cfg.d2 = 4;
  cfg.m_true = 4;
  cfg.noise_sigma = 0.0;
  cfg.seed = 3;
  scmv::SynthData sd = scmv::synth_generate_full(cfg);
  // A_i square orthogonal: X_i A_i^T reconstructs U, so Theta_i = A_i^T aligns
  // the views exactly.
  CHECK((sd.dataset.x1 * sd.a1.transpose() - sd.dataset.x2 * sd.a2.transpose()).norm() <
        1e-12);
}

TEST_CASE("degenerate single-row labeling errors after the redraw budget") {
  scmv::SynthConfig cfg;
  cfg.n = 5;
  cfg.l = 1;  // one labeled row can never show both classes
  cfg.d1 = cfg.d2 = 2;
  cfg.m_true = 2;
  cfg.seed = 1;
  CHECK_THROWS_WITH(scmv::synth_generate(cfg),
                    Catch::Matchers::ContainsSubstring("single-class"));
}

TEST_CASE("split keeps counts, order and content") {
  scmv::TwoViewDataset ds = ts::make_random_instance(5, 14, 10, 3, 2);
  for (scmv::Index i = 0; i < ds.n; ++i) ds.x1(i, 0) = static_cast<double>(i);  // row id

  scmv::SplitResult sp = scmv::split_train_test(ds, 3, 42);
  CHECK(sp.train.l == 7);
  CHECK(sp.train.n == 11);
  CHECK(sp.test.l == 3);
  CHECK(sp.test.n == 3);
  CHECK_NOTHROW(scmv::validate_dataset(sp.train));
  CHECK_NOTHROW(scmv::validate_dataset(sp.test));

  // every labeled row lands in exactly one side; unlabeled rows all stay
  std::vector<bool> seen(static_cast<std::size_t>(ds.n), false);
  auto mark = [&](const scmv::TwoViewDataset& part) {
    for (scmv::Index i = 0; i < part.n; ++i) {
      auto id = static_cast<std::size_t>(part.x1(i, 0));
      CHECK_FALSE(seen[id]);
      seen[id] = true;
    }
  };
  mark(sp.train);
  mark(sp.test);
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));

  // labels travel with their rows
  for (scmv::Index i = 0; i < sp.test.n; ++i) {
    auto original = static_cast<scmv::Index>(sp.test.x1(i, 0));
    CHECK(sp.test.y(i) == ds.y(original));
  }

  // kept labeled rows preserve relative order
  for (scmv::Index i = 1; i < sp.train.l; ++i)
    CHECK(sp.train.x1(i, 0) > sp.train.x1(i - 1, 0));

  scmv::SplitResult sp2 = scmv::split_train_test(ds, 3, 42);
  CHECK(sp.train.x1 == sp2.train.x1);
  CHECK(sp.test.x1 == sp2.test.x1);

  scmv::SplitResult id = scmv::split_train_test(ds, 0, 9);
  CHECK(id.train.x1 == ds.x1);
  CHECK(id.test.n == 0);

  CHECK_THROWS_AS(scmv::split_train_test(ds, ds.l, 1), std::invalid_argument);
}

TEST_CASE("retagging marks a target prefix") {
  scmv::TwoViewDataset ds = ts::make_random_instance(6, 8, 5, 2, 2);
  scmv::TwoViewDataset tagged = scmv::retag_target_labeled(ds, 2);
  CHECK(tagged.origin == std::vector<char>({'o', 'o', 't', 't', 't', 'o', 'o', 'o'}));
  CHECK_THROWS_AS(scmv::retag_target_labeled(ds, 0), std::invalid_argument);
  CHECK_THROWS_AS(scmv::retag_target_labeled(ds, 6), std::invalid_argument);
}
