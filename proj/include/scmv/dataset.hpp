// Two-view datasets: in-memory representation, TSV load/save, TF-IDF
// featurization, synthetic generation and seeded train/test splitting.
#pragma once

#include "scmv/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scmv {

/// Parallel feature matrices over the same documents. The first `l` rows of
/// both views are labeled; remaining rows are unlabeled but still participate
/// in the co-regularization term. `origin[i]` tags row provenance: 'o' for an
/// original target-language document, 't' for a translated one. The tag is
/// ignored by the core algorithm and consumed by the ridge baselines.
struct TwoViewDataset {
  Matrix x1;                 // n x d1
  Matrix x2;                 // n x d2
  Vector y;                  // length l, entries in {-1,+1}
  Index l = 0;
  Index n = 0;
  std::vector<char> origin;  // length n
};

struct Vocabulary {
  std::vector<std::string> terms;  // position == feature column
  std::vector<Index> doc_freq;     // aligned with terms
};

struct SynthConfig {
  Index n = 200;
  Index l = 50;
  Index d1 = 20;
  Index d2 = 20;
  Index m_true = 5;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

inline void validate_dataset(const TwoViewDataset& ds) {
  if (ds.n < 1 || ds.x1.rows() != ds.n || ds.x2.rows() != ds.n)
    throw std::invalid_argument("dataset: view row counts disagree with n");
  if (ds.l < 1 || ds.l > ds.n)
    throw std::invalid_argument("dataset: labeled count l must satisfy 1 <= l <= n");
  if (ds.y.size() != ds.l)
    throw std::invalid_argument("dataset: label vector length differs from l");
  for (Index i = 0; i < ds.l; ++i)
    if (ds.y(i) != 1.0 && ds.y(i) != -1.0)
      throw std::invalid_argument("dataset: labels must be exactly -1 or +1");
  if (!ds.x1.allFinite() || !ds.x2.allFinite())
    throw std::invalid_argument("dataset: non-finite feature value");
  if (ds.origin.size() != static_cast<std::size_t>(ds.n))
    throw std::invalid_argument("dataset: origin tags missing for some rows");
  for (char c : ds.origin)
    if (c != 'o' && c != 't')
      throw std::invalid_argument("dataset: origin tag must be 'o' or 't'");
}

inline void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.n < 1 || cfg.l < 1 || cfg.l > cfg.n)
    throw std::invalid_argument("synth: need 1 <= l <= n");
  if (cfg.d1 < 1 || cfg.d2 < 1)
    throw std::invalid_argument("synth: view dimensions must be positive");
  if (cfg.m_true < 1 || cfg.m_true > std::min(cfg.d1, cfg.d2))
    throw std::invalid_argument("synth: need 1 <= m_true <= min(d1, d2)");
  if (!(cfg.noise_sigma >= 0.0))
    throw std::invalid_argument("synth: noise_sigma must be non-negative");
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

// Space-separated tokens; runs of spaces collapse.
inline std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ') ++pos;
    if (pos > start) out.push_back(text.substr(start, pos - start));
  }
  return out;
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line_no,
                                    const std::string& what) {
  throw ParseError(path + ": line " + std::to_string(line_no) + ": " + what);
}

inline void parse_sparse_row(std::string_view field, Index dim, Vector& row,
                             const std::string& path, std::size_t line_no) {
  row.setZero(dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim), false);
  for (std::string_view token : split_tokens(field)) {
    std::size_t colon = token.find(':');
    if (colon == std::string_view::npos)
      parse_fail(path, line_no, "expected index:value pair, got '" + std::string(token) + "'");
    Index idx = 0;
    if (!parse_index(token.substr(0, colon), idx) || idx < 0)
      parse_fail(path, line_no, "bad feature index in '" + std::string(token) + "'");
    if (idx >= dim)
      parse_fail(path, line_no,
                 "feature index " + std::to_string(idx) + " outside declared dimension " +
                     std::to_string(dim));
    if (seen[static_cast<std::size_t>(idx)])
      parse_fail(path, line_no, "duplicate feature index " + std::to_string(idx));
    seen[static_cast<std::size_t>(idx)] = true;
    double value = 0.0;
    if (!parse_double(token.substr(colon + 1), value) || !std::isfinite(value))
      parse_fail(path, line_no, "bad feature value in '" + std::string(token) + "'");
    row(idx) = value;
  }
}

inline Index parse_header_dim(std::string_view token, std::string_view key,
                              const std::string& path) {
  if (token.substr(0, key.size()) != key)
    parse_fail(path, 1, "expected '" + std::string(key) + "<int>' in header");
  Index dim = 0;
  if (!parse_index(token.substr(key.size()), dim) || dim < 1)
    parse_fail(path, 1, "bad dimension in header token '" + std::string(token) + "'");
  return dim;
}

}  // namespace detail

/// Reads the two-view TSV format. Labeled rows are stably moved to the front.
inline TwoViewDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) detail::parse_fail(path, 1, "empty file, missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_tokens(line);
  if (header.empty() || header[0] != "#scmv-tsv")
    detail::parse_fail(path, 1, "missing '#scmv-tsv' header");
  if (header.size() != 4)
    detail::parse_fail(path, 1, "header must be '#scmv-tsv v1 d1=<int> d2=<int>'");
  if (header[1] != "v1")
    detail::parse_fail(path, 1,
                       "unsupported format version '" + std::string(header[1]) + "', expected 'v1'");
  Index d1 = detail::parse_header_dim(header[2], "d1=", path);
  Index d2 = detail::parse_header_dim(header[3], "d2=", path);

  struct Row {
    int label;
    Vector v1, v2;
    char origin;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = detail::split_fields(line, '\t');
    if (fields.size() < 3 || fields.size() > 4)
      detail::parse_fail(path, line_no,
                         "expected 3 or 4 tab-separated fields, got " +
                             std::to_string(fields.size()));
    Row row;
    std::string_view label = fields[0];
    if (label == "-1") row.label = -1;
    else if (label == "0") row.label = 0;
    else if (label == "1" || label == "+1") row.label = 1;
    else
      detail::parse_fail(path, line_no,
                         "label '" + std::string(label) + "' outside {-1, 0, +1}");
    detail::parse_sparse_row(fields[1], d1, row.v1, path, line_no);
    detail::parse_sparse_row(fields[2], d2, row.v2, path, line_no);
    row.origin = 'o';
    if (fields.size() == 4) {
      if (fields[3] == "o") row.origin = 'o';
      else if (fields[3] == "t") row.origin = 't';
      else
        detail::parse_fail(path, line_no,
                           "origin tag '" + std::string(fields[3]) + "' must be 'o' or 't'");
    }
    rows.push_back(std::move(row));
  }

  std::stable_partition(rows.begin(), rows.end(),
                        [](const Row& r) { return r.label != 0; });
  Index labeled = 0;
  while (labeled < static_cast<Index>(rows.size()) && rows[labeled].label != 0) ++labeled;
  if (labeled == 0) throw ParseError(path + ": no labeled rows");

  TwoViewDataset ds;
  ds.n = static_cast<Index>(rows.size());
  ds.l = labeled;
  ds.x1.resize(ds.n, d1);
  ds.x2.resize(ds.n, d2);
  ds.y.resize(ds.l);
  ds.origin.resize(rows.size());
  for (Index i = 0; i < ds.n; ++i) {
    ds.x1.row(i) = rows[i].v1;
    ds.x2.row(i) = rows[i].v2;
    ds.origin[static_cast<std::size_t>(i)] = rows[i].origin;
    if (i < ds.l) ds.y(i) = rows[i].label;
  }
  validate_dataset(ds);
  return ds;
}

inline void save_dataset(const TwoViewDataset& ds, const std::string& path) {
  validate_dataset(ds);
  bool any_translated = false;
  for (char c : ds.origin) any_translated |= (c == 't');

  std::string out = "#scmv-tsv v1 d1=" + std::to_string(ds.x1.cols()) +
                    " d2=" + std::to_string(ds.x2.cols()) + "\n";
  auto append_row = [&out](const Matrix& x, Index i) {
    bool first = true;
    for (Index j = 0; j < x.cols(); ++j) {
      double v = x(i, j);
      if (v == 0.0) continue;
      if (!first) out += ' ';
      out += std::to_string(j);
      out += ':';
      out += format_double(v);
      first = false;
    }
  };
  for (Index i = 0; i < ds.n; ++i) {
    out += (i < ds.l) ? (ds.y(i) < 0.0 ? "-1" : "1") : "0";
    out += '\t';
    append_row(ds.x1, i);
    out += '\t';
    append_row(ds.x2, i);
    if (any_translated) {
      out += '\t';
      out += ds.origin[static_cast<std::size_t>(i)];
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open file for writing");
  f << out;
  if (!f) throw std::runtime_error(path + ": write failed");
}

struct FeaturizeResult {
  TwoViewDataset dataset;
  Vocabulary vocab1, vocab2;
};

namespace detail {

// tf = raw count, idf = ln(n/df). Keeps the k columns with largest summed
// weight, ties broken by lexicographic term order.
inline std::pair<Matrix, Vocabulary> featurize_view(
    const std::vector<std::vector<std::string>>& docs, Index k) {
  const Index n = static_cast<Index>(docs.size());
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::map<std::string, Index> df;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const std::string& term : docs[i]) tf[i][term] += 1.0;
    for (const auto& [term, count] : tf[i]) df[term] += 1;
  }

  std::map<std::string, double> idf;
  std::map<std::string, double> score;
  for (const auto& [term, d] : df)
    idf[term] = std::log(static_cast<double>(n) / static_cast<double>(d));
  for (const auto& doc : tf)
    for (const auto& [term, count] : doc) score[term] += count * idf[term];

  // std::map iterates terms lexicographically; a stable sort by descending
  // score therefore leaves ties in lexicographic order.
  std::vector<std::string> ranked;
  ranked.reserve(score.size());
  for (const auto& [term, s] : score) ranked.push_back(term);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&score](const std::string& a, const std::string& b) {
                     return score[a] > score[b];
                   });

  const Index width = std::min<Index>(k, static_cast<Index>(ranked.size()));
  Vocabulary vocab;
  std::map<std::string, Index> column;
  for (Index j = 0; j < width; ++j) {
    vocab.terms.push_back(ranked[static_cast<std::size_t>(j)]);
    vocab.doc_freq.push_back(df[ranked[static_cast<std::size_t>(j)]]);
    column[ranked[static_cast<std::size_t>(j)]] = j;
  }

  Matrix x = Matrix::Zero(n, width);
  for (Index i = 0; i < n; ++i)
    for (const auto& [term, count] : tf[static_cast<std::size_t>(i)]) {
      auto it = column.find(term);
      if (it != column.end()) x(i, it->second) = count * idf[term];
    }
  return {std::move(x), std::move(vocab)};
}

}  // namespace detail

inline FeaturizeResult featurize_corpus(
    const std::vector<std::vector<std::string>>& docs_view1,
    const std::vector<std::vector<std::string>>& docs_view2,
    const std::vector<double>& labels, Index k = 400) {
  if (docs_view1.size() != docs_view2.size())
    throw std::invalid_argument("featurize: view document counts differ");
  if (docs_view1.empty()) throw std::invalid_argument("featurize: empty corpus");
  if (labels.empty() || labels.size() > docs_view1.size())
    throw std::invalid_argument("featurize: labels must cover a non-empty prefix");
  if (k < 1) throw std::invalid_argument("featurize: k must be positive");

  FeaturizeResult res;
  auto [x1, vocab1] = detail::featurize_view(docs_view1, k);
  auto [x2, vocab2] = detail::featurize_view(docs_view2, k);
  res.dataset.x1 = std::move(x1);
  res.dataset.x2 = std::move(x2);
  res.vocab1 = std::move(vocab1);
  res.vocab2 = std::move(vocab2);
  res.dataset.n = static_cast<Index>(docs_view1.size());
  res.dataset.l = static_cast<Index>(labels.size());
  res.dataset.y = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  res.dataset.origin.assign(docs_view1.size(), 'o');
  validate_dataset(res.dataset);
  return res;
}

struct SynthData {
  TwoViewDataset dataset;
  Matrix u;        // n x m_true latent
  Matrix a1, a2;   // m_true x d_i row-orthonormal view maps
  Vector v;        // labeling direction
};

/// X_i = U A_i + sigma E_i with shared latent U; labels sign(U v) on the
/// labeled prefix. Deterministic in cfg.seed.
inline SynthData synth_generate_full(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  auto engine = seeded_engine(cfg.seed);

  SynthData sd;
  sd.u = gaussian_matrix(cfg.n, cfg.m_true, engine);
  sd.a1 = orthonormalize(gaussian_matrix(cfg.d1, cfg.m_true, engine)).transpose();
  sd.a2 = orthonormalize(gaussian_matrix(cfg.d2, cfg.m_true, engine)).transpose();

  TwoViewDataset& ds = sd.dataset;
  ds.x1 = sd.u * sd.a1;
  ds.x2 = sd.u * sd.a2;
  if (cfg.noise_sigma > 0.0) {
    ds.x1 += cfg.noise_sigma * gaussian_matrix(cfg.n, cfg.d1, engine);
    ds.x2 += cfg.noise_sigma * gaussian_matrix(cfg.n, cfg.d2, engine);
  }
  ds.n = cfg.n;
  ds.l = cfg.l;
  ds.origin.assign(static_cast<std::size_t>(cfg.n), 'o');

  for (int attempt = 0; attempt < 100; ++attempt) {
    sd.v = gaussian_vector(cfg.m_true, engine);
    Vector scores = sd.u.topRows(cfg.l) * sd.v;
    bool any_zero = false, any_pos = false, any_neg = false;
    for (Index i = 0; i < cfg.l; ++i) {
      any_zero |= (scores(i) == 0.0);
      any_pos |= (scores(i) > 0.0);
      any_neg |= (scores(i) < 0.0);
    }
    if (any_zero || !any_pos || !any_neg) continue;
    ds.y = scores.unaryExpr([](double s) { return s > 0.0 ? 1.0 : -1.0; });
    validate_dataset(ds);
    return sd;
  }
  throw std::runtime_error(
      "synth: labels stayed single-class after 100 direction redraws; config too degenerate");
}

inline TwoViewDataset synth_generate(const SynthConfig& cfg) {
  return synth_generate_full(cfg).dataset;
}

struct SplitResult {
  TwoViewDataset train;
  TwoViewDataset test;  // fully labeled (l == n); empty when test_count == 0
};

namespace detail {

inline TwoViewDataset gather_rows(const TwoViewDataset& ds, const std::vector<Index>& rows,
                                  Index labeled) {
  TwoViewDataset out;
  out.n = static_cast<Index>(rows.size());
  out.l = labeled;
  out.x1.resize(out.n, ds.x1.cols());
  out.x2.resize(out.n, ds.x2.cols());
  out.y.resize(labeled);
  out.origin.resize(rows.size());
  for (Index i = 0; i < out.n; ++i) {
    Index src = rows[static_cast<std::size_t>(i)];
    out.x1.row(i) = ds.x1.row(src);
    out.x2.row(i) = ds.x2.row(src);
    out.origin[static_cast<std::size_t>(i)] = ds.origin[static_cast<std::size_t>(src)];
    if (i < labeled) out.y(i) = ds.y(src);
  }
  return out;
}

}  // namespace detail

/// Moves `test_count` randomly chosen labeled rows into a held-out test set.
/// Remaining labeled rows keep their relative order; unlabeled rows all stay
/// in the training set.
inline SplitResult split_train_test(const TwoViewDataset& ds, Index test_count,
                                    std::uint64_t seed) {
  validate_dataset(ds);
  if (test_count < 0) throw std::invalid_argument("split: test_count must be non-negative");
  if (test_count == 0) return {ds, TwoViewDataset{}};
  if (test_count >= ds.l)
    throw std::invalid_argument("split: test_count must be smaller than the labeled count");

  auto perm = shuffled_indices(static_cast<std::size_t>(ds.l), seed);
  std::vector<bool> in_test(static_cast<std::size_t>(ds.l), false);
  for (Index i = 0; i < test_count; ++i) in_test[perm[static_cast<std::size_t>(i)]] = true;

  std::vector<Index> train_rows, test_rows;
  for (Index i = 0; i < ds.l; ++i)
    (in_test[static_cast<std::size_t>(i)] ? test_rows : train_rows).push_back(i);
  Index train_labeled = static_cast<Index>(train_rows.size());
  for (Index i = ds.l; i < ds.n; ++i) train_rows.push_back(i);

  SplitResult res;
  res.train = detail::gather_rows(ds, train_rows, train_labeled);
  res.test = detail::gather_rows(ds, test_rows, test_count);
  return res;
}

/// Re-tags the labeled prefix so exactly `target_count` rows read as original
/// ('o') and the rest as translated ('t'); the benchmark uses this to starve
/// the target-only baseline the way a cross-language corpus would.
inline TwoViewDataset retag_target_labeled(TwoViewDataset ds, Index target_count) {
  validate_dataset(ds);
  if (target_count < 1 || target_count > ds.l)
    throw std::invalid_argument("retag: need 1 <= target_count <= labeled count");
  for (Index i = 0; i < ds.l; ++i)
    ds.origin[static_cast<std::size_t>(i)] = (i < target_count) ? 'o' : 't';
  return ds;
}

}  // namespace scmv
