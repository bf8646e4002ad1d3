// Shared infrastructure: matrix aliases, error types, seeded sampling,
// orthonormalization and exact decimal round-trip formatting.
#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace scmv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Failure of a numerical routine (indefinite inner system, non-finite
/// objective, singular Cayley system). CLI maps this family to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The pair of column-orthonormal projection matrices being optimized.
struct SubspacePair {
  Matrix theta1;  // d1 x m
  Matrix theta2;  // d2 x m
};

// Objective value plus Euclidean gradient at a point.
struct Evaluation {
  double value = 0.0;
  Matrix g1;
  Matrix g2;
};

inline std::mt19937_64 seeded_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = normal(engine);
  return out;
}

inline Vector gaussian_vector(Index size, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  Vector out(size);
  for (Index i = 0; i < size; ++i) out(i) = normal(engine);
  return out;
}

/// Thin-QR orthonormalization with the diagonal of R forced positive, so the
/// result is a deterministic function of the input.
inline Matrix orthonormalize(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

/// ||theta^T theta - I||_F, the feasibility residual.
inline double orthogonality_residual(const Matrix& theta) {
  Matrix gram = theta.transpose() * theta;
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

/// Deterministic Fisher-Yates permutation of 0..count-1. Uses raw engine
/// outputs so the permutation is identical across standard libraries.
inline std::vector<std::size_t> shuffled_indices(std::size_t count,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  auto engine = seeded_engine(seed);
  for (std::size_t i = count; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(engine() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline bool parse_index(std::string_view text, Index& out) {
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline double sign_or_positive(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace scmv
