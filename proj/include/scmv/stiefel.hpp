// Feasible minimization over a pair of Stiefel manifolds: Cayley-transform
// curvilinear search with Armijo-Wolfe step selection.
#pragma once

#include "scmv/common.hpp"

#include <cmath>
#include <concepts>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace scmv {

enum class StopReason { converged, max_iterations, line_search_exhausted };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::line_search_exhausted: return "line_search_exhausted";
  }
  return "unknown";
}

/// Stationarity measure for the stop test. The printed algorithm tests the
/// Euclidean gradient, which need not vanish at a constrained optimum; the
/// default tests the skew direction instead (equivalently -L'(0)), which is
/// the quantity that actually drives the curve.
enum class StopRule { manifold, euclidean };

struct OptimizerConfig {
  double epsilon = 1e-6;
  double mu = 0.5;
  double rho1 = 1e-4;
  double rho2 = 0.9;
  int maxiters = 500;
  int maxsteps = 30;
  double tau_init = 1.0;
  StopRule stop_rule = StopRule::manifold;
};

inline void validate_optimizer_config(const OptimizerConfig& cfg) {
  if (!(cfg.epsilon >= 0.0))
    throw std::invalid_argument("optimizer: epsilon must be non-negative");
  if (!(cfg.mu > 0.0 && cfg.mu < 1.0))
    throw std::invalid_argument("optimizer: mu must lie in (0, 1)");
  if (!(cfg.rho1 > 0.0 && cfg.rho1 < cfg.rho2 && cfg.rho2 < 1.0))
    throw std::invalid_argument("optimizer: need 0 < rho1 < rho2 < 1");
  if (cfg.maxiters < 1 || cfg.maxsteps < 1)
    throw std::invalid_argument("optimizer: maxiters and maxsteps must be positive");
  if (!(cfg.tau_init > 0.0))
    throw std::invalid_argument("optimizer: tau_init must be positive");
}

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double slope_zero = 0.0;  // L'(0) at this iterate
  double tau = 0.0;         // accepted step; 0 on a terminal record
  int search_steps = 0;
  double f1_norm = 0.0;
  double f2_norm = 0.0;
  double ortho1 = 0.0;
  double ortho2 = 0.0;
};

struct IterationTrace {
  std::vector<TraceEntry> entries;
};

/// One JSON object per line, plot-ready.
inline void write_trace(const IterationTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open file for writing");
  for (const TraceEntry& e : trace.entries) {
    f << "{\"iteration\":" << e.iteration
      << ",\"objective\":" << format_double(e.objective)
      << ",\"abs_slope0\":" << format_double(std::abs(e.slope_zero))
      << ",\"tau\":" << format_double(e.tau)
      << ",\"steps\":" << e.search_steps
      << ",\"f1_norm\":" << format_double(e.f1_norm)
      << ",\"f2_norm\":" << format_double(e.f2_norm)
      << ",\"ortho1\":" << format_double(e.ortho1)
      << ",\"ortho2\":" << format_double(e.ortho2) << "}\n";
  }
  if (!f) throw std::runtime_error(path + ": write failed");
}

/// Numerical failure inside the optimizer; carries the iterations completed
/// before the abort.
class OptimizeError : public NumericalError {
 public:
  OptimizeError(const std::string& what, IterationTrace trace)
      : NumericalError(what), partial_trace(std::move(trace)) {}
  IterationTrace partial_trace;
};

inline Matrix init_orthonormal(Index d, Index m, std::uint64_t seed) {
  if (m < 1 || m > d)
    throw std::invalid_argument("init_orthonormal: need 1 <= m <= d");
  auto engine = seeded_engine(seed);
  return orthonormalize(gaussian_matrix(d, m, engine));
}

/// F = G Theta^T - Theta G^T kept as the rank-2m factorization F = U V^T with
/// U = [G | Theta], V = [Theta | -G]. All optimizer algebra works on the
/// factors; materialize() exists for tests.
class SkewFactor {
 public:
  SkewFactor(const Matrix& g, const Matrix& theta) {
    if (g.rows() != theta.rows() || g.cols() != theta.cols())
      throw std::invalid_argument("skew_direction: gradient and point shapes differ");
    const Index d = g.rows(), m = g.cols();
    u_.resize(d, 2 * m);
    u_.leftCols(m) = g;
    u_.rightCols(m) = theta;
    v_.resize(d, 2 * m);
    v_.leftCols(m) = theta;
    v_.rightCols(m) = -g;
  }

  const Matrix& u() const { return u_; }
  const Matrix& v() const { return v_; }
  Index dim() const { return u_.rows(); }

  // ||U V^T||_F^2 = tr((U^T U)(V^T V)), clamped against cancellation noise.
  double frobenius_sq() const {
    Matrix p = u_.transpose() * u_;
    Matrix q = v_.transpose() * v_;
    double tr = p.cwiseProduct(q.transpose()).sum();
    return tr < 0.0 ? 0.0 : tr;
  }

  // Entrywise antisymmetric by construction: the lower triangle is the
  // literal negation of the upper.
  Matrix materialize() const {
    const Index m = u_.cols() / 2;
    Matrix a = u_.leftCols(m) * v_.leftCols(m).transpose();  // G Theta^T
    Matrix f = Matrix::Zero(dim(), dim());
    for (Index i = 0; i < dim(); ++i)
      for (Index j = i + 1; j < dim(); ++j) {
        f(i, j) = a(i, j) - a(j, i);
        f(j, i) = -f(i, j);
      }
    return f;
  }

 private:
  Matrix u_, v_;
};

inline SkewFactor skew_direction(const Matrix& g, const Matrix& theta) {
  return SkewFactor(g, theta);
}

namespace detail {

// K = I + (tau/2) V^T U, the small system behind every (I + tau/2 F)^{-1}.
inline Eigen::FullPivLU<Matrix> cayley_system(const SkewFactor& f, double tau) {
  Matrix k = (0.5 * tau) * (f.v().transpose() * f.u());
  k.diagonal().array() += 1.0;
  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible())
    throw NumericalError("cayley step: inner 2m x 2m system is singular at tau=" +
                         format_double(tau));
  return lu;
}

}  // namespace detail

/// Q(tau) = (I + tau/2 F)^{-1}(I - tau/2 F) Theta, computed through the
/// low-rank identity Q = Theta - tau U (I + tau/2 V^T U)^{-1} V^T Theta.
inline Matrix cayley_step(const Matrix& theta, const SkewFactor& f, double tau) {
  if (theta.rows() != f.dim())
    throw std::invalid_argument("cayley_step: point and skew dimensions differ");
  if (tau == 0.0) return theta;
  auto lu = detail::cayley_system(f, tau);
  Matrix vt_theta = f.v().transpose() * theta;
  return theta - tau * (f.u() * lu.solve(vt_theta));
}

/// L'(0) = -1/2 ||F1||_F^2 - 1/2 ||F2||_F^2.
inline double curve_derivative_at_zero(const SkewFactor& f1, const SkewFactor& f2) {
  return -0.5 * (f1.frobenius_sq() + f2.frobenius_sq());
}

namespace detail {

// -sum_i tr(R_i^T (I + tau/2 F_i)^{-1} F_i (Theta_i + Q_i)/2), with the
// inverse applied through (I + tau/2 F)^{-1} F W = U K^{-1} (V^T W).
inline double curve_derivative_from_grads(const Matrix& r1, const Matrix& r2,
                                          const SkewFactor& f1, const SkewFactor& f2,
                                          const Matrix& theta1, const Matrix& theta2,
                                          const Matrix& q1, const Matrix& q2,
                                          double tau) {
  auto term = [tau](const Matrix& r, const SkewFactor& f, const Matrix& theta,
                    const Matrix& q) {
    Matrix w = 0.5 * (theta + q);
    Matrix kvw = f.v().transpose() * w;
    if (tau != 0.0) kvw = cayley_system(f, tau).solve(kvw);
    Matrix ru = r.transpose() * f.u();
    return ru.cwiseProduct(kvw.transpose()).sum();
  };
  return -(term(r1, f1, theta1, q1) + term(r2, f2, theta2, q2));
}

}  // namespace detail

template <typename P>
concept CurveProblem = requires(const P& p, const SubspacePair& s) {
  { p.evaluate(s) } -> std::convertible_to<Evaluation>;
};

/// Derivative of tau -> L(Q1(tau), Q2(tau)); evaluates the problem gradient
/// at the curve point.
template <CurveProblem P>
double curve_derivative(const P& problem, const Matrix& q1_tau, const Matrix& q2_tau,
                        const SkewFactor& f1, const SkewFactor& f2,
                        const Matrix& theta1, const Matrix& theta2, double tau) {
  Evaluation ev = problem.evaluate(SubspacePair{q1_tau, q2_tau});
  return detail::curve_derivative_from_grads(ev.g1, ev.g2, f1, f2, theta1, theta2,
                                             q1_tau, q2_tau, tau);
}

struct LineSearchResult {
  bool accepted = false;
  double tau = 0.0;
  int steps = 0;  // trials performed
  SubspacePair q;
  Evaluation eval;  // at q, reusable as the next iteration's gradient
};

/// Trials tau_init, tau_init*mu, ... until both the sufficient-decrease and
/// curvature conditions hold; a singular Cayley system or a non-finite trial
/// value just rejects that tau.
template <CurveProblem P>
LineSearchResult line_search(const P& problem, const SubspacePair& thetas,
                             const SkewFactor& f1, const SkewFactor& f2,
                             double value0, double slope0, const OptimizerConfig& cfg) {
  LineSearchResult res;
  double tau = cfg.tau_init;
  for (int s = 1; s <= cfg.maxsteps; ++s, tau *= cfg.mu) {
    res.steps = s;
    try {
      SubspacePair q{cayley_step(thetas.theta1, f1, tau),
                     cayley_step(thetas.theta2, f2, tau)};
      Evaluation ev = problem.evaluate(q);
      double slope_tau = detail::curve_derivative_from_grads(
          ev.g1, ev.g2, f1, f2, thetas.theta1, thetas.theta2, q.theta1, q.theta2, tau);
      if (ev.value <= value0 + cfg.rho1 * tau * slope0 && slope_tau >= cfg.rho2 * slope0) {
        res.accepted = true;
        res.tau = tau;
        res.q = std::move(q);
        res.eval = std::move(ev);
        return res;
      }
    } catch (const NumericalError&) {
      // singular inner system or indefinite trial point: shrink and retry
    }
  }
  return res;
}

struct OptimizeResult {
  SubspacePair pair;
  IterationTrace trace;
  StopReason reason = StopReason::converged;
  double final_value = 0.0;
  int iterations = 0;  // accepted steps
};

namespace detail {

inline bool finite(const Evaluation& ev) {
  return std::isfinite(ev.value) && ev.g1.allFinite() && ev.g2.allFinite();
}

}  // namespace detail

/// Gradient, stop test, skew direction, curvilinear search, update; every
/// iterate stays feasible (re-orthonormalized whenever drift exceeds 1e-8).
template <CurveProblem P>
OptimizeResult optimize(const P& problem, SubspacePair init, const OptimizerConfig& cfg) {
  validate_optimizer_config(cfg);

  OptimizeResult res;
  res.pair = std::move(init);
  Evaluation ev = problem.evaluate(res.pair);
  if (!detail::finite(ev))
    throw OptimizeError("optimize: non-finite objective or gradient at the initial point",
                        std::move(res.trace));

  while (true) {
    SkewFactor f1(ev.g1, res.pair.theta1), f2(ev.g2, res.pair.theta2);
    double slope0 = curve_derivative_at_zero(f1, f2);
    double measure = cfg.stop_rule == StopRule::manifold
                         ? -slope0
                         : ev.g1.squaredNorm() + ev.g2.squaredNorm();
    TraceEntry entry;
    entry.iteration = res.iterations;
    entry.objective = ev.value;
    entry.slope_zero = slope0;
    entry.f1_norm = std::sqrt(f1.frobenius_sq());
    entry.f2_norm = std::sqrt(f2.frobenius_sq());
    entry.ortho1 = orthogonality_residual(res.pair.theta1);
    entry.ortho2 = orthogonality_residual(res.pair.theta2);

    if (measure <= cfg.epsilon) {
      res.trace.entries.push_back(entry);
      res.reason = StopReason::converged;
      break;
    }
    if (res.iterations >= cfg.maxiters) {
      res.trace.entries.push_back(entry);
      res.reason = StopReason::max_iterations;
      break;
    }

    LineSearchResult ls = line_search(problem, res.pair, f1, f2, ev.value, slope0, cfg);
    entry.search_steps = ls.steps;
    if (!ls.accepted) {
      res.trace.entries.push_back(entry);
      res.reason = StopReason::line_search_exhausted;
      break;
    }
    entry.tau = ls.tau;
    res.trace.entries.push_back(entry);
    res.pair = std::move(ls.q);
    ev = std::move(ls.eval);
    ++res.iterations;

    bool reorthed = false;
    for (Matrix* theta : {&res.pair.theta1, &res.pair.theta2})
      if (orthogonality_residual(*theta) > 1e-8) {
        *theta = orthonormalize(*theta);
        reorthed = true;
      }
    if (reorthed) ev = problem.evaluate(res.pair);
    if (!detail::finite(ev))
      throw OptimizeError("optimize: objective or gradient became non-finite at iteration " +
                              std::to_string(res.iterations),
                          std::move(res.trace));
  }

  res.final_value = ev.value;
  return res;
}

}  // namespace scmv
