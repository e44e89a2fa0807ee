#pragma once

// Graphs whose components are trees or unicycles.
//
// Rooted trees by root type satisfy T = z diag(r) exp(R T); unrooted trees
// U = 1'T - T'RT/2; unicycles V = -log det(I - diag(T) R)/2 and, without loops
// or double edges, SV = V - Tr(diag(T)R)/2 - Tr((diag(T)R)^2)/4. The dominant
// singularity (rho, tau, gamma) of T fixes the density alpha below which such
// graphs dominate.

#include "inhomo/asymptotics.hpp"
#include "inhomo/errors.hpp"
#include "inhomo/model.hpp"
#include "inhomo/potential.hpp"
#include "inhomo/rational.hpp"
#include "inhomo/series.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace inhomo {

template <class T>
struct TypeWeights {
  std::vector<std::vector<T>> R;
  std::vector<T> r;
};

inline TypeWeights<Rational> exact_weights(const ModelSpec& spec) {
  require_exact(spec, "exact series");
  return {spec.R, spec.r};
}

/// Real weights with r scaled by `zeta`, so that series in u equal the
/// original series evaluated at z = zeta u.
inline TypeWeights<long double> scaled_weights(const ModelSpec& spec, long double zeta) {
  TypeWeights<long double> w;
  const auto q = static_cast<Eigen::Index>(spec.q);
  w.R.assign(spec.q, std::vector<long double>(spec.q));
  w.r.resize(spec.q);
  for (Eigen::Index i = 0; i < q; ++i) {
    w.r[static_cast<std::size_t>(i)] = zeta * static_cast<long double>(spec.r_real(i));
    for (Eigen::Index j = 0; j < q; ++j)
      w.R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          spec.exact ? spec.R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].convert_to<long double>()
                     : static_cast<long double>(spec.R_real(i, j));
  }
  return w;
}

/// Rooted trees by root type, order by order: [z^k] T_i = r_i [z^{k-1}] exp((R T)_i).
template <class T>
SeriesVector<T> tree_series(const TypeWeights<T>& w, std::size_t order) {
  if (order < 1) throw ModelError(ModelErrorKind::InvalidArgument, "series order must be at least 1");
  const std::size_t q = w.r.size();
  SeriesVector<T> tree(q, Series<T>(order));
  SeriesVector<T> field(q, Series<T>(order));  // R T
  SeriesVector<T> expo(q, Series<T>(order));   // exp(R T)
  for (auto& e : expo) e[0] = T(1);
  for (std::size_t k = 1; k <= order; ++k) {
    for (std::size_t i = 0; i < q; ++i) tree[i][k] = w.r[i] * expo[i][k - 1];
    for (std::size_t i = 0; i < q; ++i) {
      T s(0);
      for (std::size_t j = 0; j < q; ++j) s += w.R[i][j] * tree[j][k];
      field[i][k] = s;
    }
    for (std::size_t i = 0; i < q; ++i) {
      T acc(0);
      for (std::size_t j = 1; j <= k; ++j) acc += T(j) * field[i][j] * expo[i][k - j];
      expo[i][k] = acc / T(k);
    }
  }
  return tree;
}

inline SeriesVector<Rational> tree_series(const ModelSpec& spec, std::size_t order) {
  return tree_series(exact_weights(spec), order);
}

/// U = 1'T - T'RT / 2.
template <class T>
Series<T> unrooted_tree_series(const TypeWeights<T>& w, const SeriesVector<T>& tree) {
  const std::size_t q = w.r.size();
  Series<T> u(tree.front().order());
  for (std::size_t i = 0; i < q; ++i) {
    u += tree[i];
    Series<T> rt(u.order());
    for (std::size_t j = 0; j < q; ++j)
      if (w.R[i][j] != T(0)) rt += tree[j] * w.R[i][j];
    u -= (tree[i] * rt) * T(T(1) / T(2));
  }
  return u;
}

inline Series<Rational> unrooted_tree_series(const ModelSpec& spec, std::size_t order) {
  auto w = exact_weights(spec);
  return unrooted_tree_series(w, tree_series(w, order));
}

/// V = sum_{k>=1} Tr((diag(T) R)^k) / (2k); with `simple` the k = 1, 2 terms
/// (loops and double edges) are dropped.
template <class T>
Series<T> unicycle_series(const TypeWeights<T>& w, const SeriesVector<T>& tree, bool simple) {
  const std::size_t q = w.r.size();
  const std::size_t N = tree.front().order();
  using Matrix = std::vector<std::vector<Series<T>>>;
  Matrix M(q, std::vector<Series<T>>(q, Series<T>(N)));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      if (w.R[i][j] != T(0)) M[i][j] = tree[i] * w.R[i][j];
  Series<T> v(N);
  Matrix power = M;
  // M has no constant term, so M^k starts at z^k
  for (std::size_t k = 1; k <= N; ++k) {
    if (!simple || k >= 3) {
      Series<T> trace(N);
      for (std::size_t i = 0; i < q; ++i) trace += power[i][i];
      v += trace * T(T(1) / T(2 * k));
    }
    if (k == N) break;
    Matrix next(q, std::vector<Series<T>>(q, Series<T>(N)));
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t l = 0; l < q; ++l)
          if (w.R[l][j] != T(0)) next[i][j] += power[i][l] * M[l][j];
    power = std::move(next);
  }
  return v;
}

inline Series<Rational> unicycle_series(const ModelSpec& spec, std::size_t order, bool simple) {
  auto w = exact_weights(spec);
  return unicycle_series(w, tree_series(w, order), simple);
}

/// n! [z^n] U^{n-m} / (n-m)! exp(V or SV): the weighted number of (n,m)
/// graphs made of n - m trees and any number of unicycles.
inline Rational count_trees_unicycles_exact(const ModelSpec& spec, unsigned n, unsigned m, bool simple) {
  require_exact(spec, "count_trees_unicycles_exact");
  if (m > n) return Rational(0);
  if (n == 0) return Rational(1);
  auto w = exact_weights(spec);
  auto tree = tree_series(w, n);
  auto u = unrooted_tree_series(w, tree);
  auto v = unicycle_series(w, tree, simple);
  auto product = u.pow(n - m) * v.exp();
  return product[n] * Rational(factorial(n), factorial(n - m));
}

struct SingularData {
  double rho = 0.0;
  Eigen::VectorXd tau;
  Eigen::VectorXd gamma;
  double alpha = 0.0;
  // |tau - rho diag(r) exp(R tau)|, |(I - diag(tau) R) gamma|, normalization mismatch
  double residual_fixed_point = 0.0;
  double residual_kernel = 0.0;
  double residual_normalization = 0.0;
};

struct TreeEvaluationSettings {
  double relative_tolerance = 1e-14;
  long max_iterations = 100000;
};

namespace detail {

// Largest eigenvalue and unit eigenvector of D^{1/2} R D^{1/2}, similar to diag(t) R.
inline std::pair<double, Eigen::VectorXd> perron(const ModelSpec& spec, const Eigen::VectorXd& t) {
  Eigen::VectorXd root = t.cwiseSqrt();
  Eigen::MatrixXd S = root.asDiagonal() * spec.R_real * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const auto last = S.rows() - 1;
  Eigen::VectorXd v = eig.eigenvectors().col(last);
  if (v.sum() < 0) v = -v;
  return {eig.eigenvalues()(last), v};
}

inline Eigen::VectorXd tree_map(const ModelSpec& spec, double z, const Eigen::VectorXd& t) {
  return z * spec.r_real.cwiseProduct((spec.R_real * t).array().exp().matrix());
}

}  // namespace detail

/// Numerical value of T(z) for real 0 <= z < rho: fixed-point iteration from
/// 0, finished by Newton when the iteration is slow near the singularity.
/// Empty when z is at or beyond the singularity.
inline std::optional<Eigen::VectorXd> evaluate_tree(const ModelSpec& spec, double z,
                                                    const TreeEvaluationSettings& cfg = {}) {
  const auto q = static_cast<Eigen::Index>(spec.q);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(q);
  if (z <= 0.0) return t;
  bool converged = false;
  for (long it = 0; it < cfg.max_iterations; ++it) {
    Eigen::VectorXd next = detail::tree_map(spec, z, t);
    if (!next.allFinite() || next.maxCoeff() > 1e12) return std::nullopt;
    double change = (next - t).cwiseAbs().maxCoeff();
    t = std::move(next);
    if (change <= cfg.relative_tolerance * t.cwiseAbs().maxCoeff()) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    for (int it = 0; it < 60 && !converged; ++it) {
      Eigen::VectorXd mapped = detail::tree_map(spec, z, t);
      Eigen::MatrixXd J = Eigen::MatrixXd::Identity(q, q) - mapped.asDiagonal() * spec.R_real;
      Eigen::VectorXd delta = J.fullPivLu().solve(t - mapped);
      t -= delta;
      if (!t.allFinite() || (t.array() <= 0.0).any()) return std::nullopt;
      converged = delta.cwiseAbs().maxCoeff() <= cfg.relative_tolerance * t.cwiseAbs().maxCoeff();
    }
    if (!converged) return std::nullopt;
  }
  if (detail::perron(spec, t).first >= 1.0) return std::nullopt;
  return t;
}

/// Solves tau = rho diag(r) exp(R tau), det(I - diag(tau) R) = 0 for the
/// dominant singularity, then gamma and alpha.
inline SingularData singular_data(const ModelSpec& spec) {
  require_nonzero(spec);
  const auto q = static_cast<Eigen::Index>(spec.q);
  auto ok = [&](double z) { return evaluate_tree(spec, z).has_value(); };

  double lo = 0.0, hi = 1.0;
  if (ok(hi)) {
    lo = hi;
    while (ok(hi *= 2.0)) {
      lo = hi;
      if (hi > 1e300) throw NumericalError(NumericalErrorKind::NewtonFailure, "no singularity found");
    }
  } else {
    while (!ok(lo = hi * 0.5)) {
      hi = lo;
      if (hi < 1e-300) throw NumericalError(NumericalErrorKind::NewtonFailure, "no convergent radius found");
    }
  }
  while (hi - lo > 1e-12 * hi) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }

  // Newton on (tau, rho) with F = [tau - rho r exp(R tau); lambda_max - 1]
  Eigen::VectorXd tau = *evaluate_tree(spec, lo);
  double rho = lo;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd e = spec.r_real.cwiseProduct((spec.R_real * tau).array().exp().matrix());
    auto [lambda, v] = detail::perron(spec, tau);
    Eigen::VectorXd F(q + 1);
    F.head(q) = tau - rho * e;
    F(q) = lambda - 1.0;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q + 1, q + 1);
    J.topLeftCorner(q, q) = Eigen::MatrixXd::Identity(q, q) - (rho * e).asDiagonal() * spec.R_real;
    J.topRightCorner(q, 1) = -e;
    J.bottomLeftCorner(1, q) = (lambda * v.cwiseAbs2().cwiseQuotient(tau)).transpose();
    Eigen::VectorXd delta = J.fullPivLu().solve(F);
    double step = 1.0;
    while ((tau - step * delta.head(q)).minCoeff() <= 0.0 && step > 1e-12) step *= 0.5;
    tau -= step * delta.head(q);
    rho -= step * delta(q);
    if (delta.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, tau.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  Eigen::VectorXd e = spec.r_real.cwiseProduct((spec.R_real * tau).array().exp().matrix());
  double fp_residual = (tau - rho * e).cwiseAbs().maxCoeff();
  if (!converged && fp_residual > 1e-10)
    throw NumericalError(NumericalErrorKind::NewtonFailure,
                         "singularity refinement failed; bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "]");

  SingularData sd;
  sd.rho = rho;
  sd.tau = tau;
  auto [lambda, v] = detail::perron(spec, tau);
  Eigen::VectorXd gamma = tau.cwiseSqrt().cwiseProduct(v);
  const double cubic = 0.5 * gamma.dot(spec.R_real * gamma.asDiagonal() * spec.R_real * gamma);
  gamma *= std::sqrt(gamma.sum() / cubic);
  sd.gamma = gamma;
  sd.alpha = 0.5 * tau.dot(spec.R_real * tau) / tau.sum();
  sd.residual_fixed_point = fp_residual;
  sd.residual_kernel = (gamma - tau.asDiagonal() * spec.R_real * gamma).cwiseAbs().maxCoeff();
  sd.residual_normalization =
      std::abs(0.5 * gamma.dot(spec.R_real * gamma.asDiagonal() * spec.R_real * gamma) - gamma.sum());
  return sd;
}

struct SaddlePoint {
  double zeta = 0.0;
  SimplexPoint phi = SimplexPoint::uniform(1);
  Eigen::VectorXd tree_value;  // T(zeta)
};

/// Solves T(z)'R T(z) / (2 1'T(z)) = c for z in (0, rho) by bisection; phi is
/// T(zeta) normalized to the simplex.
namespace detail {

// alpha is only known to about 1e-12, so densities within 1e-9 of it are
// treated as critical
inline bool below_alpha(double c, const SingularData& sd) { return c < sd.alpha * (1.0 - 1e-9); }

}  // namespace detail

inline SaddlePoint saddle_point(const ModelSpec& spec, double c, const SingularData& sd) {
  if (!(c > 0.0) || !detail::below_alpha(c, sd))
    throw ModelError(ModelErrorKind::InvalidArgument,
                     "density c = " + std::to_string(c) + " is outside (0, alpha = " + std::to_string(sd.alpha) + ")");
  auto density = [&](double z) -> std::optional<std::pair<double, Eigen::VectorXd>> {
    auto t = evaluate_tree(spec, z);
    if (!t) return std::nullopt;
    return std::pair{0.5 * t->dot(spec.R_real * *t) / t->sum(), *t};
  };
  double lo = 0.0, hi = sd.rho;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * sd.rho; ++it) {
    double mid = 0.5 * (lo + hi);
    auto d = density(mid);
    if (d && d->first < c)
      lo = mid;
    else
      hi = mid;
  }
  auto d = density(lo);
  if (!d) throw NumericalError(NumericalErrorKind::NewtonFailure, "tree series evaluation failed at the saddle point");
  return {lo, SimplexPoint::normalized(d->second), d->second};
}

inline SaddlePoint saddle_point(const ModelSpec& spec, double c) { return saddle_point(spec, c, singular_data(spec)); }

/// C_{c,x} = (1/c) ((1-c) 1'(I - k diag(x) R)^{-1} x - 1) det(I - k diag(x) R), k = 2c / x'Rx.
inline double c_factor(const ModelSpec& spec, double c, const SimplexPoint& x) {
  if (!(c > 0.0)) throw ModelError(ModelErrorKind::InvalidArgument, "c must be positive");
  const auto& v = x.vec();
  const double k = 2.0 * c / detail::quadratic_form(spec, v);
  const auto q = static_cast<Eigen::Index>(spec.q);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(q, q) - k * v.asDiagonal() * spec.R_real;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw NumericalError(NumericalErrorKind::SingularMatrix, "I - (2c/x'Rx) diag(x) R is singular at this c");
  return ((1.0 - c) * lu.solve(v).sum() - 1.0) * lu.determinant() / c;
}

inline Eigen::MatrixXd adjugate(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  Eigen::MatrixXd adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::MatrixXd minor(n - 1, n - 1);
      for (Eigen::Index a = 0, ra = 0; a < n; ++a) {
        if (a == j) continue;
        for (Eigen::Index b = 0, cb = 0; b < n; ++b) {
          if (b == i) continue;
          minor(ra, cb++) = A(a, b);
        }
        ++ra;
      }
      adj(i, j) = (((i + j) % 2) ? -1.0 : 1.0) * minor.determinant();
    }
  return adj;
}

/// Limit of C_{c, phi_c} at c = alpha, where the determinant factor vanishes:
/// (1-alpha)/alpha * 1' adj(I - diag(tau) R) tau / 1'tau.
inline double c_factor_critical(const ModelSpec& spec, const SingularData& sd) {
  const auto q = static_cast<Eigen::Index>(spec.q);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(q, q) - sd.tau.asDiagonal() * spec.R_real;
  return (1.0 - sd.alpha) / sd.alpha * (adjugate(A) * sd.tau).sum() / sd.tau.sum();
}

/// n^{2m}/(2^m m!) C_{c,phi_c}^{-1/2} e^{-n phi_c(phi_c)} for c = m/n in (0, alpha).
inline AsymptoticEstimate asymptotic_trees_unicycles(const ModelSpec& spec, unsigned n, unsigned m,
                                                     const SingularData& sd) {
  if (n < 1 || m < 1) throw ModelError(ModelErrorKind::InvalidArgument, "need n >= 1 and m >= 1");
  const double c = static_cast<double>(m) / n;
  if (!detail::below_alpha(c, sd))
    throw ModelError(ModelErrorKind::InvalidArgument,
                     "density m/n = " + std::to_string(c) + " is not below alpha = " + std::to_string(sd.alpha));
  auto sp = saddle_point(spec, c, sd);
  AsymptoticEstimate est;
  est.leading_factor_log = leading_factor_log(n, m);
  est.correction_log = -0.5 * std::log(c_factor(spec, c, sp.phi)) - static_cast<double>(n) * phi(spec, c, sp.phi);
  est.log_value = est.leading_factor_log + est.correction_log;
  est.minima_used.push_back(describe_point(spec, c, sp.phi));
  return est;
}

inline AsymptoticEstimate asymptotic_trees_unicycles(const ModelSpec& spec, unsigned n, unsigned m) {
  return asymptotic_trees_unicycles(spec, n, m, singular_data(spec));
}

/// log of count_trees_unicycles_exact in long double, for sizes where exact
/// series get slow. Series are expanded around z = zeta (the saddle point when
/// m/n < alpha) and U is normalized by U(zeta) so coefficients stay O(1).
inline double log_count_trees_unicycles(const ModelSpec& spec, unsigned n, unsigned m, bool simple) {
  if (m > n) return -std::numeric_limits<double>::infinity();
  if (n == 0) return 0.0;
  const auto sd = singular_data(spec);
  const double c = static_cast<double>(m) / n;
  double zeta = (c > 0.0 && detail::below_alpha(c, sd)) ? saddle_point(spec, c, sd).zeta : 0.5 * sd.rho;
  auto t_value = *evaluate_tree(spec, zeta);
  const long double u_value =
      static_cast<long double>(t_value.sum()) - 0.5L * static_cast<long double>(t_value.dot(spec.R_real * t_value));

  auto w = scaled_weights(spec, zeta);
  auto tree = tree_series(w, n);
  auto u = unrooted_tree_series(w, tree) * (1.0L / u_value);
  auto v = unicycle_series(w, tree, simple);
  auto product = u.pow(n - m) * v.exp();
  const long double coef = product[n];
  if (!(coef > 0.0L)) return -std::numeric_limits<double>::infinity();
  long double log_value = std::lgamma(static_cast<long double>(n) + 1) -
                          std::lgamma(static_cast<long double>(n - m) + 1) +
                          static_cast<long double>(n - m) * std::log(u_value) -
                          static_cast<long double>(n) * std::log(static_cast<long double>(zeta)) + std::log(coef);
  return static_cast<double>(log_value);
}

}  // namespace inhomo
