#pragma once

// The simplex potential
//   phi_c(x) = sum_i x_i (log x_i - log r_i) - c log(x' R x)
// whose interior minima drive the Laplace asymptotics at edge density c = m/n.
// Gradient and Hessian are taken in reduced coordinates x = x0 + E eps with
// E = [I_{q-1}; -1 ... -1].

#include "inhomo/errors.hpp"
#include "inhomo/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace inhomo {

/// A point in the open simplex: strictly positive coordinates summing to 1.
class SimplexPoint {
 public:
  explicit SimplexPoint(Eigen::VectorXd x) : x_(std::move(x)) {
    if (x_.size() == 0) throw ModelError(ModelErrorKind::DimensionMismatch, "empty simplex point");
    if (!(x_.array() > 0.0).all() || !x_.allFinite())
      throw ModelError(ModelErrorKind::InvalidArgument, "simplex point must be strictly positive");
    double s = x_.sum();
    if (std::abs(s - 1.0) > 1e-9) throw ModelError(ModelErrorKind::InvalidArgument, "simplex point must sum to 1");
    x_ /= s;
  }

  static SimplexPoint normalized(const Eigen::VectorXd& v) { return SimplexPoint(v / v.sum()); }
  static SimplexPoint uniform(std::size_t q) {
    return SimplexPoint(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(q), 1.0 / static_cast<double>(q)));
  }

  const Eigen::VectorXd& vec() const noexcept { return x_; }
  double operator[](Eigen::Index i) const { return x_(i); }
  Eigen::Index size() const noexcept { return x_.size(); }

 private:
  Eigen::VectorXd x_;
};

/// q x (q-1): identity block over a row of -1; 1'E = 0.
inline Eigen::MatrixXd reduction_matrix(std::size_t q) {
  const auto d = static_cast<Eigen::Index>(q) - 1;
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(d + 1, d);
  E.topRows(d).setIdentity();
  E.row(d).setConstant(-1.0);
  return E;
}

namespace detail {

inline double quadratic_form(const ModelSpec& spec, const Eigen::VectorXd& x) {
  double s = x.dot(spec.R_real * x);
  if (!(s > 0.0)) throw ModelError(ModelErrorKind::ZeroMatrix, "x' R x vanishes");
  return s;
}

inline void check_dims(const ModelSpec& spec, const SimplexPoint& x) {
  if (static_cast<std::size_t>(x.size()) != spec.q)
    throw ModelError(ModelErrorKind::DimensionMismatch, "point dimension differs from q");
}

}  // namespace detail

inline double phi(const ModelSpec& spec, double c, const SimplexPoint& x) {
  detail::check_dims(spec, x);
  const auto& v = x.vec();
  double entropy = (v.array() * (v.array().log() - spec.r_real.array().log())).sum();
  return entropy - c * std::log(detail::quadratic_form(spec, v));
}

/// phi on the closed simplex with 0 log 0 = 0; for diagnostics at the boundary.
inline double phi_closed(const ModelSpec& spec, double c, const Eigen::VectorXd& x) {
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > 0.0) entropy += x(i) * (std::log(x(i)) - std::log(spec.r_real(i)));
  return entropy - c * std::log(detail::quadratic_form(spec, x));
}

/// (log x' - log r' - (2c / x'Rx) x'R) E, length q-1.
inline Eigen::VectorXd phi_gradient(const ModelSpec& spec, double c, const SimplexPoint& x) {
  detail::check_dims(spec, x);
  const auto& v = x.vec();
  const double s = detail::quadratic_form(spec, v);
  Eigen::VectorXd full = v.array().log() - spec.r_real.array().log();
  full -= (2.0 * c / s) * (spec.R_real * v);
  return reduction_matrix(spec.q).transpose() * full;
}

/// E' (diag(x)^-1 + (2c / x'Rx) ((2 / x'Rx) Rx x'R - R)) E.
inline Eigen::MatrixXd phi_hessian(const ModelSpec& spec, double c, const SimplexPoint& x) {
  detail::check_dims(spec, x);
  const auto& v = x.vec();
  const double s = detail::quadratic_form(spec, v);
  const Eigen::VectorXd Rx = spec.R_real * v;
  Eigen::MatrixXd full = v.cwiseInverse().asDiagonal();
  full += (2.0 * c / s) * ((2.0 / s) * Rx * Rx.transpose() - spec.R_real);
  const Eigen::MatrixXd E = reduction_matrix(spec.q);
  Eigen::MatrixXd H = E.transpose() * full * E;
  return 0.5 * (H + H.transpose());
}

/// Determinant with the 0 x 0 convention det = 1.
inline double determinant(const Eigen::MatrixXd& M) { return M.rows() == 0 ? 1.0 : M.determinant(); }

inline double min_eigenvalue(const Eigen::MatrixXd& H) {
  if (H.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

struct CriticalPoint {
  SimplexPoint x;
  double c = 0.0;
  double phi = 0.0;
  double gradient_norm = 0.0;
  Eigen::MatrixXd hessian;
  double hessian_det = 1.0;
  bool is_minimum = false;
};

inline CriticalPoint describe_point(const ModelSpec& spec, double c, const SimplexPoint& x) {
  CriticalPoint p{x, c, phi(spec, c, x), 0.0, phi_hessian(spec, c, x), 1.0, false};
  p.gradient_norm = spec.q == 1 ? 0.0 : phi_gradient(spec, c, x).norm();
  p.hessian_det = determinant(p.hessian);
  p.is_minimum = min_eigenvalue(p.hessian) > 0.0;
  return p;
}

struct NewtonSettings {
  int max_iterations = 200;
  int max_halvings = 30;
  double gradient_tolerance = 1e-12;
  double accept_tolerance = 1e-10;  // gradient norm accepted when no further progress is possible
  double interior_floor = 1e-12;
};

namespace detail {

// Damped Newton in reduced coordinates. With `descend` set, the direction is
// modified to be a descent direction for phi (|eigenvalues|, floored) and
// steps must not increase phi; otherwise steps must reduce |gradient|, which
// converges to any nearby critical point.
inline std::optional<SimplexPoint> newton(const ModelSpec& spec, double c, SimplexPoint start, bool descend,
                                          const NewtonSettings& cfg = {}) {
  if (spec.q == 1) return start;
  const Eigen::MatrixXd E = reduction_matrix(spec.q);
  SimplexPoint x = std::move(start);
  Eigen::VectorXd g = phi_gradient(spec, c, x);
  double f = phi(spec, c, x);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const double gnorm = g.norm();
    if (gnorm <= cfg.gradient_tolerance) return x;
    const Eigen::MatrixXd H = phi_hessian(spec, c, x);
    Eigen::VectorXd step;
    if (descend) {
      Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() == Eigen::Success) {
        step = -llt.solve(g);
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
        Eigen::VectorXd lam = eig.eigenvalues().cwiseAbs().cwiseMax(1e-8);
        step = -eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(lam);
      }
    } else {
      step = -H.fullPivLu().solve(g);
    }
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, t *= 0.5) {
      Eigen::VectorXd trial = x.vec() + t * (E * step);
      if (trial.minCoeff() <= cfg.interior_floor) continue;
      SimplexPoint xt = SimplexPoint::normalized(trial);
      const double ft = phi(spec, c, xt);
      const Eigen::VectorXd gt = phi_gradient(spec, c, xt);
      bool ok;
      if (descend)
        ok = ft < f || (ft <= f + 1e-14 * (1.0 + std::abs(f)) && gt.norm() < gnorm);
      else
        ok = gt.norm() < gnorm;
      if (ok) {
        x = std::move(xt);
        f = ft;
        g = gt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (g.norm() <= cfg.accept_tolerance) return x;
  return std::nullopt;
}

// Interior points of the barycentric grid {k / resolution}, plus the barycenter.
inline std::vector<SimplexPoint> barycentric_seeds(std::size_t q, int resolution) {
  std::vector<SimplexPoint> seeds{SimplexPoint::uniform(q)};
  if (q == 1) return seeds;
  std::vector<int> k(q, 1);
  auto recurse = [&](auto& self, std::size_t i, int rest) -> void {
    if (i + 1 == q) {
      k[i] = rest;
      Eigen::VectorXd x(static_cast<Eigen::Index>(q));
      for (std::size_t j = 0; j < q; ++j) x(static_cast<Eigen::Index>(j)) = k[j];
      seeds.push_back(SimplexPoint::normalized(x));
      return;
    }
    for (int v = 1; v <= rest - static_cast<int>(q - i - 1); ++v) {
      k[i] = v;
      self(self, i + 1, rest - v);
    }
  };
  if (resolution >= static_cast<int>(q)) recurse(recurse, 0, resolution);
  return seeds;
}

inline bool close_max_norm(const SimplexPoint& a, const SimplexPoint& b, double tol) {
  return (a.vec() - b.vec()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

struct MinimaSearch {
  std::vector<CriticalPoint> minima;  // ascending phi
  std::size_t seeds = 0;
  std::size_t non_converged = 0;
  std::size_t non_minimal = 0;  // converged to a saddle or maximum
};

inline constexpr double kDedupTolerance = 1e-8;

/// Multistart damped Newton from the interior barycentric grid. Throws
/// NumericalError(NoMinimumFound) if every seed fails.
inline MinimaSearch find_local_minima(const ModelSpec& spec, double c, int grid_resolution) {
  if (!(c > 0.0)) throw ModelError(ModelErrorKind::InvalidArgument, "edge density c must be positive");
  if (grid_resolution < 4) throw ModelError(ModelErrorKind::InvalidArgument, "grid resolution must be at least 4");
  require_nonzero(spec);
  MinimaSearch out;
  auto seeds = detail::barycentric_seeds(spec.q, grid_resolution);
  out.seeds = seeds.size();
  for (const auto& seed : seeds) {
    auto x = detail::newton(spec, c, seed, true);
    if (!x) {
      ++out.non_converged;
      continue;
    }
    bool duplicate = std::any_of(out.minima.begin(), out.minima.end(), [&](const CriticalPoint& p) {
      return detail::close_max_norm(p.x, *x, kDedupTolerance);
    });
    if (duplicate) continue;
    auto point = describe_point(spec, c, *x);
    if (!point.is_minimum) {
      ++out.non_minimal;
      continue;
    }
    out.minima.push_back(std::move(point));
  }
  if (out.minima.empty())
    throw NumericalError(NumericalErrorKind::NoMinimumFound,
                         "no interior minimum located from " + std::to_string(out.seeds) + " seeds");
  std::sort(out.minima.begin(), out.minima.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (std::abs(a.phi - b.phi) > 1e-12) return a.phi < b.phi;
    const auto& u = a.x.vec();
    const auto& v = b.x.vec();
    return std::lexicographical_compare(u.data(), u.data() + u.size(), v.data(), v.data() + v.size());
  });
  return out;
}

/// Newton on the gradient from `start`; converges to the nearest critical
/// point of any kind. Empty when it does not converge.
inline std::optional<CriticalPoint> refine_critical_point(const ModelSpec& spec, double c, const SimplexPoint& start) {
  require_nonzero(spec);
  auto x = detail::newton(spec, c, start, false);
  if (!x) return std::nullopt;
  return describe_point(spec, c, *x);
}

namespace detail {

// Smallest reduced-Hessian eigenvalue over the simplex: grid scan, then a
// pattern search in log coordinates from the lowest grid points. Working in
// log x lets the search follow a valley to within kBoundaryFloor of a face,
// where the infimum often sits. Stops early once a negative value shows up.
// Below the floor the 1/x_i diagonal swamps the eigenvalues in roundoff.
inline constexpr double kBoundaryFloor = 1e-7;

inline double min_hessian_eigenvalue(const ModelSpec& spec, double c, int resolution) {
  if (spec.q == 1) return std::numeric_limits<double>::infinity();
  auto seeds = barycentric_seeds(spec.q, resolution);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    double v = min_eigenvalue(phi_hessian(spec, c, seeds[i]));
    if (v <= 0.0) return v;
    scored.emplace_back(v, i);
  }
  std::sort(scored.begin(), scored.end());
  auto evaluate = [&](const Eigen::VectorXd& y) -> std::optional<double> {
    Eigen::VectorXd x = (y.array() - y.maxCoeff()).exp();
    x /= x.sum();
    if (x.minCoeff() < kBoundaryFloor) return std::nullopt;
    return min_eigenvalue(phi_hessian(spec, c, SimplexPoint(x)));
  };
  const auto q = static_cast<Eigen::Index>(spec.q);
  double best = scored.front().first;
  const std::size_t starts = std::min<std::size_t>(5, scored.size());
  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd y = seeds[scored[s].second].vec().array().log();
    double value = scored[s].first;
    double step = 0.5;
    for (int evaluations = 0; step > 1e-6 && evaluations < 20000;) {
      bool improved = false;
      for (Eigen::Index d = 0; d < q && !improved; ++d)
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd trial = y;
          trial(d) += sign * step;
          ++evaluations;
          auto v = evaluate(trial);
          if (v && *v < value) {
            value = *v;
            y = trial;
            improved = true;
            break;
          }
        }
      if (value <= 0.0) return value;
      step = improved ? std::min(2.0 * step, 8.0) : 0.5 * step;
    }
    best = std::min(best, value);
  }
  return best;
}

}  // namespace detail

struct BetaEstimate {
  double beta = 0.0;
  bool capped = false;  // no loss of convexity found below c_max
  int grid_resolution = 0;
};

/// Estimates the supremum of densities c for which the reduced Hessian of
/// phi_c is positive definite on the whole simplex, by bisection on [0, c_max].
/// Not certified: the inner minimization is a grid scan plus local search.
inline BetaEstimate estimate_beta(const ModelSpec& spec, double c_max, int grid_resolution) {
  if (!(c_max > 0.0)) throw ModelError(ModelErrorKind::InvalidArgument, "c_max must be positive");
  if (grid_resolution < 4) throw ModelError(ModelErrorKind::InvalidArgument, "grid resolution must be at least 4");
  require_nonzero(spec);
  auto convex = [&](double c) { return detail::min_hessian_eigenvalue(spec, c, grid_resolution) > 0.0; };
  BetaEstimate est{c_max, true, grid_resolution};
  if (convex(c_max)) return est;
  double lo = 0.0, hi = c_max;
  while (hi - lo > 1e-7 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    (convex(mid) ? lo : hi) = mid;
  }
  est.beta = lo;
  est.capped = false;
  return est;
}

struct CensusRow {
  double c = 0.0;
  std::vector<CriticalPoint> minima;
};

struct Census {
  std::vector<CensusRow> rows;
  // smallest c at which the number of local minima changes, refined to 1e-4
  std::optional<double> count_transition;
  // where the Hessian determinant along the critical branch that starts at the
  // first density's lowest minimum crosses zero, refined to 1e-6
  std::optional<double> branch_degeneracy;
};

inline Census minima_census(const ModelSpec& spec, std::vector<double> c_values, int grid_resolution) {
  std::sort(c_values.begin(), c_values.end());
  Census census;
  for (double c : c_values) census.rows.push_back({c, find_local_minima(spec, c, grid_resolution).minima});

  auto count_at = [&](double c) { return find_local_minima(spec, c, grid_resolution).minima.size(); };
  for (std::size_t i = 1; i < census.rows.size() && !census.count_transition; ++i) {
    if (census.rows[i].minima.size() == census.rows[i - 1].minima.size()) continue;
    double lo = census.rows[i - 1].c, hi = census.rows[i].c;
    const auto base = census.rows[i - 1].minima.size();
    while (hi - lo > 1e-4) {
      double mid = 0.5 * (lo + hi);
      (count_at(mid) == base ? lo : hi) = mid;
    }
    census.count_transition = hi;
  }

  if (census.rows.empty() || spec.q == 1) return census;
  SimplexPoint x = census.rows.front().minima.front().x;
  double prev_c = census.rows.front().c;
  double prev_det = census.rows.front().minima.front().hessian_det;
  for (std::size_t i = 1; i < census.rows.size(); ++i) {
    double c = census.rows[i].c;
    auto p = refine_critical_point(spec, c, x);
    if (!p) break;
    if ((p->hessian_det > 0.0) != (prev_det > 0.0)) {
      double lo = prev_c, hi = c;
      SimplexPoint anchor = x;
      while (hi - lo > 1e-6) {
        double mid = 0.5 * (lo + hi);
        auto q = refine_critical_point(spec, mid, anchor);
        if (!q) break;
        if ((q->hessian_det > 0.0) == (prev_det > 0.0)) {
          lo = mid;
          anchor = q->x;
        } else {
          hi = mid;
        }
      }
      census.branch_degeneracy = 0.5 * (lo + hi);
      break;
    }
    x = p->x;
    prev_c = c;
    prev_det = p->hessian_det;
  }
  return census;
}

}  // namespace inhomo
