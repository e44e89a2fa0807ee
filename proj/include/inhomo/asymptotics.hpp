#pragma once

// Laplace-method estimates of multigraph and simple-graph counts. Everything is
// carried in natural-log scale.

#include "inhomo/errors.hpp"
#include "inhomo/model.hpp"
#include "inhomo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace inhomo {

struct AsymptoticEstimate {
  double log_value = 0.0;
  double leading_factor_log = 0.0;  // log(n^{2m} / (2^m m!))
  double correction_log = 0.0;
  std::vector<CriticalPoint> minima_used;
  std::vector<std::string> warnings;
};

struct LaplaceOptions {
  int grid_resolution = 12;
  // a minimum whose smallest Hessian eigenvalue is below this is treated as
  // degenerate; Newton stalls around 1e-8 at quartic minima
  double singular_tolerance = 1e-6;
  double crossing_tolerance = 1e-8;
};

/// log(n^{2m} / (2^m m!)), the total number of (n,m) multigraphs.
inline double leading_factor_log(unsigned n, unsigned m) {
  return 2.0 * m * std::log(static_cast<double>(n)) - m * std::log(2.0) - std::lgamma(m + 1.0);
}

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : v) top = std::max(top, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

inline void check_size(unsigned n, unsigned m) {
  if (n < 1 || m < 1) throw ModelError(ModelErrorKind::InvalidArgument, "asymptotic estimates need n >= 1 and m >= 1");
}

template <class Extra>
AsymptoticEstimate laplace_sum(const ModelSpec& spec, unsigned n, unsigned m, const LaplaceOptions& opts,
                               Extra&& extra_log) {
  check_size(n, m);
  const double c = static_cast<double>(m) / n;
  AsymptoticEstimate est;
  est.leading_factor_log = leading_factor_log(n, m);
  est.minima_used = find_local_minima(spec, c, opts.grid_resolution).minima;
  std::vector<double> terms;
  for (const auto& p : est.minima_used) {
    const double lowest = min_eigenvalue(p.hessian);
    if (lowest <= opts.singular_tolerance)
      throw NumericalError(NumericalErrorKind::SingularHessian,
                           "smallest Hessian eigenvalue " + std::to_string(lowest) + " at c = " + std::to_string(c) +
                               "; minima cross or merge near this density");
    double prod_log = p.x.vec().array().log().sum();
    terms.push_back(-static_cast<double>(n) * p.phi - 0.5 * (std::log(p.hessian_det) + prod_log) +
                    extra_log(c, p.x));
  }
  for (std::size_t i = 1; i < est.minima_used.size(); ++i)
    if (std::abs(est.minima_used[i].phi - est.minima_used[i - 1].phi) <= opts.crossing_tolerance)
      est.warnings.push_back("two minima have phi values within " + std::to_string(opts.crossing_tolerance) +
                             "; near a crossing the estimate is unreliable");
  est.correction_log = log_sum_exp(terms);
  est.log_value = est.leading_factor_log + est.correction_log;
  return est;
}

}  // namespace detail

/// Multigraph count: n^{2m}/(2^m m!) times the sum over local minima phi of
///   e^{-n phi_c(phi)} / sqrt(det H * prod phi_i).
inline AsymptoticEstimate laplace_count(const ModelSpec& spec, unsigned n, unsigned m,
                                        const LaplaceOptions& opts = {}) {
  return detail::laplace_sum(spec, n, m, opts, [](double, const SimplexPoint&) { return 0.0; });
}

/// Closed form when 1 is an eigenvector of R and r = 1:
///   lambda1^m q^{n-m} prod_{i>=2} (1 - 2c lambda_i / lambda1)^{-1/2}.
inline AsymptoticEstimate regular_case_count(const ModelSpec& spec, const SpectralData& sd, unsigned n, unsigned m) {
  detail::check_size(n, m);
  if (!sd.one_is_eigenvector) throw ModelError(ModelErrorKind::InvalidArgument, "1 is not an eigenvector of R");
  if (!has_unit_vertex_weights(spec)) throw ModelError(ModelErrorKind::InvalidArgument, "vertex weights must all be 1");
  const double c = static_cast<double>(m) / n;
  AsymptoticEstimate est;
  est.leading_factor_log = leading_factor_log(n, m);
  double corr = m * std::log(sd.lambda1) + (static_cast<double>(n) - m) * std::log(static_cast<double>(spec.q));
  for (std::size_t i = 1; i < sd.eigenvalues.size(); ++i) {
    double f = 1.0 - 2.0 * c * sd.eigenvalues[i] / sd.lambda1;
    if (!(f > 0.0))
      throw ModelError(ModelErrorKind::InvalidArgument,
                       "c = " + std::to_string(c) + " is beyond the range where the closed form holds");
    corr -= 0.5 * std::log(f);
  }
  est.correction_log = corr;
  est.log_value = est.leading_factor_log + corr;
  est.minima_used.push_back(describe_point(spec, c, SimplexPoint::uniform(spec.q)));
  return est;
}

inline AsymptoticEstimate regular_case_count(const ModelSpec& spec, unsigned n, unsigned m) {
  return regular_case_count(spec, spectrum(spec), n, m);
}

/// Log of the simple-graph factor
///   -(c / x'Rx) Tr(diag(x) R) - (c / x'Rx)^2 Tr((diag(x) R)^2).
inline double simple_correction(const ModelSpec& spec, double c, const SimplexPoint& x) {
  const auto& v = x.vec();
  const double s = detail::quadratic_form(spec, v);
  const Eigen::MatrixXd DR = v.asDiagonal() * spec.R_real;
  const double k = c / s;
  return -k * DR.trace() - k * k * (DR * DR).trace();
}

/// Simple-graph count: laplace_count with each minimum weighted by
/// exp(simple_correction).
inline AsymptoticEstimate laplace_count_simple(const ModelSpec& spec, unsigned n, unsigned m,
                                               const LaplaceOptions& opts = {}) {
  return detail::laplace_sum(spec, n, m, opts,
                             [&](double c, const SimplexPoint& x) { return simple_correction(spec, c, x); });
}

}  // namespace inhomo
