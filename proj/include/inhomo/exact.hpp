#pragma once

// Exact weighted counts of (n,m) multigraphs and simple graphs, summed over
// type compositions n_1 + ... + n_q = n, plus log-scale evaluations of the
// same sums for sizes where exact rationals get slow.

#include "inhomo/errors.hpp"
#include "inhomo/model.hpp"
#include "inhomo/rational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace inhomo {

struct ExactOptions {
  unsigned threads = 1;
};

namespace detail {

// Model weights rescaled to integers: R = R_int / R_den, r = r_int / r_den.
struct IntegerWeights {
  std::vector<std::vector<BigInt>> R;
  std::vector<BigInt> r;
  BigInt R_den = 1;
  BigInt r_den = 1;
};

inline BigInt lcm(const BigInt& a, const BigInt& b) { return a / boost::multiprecision::gcd(a, b) * b; }

inline IntegerWeights integer_weights(const ModelSpec& spec) {
  IntegerWeights w;
  for (const auto& row : spec.R)
    for (const auto& v : row) w.R_den = lcm(w.R_den, boost::multiprecision::denominator(v));
  for (const auto& v : spec.r) w.r_den = lcm(w.r_den, boost::multiprecision::denominator(v));
  w.R.assign(spec.q, std::vector<BigInt>(spec.q));
  w.r.resize(spec.q);
  for (std::size_t i = 0; i < spec.q; ++i) {
    w.r[i] = boost::multiprecision::numerator(spec.r[i]) * (w.r_den / boost::multiprecision::denominator(spec.r[i]));
    for (std::size_t j = 0; j < spec.q; ++j)
      w.R[i][j] = boost::multiprecision::numerator(spec.R[i][j]) *
                  (w.R_den / boost::multiprecision::denominator(spec.R[i][j]));
  }
  return w;
}

// Runs fn(task) for task in [0, count) on up to `threads` workers; results are
// stored by task index so any reduction over them is order-independent of
// scheduling.
template <class Result, class Fn>
std::vector<Result> run_tasks(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<Result> results(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t t = 0; t < count; ++t) results[t] = fn(t);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) results[t] = fn(t);
    });
  pool.clear();
  return results;
}

// Visits every composition of `n` into q parts whose first part is `first`,
// carrying the running product  prod_i C(rest_i, n_i) * w_i^{n_i}  so the
// multinomial is built one binomial per level. `power[i][k]` is w_i^k.
template <class Coef, class Leaf>
void visit_compositions(std::size_t q, unsigned n, unsigned first, const std::vector<std::vector<Coef>>& power,
                        Leaf&& leaf) {
  std::vector<unsigned> counts(q, 0);
  auto recurse = [&](auto& self, std::size_t i, unsigned rest, const Coef& coef) -> void {
    if (i + 1 == q) {
      counts[i] = rest;
      leaf(counts, Coef(coef * power[i][rest]));
      return;
    }
    Coef binom = 1;
    for (unsigned k = 0; k <= rest; ++k) {
      if (k > 0) {
        binom *= rest - k + 1;
        binom /= k;
      }
      counts[i] = k;
      self(self, i + 1, rest - k, Coef(coef * binom * power[i][k]));
    }
  };
  if (q == 1) {
    if (first != n) return;
    counts[0] = n;
    leaf(counts, Coef(power[0][n]));
    return;
  }
  if (first > n) return;
  counts[0] = first;
  Coef start = binomial(n, first);
  start *= power[0][first];
  recurse(recurse, 1, n - first, start);
}

template <class T>
std::vector<std::vector<T>> power_table(const std::vector<T>& base, unsigned n) {
  std::vector<std::vector<T>> table(base.size(), std::vector<T>(n + 1));
  for (std::size_t i = 0; i < base.size(); ++i) {
    table[i][0] = 1;
    for (unsigned k = 1; k <= n; ++k) table[i][k] = table[i][k - 1] * base[i];
  }
  return table;
}

// Coefficients of (1 + a w)^N truncated at degree `deg`.
inline std::vector<BigInt> binomial_power(const BigInt& a, std::uint64_t N, unsigned deg) {
  std::vector<BigInt> c(std::min<std::uint64_t>(N, deg) + 1);
  c[0] = 1;
  for (std::size_t k = 1; k < c.size(); ++k) c[k] = c[k - 1] * (N - k + 1) / k * a;
  return c;
}

template <class T>
void multiply_truncated(std::vector<T>& acc, const std::vector<T>& factor, unsigned deg) {
  std::vector<T> out(std::min<std::size_t>(acc.size() + factor.size() - 1, deg + 1), T(0));
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] == 0) continue;
    for (std::size_t j = 0; j < factor.size() && i + j < out.size(); ++j) out[i + j] += acc[i] * factor[j];
  }
  acc = std::move(out);
}

// Neumaier-compensated log-sum-exp.
template <class F>
F log_sum_exp(const std::vector<F>& terms) {
  using std::abs;
  using std::exp;
  using std::log;
  if (terms.empty()) return -std::numeric_limits<F>::infinity();
  F top = *std::max_element(terms.begin(), terms.end());
  F sum = 0, comp = 0;
  for (const auto& t : terms) {
    F v = exp(F(t - top));
    F s = sum + v;
    if (abs(sum) >= abs(v))
      comp += (sum - s) + v;
    else
      comp += (v - s) + sum;
    sum = s;
  }
  return top + F(log(F(sum + comp)));
}

template <class F>
std::vector<F> log_factorials(std::uint64_t n) {
  using std::log;
  std::vector<F> lf(n + 1, F(0));
  for (std::uint64_t k = 2; k <= n; ++k) lf[k] = lf[k - 1] + F(log(F(k)));
  return lf;
}

}  // namespace detail

/// Sum of weights of all (n,m) (R,r)-multigraphs:
///   (1 / (2^m m!)) * sum over compositions of  multinomial * r^counts * (counts' R counts)^m.
inline Rational count_multigraphs(const ModelSpec& spec, unsigned n, unsigned m, const ExactOptions& opts = {}) {
  require_exact(spec, "count_multigraphs");
  const auto w = detail::integer_weights(spec);
  const auto power = detail::power_table(w.r, n);
  const std::size_t q = spec.q;
  auto partial = detail::run_tasks<BigInt>(q == 1 ? 1 : n + 1, opts.threads, [&](std::size_t task) {
    BigInt sum = 0;
    detail::visit_compositions<BigInt>(q, n, q == 1 ? n : static_cast<unsigned>(task), power,
                                       [&](const std::vector<unsigned>& c, const BigInt& coef) {
                                         BigInt form = 0;
                                         for (std::size_t i = 0; i < q; ++i) {
                                           if (c[i] == 0) continue;
                                           for (std::size_t j = 0; j < q; ++j)
                                             if (c[j] != 0) form += w.R[i][j] * (c[i] * c[j]);
                                         }
                                         sum += coef * ipow(form, m);
                                       });
    return sum;
  });
  BigInt total = 0;
  for (const auto& p : partial) total += p;
  BigInt den = ipow(BigInt(2), m) * factorial(m) * ipow(w.r_den, n) * ipow(w.R_den, m);
  return Rational(total, den);
}

/// Sum of weights of all simple (n,m) (R,r)-graphs: the coefficient of w^m in
///   sum over compositions of multinomial * r^counts * prod_{i<j} (1 + R_ij w)^{n_i n_j}
///   * prod_i (1 + R_ii w)^{n_i (n_i - 1)/2}.
inline Rational count_simple(const ModelSpec& spec, unsigned n, unsigned m, const ExactOptions& opts = {}) {
  require_exact(spec, "count_simple");
  if (static_cast<std::uint64_t>(m) > static_cast<std::uint64_t>(n) * (n == 0 ? 0 : n - 1) / 2) return Rational(0);
  const auto w = detail::integer_weights(spec);
  const auto power = detail::power_table(w.r, n);
  const std::size_t q = spec.q;
  auto partial = detail::run_tasks<BigInt>(q == 1 ? 1 : n + 1, opts.threads, [&](std::size_t task) {
    BigInt sum = 0;
    detail::visit_compositions<BigInt>(
        q, n, q == 1 ? n : static_cast<unsigned>(task), power,
        [&](const std::vector<unsigned>& c, const BigInt& coef) {
          std::vector<BigInt> poly{BigInt(1)};
          for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = i; j < q; ++j) {
              std::uint64_t pairs = i == j ? std::uint64_t(c[i]) * (c[i] == 0 ? 0 : c[i] - 1) / 2
                                           : std::uint64_t(c[i]) * c[j];
              if (pairs == 0 || w.R[i][j] == 0) continue;
              detail::multiply_truncated(poly, detail::binomial_power(w.R[i][j], pairs, m), m);
            }
          if (poly.size() > m) sum += coef * poly[m];
        });
    return sum;
  });
  BigInt total = 0;
  for (const auto& p : partial) total += p;
  return Rational(total, ipow(w.r_den, n) * ipow(w.R_den, m));
}

/// Natural log of count_multigraphs evaluated in 50-digit floating point.
/// Works for real-valued models too. Returns -inf when the count is zero.
inline double log_count_multigraphs(const ModelSpec& spec, unsigned n, unsigned m, const ExactOptions& opts = {}) {
  using F = HighFloat;
  const std::size_t q = spec.q;
  const auto lf = detail::log_factorials<F>(n);
  std::vector<F> log_r(q);
  std::vector<std::vector<F>> R(q, std::vector<F>(q));
  for (std::size_t i = 0; i < q; ++i) {
    if (spec.exact) {
      log_r[i] = log(F(boost::multiprecision::numerator(spec.r[i]))) -
                 log(F(boost::multiprecision::denominator(spec.r[i])));
      for (std::size_t j = 0; j < q; ++j)
        R[i][j] = F(boost::multiprecision::numerator(spec.R[i][j])) /
                  F(boost::multiprecision::denominator(spec.R[i][j]));
    } else {
      log_r[i] = log(F(spec.r_real(static_cast<Eigen::Index>(i))));
      for (std::size_t j = 0; j < q; ++j)
        R[i][j] = F(spec.R_real(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  auto partial = detail::run_tasks<std::vector<F>>(q == 1 ? 1 : n + 1, opts.threads, [&](std::size_t task) {
    std::vector<F> terms;
    std::vector<unsigned> c(q);
    auto recurse = [&](auto& self, std::size_t i, unsigned rest, const F& acc) -> void {
      if (i + 1 == q) {
        c[i] = rest;
        F t = acc - lf[rest] + F(rest) * log_r[i];
        F form = 0;
        for (std::size_t a = 0; a < q; ++a)
          for (std::size_t b = 0; b < q; ++b) form += R[a][b] * F(c[a]) * F(c[b]);
        if (m > 0) {
          if (form <= 0) return;
          t += F(m) * log(form);
        }
        terms.push_back(t);
        return;
      }
      for (unsigned k = 0; k <= rest; ++k) {
        c[i] = k;
        self(self, i + 1, rest - k, F(acc - lf[k] + F(k) * log_r[i]));
      }
    };
    if (q == 1) {
      recurse(recurse, 0, n, lf[n]);
    } else {
      auto first = static_cast<unsigned>(task);
      c[0] = first;
      recurse(recurse, 1, n - first, F(lf[n] - lf[first] + F(first) * log_r[0]));
    }
    return terms;
  });
  std::vector<F> all;
  for (auto& p : partial) all.insert(all.end(), p.begin(), p.end());
  F result = detail::log_sum_exp(all);
  result -= F(m) * log(F(2)) + detail::log_factorials<F>(m)[m];
  return static_cast<double>(result);
}

/// Natural log of count_simple in long double with per-composition
/// renormalized polynomial products. Returns -inf when the count is zero.
inline double log_count_simple(const ModelSpec& spec, unsigned n, unsigned m, const ExactOptions& opts = {}) {
  using F = long double;
  const std::size_t q = spec.q;
  if (static_cast<std::uint64_t>(m) > static_cast<std::uint64_t>(n) * (n == 0 ? 0 : n - 1) / 2)
    return -std::numeric_limits<double>::infinity();
  const auto lf = detail::log_factorials<F>(n);
  std::vector<F> log_r(q);
  std::vector<std::vector<F>> R(q, std::vector<F>(q));
  for (std::size_t i = 0; i < q; ++i) {
    log_r[i] = std::log(static_cast<F>(spec.r_real(static_cast<Eigen::Index>(i))));
    for (std::size_t j = 0; j < q; ++j)
      R[i][j] = spec.exact ? spec.R[i][j].convert_to<F>()
                           : static_cast<F>(spec.R_real(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  // log [w^m] prod (1 + a w)^N, each factor and partial product scaled to max 1
  auto log_coefficient = [&](const std::vector<unsigned>& c) -> F {
    std::vector<F> poly{1.0L};
    F scale = 0;
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = i; j < q; ++j) {
        std::uint64_t N = i == j ? std::uint64_t(c[i]) * (c[i] == 0 ? 0 : c[i] - 1) / 2 : std::uint64_t(c[i]) * c[j];
        if (N == 0 || R[i][j] == 0) continue;
        const std::size_t len = std::min<std::uint64_t>(N, m) + 1;
        std::vector<F> logs(len);
        logs[0] = 0;
        const F la = std::log(R[i][j]);
        for (std::size_t k = 1; k < len; ++k)
          logs[k] = logs[k - 1] + std::log(static_cast<F>(N - k + 1) / static_cast<F>(k)) + la;
        F top = *std::max_element(logs.begin(), logs.end());
        std::vector<F> factor(len);
        for (std::size_t k = 0; k < len; ++k) factor[k] = std::exp(logs[k] - top);
        scale += top;
        detail::multiply_truncated(poly, factor, m);
        F peak = *std::max_element(poly.begin(), poly.end());
        if (peak > 0) {
          for (auto& v : poly) v /= peak;
          scale += std::log(peak);
        }
      }
    if (poly.size() <= m || poly[m] <= 0) return -std::numeric_limits<F>::infinity();
    return scale + std::log(poly[m]);
  };
  auto partial = detail::run_tasks<std::vector<F>>(q == 1 ? 1 : n + 1, opts.threads, [&](std::size_t task) {
    std::vector<F> terms;
    std::vector<unsigned> c(q);
    auto recurse = [&](auto& self, std::size_t i, unsigned rest, F acc) -> void {
      if (i + 1 == q) {
        c[i] = rest;
        F t = log_coefficient(c);
        if (std::isinf(t)) return;
        terms.push_back(acc - lf[rest] + static_cast<F>(rest) * log_r[i] + t);
        return;
      }
      for (unsigned k = 0; k <= rest; ++k) {
        c[i] = k;
        self(self, i + 1, rest - k, acc - lf[k] + static_cast<F>(k) * log_r[i]);
      }
    };
    if (q == 1) {
      recurse(recurse, 0, n, lf[n]);
    } else {
      auto first = static_cast<unsigned>(task);
      c[0] = first;
      recurse(recurse, 1, n - first, lf[n] - lf[first] + static_cast<F>(first) * log_r[0]);
    }
    return terms;
  });
  std::vector<F> all;
  for (auto& p : partial) all.insert(all.end(), p.begin(), p.end());
  return static_cast<double>(detail::log_sum_exp(all));
}

}  // namespace inhomo
