#pragma once

// Truncated formal power series over any field-like scalar (exact rationals
// or floating point). All products are truncated at the series order.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace inhomo {

template <class T>
class Series {
 public:
  Series() : coef_(1, T(0)) {}
  explicit Series(std::size_t order) : coef_(order + 1, T(0)) {}

  static Series constant(std::size_t order, const T& value) {
    Series s(order);
    s.coef_[0] = value;
    return s;
  }

  std::size_t order() const noexcept { return coef_.size() - 1; }
  T& operator[](std::size_t k) { return coef_[k]; }
  const T& operator[](std::size_t k) const { return coef_[k]; }
  const std::vector<T>& coefficients() const noexcept { return coef_; }

  Series& operator+=(const Series& o) {
    check(o);
    for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] += o.coef_[k];
    return *this;
  }
  Series& operator-=(const Series& o) {
    check(o);
    for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] -= o.coef_[k];
    return *this;
  }
  Series& operator*=(const T& s) {
    for (auto& v : coef_) v *= s;
    return *this;
  }
  Series& operator*=(const Series& o) { return *this = *this * o; }

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, const T& s) { return a *= s; }
  friend Series operator*(const T& s, Series a) { return a *= s; }

  friend Series operator*(const Series& a, const Series& b) {
    a.check(b);
    Series out(a.order());
    const std::size_t N = a.order();
    for (std::size_t i = 0; i <= N; ++i) {
      if (a.coef_[i] == T(0)) continue;
      for (std::size_t j = 0; i + j <= N; ++j) out.coef_[i + j] += a.coef_[i] * b.coef_[j];
    }
    return out;
  }

  /// exp(f) for f with zero constant term, via k e_k = sum_{j=1}^k j f_j e_{k-j}.
  Series exp() const {
    if (coef_[0] != T(0)) throw std::domain_error("Series::exp needs a zero constant term");
    Series e(order());
    e.coef_[0] = T(1);
    for (std::size_t k = 1; k <= order(); ++k) {
      T acc(0);
      for (std::size_t j = 1; j <= k; ++j) acc += T(j) * coef_[j] * e.coef_[k - j];
      e.coef_[k] = acc / T(k);
    }
    return e;
  }

  Series pow(unsigned long long e) const {
    Series result = constant(order(), T(1));
    Series base = *this;
    while (e != 0) {
      if (e & 1u) result *= base;
      e >>= 1u;
      if (e != 0) base *= base;
    }
    return result;
  }

 private:
  void check(const Series& o) const {
    if (o.coef_.size() != coef_.size()) throw std::invalid_argument("series orders differ");
  }

  std::vector<T> coef_;
};

/// One series per vertex type.
template <class T>
using SeriesVector = std::vector<Series<T>>;

}  // namespace inhomo
