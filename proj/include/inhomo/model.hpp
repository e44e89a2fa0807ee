#pragma once

// Inhomogeneous (R, r) graph models: validation, decomposition of reducible
// matrices, the built-in coloring and friendship models, and spectra.

#include "inhomo/errors.hpp"
#include "inhomo/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace inhomo {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// A matrix or vector entry as read from user input: exact or real.
using RawScalar = std::variant<Rational, double>;

/// Unvalidated model data.
struct RawModel {
  std::size_t q = 0;
  std::vector<std::vector<RawScalar>> R;
  std::vector<RawScalar> r;
};

/// A validated model. `R`/`r` hold exact values when `exact` is set; the real
/// copies are always populated.
struct ModelSpec {
  std::size_t q = 0;
  bool exact = false;
  RationalMatrix R;
  std::vector<Rational> r;
  Eigen::MatrixXd R_real;
  Eigen::VectorXd r_real;
};

struct SpectralData {
  std::vector<double> eigenvalues;  // descending
  bool one_is_eigenvector = false;
  double lambda1 = 0.0;
};

namespace detail {

inline double real_of(const RawScalar& s) {
  return std::visit(
      [](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Rational>)
          return to_double(v);
        else
          return v;
      },
      s);
}

inline bool is_positive(const RawScalar& s) {
  if (auto p = std::get_if<Rational>(&s)) return *p > 0;
  return std::get<double>(s) > 0.0;
}

inline bool is_negative(const RawScalar& s) {
  if (auto p = std::get_if<Rational>(&s)) return *p < 0;
  return std::get<double>(s) < 0.0;
}

inline bool equal(const RawScalar& a, const RawScalar& b) {
  if (a.index() == 0 && b.index() == 0) return std::get<0>(a) == std::get<0>(b);
  return real_of(a) == real_of(b);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

inline void check_shape_and_signs(const RawModel& raw) {
  if (raw.q == 0) throw ModelError(ModelErrorKind::DimensionMismatch, "q must be at least 1");
  if (raw.R.size() != raw.q)
    throw ModelError(ModelErrorKind::DimensionMismatch,
                     "R has " + std::to_string(raw.R.size()) + " rows, expected " + std::to_string(raw.q));
  for (std::size_t i = 0; i < raw.q; ++i)
    if (raw.R[i].size() != raw.q)
      throw ModelError(ModelErrorKind::DimensionMismatch,
                       "row " + std::to_string(i + 1) + " of R has " + std::to_string(raw.R[i].size()) + " entries");
  if (raw.r.size() != raw.q)
    throw ModelError(ModelErrorKind::DimensionMismatch,
                     "r has " + std::to_string(raw.r.size()) + " entries, expected " + std::to_string(raw.q));
  for (std::size_t i = 0; i < raw.q; ++i)
    for (std::size_t j = 0; j < raw.q; ++j) {
      if (detail::is_negative(raw.R[i][j]))
        throw ModelError(ModelErrorKind::NegativeEntry,
                         "R[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] < 0");
      if (!detail::equal(raw.R[i][j], raw.R[j][i]))
        throw ModelError(ModelErrorKind::NotSymmetric,
                         "R[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] != R[" +
                             std::to_string(j + 1) + "][" + std::to_string(i + 1) + "]");
    }
  for (std::size_t i = 0; i < raw.q; ++i)
    if (!detail::is_positive(raw.r[i]))
      throw ModelError(ModelErrorKind::NonPositiveVertexWeight, "r[" + std::to_string(i + 1) + "] <= 0");
}

// Connected components of the support graph, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> support_components(const RawModel& raw) {
  DisjointSets sets(raw.q);
  for (std::size_t i = 0; i < raw.q; ++i)
    for (std::size_t j = i + 1; j < raw.q; ++j)
      if (detail::is_positive(raw.R[i][j])) sets.unite(i, j);
  std::vector<std::vector<std::size_t>> parts;
  std::vector<long> slot(raw.q, -1);
  for (std::size_t i = 0; i < raw.q; ++i) {
    auto root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(parts.size());
      parts.emplace_back();
    }
    parts[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return parts;
}

inline std::string describe_partition(const std::vector<std::vector<std::size_t>>& parts) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += ",";
    s += "{";
    for (std::size_t k = 0; k < p.size(); ++k) s += (k ? "," : "") + std::to_string(p[k] + 1);
    s += "}";
  }
  return s;
}

// Assumes shape, sign and symmetry have been checked.
inline ModelSpec build_spec(const RawModel& raw) {
  ModelSpec spec;
  spec.q = raw.q;
  spec.exact = true;
  for (const auto& row : raw.R)
    for (const auto& v : row) spec.exact = spec.exact && v.index() == 0;
  for (const auto& v : raw.r) spec.exact = spec.exact && v.index() == 0;
  spec.R_real.resize(static_cast<Eigen::Index>(raw.q), static_cast<Eigen::Index>(raw.q));
  spec.r_real.resize(static_cast<Eigen::Index>(raw.q));
  for (std::size_t i = 0; i < raw.q; ++i) {
    spec.r_real(static_cast<Eigen::Index>(i)) = real_of(raw.r[i]);
    for (std::size_t j = 0; j < raw.q; ++j)
      spec.R_real(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = real_of(raw.R[i][j]);
  }
  if (spec.exact) {
    spec.R.assign(raw.q, std::vector<Rational>(raw.q));
    spec.r.resize(raw.q);
    for (std::size_t i = 0; i < raw.q; ++i) {
      spec.r[i] = std::get<Rational>(raw.r[i]);
      for (std::size_t j = 0; j < raw.q; ++j) spec.R[i][j] = std::get<Rational>(raw.R[i][j]);
    }
  }
  return spec;
}

}  // namespace detail

/// Validates raw model data. Throws ModelError naming the first violated
/// invariant; a reducible R reports the support-graph partition.
inline ModelSpec validate_model(const RawModel& raw) {
  detail::check_shape_and_signs(raw);
  auto parts = detail::support_components(raw);
  if (parts.size() > 1)
    throw ModelError(ModelErrorKind::Reducible, "support graph splits into " + detail::describe_partition(parts),
                     parts);
  return detail::build_spec(raw);
}

inline RawModel to_raw(const RationalMatrix& R, const std::vector<Rational>& r) {
  RawModel raw;
  raw.q = r.size();
  raw.r.assign(r.begin(), r.end());
  for (const auto& row : R) raw.R.emplace_back(row.begin(), row.end());
  return raw;
}

inline RawModel to_raw(const Eigen::MatrixXd& R, const Eigen::VectorXd& r) {
  RawModel raw;
  raw.q = static_cast<std::size_t>(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) raw.r.emplace_back(r(i));
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    raw.R.emplace_back();
    for (Eigen::Index j = 0; j < R.cols(); ++j) raw.R.back().emplace_back(R(i, j));
  }
  return raw;
}

inline ModelSpec make_model(const RationalMatrix& R, const std::vector<Rational>& r) {
  return validate_model(to_raw(R, r));
}

/// Real-valued model, usable only by the asymptotic operations.
inline ModelSpec make_real_model(const Eigen::MatrixXd& R, const Eigen::VectorXd& r) {
  return validate_model(to_raw(R, r));
}

inline ModelSpec with_vertex_weights(const ModelSpec& spec, const std::vector<Rational>& r) {
  return make_model(spec.R, r);
}

struct ModelComponent {
  std::vector<std::size_t> types;  // zero-based indices into the original model
  ModelSpec model;
};

/// Splits a possibly reducible model into irreducible sub-models, one per
/// connected component of the support graph.
inline std::vector<ModelComponent> irreducible_components(const RawModel& raw) {
  detail::check_shape_and_signs(raw);
  std::vector<ModelComponent> out;
  for (auto& types : detail::support_components(raw)) {
    RawModel sub;
    sub.q = types.size();
    for (auto i : types) {
      sub.r.push_back(raw.r[i]);
      sub.R.emplace_back();
      for (auto j : types) sub.R.back().push_back(raw.R[i][j]);
    }
    out.push_back({std::move(types), validate_model(sub)});
  }
  return out;
}

/// Proper q-colorings: zero diagonal, ones elsewhere.
inline ModelSpec coloring_model(std::size_t q) {
  if (q < 2) throw ModelError(ModelErrorKind::InvalidArgument, "coloring model needs q >= 2");
  RationalMatrix R(q, std::vector<Rational>(q, Rational(1)));
  for (std::size_t i = 0; i < q; ++i) R[i][i] = 0;
  return make_model(R, std::vector<Rational>(q, Rational(1)));
}

namespace detail {

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t b = 1;
  for (std::uint64_t i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace detail

/// k-subsets of {0..t-1} as bitmasks in colexicographic order.
inline std::vector<std::uint64_t> colex_subsets(unsigned t, unsigned k) {
  std::vector<std::uint64_t> subsets;
  if (k == 0 || k > t || t > 63) return subsets;
  std::uint64_t s = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << t;
  while (s < limit) {
    subsets.push_back(s);
    // Gosper's hack: next larger integer with the same popcount
    std::uint64_t low = s & (~s + 1);
    std::uint64_t ripple = s + low;
    s = (((ripple ^ s) >> 2) / low) | ripple;
  }
  return subsets;
}

/// Closed-form spectrum of the "share at least one topic" matrix J - A_Kneser:
/// q - C(t-k,k) once, then (-1)^(j+1) C(t-k-j, k-j) with multiplicity
/// C(t,j) - C(t,j-1) for j = 1..k.
inline SpectralData friendship_spectrum(unsigned t, unsigned k) {
  if (k < 1 || t < 2 * k) throw ModelError(ModelErrorKind::InvalidArgument, "friendship model needs t >= 2k >= 2");
  using detail::choose;
  SpectralData sd;
  const double q = static_cast<double>(choose(t, k));
  sd.lambda1 = q - static_cast<double>(choose(t - k, k));
  sd.eigenvalues.push_back(sd.lambda1);
  for (unsigned j = 1; j <= k; ++j) {
    double value = ((j % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(choose(t - k - j, k - j));
    auto mult = choose(t, j) - choose(t, j - 1);
    sd.eigenvalues.insert(sd.eigenvalues.end(), mult, value);
  }
  std::sort(sd.eigenvalues.begin(), sd.eigenvalues.end(), std::greater<>());
  sd.one_is_eigenvector = true;
  return sd;
}

/// Unvalidated friendship matrix (k = 1 gives the identity, which is reducible).
inline RawModel friendship_raw(unsigned t, unsigned k) {
  if (k < 1 || t < 2 * k) throw ModelError(ModelErrorKind::InvalidArgument, "friendship model needs t >= 2k >= 2");
  if (t > 63) throw ModelError(ModelErrorKind::InvalidArgument, "friendship model supports t <= 63");
  auto subsets = colex_subsets(t, k);
  RationalMatrix R(subsets.size(), std::vector<Rational>(subsets.size()));
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = 0; j < subsets.size(); ++j) R[i][j] = (subsets[i] & subsets[j]) ? 1 : 0;
  return to_raw(R, std::vector<Rational>(subsets.size(), Rational(1)));
}

struct FriendshipModel {
  ModelSpec model;
  SpectralData declared;                // closed form
  std::vector<std::uint64_t> subsets;  // type i <-> subsets[i]
};

inline FriendshipModel friendship_model(unsigned t, unsigned k) {
  return {validate_model(friendship_raw(t, k)), friendship_spectrum(t, k), colex_subsets(t, k)};
}

/// Dense symmetric eigendecomposition of R.
inline SpectralData spectrum(const ModelSpec& spec) {
  SpectralData sd;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(spec.R_real, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  sd.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(sd.eigenvalues.begin(), sd.eigenvalues.end(), std::greater<>());
  sd.lambda1 = sd.eigenvalues.front();

  sd.one_is_eigenvector = true;
  if (spec.exact) {
    Rational first = 0;
    for (const auto& v : spec.R[0]) first += v;
    for (std::size_t i = 1; i < spec.q && sd.one_is_eigenvector; ++i) {
      Rational sum = 0;
      for (const auto& v : spec.R[i]) sum += v;
      sd.one_is_eigenvector = sum == first;
    }
  } else {
    Eigen::VectorXd sums = spec.R_real.rowwise().sum();
    double scale = sums.cwiseAbs().maxCoeff();
    sd.one_is_eigenvector = (sums.maxCoeff() - sums.minCoeff()) <= 1e-12 * std::max(scale, 1.0);
  }
  return sd;
}

inline bool has_unit_vertex_weights(const ModelSpec& spec) {
  if (spec.exact) return std::all_of(spec.r.begin(), spec.r.end(), [](const Rational& v) { return v == 1; });
  return (spec.r_real.array() == 1.0).all();
}

inline void require_exact(const ModelSpec& spec, const char* op) {
  if (!spec.exact) throw ModelError(ModelErrorKind::NotExact, std::string(op) + " needs a model with rational entries");
}

inline void require_nonzero(const ModelSpec& spec) {
  if (spec.R_real.isZero(0.0)) throw ModelError(ModelErrorKind::ZeroMatrix, "R is identically zero");
}

}  // namespace inhomo
