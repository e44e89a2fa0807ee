#pragma once

// Brute-force enumeration straight from the definitions: vertex sequences,
// compensation factors and per-graph weights. Exponential cost; used to check
// the closed-form sums at small sizes.

#include "inhomo/errors.hpp"
#include "inhomo/exact.hpp"
#include "inhomo/model.hpp"
#include "inhomo/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace inhomo {

using Edge = std::pair<unsigned, unsigned>;  // normalized: first <= second

/// A vertex-labelled multigraph on {0..n-1}; loops and repeated edges allowed.
struct LabeledMultigraph {
  unsigned n = 0;
  std::vector<Edge> edges;     // sorted multiset
  std::vector<unsigned> types;  // optional, zero-based; empty when untyped

  static LabeledMultigraph from_edges(unsigned n, std::vector<Edge> edges) {
    for (auto& e : edges) {
      if (e.first > e.second) std::swap(e.first, e.second);
      if (e.second >= n) throw ModelError(ModelErrorKind::InvalidArgument, "edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    return {n, std::move(edges), {}};
  }

  bool is_simple() const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].first == edges[i].second) return false;
      if (i > 0 && edges[i] == edges[i - 1]) return false;
    }
    return true;
  }
};

/// kappa(G) = 1 / prod_e mult(e)! * 2^{-#loops}: the fraction of the 2^m m!
/// ordered vertex sequences that produce G.
inline Rational compensation_factor(const LabeledMultigraph& g) {
  BigInt den = 1;
  std::size_t i = 0;
  while (i < g.edges.size()) {
    std::size_t j = i;
    while (j < g.edges.size() && g.edges[j] == g.edges[i]) ++j;
    den *= factorial(static_cast<unsigned>(j - i));
    if (g.edges[i].first == g.edges[i].second) den *= ipow(BigInt(2), j - i);
    i = j;
  }
  return Rational(BigInt(1), den);
}

/// Number of sequences v1 w1 ... vm wm in {0..n-1}^{2m} whose edge multiset is g's.
inline std::uint64_t count_vertex_sequences(const LabeledMultigraph& g) {
  const unsigned m = static_cast<unsigned>(g.edges.size());
  std::uint64_t total = 1;
  for (unsigned k = 0; k < 2 * m; ++k) total *= g.n;
  std::uint64_t hits = 0;
  std::vector<unsigned> digits(2 * m);
  std::vector<Edge> seq(m);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t x = code;
    for (auto& d : digits) {
      d = static_cast<unsigned>(x % g.n);
      x /= g.n;
    }
    for (unsigned e = 0; e < m; ++e) seq[e] = std::minmax(digits[2 * e], digits[2 * e + 1]);
    std::sort(seq.begin(), seq.end());
    if (seq == g.edges) ++hits;
  }
  return hits;
}

/// True when every connected component has at most as many edges as vertices
/// (trees and unicycles only).
inline bool components_at_most_unicyclic(unsigned n, const std::vector<Edge>& edges) {
  detail::DisjointSets sets(n);
  for (const auto& e : edges) sets.unite(e.first, e.second);
  std::vector<long> balance(n, 0);  // edges - vertices per root
  for (unsigned v = 0; v < n; ++v) --balance[sets.find(v)];
  for (const auto& e : edges) ++balance[sets.find(e.first)];
  return std::all_of(balance.begin(), balance.end(), [](long b) { return b <= 0; });
}

using GraphFilter = std::function<bool(unsigned n, const std::vector<Edge>&)>;

namespace detail {

inline void guard_size(const ModelSpec& spec, unsigned n, unsigned m, bool check_m) {
  if (n > 6 || spec.q > 4 || (check_m && m > 4))
    throw ModelError(ModelErrorKind::InvalidArgument, "oracle limited to n <= 6, m <= 4, q <= 4");
}

// sum over type assignments t of  prod_v r_{t(v)} prod_e R_{t(u)t(w)}, in the
// integer-scaled weights.
inline BigInt typed_weight_sum(const IntegerWeights& w, std::size_t q, unsigned n, const std::vector<Edge>& edges) {
  std::vector<unsigned> types(n, 0);
  BigInt sum = 0;
  std::uint64_t assignments = 1;
  for (unsigned k = 0; k < n; ++k) assignments *= q;
  for (std::uint64_t code = 0; code < assignments; ++code) {
    std::uint64_t x = code;
    for (auto& t : types) {
      t = static_cast<unsigned>(x % q);
      x /= q;
    }
    BigInt term = 1;
    for (const auto& e : edges) {
      const auto& weight = w.R[types[e.first]][types[e.second]];
      if (weight == 0) {
        term = 0;
        break;
      }
      term *= weight;
    }
    if (term == 0) continue;
    for (auto t : types) term *= w.r[t];
    sum += term;
  }
  return sum;
}

}  // namespace detail

/// Enumerates all q^n type assignments and all n^{2m} vertex sequences and
/// sums the weights of the resulting multigraphs. `keep`, when set, restricts
/// the sum to graphs it accepts.
inline Rational oracle_count_multigraphs(const ModelSpec& spec, unsigned n, unsigned m, const GraphFilter& keep = {}) {
  require_exact(spec, "oracle_count_multigraphs");
  detail::guard_size(spec, n, m, true);
  const auto w = detail::integer_weights(spec);

  // group sequences by the multigraph they produce: seqv(G)
  std::map<std::vector<Edge>, std::uint64_t> seqv;
  std::uint64_t total = 1;
  for (unsigned k = 0; k < 2 * m; ++k) total *= n;
  std::vector<unsigned> digits(2 * m);
  std::vector<Edge> seq(m);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t x = code;
    for (auto& d : digits) {
      d = static_cast<unsigned>(x % n);
      x /= n;
    }
    for (unsigned e = 0; e < m; ++e) seq[e] = std::minmax(digits[2 * e], digits[2 * e + 1]);
    std::sort(seq.begin(), seq.end());
    ++seqv[seq];
  }

  BigInt sum = 0;
  for (const auto& [edges, sequences] : seqv) {
    if (keep && !keep(n, edges)) continue;
    sum += detail::typed_weight_sum(w, spec.q, n, edges) * sequences;
  }
  BigInt den = ipow(BigInt(2), m) * factorial(m) * ipow(w.r_den, n) * ipow(w.R_den, m);
  return Rational(sum, den);
}

/// Enumerates all loop-free m-edge sets on n labelled vertices and all type
/// assignments.
inline Rational oracle_count_simple(const ModelSpec& spec, unsigned n, unsigned m, const GraphFilter& keep = {}) {
  require_exact(spec, "oracle_count_simple");
  detail::guard_size(spec, n, m, false);
  const auto w = detail::integer_weights(spec);
  std::vector<Edge> pairs;
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  if (m > pairs.size()) return Rational(0);

  BigInt sum = 0;
  std::vector<bool> chosen(pairs.size(), false);
  std::fill(chosen.begin(), chosen.begin() + m, true);
  std::vector<Edge> edges;
  do {
    edges.clear();
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (chosen[k]) edges.push_back(pairs[k]);
    if (keep && !keep(n, edges)) continue;
    sum += detail::typed_weight_sum(w, spec.q, n, edges);
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return Rational(sum, ipow(w.r_den, n) * ipow(w.R_den, m));
}

}  // namespace inhomo
