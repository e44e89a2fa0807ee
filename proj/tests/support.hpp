#pragma once

#include "inhomo/inhomo.hpp"

#include <random>

namespace inhomo::testing {

// Symmetric irreducible model with entries drawn from {0, 1/2, 1, 2} and
// vertex weights from {1/2, 1, 2}.
inline ModelSpec random_model(std::mt19937_64& rng, std::size_t q) {
  const Rational entries[] = {Rational(0), Rational(1, 2), Rational(1), Rational(2)};
  const Rational weights[] = {Rational(1, 2), Rational(1), Rational(2)};
  std::uniform_int_distribution<int> pick_entry(0, 3), pick_weight(0, 2);
  for (;;) {
    RationalMatrix R(q, std::vector<Rational>(q));
    std::vector<Rational> r(q);
    for (std::size_t i = 0; i < q; ++i) {
      r[i] = weights[pick_weight(rng)];
      for (std::size_t j = i; j < q; ++j) R[i][j] = R[j][i] = entries[pick_entry(rng)];
    }
    try {
      return make_model(R, r);
    } catch (const ModelError&) {
      // reducible or all-zero draw; try again
    }
  }
}

inline SimplexPoint random_point(std::mt19937_64& rng, std::size_t q) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(q));
  for (auto& x : v) x = u(rng);
  return SimplexPoint::normalized(v);
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace inhomo::testing
