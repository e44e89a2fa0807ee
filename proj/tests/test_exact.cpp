#include "inhomo/exact.hpp"
#include "inhomo/oracle.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace inhomo;

namespace {

ModelSpec unit_model() { return make_model({{Rational(1)}}, {Rational(1)}); }

// every edge multiset of size m on n vertices
void for_each_multigraph(unsigned n, unsigned m, const std::function<void(const std::vector<Edge>&)>& visit) {
  std::vector<Edge> pairs;
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = a; b < n; ++b) pairs.emplace_back(a, b);
  std::vector<Edge> current;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (current.size() == m) {
      visit(current);
      return;
    }
    for (std::size_t i = from; i < pairs.size(); ++i) {
      current.push_back(pairs[i]);
      rec(i);
      current.pop_back();
    }
  };
  rec(0);
}

}  // namespace

TEST(Compensation, ClosedFormMatchesSequenceEnumeration) {
  for (unsigned n = 1; n <= 3; ++n)
    for (unsigned m = 0; m <= 3; ++m)
      for_each_multigraph(n, m, [&](const std::vector<Edge>& edges) {
        auto g = LabeledMultigraph::from_edges(n, edges);
        Rational expected(count_vertex_sequences(g), ipow(BigInt(2), m) * factorial(m));
        EXPECT_EQ(compensation_factor(g), expected);
      });
}

TEST(Compensation, ExamplesByHand) {
  EXPECT_EQ(compensation_factor(LabeledMultigraph::from_edges(2, {{0, 1}, {1, 0}})), Rational(1, 2));
  EXPECT_EQ(compensation_factor(LabeledMultigraph::from_edges(1, {{0, 0}})), Rational(1, 2));
  EXPECT_EQ(compensation_factor(LabeledMultigraph::from_edges(1, {{0, 0}, {0, 0}})), Rational(1, 8));
  EXPECT_TRUE(LabeledMultigraph::from_edges(3, {{0, 1}, {1, 2}}).is_simple());
  EXPECT_FALSE(LabeledMultigraph::from_edges(3, {{0, 1}, {1, 0}}).is_simple());
}

TEST(ExactCount, TwoColoringOneEdge) {
  EXPECT_EQ(count_multigraphs(coloring_model(2), 2, 1), Rational(2));
  EXPECT_EQ(oracle_count_multigraphs(coloring_model(2), 2, 1), Rational(2));
}

TEST(ExactCount, UnitModelIsUniform) {
  auto spec = unit_model();
  for (unsigned n = 1; n <= 7; ++n)
    for (unsigned m = 0; m <= 6; ++m) {
      Rational multigraphs(ipow(BigInt(n), 2 * m), ipow(BigInt(2), m) * factorial(m));
      EXPECT_EQ(count_multigraphs(spec, n, m), multigraphs) << n << " " << m;
      EXPECT_EQ(count_simple(spec, n, m), Rational(binomial(n * (n - 1) / 2, m))) << n << " " << m;
    }
}

TEST(ExactCount, MatchesOracleOnRandomModels) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    auto spec = inhomo::testing::random_model(rng, 1 + trial % 3);
    for (unsigned n = 1; n <= 4; ++n)
      for (unsigned m = 0; m <= 3; ++m) {
        EXPECT_EQ(count_multigraphs(spec, n, m), oracle_count_multigraphs(spec, n, m));
        EXPECT_EQ(count_simple(spec, n, m), oracle_count_simple(spec, n, m));
      }
  }
}

TEST(ExactCount, SimpleGraphWithTooManyEdgesIsZero) {
  EXPECT_EQ(count_simple(coloring_model(3), 3, 4), Rational(0));
  EXPECT_TRUE(std::isinf(log_count_simple(coloring_model(3), 3, 4)));
}

TEST(ExactCount, ThreadCountDoesNotChangeResult) {
  auto spec = friendship_model(4, 2).model;
  ExactOptions one{1}, three{3};
  EXPECT_EQ(count_multigraphs(spec, 7, 5, one), count_multigraphs(spec, 7, 5, three));
  EXPECT_EQ(count_simple(spec, 7, 5, one), count_simple(spec, 7, 5, three));
  EXPECT_EQ(log_count_multigraphs(spec, 30, 12, one), log_count_multigraphs(spec, 30, 12, three));
}

TEST(ExactCount, OracleRejectsLargeSizes) { EXPECT_THROW(oracle_count_multigraphs(unit_model(), 7, 1), ModelError); }

TEST(ExactCount, RealModelsNeedTheFloatPath) {
  Eigen::MatrixXd R(2, 2);
  R << 0.3, 1.0, 1.0, 0.7;
  auto spec = make_real_model(R, Eigen::VectorXd::Ones(2));
  EXPECT_THROW(count_multigraphs(spec, 3, 2), ModelError);
  EXPECT_TRUE(std::isfinite(log_count_multigraphs(spec, 3, 2)));
}

TEST(LogCount, AgreesWithExactRationals) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    auto spec = inhomo::testing::random_model(rng, 2 + trial % 2);
    for (auto [n, m] : std::vector<std::pair<unsigned, unsigned>>{{6, 4}, {12, 9}, {16, 20}}) {
      EXPECT_NEAR(log_count_multigraphs(spec, n, m), log_of(count_multigraphs(spec, n, m)), 1e-11);
      auto simple = count_simple(spec, n, m);
      if (simple > 0) EXPECT_NEAR(log_count_simple(spec, n, m), log_of(simple), 1e-11);
    }
  }
}

TEST(ExactCount, SmallExamples) {
  auto unit = unit_model();
  EXPECT_EQ(count_multigraphs(unit, 2, 1), Rational(2));
  EXPECT_EQ(count_multigraphs(unit, 2, 2), Rational(2));
  EXPECT_EQ(count_multigraphs(unit, 0, 0), Rational(1));
  EXPECT_EQ(count_simple(unit, 3, 2), Rational(3));
  EXPECT_EQ(count_simple(unit, 4, 2), Rational(15));
  EXPECT_EQ(count_multigraphs(coloring_model(2), 3, 0), Rational(8));
  EXPECT_EQ(count_simple(coloring_model(2), 3, 2), Rational(6));
  EXPECT_EQ(count_simple(coloring_model(3), 3, 3), Rational(6));
  EXPECT_EQ(count_simple(coloring_model(2), 2, 2), Rational(0));
}
