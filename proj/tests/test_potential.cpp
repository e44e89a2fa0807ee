#include "inhomo/forest.hpp"
#include "inhomo/potential.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace inhomo;
using inhomo::testing::random_point;
using inhomo::testing::relative_error;

namespace {

ModelSpec two_type() { return make_model({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}}, {Rational(1), Rational(1)}); }

// phi as a function of the q-1 free coordinates through the reduction matrix
double phi_along(const ModelSpec& spec, double c, const SimplexPoint& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd v = x.vec() + reduction_matrix(spec.q) * y;
  return phi_closed(spec, c, v);
}

}  // namespace

TEST(SimplexPoint, RejectsBoundaryAndBadSums) {
  EXPECT_THROW(SimplexPoint(Eigen::Vector2d(0.0, 1.0)), ModelError);
  EXPECT_THROW(SimplexPoint(Eigen::Vector2d(0.3, 0.3)), ModelError);
  EXPECT_NO_THROW(SimplexPoint(Eigen::Vector2d(0.3, 0.7)));
  EXPECT_NEAR(SimplexPoint::normalized(Eigen::Vector3d(1, 1, 2))[2], 0.5, 1e-15);
}

TEST(Potential, ClosedFormAtUniformPointOfColoring) {
  auto spec = coloring_model(3);
  const double c = 0.5;
  auto x = SimplexPoint::uniform(3);
  const double s = 2.0 / 3.0;
  const double expected = std::log(1.0 / 3) - c * std::log(s);
  EXPECT_NEAR(phi(spec, c, x), expected, 1e-13);
}

TEST(Potential, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (const auto& spec : {coloring_model(3), two_type(), friendship_model(4, 2).model}) {
    for (int k = 0; k < 10; ++k) {
      auto x = random_point(rng, spec.q);
      const double c = 0.1 + 0.2 * k;
      auto g = phi_gradient(spec, c, x);
      auto H = phi_hessian(spec, c, x);
      const auto d = static_cast<Eigen::Index>(spec.q - 1);
      const double h = 1e-5;
      for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i) * h;
        double fd = (phi_along(spec, c, x, e) - phi_along(spec, c, x, -e)) / (2 * h);
        EXPECT_NEAR(g(i), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
      const double h2 = 1e-4;
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i) * h2, ej = Eigen::VectorXd::Unit(d, j) * h2;
          double fd = (phi_along(spec, c, x, ei + ej) - phi_along(spec, c, x, ei - ej) -
                       phi_along(spec, c, x, -ei + ej) + phi_along(spec, c, x, -ei - ej)) /
                      (4 * h2 * h2);
          EXPECT_NEAR(H(i, j), fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
  }
}

TEST(Potential, HessianDeterminantIdentity) {
  std::mt19937_64 rng(5);
  for (const auto& spec : {coloring_model(2), coloring_model(4), two_type()}) {
    for (int k = 0; k < 20; ++k) {
      auto x = random_point(rng, spec.q);
      const double c = std::uniform_real_distribution<double>(0.05, 0.45)(rng);
      double lhs = c_factor(spec, c, x);
      double rhs = determinant(phi_hessian(spec, c, x)) * x.vec().prod();
      EXPECT_LT(relative_error(lhs, rhs), 1e-9) << lhs << " vs " << rhs;
    }
  }
}

TEST(Minima, UniformPointForColoring) {
  auto found = find_local_minima(coloring_model(3), 0.5, 12);
  ASSERT_EQ(found.minima.size(), 1u);
  EXPECT_NEAR(found.minima[0].x[0], 1.0 / 3, 1e-10);
  EXPECT_TRUE(found.minima[0].is_minimum);
  EXPECT_LT(found.minima[0].gradient_norm, 1e-10);
}

TEST(Minima, TwoTypeModelSplitsAboveThreeHalves) {
  auto spec = two_type();
  EXPECT_EQ(find_local_minima(spec, 1.2, 12).minima.size(), 1u);
  auto above = find_local_minima(spec, 2.0, 12);
  ASSERT_EQ(above.minima.size(), 2u);
  EXPECT_NEAR(above.minima[0].x[0], above.minima[1].x[1], 1e-8);
  // det H at the symmetric point is 4(1 - 2c/3)
  auto p = describe_point(spec, 0.75, SimplexPoint::uniform(2));
  EXPECT_NEAR(p.hessian_det, 2.0, 1e-12);
}

TEST(Potential, SmallExamples) {
  EXPECT_NEAR(phi(coloring_model(2), 1.0, SimplexPoint::uniform(2)), 0.0, 1e-15);
  auto one = make_model({{Rational(3)}}, {Rational(1)});
  EXPECT_NEAR(phi(one, 0.4, SimplexPoint::uniform(1)), -0.4 * std::log(3.0), 1e-15);
  EXPECT_EQ(phi_gradient(one, 0.4, SimplexPoint::uniform(1)).size(), 0);
  EXPECT_NEAR(phi_gradient(coloring_model(3), 0.7, SimplexPoint::uniform(3)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(determinant(phi_hessian(coloring_model(2), 0.5, SimplexPoint::uniform(2))), 8.0, 1e-12);
}

TEST(Minima, TwoColoringAlwaysHasOneMinimum) {
  for (double c : {0.1, 1.0, 5.0}) {
    auto found = find_local_minima(coloring_model(2), c, 12);
    ASSERT_EQ(found.minima.size(), 1u) << c;
    EXPECT_NEAR(found.minima[0].x[0], 0.5, 1e-10);
  }
}

TEST(Minima, RejectsBadArguments) {
  EXPECT_THROW(find_local_minima(coloring_model(2), -1.0, 12), ModelError);
  EXPECT_THROW(find_local_minima(coloring_model(2), 0.5, 2), ModelError);
  EXPECT_THROW(find_local_minima(make_model({{Rational(0)}}, {Rational(1)}), 0.5, 8), ModelError);
}

TEST(Beta, ColoringStaysConvexFriendshipDoesNot) {
  auto col = estimate_beta(coloring_model(3), 5.0, 12);
  EXPECT_TRUE(col.capped);
  auto fr = estimate_beta(friendship_model(4, 2).model, 5.0, 12);
  EXPECT_FALSE(fr.capped);
  // on the face of two disjoint topic sets R is the identity and the
  // curvature there is 4 - 8c
  EXPECT_NEAR(fr.beta, 0.5, 1e-5);
  EXPECT_NEAR(estimate_beta(two_type(), 5.0, 12).beta, 1.5, 1e-5);
}

TEST(Census, TransitionAtThreeHalves) {
  std::vector<double> cs;
  for (int i = 0; i < 20; ++i) cs.push_back(0.1 * (i + 1));
  auto census = minima_census(two_type(), cs, 12);
  ASSERT_TRUE(census.branch_degeneracy.has_value());
  EXPECT_NEAR(*census.branch_degeneracy, 1.5, 1e-4);
  ASSERT_TRUE(census.count_transition.has_value());
  EXPECT_NEAR(*census.count_transition, 1.5, 1e-3);
}
