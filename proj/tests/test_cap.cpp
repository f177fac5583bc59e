#include "bilap/bessel.hpp"
#include "bilap/cap.hpp"

#include <gtest/gtest.h>

using namespace bilap::cap;

namespace {

const double pi = std::numbers::pi;

CapSpec make(int n, int curvature, double theta, int ell = 0, int nodes = 64) {
  return CapSpec{n, curvature, theta, ell, nodes};
}

// max |L T - expected| over interior nodes (the pole row is a placeholder)
template <class F, class G>
double apply_error(const CapSpec& s, F t, G expected) {
  const Grid g = make_grid(s.theta, s.nodes);
  const Matrix l = radial_operator(s, g);
  Vector v(g.r.size()), want(g.r.size());
  for (Eigen::Index i = 0; i < g.r.size(); ++i) {
    v(i) = t(g.r(i));
    want(i) = expected(g.r(i));
  }
  const Vector lv = l * v;
  double err = 0;
  for (Eigen::Index i = 1; i < g.r.size(); ++i) err = std::max(err, static_cast<double>(std::fabs(lv(i) - want(i))));
  return err;
}

}  // namespace

TEST(RadialOperator, CosineOnSphere) {
  const auto s = make(2, 1, pi / 2);
  EXPECT_LT(apply_error(s, [](Scalar r) { return std::cos(r); }, [](Scalar r) { return -2 * std::cos(r); }), 1e-9);
}

TEST(RadialOperator, SincOnEuclideanBall) {
  const auto s = make(3, 0, 1.0);
  const Scalar p = std::numbers::pi_v<Scalar>;
  auto t = [p](Scalar r) { return std::sin(p * r) / r; };
  EXPECT_LT(apply_error(s, t, [&](Scalar r) { return -p * p * t(r); }), 1e-8);
}

TEST(RadialOperator, SineModeOneOnSphere) {
  // T = sin r, l = 1: T'' + (n-1) cot T' - (n-1)/sin^2 T = -n sin r
  for (int n : {2, 3, 4}) {
    const auto s = make(n, 1, 0.4 * pi, 1);
    EXPECT_LT(apply_error(s, [](Scalar r) { return std::sin(r); }, [n](Scalar r) { return -n * std::sin(r); }), 1e-9);
  }
}

TEST(CapSpec, Validation) {
  EXPECT_THROW(dirichlet_mode(make(1, 1, 1)), std::invalid_argument);
  EXPECT_THROW(dirichlet_mode(make(2, 1, pi)), std::invalid_argument);
  EXPECT_THROW(dirichlet_mode(make(2, 0, -1)), std::invalid_argument);
  EXPECT_THROW(dirichlet_mode(make(2, 1, 1, 0, 8)), std::invalid_argument);
  EXPECT_THROW(dirichlet_mode(make(2, 2, 1)), std::invalid_argument);
}

TEST(Lambda1, Examples) {
  EXPECT_NEAR(solve_cap(make(2, 1, pi / 2)).lambda1, 2.0, 1e-8);
  EXPECT_NEAR(solve_cap(make(3, 1, pi / 2)).lambda1, 3.0, 1e-8);
  EXPECT_NEAR(solve_cap(make(2, 0, 1.0)).lambda1, bilap::bessel::dirichlet_eigenvalue(2), 1e-8);
}

TEST(HemisphereEquality, GammaAndLambda) {
  for (int n : {2, 3, 4}) {
    const auto r = solve_cap(make(n, 1, pi / 2));
    EXPECT_NEAR(r.lambda1, n, 1e-8);
    EXPECT_NEAR(r.gamma1, n * n, 1e-6);
    EXPECT_NEAR(r.lambda_big1, n, 1e-6);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.refinement_change, 1e-8);
  }
}

TEST(CapStrictness, BothInequalities) {
  for (double frac : {0.3, 0.4})
    for (int n : {2, 3}) {
      const auto r = solve_cap(make(n, 1, frac * pi));
      EXPECT_TRUE(r.converged);
      EXPECT_GT(r.gamma1 - r.lambda1 * (r.lambda1 / n + (n - 1)), 1e-3);
      EXPECT_GT(r.lambda_big1 - (r.lambda1 / n + (n - 1)), 1e-3);
    }
}

TEST(CapScaling, EuclideanRadius) {
  const auto a = solve_cap(make(3, 0, 1.0)), b = solve_cap(make(3, 0, 2.0));
  EXPECT_NEAR(b.lambda1 * 4, a.lambda1, 1e-8 * a.lambda1);
  EXPECT_NEAR(b.gamma1 * 16, a.gamma1, 1e-8 * a.gamma1);
  EXPECT_NEAR(b.lambda_big1 * 4, a.lambda_big1, 1e-8 * a.lambda_big1);
}

TEST(CapModes, FirstModesAreRadial) {
  for (int n : {2, 3}) {
    const auto r = solve_cap(make(n, 1, 0.3 * pi));
    EXPECT_EQ(r.lambda1_ell, 0);
    EXPECT_EQ(r.gamma1_ell, 0);
    EXPECT_EQ(r.lambda_big1_ell, 0);
    ASSERT_EQ(r.per_ell.size(), 4u);
    // higher modes sit above the radial one for each quantity
    for (const auto& t : r.per_ell) EXPECT_GE(t.lambda.front(), r.lambda1 - 1e-12);
  }
}

TEST(CapModes, HigherDirichletModesOnHemisphere) {
  // on the hemisphere the mode l has first Dirichlet eigenvalue (l+1)(l+n)
  for (int ell = 1; ell <= 3; ++ell) {
    const auto m = dirichlet_mode(make(3, 1, pi / 2, ell));
    EXPECT_NEAR(m.eigenvalues.front(), (ell + 1) * (ell + 3), 1e-8);
  }
}

TEST(CapResultJson, Fields) {
  const auto j = to_json(solve_cap(make(2, 1, pi / 2)));
  for (const char* key : {"spec", "per_ell", "lambda1", "gamma1", "lambda_big1", "spurious_filtered", "converged"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(Hyperbolic, Accepted) {
  // nonpositive curvature raises lambda_1 above the Euclidean ball of the same radius
  const auto h = solve_cap(make(2, -1, 1.0));
  const auto e = solve_cap(make(2, 0, 1.0));
  EXPECT_GT(h.lambda1, e.lambda1);
  EXPECT_TRUE(std::isfinite(h.gamma1));
}

TEST(Hyperbolic, ThreeBallClosedForm) {
  // in H^3, u = sin(pi r / R) / sinh r gives lambda_1 = 1 + pi^2 / R^2
  for (double radius : {0.5, 1.0, 2.0})
    EXPECT_NEAR(solve_cap(make(3, -1, radius)).lambda1, 1 + pi * pi / (radius * radius), 1e-7) << radius;
}
