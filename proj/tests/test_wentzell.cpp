#include "bilap/wentzell.hpp"

#include <gtest/gtest.h>

using namespace bilap;

namespace {
MultiPoly bump(int n) { return MultiPoly::norm_sq(n) - MultiPoly::constant(n, 1); }
}  // namespace

TEST(WentzellEigenvalue, Examples) {
  EXPECT_EQ(wentzell_eigenvalue(2, 0, 1), 4);
  for (int n = 2; n <= 6; ++n) EXPECT_EQ(wentzell_eigenvalue(n, Rational(7, 3), 0), 0);
  EXPECT_EQ(wentzell_eigenvalue(3, 1, 2), 34);
  EXPECT_THROW(wentzell_eigenvalue(3, -1, 2), std::invalid_argument);
}

TEST(WentzellEigenfunction, Examples) {
  const auto e0 = wentzell_eigenspace(3, 1, 0);
  ASSERT_EQ(e0.eigenfunctions.size(), 1u);
  EXPECT_EQ(e0.eigenfunctions[0], MultiPoly::constant(3, -2));

  const MultiPoly x1 = MultiPoly::variable(3, 0);
  EXPECT_EQ(wentzell_eigenfunction(x1, 1), x1 * Rational(-2) + bump(3) * x1);

  const MultiPoly w = MultiPoly::variable(2, 0) * MultiPoly::variable(2, 1);
  EXPECT_EQ(wentzell_eigenfunction(w, 2), w * Rational(-2) + bump(2) * w * Rational(2));
}

TEST(Certificate, Examples) {
  for (int n = 2; n <= 4; ++n) {
    EXPECT_TRUE(certificate(MultiPoly::constant(n, 1), 0, 0).valid());
    const auto e = wentzell_eigenspace(n, 3, 1);
    for (const auto& u : e.eigenfunctions) {
      EXPECT_TRUE(certificate(u, 3, e.value).valid());
      const auto off = certificate(u, 3, e.value + 1);
      EXPECT_FALSE(off.valid());
      EXPECT_TRUE(off.pde_residual.is_zero());
      EXPECT_TRUE(off.neumann_residual.is_zero());
      // residual is linear in sigma: the extra unit contributes u on the sphere
      EXPECT_EQ(off.wentzell_residual.sum(), sphere_reduce(u).sum());
    }
  }
}

TEST(WentzellProperty, AllCertificatesExact) {
  for (int n = 2; n <= 5; ++n)
    for (int beta : {0, 1, 5})
      for (int k = 0; k <= 5; ++k) {
        const auto e = wentzell_eigenspace(n, beta, k);
        ASSERT_EQ(e.eigenfunctions.size(), mu(n, k));
        for (const auto& u : e.eigenfunctions) EXPECT_TRUE(certificate(u, beta, e.value).valid()) << n << beta << k;
      }
}

TEST(WentzellProperty, AffineInBeta) {
  for (int n = 2; n <= 6; ++n)
    for (int k = 0; k <= 6; ++k) {
      const Rational slope = wentzell_eigenvalue(n, 1, k) - wentzell_eigenvalue(n, 0, k);
      EXPECT_EQ(slope, k * (k + n - 2));
      EXPECT_EQ(wentzell_eigenvalue(n, Rational(9, 2), k), wentzell_eigenvalue(n, 0, k) + Rational(9, 2) * slope);
      EXPECT_EQ(wentzell_eigenvalue(n, 0, k), k * k * (n + 2 * k));
    }
}

TEST(WentzellProperty, FirstModeShiftsBySphereEigenvalue) {
  for (int n = 2; n <= 6; ++n) {
    EXPECT_EQ(wentzell_eigenvalue(n, 0, 1), n + 2);
    EXPECT_EQ(wentzell_eigenvalue(n, 7, 1), wentzell_eigenvalue(n, 0, 1) + 7 * (n - 1));
  }
}

TEST(SphereLaplacian, SphericalHarmonicsAreEigenfunctions) {
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= 4; ++k)
      for (const auto& w : basis(n, k).elements)
        EXPECT_EQ(sphere_reduce(sphere_laplacian_ambient(w)).sum(), sphere_reduce(w * Rational(-k * (k + n - 2))).sum());
}

TEST(Almansi, Examples) {
  const MultiPoly x1 = MultiPoly::variable(3, 0);
  const auto a = almansi(bump(3) * x1);
  EXPECT_EQ(a.g, x1 * Rational(-1));
  EXPECT_EQ(a.h, x1);

  const MultiPoly w = basis(3, 3).elements[1];
  const auto b = almansi(w);
  EXPECT_EQ(b.g, w);
  EXPECT_TRUE(b.h.is_zero());

  const MultiPoly r4 = MultiPoly::norm_sq(3) * MultiPoly::norm_sq(3);
  EXPECT_EQ(laplacian(laplacian(r4)), MultiPoly::constant(3, 8 * 3 * 5));
  EXPECT_THROW(almansi(r4), std::invalid_argument);
}

TEST(WentzellProperty, AlmansiRoundTrip) {
  for (int n = 2; n <= 4; ++n)
    for (int kg = 0; kg <= 4; ++kg)
      for (int kh = 0; kh <= 3; ++kh) {
        const MultiPoly g = basis(n, kg).elements.back() + basis(n, kg).elements.front() * Rational(2, 3);
        const MultiPoly h = basis(n, kh).elements.front() * Rational(-5);
        const auto a = almansi(g + multiply_norm_sq(h));
        EXPECT_EQ(a.g, g);
        EXPECT_EQ(a.h, h);
      }
}

TEST(CertificateJson, RecheckIndependentOfStoredFields) {
  const auto e = wentzell_eigenspace(3, Rational(1, 2), 2);
  auto j = to_json(certificate(e.eigenfunctions[0], e.beta, e.value), 2);
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_EQ(j["pde_residual"], "0");
  EXPECT_TRUE(recheck_certificate(j));
  j["sigma"] = Rational(e.value + 1).get_str();
  j["valid"] = true;  // stale flag must not be trusted
  EXPECT_FALSE(recheck_certificate(j));
}
