#include "bilap/harmonic.hpp"
#include "bilap/linalg.hpp"
#include "bilap/moments.hpp"

#include <gtest/gtest.h>

using namespace bilap;

TEST(Mu, Examples) {
  for (int n = 2; n <= 8; ++n) {
    EXPECT_EQ(mu(n, 0), 1u);
    EXPECT_EQ(mu(n, 1), static_cast<std::uint64_t>(n));
    EXPECT_EQ(mu(n, 2), static_cast<std::uint64_t>((n * n + n - 2) / 2));
  }
  for (int k = 0; k <= 12; ++k) EXPECT_EQ(mu(3, k), static_cast<std::uint64_t>(2 * k + 1));
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(mu(2, k), 2u);
}

TEST(Basis, DegreeTwoInPlane) {
  const auto b = basis(2, 2);
  ASSERT_EQ(b.elements.size(), 2u);
  // echelon form: each element has a unit coefficient on its own seed
  EXPECT_EQ(to_string(b.elements[0]), "1 * x1^1 x2^1");
  EXPECT_EQ(to_string(b.elements[1]), "-1 * x1^2 + 1 * x2^2");
}

TEST(Basis, DegreeOneIsCoordinates) {
  const auto b = basis(3, 1);
  ASSERT_EQ(b.elements.size(), 3u);
  for (int i = 0; i < 3; ++i)
    EXPECT_NE(std::find(b.elements.begin(), b.elements.end(), MultiPoly::variable(3, i)), b.elements.end());
}

TEST(Basis, PlaneDegreeFive) {
  const auto b = basis(2, 5);
  ASSERT_EQ(b.elements.size(), 2u);
  for (const auto& e : b.elements) EXPECT_TRUE(laplacian(e).is_zero());
}

TEST(Basis, Errors) {
  EXPECT_THROW(basis(1, 2), std::invalid_argument);
  EXPECT_THROW(basis(3, -1), std::invalid_argument);
  EXPECT_THROW(basis(3, kMaxDegree + 1), std::length_error);
}

TEST(HarmonicProperty, SizeMatchesMu) {
  for (int n = 2; n <= 5; ++n)
    for (int k = 0; k <= 8; ++k) EXPECT_EQ(basis(n, k).elements.size(), mu(n, k)) << n << " " << k;
}

TEST(HarmonicProperty, ElementsAreHarmonicAndHomogeneous) {
  for (int n = 2; n <= 5; ++n)
    for (int k = 0; k <= 8; ++k)
      for (const auto& e : basis(n, k).elements) {
        EXPECT_TRUE(laplacian(e).is_zero());
        EXPECT_EQ(euler(e), e * Rational(k));
      }
}

// Independent oracle: the kernel of the Laplacian as a linear map from
// degree-k to degree-(k-2) coefficients, computed by generic elimination.
TEST(HarmonicProperty, MatchesGenericKernel) {
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= 6; ++k) {
      const auto cols = monomials_of_degree(n, k);  // descending graded-lex
      const auto rows = k >= 2 ? monomials_of_degree(n, k - 2) : std::vector<MultiIndex>{};
      ExactMatrix lap(rows.size(), cols.size());
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const MultiPoly img = laplacian(MultiPoly::monomial(cols[j]));
        for (std::size_t i = 0; i < rows.size(); ++i) lap(i, j) = img.coeff(rows[i]);
      }
      const ExactMatrix ker = rows.empty() ? ExactMatrix::identity(cols.size()) : null_space(lap);
      const auto b = basis(n, k);
      ASSERT_EQ(ker.cols, b.elements.size());
      // same span with the same free-variable normalization
      for (std::size_t f = 0; f < ker.cols; ++f) {
        MultiPoly v(n);
        for (std::size_t j = 0; j < cols.size(); ++j) v.add_term(cols[j], ker(j, f));
        EXPECT_NE(std::find(b.elements.begin(), b.elements.end(), v), b.elements.end()) << to_string(v);
      }
    }
}

TEST(HarmonicProperty, SphereGramIsNonsingular) {
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k <= 6; ++k) {
      const auto b = basis(n, k);
      const ExactForm g = assemble({FormTag::BdryMass, 1}, b.elements);
      ExactMatrix m(g.size, g.size);
      for (std::size_t i = 0; i < g.size; ++i)
        for (std::size_t j = 0; j < g.size; ++j) m(i, j) = g(i, j);
      EXPECT_NO_THROW(ldlt(m));
      EXPECT_EQ(null_space(m).cols, 0u);
    }
}
