#include <map>
#include <set>

#include <gtest/gtest.h>

#include "qmpc/errors.hpp"
#include "qmpc/gf2.hpp"

using namespace qmpc;

namespace {

// All 2x2 matrices over GF(2) with nonzero determinant, by brute force.
std::set<std::string> enumerate_gl2() {
  std::set<std::string> out;
  for (int bits = 0; bits < 16; ++bits) {
    int a = bits & 1, b = (bits >> 1) & 1, c = (bits >> 2) & 1, d = (bits >> 3) & 1;
    if (((a * d) ^ (b * c)) == 1) {
      out.insert(std::string{char('0' + a), char('0' + b), '\n', char('0' + c), char('0' + d)});
    }
  }
  return out;
}

double chi_square(const std::map<std::string, int>& counts, size_t classes, double total) {
  double expect = total / classes, chi = 0;
  for (auto& [k, c] : counts) chi += (c - expect) * (c - expect) / expect;
  chi += (classes - counts.size()) * expect;
  return chi;
}

}  // namespace

TEST(BitVec, xor_and_dot) {
  BitVec a = BitVec::from_string("0110");
  BitVec b = BitVec::from_string("0011");
  EXPECT_EQ((a ^ b).to_string(), "0101");
  EXPECT_TRUE(a.dot(b));
  EXPECT_EQ(a.popcount(), 2u);
  EXPECT_THROW(a ^= BitVec(5), InvalidDimension);
}

TEST(BitVec, erase_across_word_boundary) {
  Rng rng(3);
  BitVec v = BitVec::random(130, rng);
  std::string s = v.to_string();
  v.erase(63);
  s.erase(63, 1);
  EXPECT_EQ(v.to_string(), s);
  v.erase(0);
  s.erase(0, 1);
  EXPECT_EQ(v.to_string(), s);
}

TEST(BitVec, slice_and_concat_round_trip) {
  Rng rng(4);
  BitVec v = BitVec::random(100, rng);
  EXPECT_EQ(BitVec::concat(v.slice(0, 37), v.slice(37, 63)), v);
}

TEST(RandomInvertible, gl1_is_the_single_unit_matrix) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(random_invertible(1, rng).matrix().is_identity());
}

TEST(RandomInvertible, rejects_zero_dimension) {
  Rng rng(1);
  EXPECT_THROW(random_invertible(0, rng), InvalidDimension);
}

TEST(RandomInvertible, gl2_support_has_six_elements) {
  auto oracle = enumerate_gl2();
  ASSERT_EQ(oracle.size(), 6u);
  Rng rng(7);
  std::set<std::string> seen;
  for (int i = 0; i < 2000; ++i) seen.insert(random_invertible(2, rng).matrix().to_string());
  EXPECT_EQ(seen, oracle);
}

TEST(RandomInvertible, gl2_draws_are_uniform) {
  Rng rng(11);
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) counts[random_invertible(2, rng).matrix().to_string()]++;
  ASSERT_EQ(counts.size(), 6u);
  double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
  for (auto& [k, c] : counts) EXPECT_NEAR(c, draws / 6.0, 3 * sigma) << k;
  // 5 degrees of freedom, 0.999 quantile
  EXPECT_LT(chi_square(counts, 6, draws), 20.52);
}

TEST(RandomInvertible, inverse_is_cached_correctly) {
  Rng rng(5);
  for (size_t m : {1, 2, 5, 17, 70}) {
    GLElement g = random_invertible(m, rng);
    EXPECT_TRUE((g.matrix() * g.inverse()).is_identity());
    EXPECT_EQ(rank(g.matrix()), m);
  }
}

TEST(RandomInvertible, image_of_fixed_nonzero_vector_is_uniform) {
  Rng rng(19);
  for (size_t m : {2, 3, 4}) {
    BitVec x = BitVec::unit(m, 0);
    x.set(m - 1, true);
    std::map<std::string, int> counts;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
      BitVec y = apply_to_basis(random_invertible(m, rng), x);
      ASSERT_TRUE(y.any());
      counts[y.to_string()]++;
    }
    size_t classes = (size_t{1} << m) - 1;
    EXPECT_EQ(counts.size(), classes);
    // 0.999 quantiles for 2, 6 and 14 degrees of freedom
    double crit = m == 2 ? 13.82 : m == 3 ? 22.46 : 36.12;
    EXPECT_LT(chi_square(counts, classes, draws), crit) << "m=" << m;
  }
}

TEST(ApplyToBasis, identity_and_zero) {
  Rng rng(2);
  BitVec x = BitVec::from_string("1011");
  EXPECT_EQ(apply_to_basis(GLElement::identity(4), x), x);
  GLElement g = random_invertible(4, rng);
  EXPECT_EQ(apply_to_basis(g, BitVec(4)), BitVec(4));
}

TEST(ApplyToBasis, hand_computed_product) {
  GLElement g(BitMatrix::from_rows({"11", "01"}));
  EXPECT_EQ(apply_to_basis(g, BitVec::from_string("01")).to_string(), "11");
  EXPECT_THROW(apply_to_basis(g, BitVec(3)), InvalidArgument);
}

TEST(Invert, identity_singular_and_involution) {
  EXPECT_TRUE(invert(BitMatrix::identity(5)).is_identity());
  EXPECT_THROW(invert(BitMatrix(2, 2)), SingularMatrix);
  EXPECT_THROW(invert(BitMatrix(2, 3)), InvalidDimension);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    BitMatrix a = random_invertible(9, rng).matrix();
    EXPECT_EQ(invert(invert(a)), a);
  }
}

TEST(Rank, does_not_mutate_input) {
  BitMatrix a = BitMatrix::from_rows({"110", "011", "101"});
  BitMatrix copy = a;
  EXPECT_EQ(rank(a), 2u);
  EXPECT_EQ(a, copy);
}
