#include "oracle.hpp"

#include <gtest/gtest.h>

#include <holcus/qubo.hpp>

#include <random>
#include <sstream>

using namespace holcus;

namespace {

// xᵀQx straight from the definition.
double quadratic_form(const QuboInstance &q, const std::vector<int> &x) {
  double c = 0.0;
  for (int i = 0; i < q.n; ++i)
    for (int k = 0; k < q.n; ++k)
      c += x[static_cast<std::size_t>(i)] * q(i, k) * x[static_cast<std::size_t>(k)];
  return c;
}

QuboInstance asymmetric_qubo(int n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(static_cast<std::size_t>(n * n));
  for (auto &x : v)
    x = u(rng);
  return make_qubo(n, v);
}

} // namespace

TEST(Qubo, RandomInstanceIsSymmetricBoundedAndSeeded) {
  const auto a = random_qubo(6, 99);
  const auto b = random_qubo(6, 99);
  const auto c = random_qubo(6, 100);
  EXPECT_EQ(a.q, b.q);
  EXPECT_NE(a.q, c.q);
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) {
      EXPECT_EQ(a(i, k), a(k, i));
      EXPECT_GT(a(i, k), -2.0);
      EXPECT_LT(a(i, k), 2.0);
    }
  EXPECT_THROW(random_qubo(0, 1), DomainError);
}

TEST(Qubo, MakeQuboKeepsQuadraticForm) {
  std::mt19937_64 rng(31);
  std::vector<double> raw{1.0, 3.0, -1.0, 0.5};
  const auto q = make_qubo(2, raw);
  EXPECT_DOUBLE_EQ(q(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(q(1, 0), 1.0);
  const QuboInstance unsym{2, raw, 0};
  for (std::uint64_t a = 0; a < 4; ++a)
    EXPECT_DOUBLE_EQ(qubo_cost(q, a), quadratic_form(unsym, bits_of(a, 2)));
  EXPECT_THROW(make_qubo(2, {1.0}), DomainError);
}

TEST(Qubo, CostOverloadsAgreeWithDefinition) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const auto q = asymmetric_qubo(n, rng);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
      const auto x = bits_of(a, n);
      EXPECT_NEAR(qubo_cost(q, a), quadratic_form(q, x), 1e-12);
      EXPECT_NEAR(qubo_cost(q, x), quadratic_form(q, x), 1e-12);
    }
  }
  const auto q = random_qubo(3, 1);
  EXPECT_THROW(qubo_cost(q, std::vector<int>{1, 0}), DomainError);
}

// Property: for every x, E_Ising(z = 1 - 2x) equals the QUBO cost.
TEST(QuboToIsing, EnergiesMatchOnAllAssignments) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 7;
    const auto q = trial % 2 ? random_qubo(n, rng()) : asymmetric_qubo(n, rng);
    const auto m = qubo_to_ising(q);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
      std::vector<int> z(static_cast<std::size_t>(n));
      const auto x = bits_of(a, n);
      for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] = 1 - 2 * x[static_cast<std::size_t>(i)];
      EXPECT_NEAR(ising_energy(m, z), quadratic_form(q, x), 1e-12);
      EXPECT_NEAR(ising_energy(m, a), quadratic_form(q, x), 1e-12);
      EXPECT_EQ(spins_of(a, n), z);
    }
  }
}

TEST(QuboToIsing, HandComputedTwoVariableCase) {
  // Q = [[1, 2], [2, -3]]: w = 4, offset = (1 - 3)/2 + 1 = 0,
  // h0 = -1/2 - 1 = -1.5, h1 = 3/2 - 1 = 0.5, J = 1.
  const auto m = qubo_to_ising(make_qubo(2, {1, 2, 2, -3}));
  EXPECT_DOUBLE_EQ(m.offset, 0.0);
  EXPECT_DOUBLE_EQ(m.h[0], -1.5);
  EXPECT_DOUBLE_EQ(m.h[1], 0.5);
  ASSERT_EQ(m.j.size(), 1u);
  EXPECT_DOUBLE_EQ(m.j.at({0, 1}), 1.0);
}

TEST(QuboToIsing, DiagonalMatchesDenseMatrix) {
  std::mt19937_64 rng(34);
  const auto m = qubo_to_ising(random_qubo(4, 7));
  const auto dense = oracle::ising_dense(m);
  const auto diag = ising_diagonal(m);
  for (std::size_t r = 0; r < dense.dim; ++r)
    for (std::size_t c = 0; c < dense.dim; ++c)
      EXPECT_NEAR(std::abs(dense(r, c) - (r == c ? oracle::C{diag[r]} : oracle::C{})), 0.0,
                  1e-12);
}

TEST(QuboToIsing, RejectsInvalidSpins) {
  const auto m = qubo_to_ising(random_qubo(2, 3));
  EXPECT_THROW(ising_energy(m, std::vector<int>{1, 0}), DomainError);
  EXPECT_THROW(ising_energy(m, std::vector<int>{1}), DomainError);
}

TEST(BruteForce, FindsMinimumAndBreaksTiesLow) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q = random_qubo(5, rng());
    const auto r = brute_force_min(q);
    double best = 1e300;
    std::uint64_t arg = 0;
    for (std::uint64_t a = 0; a < 32; ++a)
      if (const double c = quadratic_form(q, bits_of(a, 5)); c < best - 1e-15) {
        best = c;
        arg = a;
      }
    EXPECT_NEAR(r.cost, best, 1e-12);
    EXPECT_EQ(r.assignment, arg);
    EXPECT_EQ(r.bits, bitstring_of(arg, 5));
  }
  // All-zero matrix: every assignment costs 0, the lowest wins.
  const auto flat = make_qubo(3, std::vector<double>(9, 0.0));
  EXPECT_EQ(brute_force_min(flat).assignment, 0u);
  // x = 011 and x = 110 tie at -1.5; 011 is numerically lower.
  auto tie = make_qubo(3, std::vector<double>(9, 0.0));
  tie(0, 0) = tie(1, 1) = tie(2, 2) = -1.0;
  tie(0, 1) = tie(1, 0) = tie(1, 2) = tie(2, 1) = 0.25;
  tie(0, 2) = tie(2, 0) = 5.0;
  EXPECT_DOUBLE_EQ(qubo_cost(tie, std::uint64_t{0b110}), -1.5);
  EXPECT_EQ(brute_force_min(tie).assignment, 0b011u);
  EXPECT_THROW(brute_force_min(QuboInstance{kBruteForceMaxN + 1, {}, 0}), CapacityError);
}

TEST(BruteForce, BitstringIsMostSignificantFirst) {
  EXPECT_EQ(bitstring_of(0b0011, 4), "0011");
  EXPECT_EQ(bitstring_of(0b1000, 4), "1000");
}

TEST(QuboFile, RoundTrip) {
  const auto q = random_qubo(4, 12);
  std::stringstream ss;
  write_qubo(ss, q);
  const auto back = read_qubo(ss);
  EXPECT_EQ(back.n, q.n);
  EXPECT_EQ(back.q, q.q);
  std::istringstream bad("3\n1 2 3\n");
  EXPECT_THROW(read_qubo(bad), DomainError);
  std::istringstream empty("");
  EXPECT_THROW(read_qubo(empty), DomainError);
}
