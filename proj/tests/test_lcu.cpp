#include "oracle.hpp"

#include <gtest/gtest.h>

#include <holcus/lcu.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace holcus;

namespace {

// Top-left 2^n block of an (n+m)-qubit operator whose ancillas sit above the
// state, i.e. ⟨0…0|_anc U |0…0⟩_anc.
oracle::Dense ancilla_zero_block(const oracle::Dense &u, int n) {
  const std::size_t d = std::size_t{1} << n;
  oracle::Dense b(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      b(r, c) = u(r, c);
  return b;
}

LcuDecomposition random_decomposition(int n, std::size_t terms, SlotLayout layout,
                                      std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> a(0.05, 2.0), th(-std::numbers::pi, std::numbers::pi);
  std::uniform_int_distribution<int> pick(0, 3);
  const char ops[] = {'X', 'Y', 'Z'};
  std::vector<LcuTerm> ts;
  for (std::size_t k = 0; k < terms; ++k) {
    PauliString p;
    for (int q = 0; q < n; ++q)
      if (int o = pick(rng); o < 3)
        p.set(q, static_cast<PauliOp>(ops[o]));
    ts.push_back({a(rng), th(rng), p});
  }
  return LcuDecomposition(std::move(ts), layout);
}

} // namespace

TEST(Lcu, AncillaCountsPerLayout) {
  EXPECT_EQ(ancillas_for(1, SlotLayout::dense), 1);
  EXPECT_EQ(ancillas_for(2, SlotLayout::dense), 1);
  EXPECT_EQ(ancillas_for(4, SlotLayout::dense), 2);
  EXPECT_EQ(ancillas_for(5, SlotLayout::dense), 3);
  EXPECT_EQ(ancillas_for(1, SlotLayout::shifted), 1);
  EXPECT_EQ(ancillas_for(3, SlotLayout::shifted), 2);
  EXPECT_EQ(ancillas_for(4, SlotLayout::shifted), 3);
  EXPECT_EQ(ancillas_for(7, SlotLayout::shifted), 3);
  EXPECT_EQ(ancillas_for(8, SlotLayout::shifted), 4);
  EXPECT_EQ(ancillas_for(1, SlotLayout::flagged), 1);
  EXPECT_EQ(ancillas_for(4, SlotLayout::flagged), 3);
}

TEST(Lcu, DecompositionValidation) {
  EXPECT_THROW(LcuDecomposition({}, SlotLayout::shifted), DomainError);
  EXPECT_THROW(LcuDecomposition({{0.0, 0.0, PauliString::z(0)}}, SlotLayout::shifted),
               DomainError);
  EXPECT_THROW(LcuDecomposition({{-1.0, 0.0, PauliString::z(0)}}, SlotLayout::shifted),
               DomainError);
  std::vector<LcuTerm> three(3, {1.0, 0.0, PauliString::z(0)});
  EXPECT_THROW(LcuDecomposition(three, SlotLayout::flagged), DomainError);
  const LcuDecomposition shifted(three, SlotLayout::shifted);
  EXPECT_EQ(shifted.slot_of_term(0), 1u);
  EXPECT_EQ(shifted.slot_of_term(2), 3u);
  const LcuDecomposition flagged({three[0], three[1]}, SlotLayout::flagged);
  EXPECT_EQ(flagged.slot_of_term(0), 2u);
  EXPECT_EQ(flagged.slot_of_term(1), 3u);
}

TEST(Lcu, FromIsingReproducesOperator) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 1 + trial % 4;
    const auto m = oracle::random_ising(n, rng, 0.2);
    const auto dec = from_ising(m);
    double l1 = 0.0;
    std::size_t nonzero = 0;
    for (double h : m.h)
      if (h != 0.0) {
        l1 += std::abs(h);
        ++nonzero;
      }
    for (const auto &[ij, v] : m.j)
      if (v != 0.0) {
        l1 += std::abs(v);
        ++nonzero;
      }
    EXPECT_EQ(dec.size(), nonzero);
    EXPECT_NEAR(dec.normalization(), l1, 1e-12);
    for (const auto &t : dec.terms())
      EXPECT_TRUE(t.theta == 0.0 || t.theta == std::numbers::pi);
    auto expected = oracle::ising_dense(m);
    expected = oracle::add(expected, oracle::Dense::eye(expected.dim), -m.offset);
    const auto got = oracle::lcu_dense(dec, n);
    for (std::size_t i = 0; i < got.a.size(); ++i)
      EXPECT_NEAR(std::abs(got.a[i] - expected.a[i]), 0.0, 1e-12);
  }
  IsingModel zero;
  zero.n = 2;
  zero.h = {0.0, 0.0};
  EXPECT_THROW(from_ising(zero), DomainError);
}

TEST(Lcu, PrepUnitariesHaveRequestedFirstColumns) {
  std::mt19937_64 rng(42);
  for (auto layout : {SlotLayout::dense, SlotLayout::shifted}) {
    const auto dec = random_decomposition(3, 6, layout, rng);
    const auto pu = build_prep_unitaries(dec);
    EXPECT_TRUE(is_unitary(pu.v, 1e-12));
    EXPECT_TRUE(is_unitary(pu.v_hat, 1e-12));
    for (std::size_t k = 0; k < dec.size(); ++k) {
      const auto slot = dec.slot_of_term(k);
      const double a = std::sqrt(dec.terms()[k].alpha / dec.normalization());
      EXPECT_NEAR(std::abs(pu.v(slot, 0) - std::polar(a, dec.terms()[k].theta)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(pu.v_hat(slot, 0) - Complex{a}), 0.0, 1e-12);
    }
    if (layout == SlotLayout::shifted) {
      EXPECT_NEAR(std::abs(pu.v(0, 0)), 0.0, 1e-15);
    }
  }
}

TEST(Lcu, PauliBlockMatchesKroneckerProduct) {
  for (const char *text : {"X0 Y1", "Z0 X2 Y3", "Y0 Y1 Y2", "Z1 Z4"}) {
    const auto p = PauliString::parse(text);
    // Compact the support onto qubits 0..w-1 for the oracle.
    PauliString compact;
    int i = 0;
    for (auto [q, op] : p.ops())
      compact.set(i++, op);
    const auto expected = oracle::pauli_dense(compact, static_cast<int>(p.weight()));
    const auto got = oracle::from_library(pauli_block(p));
    for (std::size_t k = 0; k < got.a.size(); ++k)
      EXPECT_NEAR(std::abs(got.a[k] - expected.a[k]), 0.0, 1e-15) << text;
  }
}

TEST(Lcu, PauliGateKinds) {
  const QubitSpan state{2, 4};
  EXPECT_FALSE(pauli_gate(PauliString{}, state).has_value());
  const auto z = pauli_gate(PauliString::z(1), state);
  ASSERT_TRUE(z);
  EXPECT_EQ(z->kind(), GateKind::Z);
  EXPECT_EQ(z->targets(), std::vector<int>{3});
  const auto zz = pauli_gate(PauliString::zz(0, 3), state);
  ASSERT_TRUE(zz);
  EXPECT_EQ(zz->kind(), GateKind::DENSE);
  EXPECT_EQ(zz->targets(), (std::vector<int>{2, 5}));
}

// ⟨0|_anc V̂† SELECT V |0⟩_anc = A/𝒩 for every layout.
TEST(Lcu, BlockEncodingEqualsNormalizedOperator) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    const std::size_t terms = (trial % 3 == 2) ? 4 : 1 + static_cast<std::size_t>(trial % 5);
    const SlotLayout layout = trial % 3 == 0   ? SlotLayout::dense
                              : trial % 3 == 1 ? SlotLayout::shifted
                                               : SlotLayout::flagged;
    const auto dec = random_decomposition(n, terms, layout, rng);
    const auto c = build_lcu_circuit(dec, n);
    EXPECT_EQ(c.num_qubits(), n + dec.num_ancillas());
    const auto block = ancilla_zero_block(oracle::circuit_unitary(c), n);
    const auto a = oracle::lcu_dense(dec, n);
    for (std::size_t i = 0; i < a.a.size(); ++i)
      EXPECT_NEAR(std::abs(block.a[i] - a.a[i] / dec.normalization()), 0.0, 1e-11)
          << "layout " << to_string(layout) << " trial " << trial;
  }
}

TEST(Lcu, SelectControlsEncodeSlots) {
  const LcuDecomposition dec({{1.0, 0.0, PauliString::z(0)},
                              {1.0, 0.0, PauliString::z(1)},
                              {1.0, 0.0, PauliString::zz(0, 1)}},
                             SlotLayout::shifted);
  const RegisterMap regs{QubitSpan{4, 1}, QubitSpan{2, 2}, QubitSpan{0, 2}};
  const auto sel = build_select_circuit(dec, 5, regs);
  ASSERT_EQ(sel.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto &g = sel.gates()[k];
    ASSERT_EQ(g.controls().size(), 2u); // no Hadamard-qubit control when shifted
    const auto slot = dec.slot_of_term(k);
    for (int b = 0; b < 2; ++b) {
      EXPECT_EQ(g.controls()[static_cast<std::size_t>(b)].qubit, 2 + b);
      EXPECT_EQ(g.controls()[static_cast<std::size_t>(b)].polarity,
                ((slot >> b) & 1U) ? Polarity::closed : Polarity::open);
    }
  }
  const LcuDecomposition dense(dec.terms(), SlotLayout::dense);
  const auto dsel = build_select_circuit(dense, 5, regs);
  EXPECT_EQ(dsel.gates()[0].controls().size(), 3u); // slot 0 also needs the Hadamard qubit
  EXPECT_EQ(dsel.gates()[1].controls().size(), 2u);
  EXPECT_THROW(build_select_circuit(dec, 5, {std::nullopt, QubitSpan{2, 1}, QubitSpan{0, 2}}),
               DomainError);
}

TEST(Lcu, GroupingByCoefficient) {
  const auto pi = std::numbers::pi;
  const LcuDecomposition dec({{0.5, 0.0, PauliString::z(0)},
                              {0.5, pi, PauliString::z(1)},
                              {0.5, 0.0, PauliString::z(2)},
                              {0.5 + 1e-12, -pi, PauliString::zz(0, 1)},
                              {0.7, 0.0, PauliString::zz(1, 2)}},
                             SlotLayout::shifted);
  const auto groups = group_by_coefficient(dec);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].term_indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(groups[1].term_indices, (std::vector<std::size_t>{1, 3})); // θ = ±π coincide
  EXPECT_EQ(groups[2].term_indices, (std::vector<std::size_t>{4}));
  EXPECT_EQ(group_by_coefficient(dec, 0.0).size(), 4u);
  EXPECT_THROW(group_by_coefficient(dec, -1.0), DomainError);
}

TEST(UniformPrep, GateCountAndDepth) {
  for (int m = 1; m <= 6; ++m) {
    const auto nn = resource_report(build_uniform_prep_circuit(m, true));
    EXPECT_EQ(nn.gate_count, m * (m + 1) / 2) << "m = " << m;
    EXPECT_EQ(nn.controlled_gate_count, m);
    EXPECT_EQ(nn.logical_depth, 2 * m - 1) << "m = " << m;
    const auto all = resource_report(build_uniform_prep_circuit(m, false));
    EXPECT_EQ(all.gate_count, m);
    EXPECT_EQ(all.logical_depth, m); // every controlled-H shares the control
  }
  EXPECT_THROW(build_uniform_prep_circuit(0, true), DomainError);
}

TEST(UniformPrep, ProducesUniformSuperpositionOnlyWhenControlSet) {
  for (int m = 1; m <= 5; ++m)
    for (bool nn : {true, false}) {
      const auto c = build_uniform_prep_circuit(m, nn);
      const auto on = run(c, StateVector::basis(m + 1, std::uint64_t{1} << m));
      const double amp = std::pow(2.0, -m / 2.0);
      for (std::size_t i = 0; i < on.dim(); ++i) {
        const bool control_set = (i >> m) & 1U;
        EXPECT_NEAR(std::abs(on[i] - Complex{control_set ? amp : 0.0}), 0.0, 1e-12);
      }
      const auto off = run(c);
      EXPECT_NEAR(std::abs(off[0] - Complex{1.0}), 0.0, 1e-15);
    }
}
