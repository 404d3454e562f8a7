#pragma once

#include <holcus/circuit.hpp>
#include <holcus/errors.hpp>
#include <holcus/pauli.hpp>
#include <holcus/qubo.hpp>
#include <holcus/statevector.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

namespace holcus {

/// One weighted unitary alpha·e^{iθ}·U of a linear combination.
struct LcuTerm {
  double alpha = 0.0; // > 0
  double theta = 0.0; // radians
  PauliString unitary;

  Complex coefficient() const { return std::polar(alpha, theta); }
};

/// How terms are assigned to ancilla basis states.
///   dense   : slots 0..M-1, m = max(1, ⌈log2 M⌉)
///   shifted : slots 1..M,   m = ⌈log2(M+1)⌉; |0…0⟩ stays empty
///   flagged : M a power of two, slots M..2M-1, m = log2 M + 1; the top
///             ancilla acts as a flag and the rest hold a uniform register
enum class SlotLayout { dense, shifted, flagged };

inline const char *to_string(SlotLayout l) {
  switch (l) {
  case SlotLayout::dense: return "dense";
  case SlotLayout::shifted: return "shifted";
  case SlotLayout::flagged: return "flagged";
  }
  return "?";
}

inline int ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<int>(std::bit_width(x - 1));
}

inline int ancillas_for(std::size_t num_terms, SlotLayout layout) {
  switch (layout) {
  case SlotLayout::dense: return std::max(1, ceil_log2(num_terms));
  case SlotLayout::shifted: return ceil_log2(num_terms + 1);
  case SlotLayout::flagged: return ceil_log2(num_terms) + 1;
  }
  return 0;
}

class LcuDecomposition {
public:
  LcuDecomposition(std::vector<LcuTerm> terms, SlotLayout layout)
      : terms_(std::move(terms)), layout_(layout) {
    if (terms_.empty())
      throw DomainError("LcuDecomposition: no terms");
    for (const auto &t : terms_) {
      if (!(t.alpha > 0.0) || !std::isfinite(t.alpha))
        throw DomainError("LcuDecomposition: alpha must be finite and > 0");
      normalization_ += t.alpha;
    }
    const std::size_t m = terms_.size();
    if (layout_ == SlotLayout::flagged && !std::has_single_bit(m))
      throw DomainError("LcuDecomposition: flagged layout needs a power-of-two "
                        "term count, got " + std::to_string(m));
    num_ancillas_ = ancillas_for(m, layout_);
    const std::uint64_t first = layout_ == SlotLayout::dense     ? 0
                                : layout_ == SlotLayout::shifted ? 1
                                                                 : m;
    slots_.resize(m);
    for (std::size_t k = 0; k < m; ++k)
      slots_[k] = first + k;
  }

  const std::vector<LcuTerm> &terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  double normalization() const noexcept { return normalization_; }
  double normalized_alpha(std::size_t k) const { return terms_.at(k).alpha / normalization_; }
  int num_ancillas() const noexcept { return num_ancillas_; }
  SlotLayout layout() const noexcept { return layout_; }
  std::uint64_t slot_of_term(std::size_t k) const { return slots_.at(k); }

  // Highest state qubit referenced by any term, plus one.
  int state_span() const noexcept {
    int s = 0;
    for (const auto &t : terms_)
      s = std::max(s, t.unitary.span());
    return s;
  }

private:
  std::vector<LcuTerm> terms_;
  SlotLayout layout_;
  double normalization_ = 0.0;
  int num_ancillas_ = 0;
  std::vector<std::uint64_t> slots_;
};

/// One term per nonzero h_i (Z_i), then per nonzero J_ij (Z_i Z_j) in
/// ascending pair order. Negative coefficients become θ = π. The constant
/// offset is left to the caller.
inline LcuDecomposition from_ising(const IsingModel &model,
                                   SlotLayout layout = SlotLayout::shifted) {
  std::vector<LcuTerm> terms;
  auto add = [&](double c, PauliString p) {
    if (c != 0.0)
      terms.push_back({std::abs(c), c > 0.0 ? 0.0 : std::numbers::pi, std::move(p)});
  };
  for (int i = 0; i < model.n; ++i)
    add(model.h[static_cast<std::size_t>(i)], PauliString::z(i));
  for (const auto &[ij, v] : model.j)
    add(v, PauliString::zz(ij.first, ij.second));
  if (terms.empty())
    throw DomainError("from_ising: model has no nonzero coefficient");
  return LcuDecomposition(std::move(terms), layout);
}

struct PrepUnitaries {
  Matrix v;     // column 0: √(α_k/𝒩)·e^{iθ_k} at each term slot
  Matrix v_hat; // column 0: √(α_k/𝒩)
};

namespace detail {

// Completes `first` (unit norm) to a unitary by Gram–Schmidt over the
// standard basis e_0, e_1, …, skipping vectors already in the span.
inline Matrix complete_unitary(const std::vector<Complex> &first) {
  const std::size_t d = first.size();
  std::vector<std::vector<Complex>> cols{first};
  for (std::size_t e = 0; e < d && cols.size() < d; ++e) {
    std::vector<Complex> v(d, Complex{});
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &c : cols) {
        Complex proj{};
        for (std::size_t i = 0; i < d; ++i)
          proj += std::conj(c[i]) * v[i];
        for (std::size_t i = 0; i < d; ++i)
          v[i] -= proj * c[i];
      }
    double nrm = 0.0;
    for (const auto &x : v)
      nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8)
      continue;
    for (auto &x : v)
      x /= nrm;
    cols.push_back(std::move(v));
  }
  if (cols.size() != d)
    throw InternalError("complete_unitary: basis completion failed");
  Matrix m(d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r)
      m(r, c) = cols[c][r];
  return m;
}

} // namespace detail

inline PrepUnitaries build_prep_unitaries(const LcuDecomposition &dec) {
  const std::size_t dim = std::size_t{1} << dec.num_ancillas();
  std::vector<Complex> col(dim, Complex{}), col_hat(dim, Complex{});
  for (std::size_t k = 0; k < dec.size(); ++k) {
    const double a = std::sqrt(dec.normalized_alpha(k));
    col[dec.slot_of_term(k)] = std::polar(a, dec.terms()[k].theta);
    col_hat[dec.slot_of_term(k)] = a;
  }
  double nrm = 0.0;
  for (const auto &x : col)
    nrm += std::norm(x);
  if (std::abs(nrm - 1.0) > 1e-12)
    throw InternalError("build_prep_unitaries: column 0 has squared norm " +
                        std::to_string(nrm));
  PrepUnitaries out{detail::complete_unitary(col), detail::complete_unitary(col_hat)};
  if (!is_unitary(out.v, 1e-12) || !is_unitary(out.v_hat, 1e-12))
    throw InternalError("build_prep_unitaries: completion is not unitary");
  return out;
}

/// Tensor product of Paulis on `targets` (ascending qubit order), as one
/// dense block; bit b of the matrix index belongs to the b-th target.
inline Matrix pauli_block(const PauliString &p) {
  using namespace std::complex_literals;
  std::vector<PauliOp> ops;
  for (auto [q, op] : p.ops())
    ops.push_back(op);
  const std::size_t dim = std::size_t{1} << ops.size();
  Matrix m(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::size_t r = c;
    Complex v = 1.0;
    for (std::size_t b = 0; b < ops.size(); ++b) {
      const bool bit = (c >> b) & 1U;
      switch (ops[b]) {
      case PauliOp::X: r ^= std::size_t{1} << b; break;
      case PauliOp::Y:
        r ^= std::size_t{1} << b;
        v *= bit ? -1i : 1i;
        break;
      case PauliOp::Z:
        if (bit)
          v = -v;
        break;
      }
    }
    m(r, c) = v;
  }
  return m;
}

/// The Pauli string as a single gate on state register `state`.
inline std::optional<Gate> pauli_gate(const PauliString &p, QubitSpan state) {
  if (p.is_identity())
    return std::nullopt;
  if (p.weight() == 1) {
    auto [q, op] = *p.ops().begin();
    return Gate::pauli(state[q], op);
  }
  std::vector<int> targets;
  for (auto [q, op] : p.ops())
    targets.push_back(state[q]);
  return Gate::dense(pauli_block(p), std::move(targets), p.to_string());
}

/// Multiplexed application of every U_k on `regs.state`, conditioned on the
/// ancilla register holding slot_of_term(k). In dense layout with a
/// Hadamard register present, the slot-0 term also needs the Hadamard qubit
/// closed, since |0…0⟩ of the ancillas is populated on both branches.
inline Circuit build_select_circuit(const LcuDecomposition &dec, int num_qubits,
                                    const RegisterMap &regs) {
  if (!regs.ancilla || !regs.state)
    throw DomainError("build_select_circuit: ancilla and state registers required");
  if (regs.ancilla->count < dec.num_ancillas())
    throw DomainError("build_select_circuit: ancilla register has " +
                      std::to_string(regs.ancilla->count) + " qubits, need " +
                      std::to_string(dec.num_ancillas()));
  if (regs.state->count < dec.state_span())
    throw DomainError("build_select_circuit: state register too small");
  Circuit c(num_qubits);
  c.set_registers(regs);
  for (std::size_t k = 0; k < dec.size(); ++k) {
    auto g = pauli_gate(dec.terms()[k].unitary, *regs.state);
    if (!g)
      continue;
    const std::uint64_t slot = dec.slot_of_term(k);
    for (int b = 0; b < dec.num_ancillas(); ++b)
      g->control((*regs.ancilla)[b],
                 ((slot >> b) & 1U) ? Polarity::closed : Polarity::open);
    if (slot == 0 && regs.hadamard && dec.layout() == SlotLayout::dense)
      g->control(regs.hadamard->first, Polarity::closed);
    c.append(std::move(*g));
  }
  return c;
}

/// Plain prepare–select–unprepare block: state on qubits [0, n), ancillas
/// on [n, n+m). Projecting the ancillas on |0…0⟩ leaves (A/𝒩)|ψ⟩.
inline Circuit build_lcu_circuit(const LcuDecomposition &dec, int n) {
  const int m = dec.num_ancillas();
  RegisterMap regs{std::nullopt, QubitSpan{n, m}, QubitSpan{0, n}};
  const auto prep = build_prep_unitaries(dec);
  std::vector<int> anc(static_cast<std::size_t>(m));
  for (int b = 0; b < m; ++b)
    anc[static_cast<std::size_t>(b)] = n + b;
  Circuit c(n + m);
  c.set_registers(regs);
  c.append(Gate::dense(prep.v, anc, "V"));
  c.append(build_select_circuit(dec, n + m, regs));
  c.append(Gate::dense(prep.v_hat.adjoint(), anc, "V_hat^dag"));
  return c;
}

struct CoefficientGroup {
  double common_alpha = 0.0;
  double common_theta = 0.0;
  std::vector<std::size_t> term_indices;
};

inline constexpr double kDefaultGroupingTol = 1e-9;

/// Partitions terms by (alpha, theta) within `tol`; groups appear in order of
/// their first member.
inline std::vector<CoefficientGroup>
group_by_coefficient(const LcuDecomposition &dec, double tol = kDefaultGroupingTol) {
  if (tol < 0.0)
    throw DomainError("group_by_coefficient: negative tolerance");
  auto angle_gap = [](double a, double b) {
    const double d = std::remainder(a - b, 2.0 * std::numbers::pi);
    return std::abs(d);
  };
  std::vector<CoefficientGroup> groups;
  for (std::size_t k = 0; k < dec.size(); ++k) {
    const auto &t = dec.terms()[k];
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto &g) {
      return std::abs(g.common_alpha - t.alpha) <= tol &&
             angle_gap(g.common_theta, t.theta) <= tol;
    });
    if (it == groups.end())
      groups.push_back({t.alpha, t.theta, {k}});
    else
      it->term_indices.push_back(k);
  }
  return groups;
}

/// Controlled uniform preparation of m ancillas. Qubits 0..m-1 are the
/// ancillas, qubit m is the control. All-to-all: one controlled-H per
/// ancilla. Nearest-neighbour: every controlled-H lands on ancilla 0 and the
/// fresh |+⟩ is bubbled down with SWAPs, m(m+1)/2 gates in total.
inline Circuit build_uniform_prep_circuit(int m, bool nearest_neighbor) {
  if (m < 1)
    throw DomainError("build_uniform_prep_circuit: m must be >= 1");
  Circuit c(m + 1);
  c.set_registers({QubitSpan{m, 1}, QubitSpan{0, m}, std::nullopt});
  if (!nearest_neighbor) {
    for (int a = 0; a < m; ++a)
      c.append(Gate::h(a).controlled(m));
    return c;
  }
  for (int round = 0; round < m; ++round) {
    c.append(Gate::h(0).controlled(m));
    for (int a = 0; a + 1 < m - round; ++a)
      c.append(Gate::swap(a, a + 1));
  }
  return c;
}

} // namespace holcus
