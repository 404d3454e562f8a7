#pragma once

#include <holcus/errors.hpp>
#include <holcus/pauli.hpp>
#include <holcus/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace holcus {

using Complex = std::complex<double>;

/// Largest register the dense engine will allocate (2^28 amplitudes = 4 GiB).
inline constexpr int kMaxQubits = 28;

/// Square complex matrix, row-major.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  Matrix(std::size_t dim, std::vector<Complex> row_major)
      : dim_(dim), data_(std::move(row_major)) {
    if (data_.size() != dim_ * dim_)
      throw DomainError("Matrix: data size is not dim*dim");
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
      m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const Complex> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      m(i, i) = d[i];
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  Complex &operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex &operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  std::span<const Complex> data() const noexcept { return data_; }

  Matrix adjoint() const {
    Matrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.dim_ != b.dim_)
      throw DomainError("Matrix product: dimension mismatch");
    Matrix out(a.dim_);
    for (std::size_t r = 0; r < a.dim_; ++r)
      for (std::size_t k = 0; k < a.dim_; ++k) {
        const Complex v = a(r, k);
        if (v == Complex{})
          continue;
        for (std::size_t c = 0; c < a.dim_; ++c)
          out(r, c) += v * b(k, c);
      }
    return out;
  }

  bool is_diagonal() const noexcept {
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        if (r != c && (*this)(r, c) != Complex{})
          return false;
    return true;
  }

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

inline bool is_unitary(const Matrix &m, double tol = 1e-10) {
  const Matrix p = m.adjoint() * m;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      if (std::abs(p(r, c) - (r == c ? 1.0 : 0.0)) > tol)
        return false;
  return true;
}

enum class Polarity { open, closed };

struct Control {
  int qubit = 0;
  Polarity polarity = Polarity::closed;

  friend bool operator==(const Control &, const Control &) = default;
};

/// Dense amplitude vector. Qubit q is bit q of the basis index (qubit 0 is
/// the least significant bit).
class StateVector {
public:
  StateVector() = default;

  static StateVector basis(int num_qubits, std::uint64_t index) {
    check_width(num_qubits);
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    if (index >= dim)
      throw DomainError("StateVector: basis index " + std::to_string(index) +
                        " out of range for " + std::to_string(num_qubits) +
                        " qubits");
    StateVector s;
    s.num_qubits_ = num_qubits;
    s.amps_.assign(dim, Complex{});
    s.amps_[index] = 1.0;
    return s;
  }

  // Takes ownership of arbitrary amplitudes; length must be a power of two.
  // No normalization is applied.
  static StateVector from_amplitudes(std::vector<Complex> amps) {
    if (amps.empty() || !std::has_single_bit(amps.size()))
      throw DomainError("StateVector: amplitude count must be a power of two");
    const int n = std::countr_zero(amps.size());
    if (n < 1)
      throw DomainError("StateVector: need at least one qubit");
    check_width(n);
    StateVector s;
    s.num_qubits_ = n;
    s.amps_ = std::move(amps);
    return s;
  }

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }

  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> amplitudes() noexcept { return amps_; }
  const Complex &operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto &a : amps_)
      s += std::norm(a);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i)
      p[i] = std::norm(amps_[i]);
    return p;
  }

  Complex inner(const StateVector &other) const {
    if (other.dim() != dim())
      throw DomainError("StateVector::inner: dimension mismatch");
    Complex s{};
    for (std::size_t i = 0; i < amps_.size(); ++i)
      s += std::conj(amps_[i]) * other.amps_[i];
    return s;
  }

  // Tensor product with `high` occupying the upper qubits.
  StateVector tensor_above(const StateVector &high) const {
    check_width(num_qubits_ + high.num_qubits_);
    StateVector out;
    out.num_qubits_ = num_qubits_ + high.num_qubits_;
    out.amps_.assign(out.num_qubits_ >= 64 ? 0 : (std::uint64_t{1} << out.num_qubits_),
                     Complex{});
    for (std::size_t h = 0; h < high.dim(); ++h)
      for (std::size_t l = 0; l < dim(); ++l)
        out.amps_[(h << num_qubits_) | l] = high.amps_[h] * amps_[l];
    return out;
  }

  static void check_width(int num_qubits) {
    if (num_qubits < 1)
      throw DomainError("StateVector: need at least one qubit");
    if (num_qubits > kMaxQubits)
      throw CapacityError("StateVector: " + std::to_string(num_qubits) +
                          " qubits exceeds the simulator limit of " +
                          std::to_string(kMaxQubits));
  }

private:
  int num_qubits_ = 0;
  std::vector<Complex> amps_;
};

inline StateVector new_basis_state(int num_qubits, std::uint64_t basis_index) {
  return StateVector::basis(num_qubits, basis_index);
}

namespace detail {

// Spreads the bits of `i` around zero bits at the (ascending) positions.
inline std::uint64_t insert_zero_bits(std::uint64_t i,
                                      std::span<const int> sorted_positions) {
  for (int p : sorted_positions) {
    const std::uint64_t low = i & ((std::uint64_t{1} << p) - 1);
    i = ((i >> p) << (p + 1)) | low;
  }
  return i;
}

inline void check_qubits(int num_qubits, std::span<const int> targets,
                         std::span<const Control> controls) {
  if (targets.empty())
    throw DomainError("apply_unitary: no target qubits");
  std::vector<bool> used(static_cast<std::size_t>(num_qubits), false);
  auto claim = [&](int q, const char *what) {
    if (q < 0 || q >= num_qubits)
      throw DomainError(std::string("apply_unitary: ") + what + " qubit " +
                        std::to_string(q) + " out of range");
    if (used[static_cast<std::size_t>(q)])
      throw DomainError("apply_unitary: qubit " + std::to_string(q) +
                        " used more than once among targets/controls");
    used[static_cast<std::size_t>(q)] = true;
  };
  for (int t : targets)
    claim(t, "target");
  for (const auto &c : controls)
    claim(c.qubit, "control");
}

/// Gate kernel. Assumes amplitudes with index >= 2^active are zero and every
/// target lies below `active`; only that prefix is touched. Closed controls
/// above `active` can never fire, open ones always do.
inline void apply_unitary_active(std::span<Complex> amps, int active,
                                 const Matrix &m, std::span<const int> targets,
                                 std::span<const Control> controls) {
  std::uint64_t ctrl_mask = 0;
  std::uint64_t ctrl_value = 0;
  for (const auto &c : controls) {
    if (c.qubit >= active) {
      if (c.polarity == Polarity::closed)
        return;
      continue;
    }
    ctrl_mask |= std::uint64_t{1} << c.qubit;
    if (c.polarity == Polarity::closed)
      ctrl_value |= std::uint64_t{1} << c.qubit;
  }

  const int k = static_cast<int>(targets.size());
  const std::uint64_t blocks = std::uint64_t{1} << (active - k);

  if (k == 1) {
    const std::uint64_t bit = std::uint64_t{1} << targets[0];
    const int pos[1] = {targets[0]};
    const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    const bool diag = m01 == Complex{} && m10 == Complex{};
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t i0 = insert_zero_bits(b, pos);
      if ((i0 & ctrl_mask) != ctrl_value)
        continue;
      const std::uint64_t i1 = i0 | bit;
      if (diag) {
        amps[i0] *= m00;
        amps[i1] *= m11;
      } else {
        const Complex a0 = amps[i0], a1 = amps[i1];
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
      }
    }
    return;
  }

  std::vector<int> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t sub = std::size_t{1} << k;
  // offsets[j]: basis offset of matrix index j; bit b of j drives targets[b].
  std::vector<std::uint64_t> offsets(sub, 0);
  for (std::size_t j = 0; j < sub; ++j)
    for (int b = 0; b < k; ++b)
      if ((j >> b) & 1U)
        offsets[j] |= std::uint64_t{1} << targets[static_cast<std::size_t>(b)];

  if (m.is_diagonal()) {
    std::vector<Complex> d(sub);
    for (std::size_t j = 0; j < sub; ++j)
      d[j] = m(j, j);
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t base = insert_zero_bits(b, sorted);
      if ((base & ctrl_mask) != ctrl_value)
        continue;
      for (std::size_t j = 0; j < sub; ++j)
        amps[base | offsets[j]] *= d[j];
    }
    return;
  }

  std::vector<Complex> in(sub);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t base = insert_zero_bits(b, sorted);
    if ((base & ctrl_mask) != ctrl_value)
      continue;
    for (std::size_t j = 0; j < sub; ++j)
      in[j] = amps[base | offsets[j]];
    for (std::size_t r = 0; r < sub; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < sub; ++c)
        acc += m(r, c) * in[c];
      amps[base | offsets[r]] = acc;
    }
  }
}

} // namespace detail

/// Multiplies the target sub-block by `matrix` on every basis component whose
/// closed controls read 1 and open controls read 0. Matrix index bit b
/// corresponds to targets[b].
inline void apply_unitary(StateVector &state, const Matrix &matrix,
                          const std::vector<int> &targets,
                          const std::vector<Control> &controls = {},
                          bool validate = false) {
  detail::check_qubits(state.num_qubits(), targets, controls);
  if (matrix.dim() != (std::size_t{1} << targets.size()))
    throw DomainError("apply_unitary: matrix dimension does not match " +
                      std::to_string(targets.size()) + " target(s)");
  if (validate && !is_unitary(matrix))
    throw ValidationError("apply_unitary: matrix is not unitary within 1e-10");
  detail::apply_unitary_active(state.amplitudes(), state.num_qubits(), matrix,
                               targets, controls);
}

/// Probabilities over a subset of qubits. Outcome index bit j is the value of
/// qubits[j]; rendered bitstrings put the last listed qubit first.
class OutcomeDistribution {
public:
  OutcomeDistribution(std::vector<int> qubits, std::vector<double> probs)
      : qubits_(std::move(qubits)), probs_(std::move(probs)) {
    if (probs_.size() != (std::size_t{1} << qubits_.size()))
      throw DomainError("OutcomeDistribution: probability table size mismatch");
  }

  const std::vector<int> &qubits() const noexcept { return qubits_; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  double operator[](std::size_t outcome) const { return probs_.at(outcome); }

  double probability(const std::string &bits) const {
    return probs_.at(parse_bitstring(bits));
  }

  std::string bitstring(std::size_t outcome) const {
    std::string s(qubits_.size(), '0');
    for (std::size_t j = 0; j < qubits_.size(); ++j)
      if ((outcome >> j) & 1U)
        s[qubits_.size() - 1 - j] = '1';
    return s;
  }

  std::size_t parse_bitstring(const std::string &bits) const {
    if (bits.size() != qubits_.size())
      throw DomainError("bitstring length " + std::to_string(bits.size()) +
                        " != " + std::to_string(qubits_.size()));
    std::size_t out = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      const char c = bits[bits.size() - 1 - j];
      if (c != '0' && c != '1')
        throw DomainError("bitstring must contain only 0/1");
      if (c == '1')
        out |= std::size_t{1} << j;
    }
    return out;
  }

private:
  std::vector<int> qubits_;
  std::vector<double> probs_;
};

inline OutcomeDistribution marginal_probabilities(const StateVector &state,
                                                  std::vector<int> qubits) {
  if (qubits.empty())
    throw DomainError("marginal_probabilities: empty qubit list");
  if (qubits.size() > 24)
    throw CapacityError("marginal_probabilities: too many qubits");
  std::vector<bool> seen(static_cast<std::size_t>(state.num_qubits()), false);
  for (int q : qubits) {
    if (q < 0 || q >= state.num_qubits())
      throw DomainError("marginal_probabilities: qubit " + std::to_string(q) +
                        " out of range");
    if (seen[static_cast<std::size_t>(q)])
      throw DomainError("marginal_probabilities: duplicate qubit " +
                        std::to_string(q));
    seen[static_cast<std::size_t>(q)] = true;
  }

  std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
  const auto amps = state.amplitudes();
  if (qubits.size() == 1) {
    const std::uint64_t bit = std::uint64_t{1} << qubits[0];
    for (std::uint64_t i = 0; i < amps.size(); ++i)
      probs[(i & bit) ? 1 : 0] += std::norm(amps[i]);
  } else {
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
      std::size_t outcome = 0;
      for (std::size_t j = 0; j < qubits.size(); ++j)
        outcome |= ((i >> qubits[j]) & 1U) << j;
      probs[outcome] += std::norm(amps[i]);
    }
  }
  return OutcomeDistribution(std::move(qubits), std::move(probs));
}

struct ShotCounts {
  std::vector<int> qubits;
  std::vector<std::uint64_t> counts; // indexed like OutcomeDistribution
  std::uint64_t total_shots = 0;
  std::uint64_t seed = 0;

  std::uint64_t operator[](std::size_t outcome) const { return counts.at(outcome); }
};

/// Multinomial draw, one uniform variate per shot.
inline ShotCounts sample_counts(const OutcomeDistribution &dist,
                                std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0)
    throw DomainError("sample_counts: shots must be >= 1");
  const auto probs = dist.probabilities();
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  // Guard against rounding leaving the tail below the largest variate.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] <= 0.0)
    --last;
  for (std::size_t i = last; i < cdf.size(); ++i)
    cdf[i] = std::max(cdf[i], 1.0 + 1e-12);

  ShotCounts out{dist.qubits(), std::vector<std::uint64_t>(probs.size(), 0),
                 shots, seed};
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(0.0, acc > 0.0 ? acc : 1.0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double r = u(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    ++out.counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return out;
}

/// ⟨ψ|P|ψ⟩ without sampling.
inline Complex pauli_expectation(const StateVector &state,
                                 const PauliString &pauli) {
  if (pauli.span() > state.num_qubits())
    throw DomainError("pauli_expectation: Pauli acts on qubit " +
                      std::to_string(pauli.span() - 1) + " beyond register of " +
                      std::to_string(state.num_qubits()));
  std::uint64_t flip = 0, sign = 0;
  int num_y = 0;
  for (auto [q, op] : pauli.ops()) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (op != PauliOp::Z)
      flip |= bit;
    if (op != PauliOp::X)
      sign |= bit;
    if (op == PauliOp::Y)
      ++num_y;
  }
  // P|i> = i^{num_y} (-1)^{popcount(i & sign)} |i ^ flip>
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const auto amps = state.amplitudes();
  Complex acc{};
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    const Complex term = std::conj(amps[i ^ flip]) * amps[i];
    acc += (std::popcount(i & sign) & 1) ? -term : term;
  }
  return kIPow[num_y % 4] * acc;
}

} // namespace holcus
