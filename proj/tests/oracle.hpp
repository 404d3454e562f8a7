#pragma once

// Brute-force reference implementations for the tests. Everything here works
// on explicit 2^n × 2^n matrices built from Kronecker products and basis-state
// loops, so it shares no code path with the strided simulator.

#include <holcus/holcus.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct Dense {
  std::size_t dim = 0;
  std::vector<C> a;

  Dense() = default;
  explicit Dense(std::size_t d) : dim(d), a(d * d) {}
  C &operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  C operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

  static Dense eye(std::size_t d) {
    Dense m(d);
    for (std::size_t i = 0; i < d; ++i)
      m(i, i) = 1.0;
    return m;
  }
};

inline Dense mul(const Dense &x, const Dense &y) {
  Dense z(x.dim);
  for (std::size_t i = 0; i < x.dim; ++i)
    for (std::size_t k = 0; k < x.dim; ++k) {
      const C xik = x(i, k);
      if (xik == C{})
        continue;
      for (std::size_t j = 0; j < x.dim; ++j)
        z(i, j) += xik * y(k, j);
    }
  return z;
}

inline Dense add(const Dense &x, const Dense &y, C scale = 1.0) {
  Dense z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i)
    z.a[i] += scale * y.a[i];
  return z;
}

inline Dense dagger(const Dense &x) {
  Dense z(x.dim);
  for (std::size_t i = 0; i < x.dim; ++i)
    for (std::size_t j = 0; j < x.dim; ++j)
      z(j, i) = std::conj(x(i, j));
  return z;
}

// kron(high, low): `low` acts on the less significant bits.
inline Dense kron(const Dense &high, const Dense &low) {
  Dense z(high.dim * low.dim);
  for (std::size_t a = 0; a < high.dim; ++a)
    for (std::size_t b = 0; b < high.dim; ++b)
      for (std::size_t c = 0; c < low.dim; ++c)
        for (std::size_t d = 0; d < low.dim; ++d)
          z(a * low.dim + c, b * low.dim + d) = high(a, b) * low(c, d);
  return z;
}

inline std::vector<C> matvec(const Dense &m, const std::vector<C> &v) {
  std::vector<C> out(m.dim);
  for (std::size_t i = 0; i < m.dim; ++i)
    for (std::size_t j = 0; j < m.dim; ++j)
      out[i] += m(i, j) * v[j];
  return out;
}

inline C dot(const std::vector<C> &x, const std::vector<C> &y) {
  C s{};
  for (std::size_t i = 0; i < x.size(); ++i)
    s += std::conj(x[i]) * y[i];
  return s;
}

inline Dense two(C a, C b, C c, C d) {
  Dense m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

inline const C I{0.0, 1.0};
inline Dense pauli_i() { return Dense::eye(2); }
inline Dense pauli_x() { return two(0, 1, 1, 0); }
inline Dense pauli_y() { return two(0, -I, I, 0); }
inline Dense pauli_z() { return two(1, 0, 0, -1); }
inline Dense hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return two(r, r, r, -r);
}

// e^{iφP} = cos φ·1 + i sin φ·P for any Pauli P.
inline Dense exp_pauli(const Dense &p, double phi) {
  Dense e = Dense::eye(p.dim);
  for (auto &v : e.a)
    v *= std::cos(phi);
  return add(e, p, I * std::sin(phi));
}

// Single-qubit (or Pauli-product) operator on n qubits: ops[q] for qubit q.
inline Dense tensor(const std::vector<Dense> &ops_by_qubit) {
  Dense out = Dense::eye(1);
  for (std::size_t q = 0; q < ops_by_qubit.size(); ++q)
    out = kron(ops_by_qubit[q], out);
  return out;
}

inline Dense pauli_dense(const holcus::PauliString &p, int n) {
  std::vector<Dense> ops(static_cast<std::size_t>(n), pauli_i());
  for (auto [q, op] : p.ops()) {
    if (q >= n)
      throw std::out_of_range("pauli_dense: qubit outside register");
    ops[static_cast<std::size_t>(q)] = op == holcus::PauliOp::X   ? pauli_x()
                                       : op == holcus::PauliOp::Y ? pauli_y()
                                                                  : pauli_z();
  }
  return tensor(ops);
}

/// Lifts a k-qubit operator `u` (bit b of its index ↔ targets[b]) to n qubits,
/// applied only on basis states whose controls match.
inline Dense embed(const Dense &u, const std::vector<int> &targets,
                   const std::vector<holcus::Control> &controls, int n) {
  const std::size_t dim = std::size_t{1} << n;
  Dense out(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    bool fire = true;
    for (const auto &c : controls) {
      const bool bit = (col >> c.qubit) & 1U;
      fire = fire && (bit == (c.polarity == holcus::Polarity::closed));
    }
    if (!fire) {
      out(col, col) = 1.0;
      continue;
    }
    std::size_t local_in = 0, cleared = col;
    for (std::size_t b = 0; b < targets.size(); ++b) {
      if ((col >> targets[b]) & 1U)
        local_in |= std::size_t{1} << b;
      cleared &= ~(std::size_t{1} << targets[b]);
    }
    for (std::size_t local_out = 0; local_out < u.dim; ++local_out) {
      std::size_t row = cleared;
      for (std::size_t b = 0; b < targets.size(); ++b)
        if ((local_out >> b) & 1U)
          row |= std::size_t{1} << targets[b];
      out(row, col) += u(local_out, local_in);
    }
  }
  return out;
}

inline Dense from_library(const holcus::Matrix &m) {
  Dense d(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      d(r, c) = m(r, c);
  return d;
}

// Gate matrices written out from their definitions; DENSE carries its own.
inline Dense gate_local(const holcus::Gate &g) {
  using K = holcus::GateKind;
  const double phi = g.param();
  switch (g.kind()) {
  case K::H: return hadamard();
  case K::X: return pauli_x();
  case K::Y: return pauli_y();
  case K::Z: return pauli_z();
  case K::S: return two(1, 0, 0, I);
  case K::S_DAGGER: return two(1, 0, 0, -I);
  case K::EXP_X: return exp_pauli(pauli_x(), phi);
  case K::EXP_Z: return exp_pauli(pauli_z(), phi);
  case K::EXP_ZZ: return exp_pauli(kron(pauli_z(), pauli_z()), phi);
  case K::SWAP: {
    Dense s(4);
    s(0, 0) = s(3, 3) = 1.0;
    s(1, 2) = s(2, 1) = 1.0;
    return s;
  }
  case K::DENSE: return from_library(g.matrix());
  }
  throw std::logic_error("gate_local: unknown kind");
}

inline Dense circuit_unitary(const holcus::Circuit &c) {
  Dense u = Dense::eye(std::size_t{1} << c.num_qubits());
  for (const auto &g : c.gates())
    u = mul(embed(gate_local(g), g.targets(), g.controls(), c.num_qubits()), u);
  return u;
}

inline std::vector<C> zero_state(int n) {
  std::vector<C> v(std::size_t{1} << n);
  v[0] = 1.0;
  return v;
}

inline std::vector<C> run_dense(const holcus::Circuit &c, std::vector<C> v) {
  return matvec(circuit_unitary(c), v);
}

inline std::vector<C> run_dense(const holcus::Circuit &c) {
  return run_dense(c, zero_state(c.num_qubits()));
}

inline Dense ising_dense(const holcus::IsingModel &m) {
  const std::size_t dim = std::size_t{1} << m.n;
  Dense h = Dense::eye(dim);
  for (auto &v : h.a)
    v *= m.offset;
  for (int i = 0; i < m.n; ++i)
    h = add(h, pauli_dense(holcus::PauliString::z(i), m.n), m.h[static_cast<std::size_t>(i)]);
  for (const auto &[ij, v] : m.j)
    h = add(h, pauli_dense(holcus::PauliString::zz(ij.first, ij.second), m.n), v);
  return h;
}

// Σ α_k e^{iθ_k} U_k, without any offset.
inline Dense lcu_dense(const holcus::LcuDecomposition &dec, int n) {
  Dense a(std::size_t{1} << n);
  for (const auto &t : dec.terms())
    a = add(a, pauli_dense(t.unitary, n), std::polar(t.alpha, t.theta));
  return a;
}

inline C expectation(const Dense &a, const std::vector<C> &psi) {
  return dot(psi, matvec(a, psi));
}

// QAOA state from the textbook definition: e^{iβΣX} e^{iγH_P} per layer on
// |+⟩^n, with H_P taken as the dense Ising matrix.
inline std::vector<C> qaoa_state(const holcus::IsingModel &m, const holcus::QaoaParams &p) {
  const std::size_t dim = std::size_t{1} << m.n;
  std::vector<C> psi(dim, C{1.0 / std::sqrt(static_cast<double>(dim))});
  const Dense hp = ising_dense(m);
  for (std::size_t l = 0; l < p.layers(); ++l) {
    for (std::size_t i = 0; i < dim; ++i) // H_P is diagonal in this basis
      psi[i] *= std::exp(I * p.gammas[l] * (hp(i, i) - m.offset));
    std::vector<Dense> xs(static_cast<std::size_t>(m.n), exp_pauli(pauli_x(), p.betas[l]));
    psi = matvec(tensor(xs), psi);
  }
  return psi;
}

inline double qaoa_energy(const holcus::IsingModel &m, const holcus::QaoaParams &p) {
  return expectation(ising_dense(m), qaoa_state(m, p)).real();
}

inline double ground_energy(const holcus::IsingModel &m) {
  const Dense h = ising_dense(m);
  double e = h(0, 0).real();
  for (std::size_t i = 1; i < h.dim; ++i)
    e = std::min(e, h(i, i).real());
  return e;
}

inline double fidelity(const std::vector<C> &x, const std::vector<C> &y) {
  return std::norm(dot(x, y)) / (dot(x, x).real() * dot(y, y).real());
}

// ---- generators --------------------------------------------------------

/// Random circuit over the fixed gate set, with occasional controls.
inline holcus::Circuit random_circuit(int n, int gates, std::mt19937_64 &rng) {
  using holcus::Gate;
  std::uniform_int_distribution<int> kind(0, 8), qubit(0, n - 1), coin(0, 3);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  holcus::Circuit c(n);
  for (int i = 0; i < gates; ++i) {
    const int a = qubit(rng);
    int b = qubit(rng);
    if (n > 1)
      while (b == a)
        b = qubit(rng);
    std::optional<Gate> g;
    switch (kind(rng)) {
    case 0: g = Gate::h(a); break;
    case 1: g = Gate::x(a); break;
    case 2: g = Gate::y(a); break;
    case 3: g = Gate::s(a); break;
    case 4: g = Gate::s_dagger(a); break;
    case 5: g = Gate::exp_x(a, angle(rng)); break;
    case 6: g = Gate::exp_z(a, angle(rng)); break;
    case 7: g = n > 1 ? Gate::exp_zz(a, b, angle(rng)) : Gate::h(a); break;
    default: g = n > 1 ? Gate::swap(a, b) : Gate::z(a); break;
    }
    if (n > 2 && coin(rng) == 0) {
      int c_q = qubit(rng);
      while (g->touches(c_q))
        c_q = qubit(rng);
      g->control(c_q, coin(rng) % 2 ? holcus::Polarity::closed : holcus::Polarity::open);
    }
    c.append(*g);
  }
  return c;
}

/// Ising model with coefficients in (−2, 2) and the given zero probability.
inline holcus::IsingModel random_ising(int n, std::mt19937_64 &rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), z(0.0, 1.0);
  holcus::IsingModel m;
  m.n = n;
  m.h.resize(static_cast<std::size_t>(n));
  m.offset = u(rng);
  for (auto &h : m.h)
    h = z(rng) < zero_prob ? 0.0 : u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (z(rng) >= zero_prob)
        m.coupling(i, j, u(rng));
  bool any = false;
  for (double h : m.h)
    any = any || h != 0.0;
  if (!any && m.j.empty())
    m.h[0] = 1.0;
  return m;
}

inline holcus::QaoaParams random_params(std::size_t p, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> g(-std::numbers::pi, std::numbers::pi);
  holcus::QaoaParams out;
  for (std::size_t i = 0; i < p; ++i) {
    out.gammas.push_back(g(rng));
    out.betas.push_back(g(rng) / 2.0);
  }
  return out;
}

inline std::vector<C> to_vector(const holcus::StateVector &s) {
  return {s.amplitudes().begin(), s.amplitudes().end()};
}

} // namespace oracle
