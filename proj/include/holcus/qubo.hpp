#pragma once

#include <holcus/errors.hpp>
#include <holcus/random.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace holcus {

/// Cost matrix of min xᵀQx over x ∈ {0,1}^n. Always stored symmetric.
struct QuboInstance {
  int n = 0;
  std::vector<double> q; // row-major n×n
  std::uint64_t seed = 0;

  double operator()(int i, int j) const {
    return q[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  }
  double &operator()(int i, int j) {
    return q[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  }
};

/// H = offset + Σ h_i Z_i + Σ_{i<j} J_ij Z_i Z_j. Spin z_i = +1 is qubit |0⟩,
/// which is x_i = 0.
struct IsingModel {
  int n = 0;
  std::vector<double> h;
  std::map<std::pair<int, int>, double> j;
  double offset = 0.0;

  // Inserts J for the pair in canonical (low, high) order.
  IsingModel &coupling(int a, int b, double value) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n)
      throw DomainError("IsingModel::coupling: invalid pair");
    j[{std::min(a, b), std::max(a, b)}] = value;
    return *this;
  }
};

inline QuboInstance make_qubo(int n, std::vector<double> row_major,
                              std::uint64_t seed = 0) {
  if (n < 1)
    throw DomainError("QUBO needs n >= 1");
  if (row_major.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw DomainError("QUBO matrix must have n*n entries");
  QuboInstance out{n, std::move(row_major), seed};
  // (Q + Qᵀ)/2 has the same quadratic form.
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double s = 0.5 * (out(i, k) + out(k, i));
      out(i, k) = s;
      out(k, i) = s;
    }
  return out;
}

/// Upper triangle (diagonal included) drawn uniformly from (-2, 2), mirrored.
inline QuboInstance random_qubo(int n, std::uint64_t seed) {
  if (n < 1)
    throw DomainError("random_qubo: n must be >= 1");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  QuboInstance out{n, std::vector<double>(static_cast<std::size_t>(n * n)), seed};
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double v = u(rng);
      while (v <= -2.0)
        v = u(rng);
      out(i, k) = v;
      out(k, i) = v;
    }
  return out;
}

inline double qubo_cost(const QuboInstance &q, const std::vector<int> &x) {
  if (x.size() != static_cast<std::size_t>(q.n))
    throw DomainError("qubo_cost: assignment length " + std::to_string(x.size()) +
                      " != n = " + std::to_string(q.n));
  double c = 0.0;
  for (int i = 0; i < q.n; ++i) {
    if (x[static_cast<std::size_t>(i)] == 0)
      continue;
    for (int k = 0; k < q.n; ++k)
      if (x[static_cast<std::size_t>(k)] != 0)
        c += q(i, k);
  }
  return c;
}

// Bit i of `assignment` is x_i.
inline double qubo_cost(const QuboInstance &q, std::uint64_t assignment) {
  double c = 0.0;
  for (int i = 0; i < q.n; ++i) {
    if (!((assignment >> i) & 1U))
      continue;
    c += q(i, i);
    for (int k = 0; k < i; ++k)
      if ((assignment >> k) & 1U)
        c += q(i, k) + q(k, i);
  }
  return c;
}

inline std::vector<int> bits_of(std::uint64_t assignment, int n) {
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] = static_cast<int>((assignment >> i) & 1U);
  return x;
}

// x_{n-1} … x_0, matching the most-significant-qubit-first rendering.
inline std::string bitstring_of(std::uint64_t assignment, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if ((assignment >> i) & 1U)
      s[static_cast<std::size_t>(n - 1 - i)] = '1';
  return s;
}

/// Substitutes x_i = (1 - z_i)/2. The diagonal uses x_i² = x_i.
inline IsingModel qubo_to_ising(const QuboInstance &q) {
  IsingModel m;
  m.n = q.n;
  m.h.assign(static_cast<std::size_t>(q.n), 0.0);
  for (int i = 0; i < q.n; ++i) {
    m.offset += 0.5 * q(i, i);
    m.h[static_cast<std::size_t>(i)] -= 0.5 * q(i, i);
  }
  for (int i = 0; i < q.n; ++i)
    for (int k = i + 1; k < q.n; ++k) {
      const double w = q(i, k) + q(k, i);
      if (w == 0.0)
        continue;
      m.offset += 0.25 * w;
      m.h[static_cast<std::size_t>(i)] -= 0.25 * w;
      m.h[static_cast<std::size_t>(k)] -= 0.25 * w;
      m.j[{i, k}] = 0.25 * w;
    }
  return m;
}

inline double ising_energy(const IsingModel &m, const std::vector<int> &z) {
  if (z.size() != static_cast<std::size_t>(m.n))
    throw DomainError("ising_energy: spin vector length mismatch");
  for (int s : z)
    if (s != 1 && s != -1)
      throw DomainError("ising_energy: spins must be +1 or -1");
  double e = m.offset;
  for (int i = 0; i < m.n; ++i)
    e += m.h[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
  for (const auto &[ij, v] : m.j)
    e += v * z[static_cast<std::size_t>(ij.first)] *
         z[static_cast<std::size_t>(ij.second)];
  return e;
}

// Energy of computational basis state |index⟩ (bit i set means z_i = -1).
inline double ising_energy(const IsingModel &m, std::uint64_t index) {
  auto z = [&](int i) { return ((index >> i) & 1U) ? -1.0 : 1.0; };
  double e = m.offset;
  for (int i = 0; i < m.n; ++i)
    e += m.h[static_cast<std::size_t>(i)] * z(i);
  for (const auto &[ij, v] : m.j)
    e += v * z(ij.first) * z(ij.second);
  return e;
}

inline std::vector<int> spins_of(std::uint64_t index, int n) {
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] = ((index >> i) & 1U) ? -1 : 1;
  return z;
}

/// Diagonal of H_P in the computational basis, offset included.
inline std::vector<double> ising_diagonal(const IsingModel &m) {
  if (m.n > 26)
    throw CapacityError("ising_diagonal: n too large");
  std::vector<double> d(std::size_t{1} << m.n);
  for (std::uint64_t i = 0; i < d.size(); ++i)
    d[i] = ising_energy(m, i);
  return d;
}

inline constexpr int kBruteForceMaxN = 24;

struct BruteForceResult {
  std::uint64_t assignment = 0;
  std::string bits;
  double cost = 0.0;
};

/// Exhaustive minimum; ties go to the numerically smallest assignment.
inline BruteForceResult brute_force_min(const QuboInstance &q) {
  if (q.n > kBruteForceMaxN)
    throw CapacityError("brute_force_min: n = " + std::to_string(q.n) +
                        " exceeds guard of " + std::to_string(kBruteForceMaxN));
  BruteForceResult best{0, {}, qubo_cost(q, std::uint64_t{0})};
  const std::uint64_t count = std::uint64_t{1} << q.n;
  for (std::uint64_t a = 1; a < count; ++a) {
    const double c = qubo_cost(q, a);
    if (c < best.cost) {
      best.cost = c;
      best.assignment = a;
    }
  }
  best.bits = bitstring_of(best.assignment, q.n);
  return best;
}

// File format: first line n, then n lines of n whitespace-separated numbers.
inline void write_qubo(std::ostream &os, const QuboInstance &q) {
  os << q.n << '\n';
  char buf[40];
  for (int i = 0; i < q.n; ++i) {
    for (int k = 0; k < q.n; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", q(i, k));
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
}

inline QuboInstance read_qubo(std::istream &is) {
  int n = 0;
  if (!(is >> n) || n < 1)
    throw DomainError("read_qubo: bad or missing dimension line");
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (auto &x : v)
    if (!(is >> x))
      throw DomainError("read_qubo: expected " + std::to_string(v.size()) +
                        " matrix entries");
  return make_qubo(n, std::move(v));
}

} // namespace holcus
