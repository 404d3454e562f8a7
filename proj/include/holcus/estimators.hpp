#pragma once

#include <holcus/circuit.hpp>
#include <holcus/errors.hpp>
#include <holcus/lcu.hpp>
#include <holcus/parallel.hpp>
#include <holcus/qaoa.hpp>
#include <holcus/qubo.hpp>
#include <holcus/random.hpp>
#include <holcus/statevector.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holcus {

enum class Method { raw, hadamard, holcus, holcus_div };
enum class Part { real, imaginary };

inline const char *to_string(Method m) {
  switch (m) {
  case Method::raw: return "raw";
  case Method::hadamard: return "hadamard";
  case Method::holcus: return "holcus";
  case Method::holcus_div: return "holcus_div";
  }
  return "?";
}

inline std::optional<Method> method_from_string(const std::string &s) {
  for (auto m : {Method::raw, Method::hadamard, Method::holcus, Method::holcus_div})
    if (s == to_string(m))
      return m;
  return std::nullopt;
}

struct EstimatorConfig {
  Method method = Method::holcus;
  std::optional<std::uint64_t> shots; // nullopt: exact probabilities
  std::uint64_t seed = 0;
  Part part = Part::real;
  SlotLayout layout = SlotLayout::shifted; // holcus only
  double group_tol = kDefaultGroupingTol;  // holcus_div only
  bool nearest_neighbor_ladder = true;     // holcus_div uniform prep variant
  int threads = 1;

  bool exact() const noexcept { return !shots.has_value(); }
};

struct EstimateResult {
  double value = 0.0;
  double std_error = 0.0;
  int circuits_used = 0;
  std::uint64_t shots_used = 0;
  int max_qubits = 0;
  std::vector<ResourceReport> resources;
};

namespace detail {

struct HadamardReadout {
  double p0 = 0.0;
  double variance = 0.0; // of 2·P̂(0)-1 for one circuit
};

inline HadamardReadout read_hadamard_qubit(const Circuit &c, int hadamard_qubit,
                                           const EstimatorConfig &cfg,
                                           std::uint64_t seed) {
  const StateVector out = run(c);
  const auto dist = marginal_probabilities(out, {hadamard_qubit});
  if (cfg.exact())
    return {dist[0], 0.0};
  const auto counts = sample_counts(dist, *cfg.shots, seed);
  const double p0 = static_cast<double>(counts[0]) / static_cast<double>(*cfg.shots);
  return {p0, 4.0 * p0 * (1.0 - p0) / static_cast<double>(*cfg.shots)};
}

inline void check_prep(const Circuit &prep, const IsingModel &model) {
  if (prep.num_qubits() != model.n)
    throw DomainError("estimator: prep has " + std::to_string(prep.num_qubits()) +
                      " qubits, model has " + std::to_string(model.n));
}

inline double signed_coefficient(const LcuTerm &t) { return t.alpha * std::cos(t.theta); }

inline bool is_constant(const IsingModel &model) {
  for (double h : model.h)
    if (h != 0.0)
      return false;
  for (const auto &[ij, v] : model.j)
    if (v != 0.0)
      return false;
  return true;
}

// H_P = offset·1 needs no circuit at all.
inline EstimateResult constant_estimate(const IsingModel &model, Part part) {
  EstimateResult r;
  r.value = part == Part::real ? model.offset : 0.0;
  return r;
}

// Hadamard register layout: state [0, n), LCU ancillas [n, n+m), Hadamard
// qubit n+m. `prepare` and `unprepare` act on the ancillas (and may use the
// Hadamard qubit as control); `select` acts on ancillas and state.
inline Circuit assemble_holcus(const Circuit &prep, int m, Part part,
                               const Circuit &prepare, const Circuit &select,
                               const Circuit &unprepare) {
  const int n = prep.num_qubits();
  const int hq = n + m;
  Circuit c(n + m + 1);
  c.set_registers({QubitSpan{hq, 1}, QubitSpan{n, m}, QubitSpan{0, n}});
  // ψ acts on disjoint qubits, so emitting it first is the same circuit and
  // lets the simulator run it before the upper registers become active.
  c.append(prep, 0);
  c.append(Gate::h(hq));
  if (part == Part::imaginary)
    c.append(Gate::s_dagger(hq));
  c.append(prepare);
  c.append(select);
  c.append(unprepare);
  c.append(Gate::h(hq));
  return c;
}

inline std::vector<int> ancilla_qubits(int n, int m) {
  std::vector<int> a(static_cast<std::size_t>(m));
  for (int b = 0; b < m; ++b)
    a[static_cast<std::size_t>(b)] = n + b;
  return a;
}

} // namespace detail

/// Single Hadamard test for ⟨ψ|U|ψ⟩ with ψ = prep|0⟩. Ancilla is qubit n.
inline Circuit hadamard_test_circuit(const Circuit &prep, const PauliString &unitary,
                                     Part part = Part::real) {
  const int n = prep.num_qubits();
  if (unitary.span() > n)
    throw DomainError("hadamard_test_circuit: Pauli acts outside the prep register");
  Circuit c(n + 1);
  c.set_registers({QubitSpan{n, 1}, std::nullopt, QubitSpan{0, n}});
  c.append(prep, 0);
  c.append(Gate::h(n));
  if (part == Part::imaginary)
    c.append(Gate::s_dagger(n));
  if (auto g = pauli_gate(unitary, QubitSpan{0, n}))
    c.append(g->controlled(n));
  c.append(Gate::h(n));
  return c;
}

/// Hadamard + LCU circuit for Re or Im of ⟨ψ|A/𝒩|ψ⟩, read from the single
/// Hadamard qubit (index n+m). Both state preparations are controlled by the
/// Hadamard qubit; ψ is prepared uncontrolled.
inline Circuit holcus_circuit(const Circuit &prep, const LcuDecomposition &dec,
                              Part part = Part::real) {
  const int n = prep.num_qubits();
  if (dec.state_span() > n)
    throw DomainError("holcus_circuit: decomposition acts outside the prep register");
  const int m = dec.num_ancillas();
  const int width = n + m + 1;
  const int hq = n + m;
  const auto anc = detail::ancilla_qubits(n, m);
  const auto pu = build_prep_unitaries(dec);
  const RegisterMap regs{QubitSpan{hq, 1}, QubitSpan{n, m}, QubitSpan{0, n}};

  Circuit prepare(width), unprepare(width);
  prepare.append(Gate::dense(pu.v, anc, "V").controlled(hq));
  unprepare.append(Gate::dense(pu.v_hat.adjoint(), anc, "V_hat^dag").controlled(hq));
  return detail::assemble_holcus(prep, m, part, prepare,
                                 build_select_circuit(dec, width, regs), unprepare);
}

/// Uniform-coefficient variant for a power-of-two group of unitaries: the
/// controlled ladder fills the low log2(M) ancillas, a CNOT from the Hadamard
/// qubit raises the flag ancilla, and the common phase e^{iθ} becomes a phase
/// gate on the Hadamard qubit.
inline Circuit holcus_uniform_circuit(const Circuit &prep, const LcuDecomposition &dec,
                                      bool nearest_neighbor, Part part = Part::real) {
  if (dec.layout() != SlotLayout::flagged)
    throw DomainError("holcus_uniform_circuit: decomposition must use flagged layout");
  const int n = prep.num_qubits();
  if (dec.state_span() > n)
    throw DomainError("holcus_uniform_circuit: decomposition acts outside the prep register");
  const int m = dec.num_ancillas();
  const int j = m - 1;
  const int width = n + m + 1;
  const int hq = n + m;
  const RegisterMap regs{QubitSpan{hq, 1}, QubitSpan{n, m}, QubitSpan{0, n}};

  Circuit uniform(width);
  if (j > 0) {
    std::vector<int> map = detail::ancilla_qubits(n, j);
    map.push_back(hq);
    uniform.append(build_uniform_prep_circuit(j, nearest_neighbor), map);
  }
  uniform.append(Gate::x(n + j).controlled(hq));

  const double theta = dec.terms().front().theta;
  Circuit prepare = uniform;
  if (std::remainder(theta, 2.0 * std::numbers::pi) != 0.0) {
    const std::array<Complex, 2> d = {1.0, std::polar(1.0, theta)};
    prepare.append(Gate::dense(Matrix::diagonal(d), {hq}, "phase"));
  }
  return detail::assemble_holcus(prep, m, part, prepare,
                                 build_select_circuit(dec, width, regs), adjoint(uniform));
}

inline EstimateResult estimate_hadamard(const Circuit &prep, const IsingModel &model,
                                        const EstimatorConfig &cfg) {
  detail::check_prep(prep, model);
  if (detail::is_constant(model))
    return detail::constant_estimate(model, cfg.part);
  const auto dec = from_ising(model, SlotLayout::shifted);
  const std::size_t terms = dec.size();
  std::vector<detail::HadamardReadout> reads(terms);
  std::vector<ResourceReport> reports(terms);
  parallel_for(terms, cfg.threads, [&](std::size_t k) {
    const Circuit c = hadamard_test_circuit(prep, dec.terms()[k].unitary, cfg.part);
    reports[k] = resource_report(c);
    reads[k] = detail::read_hadamard_qubit(c, prep.num_qubits(), cfg,
                                           derive_seed(cfg.seed, {k}));
  });

  EstimateResult r;
  r.value = cfg.part == Part::real ? model.offset : 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < terms; ++k) {
    const double c = detail::signed_coefficient(dec.terms()[k]);
    r.value += c * (2.0 * reads[k].p0 - 1.0);
    var += c * c * reads[k].variance;
  }
  r.std_error = std::sqrt(var);
  r.circuits_used = static_cast<int>(terms);
  r.shots_used = cfg.exact() ? 0 : *cfg.shots * terms;
  r.max_qubits = model.n + 1;
  r.resources = std::move(reports);
  return r;
}

inline EstimateResult estimate_holcus(const Circuit &prep, const IsingModel &model,
                                      const EstimatorConfig &cfg) {
  detail::check_prep(prep, model);
  if (detail::is_constant(model))
    return detail::constant_estimate(model, cfg.part);
  const auto dec = from_ising(model, cfg.layout);
  const Circuit c = holcus_circuit(prep, dec, cfg.part);
  const int hq = c.registers().hadamard->first;
  const auto read = detail::read_hadamard_qubit(c, hq, cfg, derive_seed(cfg.seed, {0}));
  const double norm = dec.normalization();

  EstimateResult r;
  r.value = (cfg.part == Part::real ? model.offset : 0.0) + norm * (2.0 * read.p0 - 1.0);
  r.std_error = norm * std::sqrt(read.variance);
  r.circuits_used = 1;
  r.shots_used = cfg.exact() ? 0 : *cfg.shots;
  r.max_qubits = c.num_qubits();
  r.resources = {resource_report(c)};
  return r;
}

/// Decomposition of one coefficient group: flagged layout when the group
/// size is a power of two, shifted otherwise.
inline LcuDecomposition group_decomposition(const LcuDecomposition &dec,
                                            const CoefficientGroup &g) {
  std::vector<LcuTerm> terms;
  for (auto k : g.term_indices)
    terms.push_back({g.common_alpha, g.common_theta, dec.terms()[k].unitary});
  const auto layout = std::has_single_bit(terms.size()) ? SlotLayout::flagged
                                                         : SlotLayout::shifted;
  return LcuDecomposition(std::move(terms), layout);
}

inline EstimateResult estimate_holcus_div(const Circuit &prep, const IsingModel &model,
                                          const EstimatorConfig &cfg) {
  detail::check_prep(prep, model);
  if (detail::is_constant(model))
    return detail::constant_estimate(model, cfg.part);
  const auto dec = from_ising(model, SlotLayout::shifted);
  const auto groups = group_by_coefficient(dec, cfg.group_tol);
  const std::size_t count = groups.size();
  std::vector<detail::HadamardReadout> reads(count);
  std::vector<ResourceReport> reports(count);
  std::vector<double> norms(count);
  parallel_for(count, cfg.threads, [&](std::size_t g) {
    const auto gdec = group_decomposition(dec, groups[g]);
    norms[g] = gdec.normalization();
    const Circuit c =
        gdec.layout() == SlotLayout::flagged
            ? holcus_uniform_circuit(prep, gdec, cfg.nearest_neighbor_ladder, cfg.part)
            : holcus_circuit(prep, gdec, cfg.part);
    reports[g] = resource_report(c);
    reads[g] = detail::read_hadamard_qubit(c, c.registers().hadamard->first, cfg,
                                           derive_seed(cfg.seed, {g}));
  });

  EstimateResult r;
  r.value = cfg.part == Part::real ? model.offset : 0.0;
  double var = 0.0;
  for (std::size_t g = 0; g < count; ++g) {
    r.value += norms[g] * (2.0 * reads[g].p0 - 1.0);
    var += norms[g] * norms[g] * reads[g].variance;
    r.max_qubits = std::max(r.max_qubits, reports[g].qubit_count);
  }
  r.std_error = std::sqrt(var);
  r.circuits_used = static_cast<int>(count);
  r.shots_used = cfg.exact() ? 0 : *cfg.shots * count;
  r.resources = std::move(reports);
  return r;
}

/// Computational-basis sampling of ψ, energy averaged per outcome.
inline EstimateResult estimate_raw(const Circuit &prep, const IsingModel &model,
                                   const EstimatorConfig &cfg) {
  detail::check_prep(prep, model);
  if (cfg.part == Part::imaginary)
    throw DomainError("estimate_raw: basis sampling only yields the real part");
  const StateVector out = run(prep);
  const auto energies = ising_diagonal(model);

  EstimateResult r;
  r.circuits_used = 1;
  r.max_qubits = model.n;
  r.resources = {resource_report(prep)};
  if (cfg.exact()) {
    for (std::size_t i = 0; i < out.dim(); ++i)
      r.value += std::norm(out[i]) * energies[i];
    return r;
  }
  std::vector<int> all(static_cast<std::size_t>(model.n));
  for (int q = 0; q < model.n; ++q)
    all[static_cast<std::size_t>(q)] = q;
  const auto counts = sample_counts(marginal_probabilities(out, all), *cfg.shots,
                                    derive_seed(cfg.seed, {0}));
  const double shots = static_cast<double>(*cfg.shots);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    const double c = static_cast<double>(counts.counts[i]);
    sum += c * energies[i];
    sum_sq += c * energies[i] * energies[i];
  }
  r.value = sum / shots;
  const double var = *cfg.shots > 1
                         ? std::max(0.0, (sum_sq - shots * r.value * r.value) / (shots - 1.0))
                         : 0.0;
  r.std_error = std::sqrt(var / shots);
  r.shots_used = *cfg.shots;
  return r;
}

inline EstimateResult estimate(const Circuit &prep, const IsingModel &model,
                               const EstimatorConfig &cfg) {
  if (cfg.shots && *cfg.shots == 0)
    throw DomainError("estimate: finite shot count must be >= 1");
  switch (cfg.method) {
  case Method::raw: return estimate_raw(prep, model, cfg);
  case Method::hadamard: return estimate_hadamard(prep, model, cfg);
  case Method::holcus: return estimate_holcus(prep, model, cfg);
  case Method::holcus_div: return estimate_holcus_div(prep, model, cfg);
  }
  throw InternalError("estimate: unknown method");
}

} // namespace holcus
