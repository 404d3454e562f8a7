#pragma once

#include <holcus/circuit.hpp>
#include <holcus/errors.hpp>
#include <holcus/qubo.hpp>
#include <holcus/statevector.hpp>

#include <span>
#include <vector>

namespace holcus {

struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t layers() const noexcept { return gammas.size(); }

  // Optimizer view: [γ_0..γ_{p-1}, β_0..β_{p-1}].
  std::vector<double> flatten() const {
    std::vector<double> x(gammas);
    x.insert(x.end(), betas.begin(), betas.end());
    return x;
  }

  static QaoaParams unflatten(std::span<const double> x) {
    if (x.size() % 2 != 0)
      throw DomainError("QaoaParams: flat vector must have even length");
    const auto p = x.size() / 2;
    return {{x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)},
            {x.begin() + static_cast<std::ptrdiff_t>(p), x.end()}};
  }

  static QaoaParams zeros(std::size_t p) { return {std::vector<double>(p), std::vector<double>(p)}; }
};

/// |+⟩^n followed by p layers of e^{iγ_j H_P} (offset dropped, it is a global
/// phase) and e^{iβ_j Σ X}.
inline Circuit build_ansatz(const IsingModel &model, const QaoaParams &params) {
  if (model.n < 1)
    throw DomainError("build_ansatz: model has no variables");
  if (params.gammas.size() != params.betas.size())
    throw DomainError("build_ansatz: " + std::to_string(params.gammas.size()) +
                      " gammas vs " + std::to_string(params.betas.size()) + " betas");
  Circuit c(model.n);
  for (int q = 0; q < model.n; ++q)
    c.append(Gate::h(q));
  for (std::size_t layer = 0; layer < params.layers(); ++layer) {
    const double gamma = params.gammas[layer];
    const double beta = params.betas[layer];
    for (int q = 0; q < model.n; ++q)
      if (const double h = model.h[static_cast<std::size_t>(q)]; h != 0.0)
        c.append(Gate::exp_z(q, gamma * h));
    for (const auto &[ij, v] : model.j)
      if (v != 0.0)
        c.append(Gate::exp_zz(ij.first, ij.second, gamma * v));
    for (int q = 0; q < model.n; ++q)
      c.append(Gate::exp_x(q, beta));
  }
  return c;
}

/// ⟨ψ|H_P|ψ⟩ on the noiseless ansatz output, offset included.
inline double expectation_on_state(const IsingModel &model, const StateVector &state) {
  double e = model.offset;
  for (int q = 0; q < model.n; ++q)
    if (const double h = model.h[static_cast<std::size_t>(q)]; h != 0.0)
      e += h * pauli_expectation(state, PauliString::z(q)).real();
  for (const auto &[ij, v] : model.j)
    if (v != 0.0)
      e += v * pauli_expectation(state, PauliString::zz(ij.first, ij.second)).real();
  return e;
}

inline double exact_expectation(const IsingModel &model, const QaoaParams &params) {
  StateVector::check_width(model.n);
  return expectation_on_state(model, run(build_ansatz(model, params)));
}

} // namespace holcus
