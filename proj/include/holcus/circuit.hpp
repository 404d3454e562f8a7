#pragma once

#include <holcus/errors.hpp>
#include <holcus/statevector.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace holcus {

enum class GateKind {
  H,
  X,
  Y,
  Z,
  S,
  S_DAGGER,
  EXP_X,  // e^{iφX}
  EXP_Z,  // e^{iφZ}
  EXP_ZZ, // e^{iφ Z⊗Z}
  SWAP,
  DENSE,
};

inline const char *to_string(GateKind k) {
  switch (k) {
  case GateKind::H: return "H";
  case GateKind::X: return "X";
  case GateKind::Y: return "Y";
  case GateKind::Z: return "Z";
  case GateKind::S: return "S";
  case GateKind::S_DAGGER: return "S_DAGGER";
  case GateKind::EXP_X: return "EXP_X";
  case GateKind::EXP_Z: return "EXP_Z";
  case GateKind::EXP_ZZ: return "EXP_ZZ";
  case GateKind::SWAP: return "SWAP";
  case GateKind::DENSE: return "DENSE";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from_string(const std::string &s) {
  static constexpr std::array kAll = {
      GateKind::H,      GateKind::X,     GateKind::Y,     GateKind::Z,
      GateKind::S,      GateKind::S_DAGGER, GateKind::EXP_X, GateKind::EXP_Z,
      GateKind::EXP_ZZ, GateKind::SWAP,  GateKind::DENSE};
  for (auto k : kAll)
    if (s == to_string(k))
      return k;
  return std::nullopt;
}

inline bool is_parameterized(GateKind k) {
  return k == GateKind::EXP_X || k == GateKind::EXP_Z || k == GateKind::EXP_ZZ;
}

inline std::size_t arity(GateKind k) {
  return (k == GateKind::EXP_ZZ || k == GateKind::SWAP) ? 2 : 1;
}

namespace detail {

inline Matrix fixed_matrix(GateKind kind, double phi) {
  using namespace std::complex_literals;
  const double r = std::numbers::sqrt2 / 2.0;
  switch (kind) {
  case GateKind::H: return Matrix(2, {r, r, r, -r});
  case GateKind::X: return Matrix(2, {0.0, 1.0, 1.0, 0.0});
  case GateKind::Y: return Matrix(2, {0.0, -1i, 1i, 0.0});
  case GateKind::Z: return Matrix(2, {1.0, 0.0, 0.0, -1.0});
  case GateKind::S: return Matrix(2, {1.0, 0.0, 0.0, 1i});
  case GateKind::S_DAGGER: return Matrix(2, {1.0, 0.0, 0.0, -1i});
  case GateKind::EXP_X: {
    const Complex c = std::cos(phi), s = 1i * std::sin(phi);
    return Matrix(2, {c, s, s, c});
  }
  case GateKind::EXP_Z: {
    const Complex p = std::polar(1.0, phi);
    return Matrix(2, {p, 0.0, 0.0, std::conj(p)});
  }
  case GateKind::EXP_ZZ: {
    const Complex p = std::polar(1.0, phi), q = std::conj(p);
    const std::array<Complex, 4> d = {p, q, q, p};
    return Matrix::diagonal(d);
  }
  case GateKind::SWAP:
    return Matrix(4, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
                      0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  case GateKind::DENSE: break;
  }
  throw InternalError("fixed_matrix: DENSE has no fixed matrix");
}

} // namespace detail

class Gate {
public:
  static Gate h(int q) { return Gate(GateKind::H, {q}); }
  static Gate x(int q) { return Gate(GateKind::X, {q}); }
  static Gate y(int q) { return Gate(GateKind::Y, {q}); }
  static Gate z(int q) { return Gate(GateKind::Z, {q}); }
  static Gate s(int q) { return Gate(GateKind::S, {q}); }
  static Gate s_dagger(int q) { return Gate(GateKind::S_DAGGER, {q}); }
  static Gate exp_x(int q, double phi) { return Gate(GateKind::EXP_X, {q}, phi); }
  static Gate exp_z(int q, double phi) { return Gate(GateKind::EXP_Z, {q}, phi); }
  static Gate exp_zz(int a, int b, double phi) {
    return Gate(GateKind::EXP_ZZ, {a, b}, phi);
  }
  static Gate swap(int a, int b) { return Gate(GateKind::SWAP, {a, b}); }
  static Gate pauli(int q, PauliOp op) {
    switch (op) {
    case PauliOp::X: return x(q);
    case PauliOp::Y: return y(q);
    case PauliOp::Z: return z(q);
    }
    throw InternalError("Gate::pauli: bad op");
  }

  // targets[b] is driven by bit b of the matrix index.
  static Gate dense(Matrix m, std::vector<int> targets, std::string label = {}) {
    if (!std::has_single_bit(m.dim()) ||
        m.dim() != (std::size_t{1} << targets.size()))
      throw DomainError("Gate::dense: matrix dimension " +
                        std::to_string(m.dim()) + " does not match " +
                        std::to_string(targets.size()) + " target(s)");
    Gate g(GateKind::DENSE, std::move(targets), 0.0,
           std::make_shared<const Matrix>(std::move(m)));
    g.label_ = std::move(label);
    return g;
  }

  Gate &control(int qubit, Polarity polarity = Polarity::closed) {
    controls_.push_back({qubit, polarity});
    return *this;
  }
  Gate controlled(int qubit, Polarity polarity = Polarity::closed) const {
    Gate g = *this;
    g.control(qubit, polarity);
    return g;
  }

  GateKind kind() const noexcept { return kind_; }
  const std::vector<int> &targets() const noexcept { return targets_; }
  const std::vector<Control> &controls() const noexcept { return controls_; }
  double param() const noexcept { return param_; }
  const std::string &label() const noexcept { return label_; }
  const Matrix &matrix() const noexcept { return *matrix_; }

  // Highest qubit index referenced, or -1.
  int max_qubit() const noexcept {
    int m = -1;
    for (int t : targets_)
      m = std::max(m, t);
    for (const auto &c : controls_)
      m = std::max(m, c.qubit);
    return m;
  }

  bool touches(int q) const noexcept {
    for (int t : targets_)
      if (t == q)
        return true;
    for (const auto &c : controls_)
      if (c.qubit == q)
        return true;
    return false;
  }

  friend bool operator==(const Gate &a, const Gate &b) {
    return a.kind_ == b.kind_ && a.targets_ == b.targets_ &&
           a.controls_ == b.controls_ && a.param_ == b.param_ &&
           *a.matrix_ == *b.matrix_;
  }

private:
  Gate(GateKind kind, std::vector<int> targets, double param = 0.0,
       std::shared_ptr<const Matrix> m = nullptr)
      : kind_(kind), targets_(std::move(targets)), param_(param),
        matrix_(m ? std::move(m)
                  : std::make_shared<const Matrix>(
                        detail::fixed_matrix(kind, param))) {}

  GateKind kind_;
  std::vector<int> targets_;
  std::vector<Control> controls_;
  double param_ = 0.0;
  std::string label_;
  std::shared_ptr<const Matrix> matrix_;
};

struct QubitSpan {
  int first = 0;
  int count = 0;

  int end() const noexcept { return first + count; }
  int operator[](int i) const noexcept { return first + i; }
  friend bool operator==(const QubitSpan &, const QubitSpan &) = default;
};

// Named registers of a Hadamard/LCU circuit; plain circuits leave them empty.
struct RegisterMap {
  std::optional<QubitSpan> hadamard;
  std::optional<QubitSpan> ancilla;
  std::optional<QubitSpan> state;

  friend bool operator==(const RegisterMap &, const RegisterMap &) = default;
};

struct ResourceReport {
  int gate_count = 0;
  int controlled_gate_count = 0;
  int logical_depth = 0;
  int qubit_count = 0;

  friend bool operator==(const ResourceReport &, const ResourceReport &) = default;
};

class Circuit {
public:
  Circuit() = default;
  explicit Circuit(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1)
      throw DomainError("Circuit: need at least one qubit");
  }

  int num_qubits() const noexcept { return num_qubits_; }
  const std::vector<Gate> &gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }
  const RegisterMap &registers() const noexcept { return registers_; }

  Circuit &append(Gate g) {
    validate_gate(g);
    gates_.push_back(std::move(g));
    return *this;
  }

  // Appends every gate of `sub` with its qubits shifted by `offset`.
  Circuit &append(const Circuit &sub, int offset = 0) {
    if (offset < 0 || sub.num_qubits_ + offset > num_qubits_)
      throw DomainError("Circuit::append: subcircuit of " +
                        std::to_string(sub.num_qubits_) +
                        " qubits does not fit at offset " + std::to_string(offset));
    std::vector<int> map(static_cast<std::size_t>(sub.num_qubits_));
    for (int q = 0; q < sub.num_qubits_; ++q)
      map[static_cast<std::size_t>(q)] = q + offset;
    return append(sub, map);
  }

  // Appends `sub` with qubit q relabelled to map[q].
  Circuit &append(const Circuit &sub, std::span<const int> map) {
    if (map.size() != static_cast<std::size_t>(sub.num_qubits_))
      throw DomainError("Circuit::append: qubit map size mismatch");
    for (const auto &g : sub.gates_)
      append(relabelled(g, map));
    return *this;
  }

  Circuit &set_registers(RegisterMap map) {
    std::vector<QubitSpan> spans;
    for (const auto &s : {map.hadamard, map.ancilla, map.state})
      if (s)
        spans.push_back(*s);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (spans[i].first < 0 || spans[i].count < 0 || spans[i].end() > num_qubits_)
        throw DomainError("Circuit: register span out of range");
      for (std::size_t j = i + 1; j < spans.size(); ++j)
        if (spans[i].first < spans[j].end() && spans[j].first < spans[i].end())
          throw DomainError("Circuit: register spans overlap");
    }
    registers_ = map;
    return *this;
  }

  // Same gates on a wider register.
  Circuit widened(int num_qubits) const {
    if (num_qubits < num_qubits_)
      throw DomainError("Circuit::widened: cannot shrink");
    Circuit c = *this;
    c.num_qubits_ = num_qubits;
    return c;
  }

private:
  static Gate relabelled(const Gate &g, std::span<const int> map) {
    std::vector<int> t = g.targets();
    for (auto &q : t)
      q = map[static_cast<std::size_t>(q)];
    Gate out = g.kind() == GateKind::DENSE ? Gate::dense(g.matrix(), t, g.label())
               : g.kind() == GateKind::EXP_ZZ ? Gate::exp_zz(t[0], t[1], g.param())
               : g.kind() == GateKind::SWAP   ? Gate::swap(t[0], t[1])
                                              : rebuild_single(g, t[0]);
    for (const auto &c : g.controls())
      out.control(map[static_cast<std::size_t>(c.qubit)], c.polarity);
    return out;
  }

  static Gate rebuild_single(const Gate &g, int q) {
    switch (g.kind()) {
    case GateKind::H: return Gate::h(q);
    case GateKind::X: return Gate::x(q);
    case GateKind::Y: return Gate::y(q);
    case GateKind::Z: return Gate::z(q);
    case GateKind::S: return Gate::s(q);
    case GateKind::S_DAGGER: return Gate::s_dagger(q);
    case GateKind::EXP_X: return Gate::exp_x(q, g.param());
    case GateKind::EXP_Z: return Gate::exp_z(q, g.param());
    default: break;
    }
    throw InternalError("rebuild_single: not a single-qubit kind");
  }

  void validate_gate(const Gate &g) const {
    if (g.kind() != GateKind::DENSE && g.targets().size() != arity(g.kind()))
      throw DomainError(std::string("Circuit::append: ") + to_string(g.kind()) +
                        " takes " + std::to_string(arity(g.kind())) + " target(s)");
    detail::check_qubits(num_qubits_, g.targets(), g.controls());
  }

  int num_qubits_ = 0;
  std::vector<Gate> gates_;
  RegisterMap registers_;
};

/// Every gate acquires an extra control on `control_qubit`. The register is
/// widened when the control lies beyond it.
inline Circuit add_control(const Circuit &circuit, int control_qubit,
                           Polarity polarity = Polarity::closed) {
  if (control_qubit < 0)
    throw DomainError("add_control: negative control qubit");
  for (const auto &g : circuit.gates())
    if (g.touches(control_qubit))
      throw DomainError("add_control: qubit " + std::to_string(control_qubit) +
                        " is already used by the circuit");
  Circuit out(std::max(circuit.num_qubits(), control_qubit + 1));
  for (const auto &g : circuit.gates())
    out.append(g.controlled(control_qubit, polarity));
  out.set_registers(circuit.registers());
  return out;
}

/// Reversed gate order with each gate replaced by its adjoint.
inline Circuit adjoint(const Circuit &circuit) {
  Circuit out(circuit.num_qubits());
  const auto &gs = circuit.gates();
  for (auto it = gs.rbegin(); it != gs.rend(); ++it) {
    const Gate &g = *it;
    const auto &t = g.targets();
    Gate inv = [&] {
      switch (g.kind()) {
      case GateKind::S: return Gate::s_dagger(t[0]);
      case GateKind::S_DAGGER: return Gate::s(t[0]);
      case GateKind::EXP_X: return Gate::exp_x(t[0], -g.param());
      case GateKind::EXP_Z: return Gate::exp_z(t[0], -g.param());
      case GateKind::EXP_ZZ: return Gate::exp_zz(t[0], t[1], -g.param());
      case GateKind::DENSE:
        return Gate::dense(g.matrix().adjoint(), t, g.label() + "^dag");
      default: break;
      }
      Gate self = g; // H, X, Y, Z, SWAP are self-inverse
      return self;
    }();
    if (g.kind() != GateKind::H && g.kind() != GateKind::X &&
        g.kind() != GateKind::Y && g.kind() != GateKind::Z &&
        g.kind() != GateKind::SWAP)
      for (const auto &c : g.controls())
        inv.control(c.qubit, c.polarity);
    out.append(std::move(inv));
  }
  out.set_registers(circuit.registers());
  return out;
}

/// Applies the gates in order. Amplitude blocks above the highest qubit
/// touched so far stay zero and are skipped, so qubits that are still |0⟩
/// cost nothing until a gate targets them.
inline StateVector run(const Circuit &circuit, StateVector state) {
  if (state.num_qubits() != circuit.num_qubits())
    throw DomainError("run: circuit has " + std::to_string(circuit.num_qubits()) +
                      " qubits but state has " + std::to_string(state.num_qubits()));
  const auto amps = state.amplitudes();
  std::uint64_t top = 0;
  for (std::uint64_t i = amps.size(); i-- > 0;)
    if (amps[i] != Complex{}) {
      top = i;
      break;
    }
  int active = std::max(1, static_cast<int>(std::bit_width(top)));
  for (const auto &g : circuit.gates()) {
    for (int t : g.targets())
      active = std::max(active, t + 1);
    detail::apply_unitary_active(amps, active, g.matrix(), g.targets(),
                                 g.controls());
  }
  return state;
}

inline StateVector run(const Circuit &circuit) {
  return run(circuit, StateVector::basis(circuit.num_qubits(), 0));
}

/// Gate counts and ASAP depth; every gate is one layer regardless of arity.
inline ResourceReport resource_report(const Circuit &circuit) {
  ResourceReport r;
  r.qubit_count = circuit.num_qubits();
  std::vector<int> level(static_cast<std::size_t>(circuit.num_qubits()), 0);
  for (const auto &g : circuit.gates()) {
    ++r.gate_count;
    if (!g.controls().empty())
      ++r.controlled_gate_count;
    int d = 0;
    for (int t : g.targets())
      d = std::max(d, level[static_cast<std::size_t>(t)]);
    for (const auto &c : g.controls())
      d = std::max(d, level[static_cast<std::size_t>(c.qubit)]);
    ++d;
    for (int t : g.targets())
      level[static_cast<std::size_t>(t)] = d;
    for (const auto &c : g.controls())
      level[static_cast<std::size_t>(c.qubit)] = d;
    r.logical_depth = std::max(r.logical_depth, d);
  }
  return r;
}

// Text format, one gate per line:
//
//   qubits <n>
//   register <hadamard|ancilla|state> <first> <count>
//   <KIND>[(<angle>)] t=<q>[,<q>...] [c=<q>|~<q>[,...]] [l=<label>] [m=<re>:<im>,...]
//
// `~q` marks an open control. DENSE gates carry their matrix row-major and an
// optional label (whitespace is written as '_').
// Lines starting with '#' are comments.
namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    out.push_back(cur);
  return out;
}

} // namespace detail

inline void write_text(std::ostream &os, const Circuit &c) {
  os << "qubits " << c.num_qubits() << '\n';
  const auto &r = c.registers();
  auto reg = [&](const char *name, const std::optional<QubitSpan> &s) {
    if (s)
      os << "register " << name << ' ' << s->first << ' ' << s->count << '\n';
  };
  reg("hadamard", r.hadamard);
  reg("ancilla", r.ancilla);
  reg("state", r.state);
  for (const auto &g : c.gates()) {
    os << to_string(g.kind());
    if (is_parameterized(g.kind()))
      os << '(' << detail::fmt_double(g.param()) << ')';
    os << " t=";
    for (std::size_t i = 0; i < g.targets().size(); ++i)
      os << (i ? "," : "") << g.targets()[i];
    if (!g.controls().empty()) {
      os << " c=";
      for (std::size_t i = 0; i < g.controls().size(); ++i) {
        const auto &ctl = g.controls()[i];
        os << (i ? "," : "") << (ctl.polarity == Polarity::open ? "~" : "")
           << ctl.qubit;
      }
    }
    if (g.kind() == GateKind::DENSE) {
      if (!g.label().empty()) {
        std::string label = g.label();
        std::replace_if(label.begin(), label.end(),
                        [](unsigned char ch) { return std::isspace(ch); }, '_');
        os << " l=" << label;
      }
      os << " m=";
      const auto d = g.matrix().data();
      for (std::size_t i = 0; i < d.size(); ++i)
        os << (i ? "," : "") << detail::fmt_double(d[i].real()) << ':'
           << detail::fmt_double(d[i].imag());
    }
    os << '\n';
  }
}

inline std::string to_text(const Circuit &c) {
  std::ostringstream os;
  write_text(os, c);
  return os.str();
}

inline Circuit read_text(std::istream &is) {
  std::string line;
  std::optional<Circuit> circuit;
  RegisterMap regs;
  int lineno = 0;
  auto fail = [&](const std::string &msg) -> DomainError {
    return DomainError("circuit text line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    try {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "qubits") {
      int n = 0;
      ls >> n;
      circuit.emplace(n);
      continue;
    }
    if (!circuit)
      throw fail("gate before 'qubits' header");
    if (head == "register") {
      std::string name;
      QubitSpan span;
      ls >> name >> span.first >> span.count;
      if (name == "hadamard") regs.hadamard = span;
      else if (name == "ancilla") regs.ancilla = span;
      else if (name == "state") regs.state = span;
      else throw fail("unknown register '" + name + "'");
      continue;
    }
    std::string kind_name = head;
    double param = 0.0;
    if (auto p = head.find('('); p != std::string::npos) {
      kind_name = head.substr(0, p);
      param = std::stod(head.substr(p + 1, head.size() - p - 2));
    }
    const auto kind = gate_kind_from_string(kind_name);
    if (!kind)
      throw fail("unknown gate kind '" + kind_name + "'");
    std::vector<int> targets;
    std::vector<Control> controls;
    std::vector<Complex> mat;
    std::string label;
    std::string field;
    while (ls >> field) {
      if (field.rfind("t=", 0) == 0) {
        for (const auto &s : detail::split(field.substr(2), ','))
          targets.push_back(std::stoi(s));
      } else if (field.rfind("c=", 0) == 0) {
        for (const auto &s : detail::split(field.substr(2), ',')) {
          if (!s.empty() && s[0] == '~')
            controls.push_back({std::stoi(s.substr(1)), Polarity::open});
          else
            controls.push_back({std::stoi(s), Polarity::closed});
        }
      } else if (field.rfind("l=", 0) == 0) {
        label = field.substr(2);
      } else if (field.rfind("m=", 0) == 0) {
        for (const auto &s : detail::split(field.substr(2), ',')) {
          const auto parts = detail::split(s, ':');
          if (parts.size() != 2)
            throw fail("bad matrix entry '" + s + "'");
          mat.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
        }
      } else {
        throw fail("unknown field '" + field + "'");
      }
    }
    std::optional<Gate> g;
    if (*kind == GateKind::DENSE) {
      const auto dim = static_cast<std::size_t>(
          std::llround(std::sqrt(static_cast<double>(mat.size()))));
      g = Gate::dense(Matrix(dim, std::move(mat)), targets, label);
    } else {
      if (targets.size() != arity(*kind))
        throw fail("wrong number of targets");
      switch (*kind) {
      case GateKind::EXP_ZZ: g = Gate::exp_zz(targets[0], targets[1], param); break;
      case GateKind::SWAP: g = Gate::swap(targets[0], targets[1]); break;
      case GateKind::EXP_X: g = Gate::exp_x(targets[0], param); break;
      case GateKind::EXP_Z: g = Gate::exp_z(targets[0], param); break;
      case GateKind::H: g = Gate::h(targets[0]); break;
      case GateKind::X: g = Gate::x(targets[0]); break;
      case GateKind::Y: g = Gate::y(targets[0]); break;
      case GateKind::Z: g = Gate::z(targets[0]); break;
      case GateKind::S: g = Gate::s(targets[0]); break;
      case GateKind::S_DAGGER: g = Gate::s_dagger(targets[0]); break;
      case GateKind::DENSE: break;
      }
    }
    for (const auto &c : controls)
      g->control(c.qubit, c.polarity);
    circuit->append(std::move(*g));
    } catch (const std::logic_error &e) {
      // stoi/stod and gate validation errors get the line number attached
      const std::string msg = e.what();
      if (msg.rfind("circuit text", 0) == 0)
        throw;
      throw fail(msg);
    }
  }
  if (!circuit)
    throw DomainError("circuit text: missing 'qubits' header");
  circuit->set_registers(regs);
  return std::move(*circuit);
}

inline Circuit from_text(const std::string &text) {
  std::istringstream is(text);
  return read_text(is);
}

} // namespace holcus
