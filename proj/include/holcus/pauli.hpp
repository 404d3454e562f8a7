#pragma once

#include <holcus/errors.hpp>

#include <map>
#include <sstream>
#include <string>

namespace holcus {

enum class PauliOp : char { X = 'X', Y = 'Y', Z = 'Z' };

// Tensor product of single-qubit Paulis. Qubits absent from the map carry
// the identity; an empty map is the identity operator.
class PauliString {
public:
  PauliString() = default;

  static PauliString z(int q) { return PauliString{}.with(q, PauliOp::Z); }
  static PauliString zz(int a, int b) {
    return PauliString{}.with(a, PauliOp::Z).with(b, PauliOp::Z);
  }

  PauliString &set(int qubit, PauliOp op) {
    if (qubit < 0)
      throw DomainError("PauliString: negative qubit index");
    ops_[qubit] = op;
    return *this;
  }

  PauliString with(int qubit, PauliOp op) const {
    PauliString copy = *this;
    copy.set(qubit, op);
    return copy;
  }

  const std::map<int, PauliOp> &ops() const noexcept { return ops_; }
  bool is_identity() const noexcept { return ops_.empty(); }
  std::size_t weight() const noexcept { return ops_.size(); }

  // One past the highest qubit touched, 0 for the identity.
  int span() const noexcept {
    return ops_.empty() ? 0 : ops_.rbegin()->first + 1;
  }

  // "Z0 Z3", "I" for the identity.
  std::string to_string() const {
    if (ops_.empty())
      return "I";
    std::ostringstream os;
    bool first = true;
    for (auto [q, op] : ops_) {
      if (!first)
        os << ' ';
      os << static_cast<char>(op) << q;
      first = false;
    }
    return os.str();
  }

  static PauliString parse(const std::string &text) {
    PauliString p;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
      if (tok == "I")
        continue;
      if (tok.size() < 2 || (tok[0] != 'X' && tok[0] != 'Y' && tok[0] != 'Z'))
        throw DomainError("PauliString::parse: bad token '" + tok + "'");
      p.set(std::stoi(tok.substr(1)), static_cast<PauliOp>(tok[0]));
    }
    return p;
  }

  friend bool operator==(const PauliString &, const PauliString &) = default;

private:
  std::map<int, PauliOp> ops_;
};

} // namespace holcus
