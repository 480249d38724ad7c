#include <cmath>
#include <sstream>

#include "qmpc/protocol.hpp"

namespace qmpc {

std::set<int> CircuitIR::wires() const {
  std::set<int> out;
  for (const auto& [w, p] : inputs) out.insert(w);
  out.insert(ancillas.begin(), ancillas.end());
  for (const auto& [w, p] : outputs) out.insert(w);
  out.insert(discards.begin(), discards.end());
  return out;
}

size_t CircuitIR::t_count() const {
  size_t c = 0;
  for (const auto& op : ops) c += op.kind == OpKind::T;
  return c;
}

bool CircuitIR::clifford_only() const { return t_count() == 0; }

std::vector<std::string> CircuitIR::labels() const {
  std::vector<std::string> out;
  for (const auto& op : ops) {
    if (op.kind == OpKind::Measure) out.push_back(op.label);
  }
  return out;
}

namespace {

[[noreturn]] void bad_op(int line, const std::string& what) {
  if (line > 0) throw ParseError(line, what);
  throw InvalidArgument(what);
}

}  // namespace

void CircuitIR::validate() const {
  if (players < 2) throw ConfigError("circuit needs at least 2 players");
  for (const auto& [w, p] : inputs) {
    if (ancillas.count(w)) throw PartitionViolation("wire " + std::to_string(w) + " is both input and ancilla");
    if (p < 1 || p > players) throw PartitionViolation("wire " + std::to_string(w) + " input player out of range");
  }
  for (const auto& [w, p] : outputs) {
    if (discards.count(w)) throw PartitionViolation("wire " + std::to_string(w) + " is both output and discard");
    if (p < 1 || p > players) throw PartitionViolation("wire " + std::to_string(w) + " output player out of range");
  }
  for (int w : wires()) {
    if (!inputs.count(w) && !ancillas.count(w)) {
      throw PartitionViolation("wire " + std::to_string(w) + " has no input or ancilla declaration");
    }
    if (!outputs.count(w) && !discards.count(w)) {
      throw PartitionViolation("wire " + std::to_string(w) + " has no output or discard declaration");
    }
  }
  std::set<int> dead;
  std::set<std::string> seen;
  auto check_wire = [&](int w, int line) {
    if (!inputs.count(w) && !ancillas.count(w)) {
      bad_op(line, "undeclared wire " + std::to_string(w));
    }
    if (dead.count(w)) {
      bad_op(line, "wire " + std::to_string(w) + " used after measurement");
    }
  };
  for (const auto& op : ops) {
    check_wire(op.w0, op.line);
    if (!op.ctrl.empty() && !seen.count(op.ctrl)) {
      bad_op(op.line, "control " + op.ctrl + " is not an earlier measurement");
    }
    switch (op.kind) {
      case OpKind::Clifford:
        if (!is_single_qubit(op.gate)) bad_op(op.line, "CLIFF needs a one-qubit gate");
        break;
      case OpKind::Cnot:
        check_wire(op.w1, op.line);
        if (op.w0 == op.w1) bad_op(op.line, "CNOT on a single wire");
        break;
      case OpKind::Measure:
        if (op.label.empty()) bad_op(op.line, "measurement without label");
        if (seen.count(op.label)) bad_op(op.line, "duplicate label " + op.label);
        if (outputs.count(op.w0)) {
          throw PartitionViolation("wire " + std::to_string(op.w0) + " is measured but declared as output");
        }
        seen.insert(op.label);
        dead.insert(op.w0);
        break;
      case OpKind::T:
        if (!op.ctrl.empty()) bad_op(op.line, "T gates take no control");
        break;
    }
  }
}

std::string CircuitIR::to_text() const {
  std::ostringstream os;
  os << "PLAYERS " << players << "\n";
  for (int w : wires()) {
    if (inputs.count(w)) os << "WIRE w" << w << " IN " << inputs.at(w) << "\n";
    if (ancillas.count(w)) os << "WIRE w" << w << " ANCILLA\n";
    if (outputs.count(w)) os << "WIRE w" << w << " OUT " << outputs.at(w) << "\n";
    if (discards.count(w)) os << "WIRE w" << w << " DISCARD\n";
  }
  for (const auto& op : ops) {
    switch (op.kind) {
      case OpKind::Clifford:
        os << "CLIFF " << gate_name(op.gate) << " w" << op.w0;
        break;
      case OpKind::Cnot:
        os << "CNOT w" << op.w0 << " w" << op.w1;
        break;
      case OpKind::Measure:
        os << "MEAS w" << op.w0 << " -> " << op.label;
        break;
      case OpKind::T:
        os << "T w" << op.w0;
        break;
    }
    if (!op.ctrl.empty()) os << " ctrl=" << op.ctrl;
    os << "\n";
  }
  return os.str();
}

CircuitIR& CircuitIR::cliff(GateKind g, int w, std::string ctrl) {
  CircuitOp op;
  op.kind = OpKind::Clifford;
  op.gate = g;
  op.w0 = w;
  op.ctrl = std::move(ctrl);
  ops.push_back(op);
  return *this;
}

CircuitIR& CircuitIR::cnot(int c, int t, std::string ctrl) {
  CircuitOp op;
  op.kind = OpKind::Cnot;
  op.gate = GateKind::CNOT;
  op.w0 = c;
  op.w1 = t;
  op.ctrl = std::move(ctrl);
  ops.push_back(op);
  return *this;
}

CircuitIR& CircuitIR::measure(int w, std::string label) {
  CircuitOp op;
  op.kind = OpKind::Measure;
  op.w0 = w;
  op.label = std::move(label);
  ops.push_back(op);
  return *this;
}

CircuitIR& CircuitIR::t(int w) {
  CircuitOp op;
  op.kind = OpKind::T;
  op.w0 = w;
  ops.push_back(op);
  return *this;
}

Vector InputState::vector() const {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx w = std::polar(1.0, M_PI / 4);
  Vector v(2);
  switch (kind) {
    case Kind::Zero:
      v << 1, 0;
      break;
    case Kind::One:
      v << 0, 1;
      break;
    case Kind::Plus:
      v << r, r;
      break;
    case Kind::Minus:
      v << r, -r;
      break;
    case Kind::PlusI:
      v << r, cplx(0, r);
      break;
    case Kind::Magic:
      v << r, r * w;
      break;
    case Kind::MagicPerp:
      v << r, -r * w;
      break;
    case Kind::Amplitudes:
      if (amps.size() != 2) throw InvalidDimension("input state must have 2 amplitudes");
      return amps / amps.norm();
  }
  return v;
}

}  // namespace qmpc
