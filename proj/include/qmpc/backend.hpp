#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qmpc/pauli.hpp"

namespace qmpc {

enum class BackendKind { Tableau, Dense, AuthWire };

std::string backend_name(BackendKind k);
BackendKind parse_backend(const std::string& name);

// Stable handle of a qubit. Positions inside a backend change as qubits are removed.
using QubitId = uint32_t;
using Qubits = std::vector<QubitId>;

class QuantumState {
 public:
  virtual ~QuantumState() = default;

  virtual BackendKind kind() const = 0;
  virtual size_t num_qubits() const = 0;
  virtual std::unique_ptr<QuantumState> clone() const = 0;

  // Appends fresh qubits in |0>.
  virtual Qubits allocate(size_t count) = 0;
  virtual void apply_gate(GateKind kind, QubitId q0, QubitId q1 = 0) = 0;
  virtual void apply_clifford(const CliffordOp& c, const Qubits& qubits) = 0;
  virtual void apply_pauli(const PauliOp& p, const Qubits& qubits) = 0;
  // Destructive computational-basis measurement: the measured qubits are removed.
  virtual BitVec measure_z(const Qubits& qubits, Rng& rng) = 0;
  // Probability that a Z measurement of q yields 1.
  virtual double prob_one(QubitId q) const = 0;
  // Amplitudes with qubits[0] as the most significant tensor factor; qubits must cover the state.
  virtual Vector to_statevector(const Qubits& qubits) const = 0;

  bool contains(QubitId q) const { return q < pos_.size() && pos_[q] >= 0; }
  size_t position(QubitId q) const;
  Qubits live_qubits() const { return ids_; }

 protected:
  QubitId add_qubit();
  void remove_position(size_t p);

  std::vector<int64_t> pos_;
  std::vector<QubitId> ids_;
};

// Aaronson-Gottesman tableau with destabilizer and stabilizer rows.
class StabilizerState : public QuantumState {
 public:
  StabilizerState() = default;
  explicit StabilizerState(size_t m) { allocate(m); }

  BackendKind kind() const override { return BackendKind::Tableau; }
  size_t num_qubits() const override { return ids_.size(); }
  std::unique_ptr<QuantumState> clone() const override { return std::make_unique<StabilizerState>(*this); }

  Qubits allocate(size_t count) override;
  void apply_gate(GateKind kind, QubitId q0, QubitId q1 = 0) override;
  void apply_clifford(const CliffordOp& c, const Qubits& qubits) override;
  void apply_pauli(const PauliOp& p, const Qubits& qubits) override;
  BitVec measure_z(const Qubits& qubits, Rng& rng) override;
  double prob_one(QubitId q) const override;
  Vector to_statevector(const Qubits& qubits) const override;

  // Appends other as a tensor factor; returns the new ids in other's position order.
  Qubits absorb(const StabilizerState& other);

  const PauliOp& stabilizer(size_t i) const { return stab_[i]; }
  const PauliOp& destabilizer(size_t i) const { return destab_[i]; }
  bool is_consistent() const;

 private:
  bool measure_one(size_t q, Rng& rng);

  std::vector<PauliOp> destab_;
  std::vector<PauliOp> stab_;
  PauliOp scratch_in_;
  PauliOp scratch_out_;
};

inline size_t dense_backend_limit = 20;

// Statevector; qubit at position p is bit p of the basis index.
class DenseState : public QuantumState {
 public:
  DenseState() : amp_(1, cplx(1, 0)) {}
  explicit DenseState(size_t m) : DenseState() { allocate(m); }

  static DenseState zero(size_t m) { return DenseState(m); }
  static DenseState magic_t();
  // Amplitudes with qubit 0 as the most significant factor.
  static DenseState from_amplitudes(const Vector& amps);

  BackendKind kind() const override { return BackendKind::Dense; }
  size_t num_qubits() const override { return ids_.size(); }
  std::unique_ptr<QuantumState> clone() const override { return std::make_unique<DenseState>(*this); }

  Qubits allocate(size_t count) override;
  // Appends qubits holding the given amplitudes (first factor most significant).
  Qubits allocate_state(const Vector& amps);
  void apply_gate(GateKind kind, QubitId q0, QubitId q1 = 0) override;
  void apply_clifford(const CliffordOp& c, const Qubits& qubits) override;
  void apply_pauli(const PauliOp& p, const Qubits& qubits) override;
  BitVec measure_z(const Qubits& qubits, Rng& rng) override;
  double prob_one(QubitId q) const override;
  Vector to_statevector(const Qubits& qubits) const override;

  // u acts on qubits with qubits[0] as its most significant factor.
  void apply_gate_dense(const Matrix& u, const Qubits& qubits);
  void apply_t(QubitId q, bool dagger = false);
  // Non-destructive Z measurement.
  bool collapse_z(QubitId q, Rng& rng);
  // Projects q onto |bit> and renormalizes; returns the probability of that branch.
  double postselect_z(QubitId q, bool bit);
  // 0 for |T>, 1 for |T-perp>; the qubit is left collapsed in that basis.
  bool measure_t_basis(QubitId q, Rng& rng);
  // Drops a qubit known to be in a computational basis state.
  void discard(QubitId q, Rng& rng) { measure_z({q}, rng); }
  double norm() const;
  const std::vector<cplx>& raw() const { return amp_; }

 private:
  void apply_1q(const cplx u[4], size_t p);
  std::vector<cplx> amp_;
};

// Symbolic ciphertext pad * key * (logical qubit (x) X^t |0^n>) of the Clifford code.
struct AuthWire {
  QuantumState* logical = nullptr;
  QubitId logical_ref = 0;
  CliffordOp key;
  PauliOp trap_error;
  PauliOp pad;

  size_t traps() const { return key.qubits() - 1; }
};

AuthWire make_authwire(QuantumState& logical, QubitId ref, const CliffordOp& key);
// Folds a ciphertext Pauli through the key; the data part acts on the logical qubit.
AuthWire& authwire_apply_attack(AuthWire& w, const PauliOp& p);
// True iff decoding with the wire's key would see all-zero traps.
bool authwire_accepts(const AuthWire& w);

}  // namespace qmpc
