#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qmpc/gf2.hpp"

namespace qmpc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// i^phase X^x Z^z on m qubits.
struct PauliOp {
  BitVec x;
  BitVec z;
  uint8_t phase = 0;

  PauliOp() = default;
  explicit PauliOp(size_t m) : x(m), z(m) {}
  PauliOp(BitVec x_, BitVec z_, int phase_ = 0);

  static PauliOp identity(size_t m) { return PauliOp(m); }
  // Letters I, X, Y, Z per qubit with an optional leading sign ("-XZ", "+iY").
  static PauliOp from_label(std::string_view label);
  static PauliOp single(size_t m, size_t q, char letter);
  static PauliOp random(size_t m, Rng& rng);
  // Parses "X:0110 Z:0011 ph:2".
  static PauliOp parse(std::string_view text);

  size_t size() const { return x.size(); }
  bool is_identity() const { return x.none() && z.none() && (phase & 3) == 0; }
  bool is_trivial() const { return x.none() && z.none(); }
  // Hermitian operators carry phase congruent to popcount(x & z) mod 2.
  bool is_hermitian() const { return ((phase + (x & z).popcount()) & 1) == 0; }
  // Sign bit r in (-1)^r i^{|x&z|} X^x Z^z; requires a Hermitian operator.
  bool sign() const;
  size_t weight() const;

  PauliOp& operator*=(const PauliOp& o);
  friend PauliOp operator*(PauliOp a, const PauliOp& b) { return a *= b; }
  bool operator==(const PauliOp& o) const { return x == o.x && z == o.z && ((phase - o.phase) & 3) == 0; }
  bool operator!=(const PauliOp& o) const { return !(*this == o); }
  bool operator<(const PauliOp& o) const;

  bool commutes(const PauliOp& o) const;
  PauliOp restrict(const std::vector<size_t>& qubits) const;
  PauliOp slice(size_t begin, size_t len) const;
  static PauliOp tensor(const PauliOp& a, const PauliOp& b);

  // In-place conjugation P -> G P G^dagger by a named gate.
  void conj_h(size_t q);
  void conj_s(size_t q);
  void conj_sdg(size_t q);
  void conj_x(size_t q) { phase = (phase + 2 * z.get(q)) & 3; }
  void conj_z(size_t q) { phase = (phase + 2 * x.get(q)) & 3; }
  void conj_y(size_t q) { phase = (phase + 2 * (x.get(q) ^ z.get(q))) & 3; }
  void conj_cnot(size_t c, size_t t);

  std::string to_text() const;
  std::string to_label() const;
  Matrix to_dense() const;
};

// Symplectic inner product: 1 iff a and b anticommute.
bool symplectic_product(const PauliOp& a, const PauliOp& b);

// Generator gates of the Clifford group used in circuits.
enum class GateKind { I, X, Y, Z, H, S, SDG, CNOT };

struct Gate {
  GateKind kind;
  size_t q0 = 0;
  size_t q1 = 0;
  bool operator==(const Gate& o) const = default;
};

std::string gate_name(GateKind k);
GateKind parse_gate_name(std::string_view name);
bool is_single_qubit(GateKind k);

struct CliffordCircuit {
  size_t qubits = 0;
  std::vector<Gate> gates;
};

// An m-qubit Clifford, stored as the images of X_0..X_{m-1}, Z_0..Z_{m-1}.
class CliffordOp {
 public:
  CliffordOp() = default;
  explicit CliffordOp(size_t m);

  static CliffordOp identity(size_t m) { return CliffordOp(m); }
  static CliffordOp gate(size_t m, GateKind kind, size_t q0, size_t q1 = 0);
  static CliffordOp h(size_t m, size_t q) { return gate(m, GateKind::H, q); }
  static CliffordOp s(size_t m, size_t q) { return gate(m, GateKind::S, q); }
  static CliffordOp cnot(size_t m, size_t c, size_t t) { return gate(m, GateKind::CNOT, c, t); }
  static CliffordOp pauli(const PauliOp& p);
  static CliffordOp from_circuit(const CliffordCircuit& circ);
  // Symplectic matrix with row j the (x|z) image of generator j, plus sign bits.
  static CliffordOp from_tableau(const BitMatrix& symplectic, const BitVec& signs);

  size_t qubits() const { return m_; }
  const PauliOp& image(size_t gen) const { return images_[gen]; }
  const PauliOp& image_x(size_t q) const { return images_[q]; }
  const PauliOp& image_z(size_t q) const { return images_[m_ + q]; }
  void set_image(size_t gen, PauliOp p) { images_[gen] = std::move(p); }

  BitMatrix symplectic() const;
  BitVec phases() const;
  bool is_valid() const;
  bool is_identity() const;

  bool operator==(const CliffordOp& o) const { return m_ == o.m_ && images_ == o.images_; }
  bool operator!=(const CliffordOp& o) const { return !(*this == o); }
  bool operator<(const CliffordOp& o) const;

  // Applies a gate after this Clifford: this <- G o this.
  void then(GateKind kind, size_t q0, size_t q1 = 0);

  std::string to_hex() const;
  static CliffordOp from_hex(std::string_view text);

 private:
  size_t m_ = 0;
  std::vector<PauliOp> images_;
};

CliffordOp compose(const CliffordOp& a, const CliffordOp& b);
CliffordOp inverse(const CliffordOp& c);
PauliOp conjugate_pauli(const CliffordOp& c, const PauliOp& p);
CliffordOp random_clifford(size_t m, Rng& rng);
CliffordOp tensor(const CliffordOp& a, const CliffordOp& b);
// Embeds c acting on the listed qubits of an m-qubit register.
CliffordOp embed(const CliffordOp& c, size_t m, const std::vector<size_t>& qubits);
// Gate sequence (first gate applied first) whose product equals c up to global phase.
CliffordCircuit decompose(const CliffordOp& c);
// Every element of the m-qubit Clifford group with sign bits; m <= 2.
std::vector<CliffordOp> clifford_group(size_t m);

inline size_t dense_limit = 12;
Matrix to_dense(const CliffordOp& c);

// Conjugation-equivalence of dense unitaries up to global phase.
bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol = 1e-9);

struct TwirlStats {
  size_t states = 0;
  double max_distance = 0.0;
  double mean_distance = 0.0;
};

// Distance between the Pauli-averaged state and the maximally mixed state.
double pauli_twirl_distance(const Matrix& rho, size_t m, size_t samples, Rng& rng);
TwirlStats pauli_twirl_check(size_t m, size_t trials, Rng& rng, size_t samples = 0);

// Returns P|psi> with qubit 0 as the most significant factor.
Vector apply_pauli_vector(const PauliOp& p, const Vector& psi);

Vector random_state(size_t m, Rng& rng);
Matrix random_unitary(size_t dim, Rng& rng);
double trace_norm(const Matrix& a);

}  // namespace qmpc
