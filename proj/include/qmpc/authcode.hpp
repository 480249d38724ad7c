#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qmpc/backend.hpp"
#include "qmpc/gf2.hpp"
#include "qmpc/pauli.hpp"

namespace qmpc {

struct CodeParams {
  size_t n = 1;

  explicit CodeParams(size_t traps);
  size_t qubits() const { return n + 1; }
};

// Appends n |0> traps after plain and applies the key. Returns the register, plaintext first.
Qubits enc(const CodeParams& params, QuantumState& state, QubitId plain, const CliffordOp& key);

struct DecodeOutcome {
  bool accept = false;
  // Unset on reject: the plaintext is replaced by the out-of-band reject marker.
  std::optional<QubitId> plain;
  BitVec traps;
};

// Applies key^dagger and measures the traps; on reject the data qubit is discarded too.
DecodeOutcome dec(const CodeParams& params, QuantumState& state, const Qubits& cipher, const CliffordOp& key, Rng& rng);

// Key-averaged accept probability of a fixed non-identity ciphertext Pauli.
double clifford_accept_surrogate(size_t n);
// Same, restricted to attacks whose logical action on the data is not the identity.
double clifford_altered_surrogate(size_t n);

struct AttackAverage {
  double accept = 0.0;
  double accept_altered = 0.0;
  size_t keys = 0;
};

// Exact average over every key of the 1-trap code.
AttackAverage clifford_attack_exact_n1(const PauliOp& attack);
// Monte Carlo over random keys with physical encode, attack and decode.
AttackAverage clifford_attack_sampled(size_t n, const PauliOp& attack, size_t trials, Rng& rng,
                                      BackendKind backend = BackendKind::Tableau);

enum class FilterKind { FullPauliSet, Id, X, Zero };

struct FilterSpec {
  FilterKind kind = FilterKind::Id;
  size_t s_qubits = 1;
  // Allowed (a, b) pairs for FullPauliSet.
  std::set<std::pair<BitVec, BitVec>> pauli_set;

  static FilterSpec id(size_t s);
  static FilterSpec x(size_t s);
  static FilterSpec zero(size_t s);
  static FilterSpec custom(size_t s, std::set<std::pair<BitVec, BitVec>> set);

  // Whether the component X^a Z^b on S passes the filter with flag 0.
  bool allows(const BitVec& a, const BitVec& b) const;
};

std::string filter_name(FilterKind k);

struct FilterOutcome {
  bool flag = false;
  // Action left on T, up to phase.
  PauliOp residual;
};

// Classical path for a Pauli attack on S (first s qubits) then T.
FilterOutcome pauli_filter(const FilterSpec& spec, const PauliOp& attack);
FilterOutcome zero_filter(const PauliOp& attack, size_t s_qubits);

struct PauliComponent {
  BitVec a;
  BitVec b;
  Matrix u;
};

// U = sum_{a,b} (X^a Z^b)_S (x) U_{a,b}, S being the leading s qubits of u.
std::vector<PauliComponent> pauli_decompose(const Matrix& u, size_t s_qubits);

// Choi matrices of the map T -> TF, block 0 for flag 0 and block 1 for flag 1.
struct FilterChoi {
  Matrix accept;
  Matrix reject;
};

FilterChoi filter_choi_physical(const FilterSpec& spec, const Matrix& u);
FilterChoi filter_choi_analytic(const FilterSpec& spec, const Matrix& u);
// Largest entrywise difference between the two Choi matrices.
double filter_equivalence_check(const FilterSpec& spec, const Matrix& u);

// Permutation unitary |t> -> |g t> on 2n qubits, qubit 0 most significant.
Matrix gl_unitary(const GLElement& g);
// Every element of GL(m, F2); m <= 4.
std::vector<GLElement> gl_group(size_t m);

// Average of U_g rho U_g^dagger over GL(2n) acting on the leading 2n qubits of rho.
// samples = 0 enumerates the whole group.
Matrix gl_twirl(const Matrix& rho, size_t n, size_t samples, Rng& rng);

// Trace distance between L^{Pi_{s,F}}(rho) and L^{Pi_{s,H}}(twirled); rho lives on T1 T2 E.
double gl_test_distance(const Matrix& rho, const Matrix& twirled, size_t n, const BitVec& s);
double gl_twirl_distance(const Matrix& rho, size_t n, const BitVec& s, size_t samples, Rng& rng);
double gl_twirl_bound(size_t n);

}  // namespace qmpc
