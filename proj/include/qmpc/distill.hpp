#pragma once

#include <map>
#include <string>
#include <vector>

#include "qmpc/backend.hpp"
#include "qmpc/protocol.hpp"

namespace qmpc {

// Magic-state creation with cut-and-choose testing.

struct MagicOptions {
  bool distill = false;
  // On a rejected block, retry with the next unused survivors instead of aborting.
  bool retry = false;
};

struct MagicBatch {
  size_t count = 0;
  std::vector<int> wires;
  std::map<PlayerId, std::vector<size_t>> test_sets;
  std::vector<size_t> survivors;
  std::vector<int> outputs;
  size_t rejected_blocks = 0;
  bool aborted = false;
};

// Copies needed for t magic states: (t + k) n.
size_t magic_copies(size_t t, int k, size_t n);

MagicBatch create_magic_states(Session& s, size_t t, MagicOptions opts = {});

// 15-to-1 block

// Single-qubit |T> = (|0> + w|1>)/sqrt2 and |T-perp> = Z|T>.
Vector magic_vector(bool perp = false);

// Applies PX to each qubit with probability 1/2; returns the applied mask.
BitVec dephase_T(DenseState& st, const Qubits& qubits, Rng& rng);

struct BlockLayout {
  CircuitIR circuit;
  // Wires 0..14 carry the inputs in order.
  int output = 0;
  std::vector<std::string> syndrome;
  std::vector<std::string> coset;
};

// Classically controlled Cliffords and Z measurements only.
const BlockLayout& distill_block();

struct BlockResult {
  bool accept = false;
  QubitId output = 0;
};

BlockResult bk_distill_block(DenseState& st, const Qubits& qubits, Rng& rng);

struct DistillRun {
  std::vector<BlockResult> blocks;
  BitVec dephase;
  std::vector<size_t> permutation;
};

DistillRun distill_circuit(DenseState& st, const Qubits& qubits, size_t t, Rng& rng);

// Logical |T> error of one block at i.i.d. input error eps.
struct DistillEstimate {
  double eps = 0.0;
  size_t trials = 0;
  double accept_rate = 0.0;
  double error = 0.0;
  double ci = 0.0;
};

// Samples the dephasing and the coset outcomes; acceptance and output error are exact per trial.
DistillEstimate distill_quality(double eps, size_t trials, Rng& rng);
// Samples the input errors directly and runs the dense block.
DistillEstimate distill_quality_dense(double eps, size_t trials, Rng& rng);

double distill_threshold();

// Low-weight subspace

// Tr(Pi rho) for the span of T-basis strings with at most l_cut T-perp factors.
double lw_weight(const Vector& psi, size_t m, size_t l_cut);
double lw_weight(const Matrix& rho, size_t m, size_t l_cut);

// T-perp at the listed positions, T elsewhere.
Vector planted_state(size_t m, const std::vector<size_t>& perp);

struct SamplingCheck {
  size_t trials = 0;
  double pass_rate = 0.0;
  // Mean of pass * (1 - weight) with l_cut = floor(delta * (m - k)).
  double violation = 0.0;
  double bound = 0.0;
};

SamplingCheck sampling_bound_check(const Vector& psi, size_t m, size_t k, double delta, size_t trials, Rng& rng);

}  // namespace qmpc
