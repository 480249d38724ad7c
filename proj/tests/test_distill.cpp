#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "qmpc/distill.hpp"

using namespace qmpc;

namespace {

double sigma(double p, size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n)); }

// Z-type patterns on 15 qubits that pass the four weight-8 checks form the
// [15,11] Hamming code; odd-weight members flip the logical output.
struct HammingOracle {
  std::vector<size_t> all = std::vector<size_t>(16, 0);
  std::vector<size_t> odd = std::vector<size_t>(16, 0);

  HammingOracle() {
    for (uint32_t e = 0; e < (1u << 15); ++e) {
      uint32_t syn = 0;
      for (uint32_t q = 0; q < 15; ++q) {
        if (e >> q & 1) syn ^= q + 1;
      }
      if (syn) continue;
      int w = std::popcount(e);
      ++all[w];
      if (w & 1) ++odd[w];
    }
  }

  double accept(double eps) const { return sum(all, eps); }
  double error(double eps) const { return sum(odd, eps) / sum(all, eps); }

  static double sum(const std::vector<size_t>& a, double eps) {
    double s = 0;
    for (int w = 0; w <= 15; ++w) s += static_cast<double>(a[w]) * std::pow(eps, w) * std::pow(1 - eps, 15 - w);
    return s;
  }
};

const HammingOracle& oracle() {
  static HammingOracle h;
  return h;
}

double t_overlap(const Vector& v) { return std::norm(magic_vector().dot(v)); }

Qubits magic_register(DenseState& st, const std::vector<bool>& perp) {
  Qubits q;
  for (bool p : perp) q.push_back(st.allocate_state(magic_vector(p))[0]);
  return q;
}

}  // namespace

TEST(Oracle, hamming_enumerator) {
  EXPECT_EQ(oracle().all[0], 1u);
  EXPECT_EQ(oracle().all[3], 35u);
  EXPECT_EQ(oracle().all[4], 105u);
  size_t total = 0;
  for (size_t a : oracle().all) total += a;
  EXPECT_EQ(total, 2048u);
}

TEST(Dephase, fixes_both_basis_states) {
  for (bool perp : {false, true}) {
    for (uint64_t seed = 0; seed < 8; ++seed) {
      Rng rng(seed);
      DenseState st;
      Qubits q = magic_register(st, {perp});
      dephase_T(st, q, rng);
      EXPECT_NEAR(std::norm(magic_vector(perp).dot(st.to_statevector(q))), 1.0, 1e-12);
    }
  }
}

TEST(Dephase, kills_off_diagonal_terms) {
  Vector psi = 0.6 * magic_vector() + cplx(0, 0.8) * magic_vector(true);
  Matrix avg = Matrix::Zero(2, 2);
  bool seen[2] = {false, false};
  for (uint64_t seed = 0; seen[0] + seen[1] < 2; ++seed) {
    Rng rng(seed);
    DenseState st;
    Qubits q = {st.allocate_state(psi)[0]};
    bool hit = dephase_T(st, q, rng).get(0);
    if (seen[hit]) continue;
    seen[hit] = true;
    Vector v = st.to_statevector(q);
    avg += 0.5 * v * v.adjoint();
  }
  Matrix basis(2, 2);
  basis.col(0) = magic_vector();
  basis.col(1) = magic_vector(true);
  Matrix tb = basis.adjoint() * avg * basis;
  EXPECT_NEAR(std::abs(tb(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(tb(0, 0).real(), 0.36, 1e-12);
  EXPECT_NEAR(tb(1, 1).real(), 0.64, 1e-12);
}

TEST(Block, gate_census_is_clifford_and_measure_only) {
  const BlockLayout& L = distill_block();
  EXPECT_TRUE(L.circuit.clifford_only());
  for (const CircuitOp& op : L.circuit.ops) {
    EXPECT_NE(op.kind, OpKind::T);
    if (op.kind == OpKind::Clifford) EXPECT_TRUE(is_single_qubit(op.gate));
  }
  EXPECT_EQ(L.syndrome.size(), 4u);
  EXPECT_EQ(L.coset.size(), 10u);
}

TEST(Block, ideal_inputs_give_magic_output) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    DenseState st;
    Qubits q = magic_register(st, std::vector<bool>(15, false));
    BlockResult r = bk_distill_block(st, q, rng);
    ASSERT_TRUE(r.accept);
    EXPECT_NEAR(t_overlap(st.to_statevector({r.output})), 1.0, 1e-9);
  }
}

TEST(Block, single_perp_is_rejected_everywhere) {
  Rng rng(3);
  for (size_t pos = 0; pos < 15; ++pos) {
    std::vector<bool> perp(15, false);
    perp[pos] = true;
    DenseState st;
    Qubits q = magic_register(st, perp);
    EXPECT_FALSE(bk_distill_block(st, q, rng).accept) << pos;
  }
}

TEST(Block, weight_three_codeword_is_accepted_with_logical_error) {
  // Positions 1, 2, 3 carry labels 1 ^ 2 ^ 3 = 0.
  std::vector<bool> perp(15, false);
  perp[0] = perp[1] = perp[2] = true;
  Rng rng(4);
  DenseState st;
  Qubits q = magic_register(st, perp);
  BlockResult r = bk_distill_block(st, q, rng);
  ASSERT_TRUE(r.accept);
  EXPECT_NEAR(t_overlap(st.to_statevector({r.output})), 0.0, 1e-9);
}

TEST(Circuit, noiseless_fixed_point) {
  Rng rng(5);
  DenseState st;
  Qubits q = magic_register(st, std::vector<bool>(15, false));
  DistillRun run = distill_circuit(st, q, 1, rng);
  ASSERT_EQ(run.blocks.size(), 1u);
  ASSERT_TRUE(run.blocks[0].accept);
  EXPECT_LT(1.0 - t_overlap(st.to_statevector({run.blocks[0].output})), 1e-9);
  EXPECT_EQ(run.permutation.size(), 15u);
}

TEST(Circuit, rejects_bad_block_sizes) {
  Rng rng(6);
  DenseState st;
  Qubits q = magic_register(st, std::vector<bool>(14, false));
  EXPECT_THROW(distill_circuit(st, q, 1, rng), InvalidArgument);
  EXPECT_THROW(distill_circuit(st, q, 0, rng), InvalidArgument);
  EXPECT_THROW(distill_circuit(st, q, 3, rng), InvalidArgument);
}

TEST(Circuit, permutation_symmetric) {
  // Three T-perp inputs; 35 of the C(15,3) = 455 placements are accepted codewords,
  // so after the random permutation every starting placement accepts at the same rate.
  Rng pick(7);
  const double p = 35.0 / 455.0;
  const size_t runs = 700;
  for (int t = 0; t < 3; ++t) {
    std::vector<bool> perp(15, false);
    perp[0] = perp[1] = perp[2] = true;
    std::shuffle(perp.begin(), perp.end(), pick);
    size_t acc = 0;
    for (size_t r = 0; r < runs; ++r) {
      Rng rng(1000 * t + r);
      DenseState st;
      Qubits q = magic_register(st, perp);
      acc += distill_circuit(st, q, 1, rng).blocks[0].accept;
    }
    EXPECT_NEAR(static_cast<double>(acc) / runs, p, 3 * sigma(p, runs));
  }
}

TEST(Quality, estimator_matches_exact_oracle) {
  Rng rng(8);
  for (double eps : {0.005, 0.01, 0.02, 0.05}) {
    DistillEstimate d = distill_quality(eps, 40000, rng);
    EXPECT_NEAR(d.error, oracle().error(eps), 4 * d.ci + 1e-9) << eps;
    EXPECT_NEAR(d.accept_rate, oracle().accept(eps), 0.01) << eps;
  }
}

TEST(Quality, cubic_window_and_monotone) {
  Rng rng(9);
  double prev = 0;
  for (double eps : {0.005, 0.01, 0.02}) {
    DistillEstimate d = distill_quality(eps, 40000, rng);
    double e3 = eps * eps * eps;
    EXPECT_GE(d.error, e3);
    EXPECT_LE(d.error, 50 * e3);
    EXPECT_GT(d.error, prev);
    EXPECT_LT(d.error, eps);
    prev = d.error;
  }
}

TEST(Quality, dense_agrees_with_oracle) {
  Rng rng(10);
  const double eps = 0.1;
  DistillEstimate d = distill_quality_dense(eps, 300, rng);
  double acc = oracle().accept(eps);
  EXPECT_NEAR(d.accept_rate, acc, 3 * sigma(acc, 300) + 0.01);
  EXPECT_LT(d.error, 0.08);
}

TEST(Quality, threshold_value) { EXPECT_NEAR(distill_threshold(), (1 - std::sqrt(3.0 / 7.0)) / 2, 1e-15); }

TEST(LowWeight, product_states) {
  for (size_t m : {1u, 3u, 5u}) {
    std::vector<size_t> all(m);
    for (size_t i = 0; i < m; ++i) all[i] = i;
    for (size_t l = 0; l <= m; ++l) {
      EXPECT_NEAR(lw_weight(planted_state(m, {}), m, l), 1.0, 1e-12);
      EXPECT_NEAR(lw_weight(planted_state(m, all), m, l), l >= m ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(LowWeight, uniform_superposition) {
  const size_t m = 3;
  Vector psi = Vector::Zero(8);
  for (uint64_t s = 0; s < 8; ++s) {
    std::vector<size_t> perp;
    for (size_t i = 0; i < m; ++i) {
      if (s >> (m - 1 - i) & 1) perp.push_back(i);
    }
    psi += planted_state(m, perp);
  }
  psi /= psi.norm();
  EXPECT_NEAR(lw_weight(psi, m, 1), 0.5, 1e-12);
  Matrix rho = psi * psi.adjoint();
  EXPECT_NEAR(lw_weight(rho, m, 1), 0.5, 1e-12);
}

TEST(LowWeight, size_limit) {
  Vector big = Vector::Zero(1 << 13);
  EXPECT_THROW(lw_weight(big, 13, 1), ResourceLimit);
}

TEST(Sampling, clean_state_always_passes) {
  Rng rng(11);
  SamplingCheck c = sampling_bound_check(planted_state(6, {}), 6, 3, 0.2, 100, rng);
  EXPECT_NEAR(c.pass_rate, 1.0, 1e-12);
  EXPECT_NEAR(c.violation, 0.0, 1e-12);
}

TEST(Sampling, one_planted_error) {
  Rng rng(12);
  const size_t m = 8;
  const size_t trials = 20000;
  SamplingCheck c = sampling_bound_check(planted_state(m, {3}), m, m - 1, 0.0, trials, rng);
  double p = 1.0 / m;
  EXPECT_NEAR(c.pass_rate, p, 3 * sigma(p, trials));
  // The single untested qubit is the planted one whenever the test passes.
  EXPECT_NEAR(c.violation, c.pass_rate, 1e-12);
}

TEST(Sampling, tail_below_bound) {
  Rng rng(13);
  const size_t m = 10;
  SamplingCheck c = sampling_bound_check(planted_state(m, {0, 2, 4, 6, 8}), m, 5, 0.2, 10000, rng);
  EXPECT_LE(c.violation, c.bound);
}

TEST(Magic, copy_count) { EXPECT_EQ(magic_copies(2, 3, 4), 20u); }

TEST(Magic, honest_outputs_are_magic) {
  ProtocolConfig cfg;
  cfg.k = 3;
  cfg.n = 2;
  cfg.backend = BackendKind::AuthWire;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Session s(cfg, seed);
    MagicBatch mb = create_magic_states(s, 2);
    ASSERT_FALSE(mb.aborted);
    ASSERT_EQ(mb.outputs.size(), 2u);
    EXPECT_EQ(mb.count, 10u);
    std::set<size_t> seen;
    for (const auto& [p, set] : mb.test_sets) {
      EXPECT_EQ(set.size(), 2u);
      seen.insert(set.begin(), set.end());
    }
    EXPECT_EQ(seen.size(), 4u);
    for (int w : mb.outputs) {
      DecodeResult d = decode_wire(s, w, 1);
      ASSERT_TRUE(d.accept);
      EXPECT_FALSE(s.store().measure_t_basis(d.plain, s.rng()));
    }
  }
}

TEST(Magic, all_perp_copies_always_abort) {
  ProtocolConfig cfg;
  cfg.k = 2;
  cfg.n = 4;
  cfg.backend = BackendKind::AuthWire;
  cfg.corrupted = {1};
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto a = std::make_shared<ScriptedAdversary>();
    a->add(AttackRule::pauli_at(Phase::Encode, HookPoint::Prepare, PauliOp::from_label("Z"), {0}));
    Session s(cfg, seed, a);
    EXPECT_TRUE(create_magic_states(s, 2).aborted);
  }
}

TEST(Magic, one_bad_copy_hits_tests_at_hypergeometric_rate) {
  ProtocolConfig cfg;
  cfg.k = 3;
  cfg.n = 4;
  cfg.backend = BackendKind::AuthWire;
  cfg.corrupted = {1};
  const size_t trials = 4000;
  size_t aborts = 0;
  for (size_t t = 0; t < trials; ++t) {
    auto a = std::make_shared<ScriptedAdversary>();
    AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Prepare, PauliOp::from_label("Z"), {0});
    r.limit = 1;
    a->add(r);
    Session s(cfg, 50000 + t, a);
    aborts += create_magic_states(s, 2).aborted;
  }
  double p = 8.0 / 20.0;
  EXPECT_NEAR(static_cast<double>(aborts) / trials, p, 3 * sigma(p, trials));
}

TEST(Magic, distillation_needs_enough_copies) {
  ProtocolConfig cfg;
  cfg.k = 3;
  cfg.n = 4;
  cfg.backend = BackendKind::AuthWire;
  Session s(cfg, 1);
  EXPECT_THROW(create_magic_states(s, 1, {true, false}), ConfigError);
}

TEST(Magic, distilled_honest_output_is_magic) {
  ProtocolConfig cfg;
  cfg.k = 2;
  cfg.n = 8;
  cfg.backend = BackendKind::AuthWire;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Session s(cfg, seed);
    MagicBatch mb = create_magic_states(s, 1, {true, false});
    ASSERT_FALSE(mb.aborted);
    ASSERT_EQ(mb.outputs.size(), 1u);
    EXPECT_EQ(mb.rejected_blocks, 0u);
    DecodeResult d = decode_wire(s, mb.outputs[0], 2);
    ASSERT_TRUE(d.accept);
    EXPECT_FALSE(s.store().measure_t_basis(d.plain, s.rng()));
  }
}
