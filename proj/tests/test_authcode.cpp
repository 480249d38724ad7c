#include <cmath>

#include <gtest/gtest.h>

#include "qmpc/authcode.hpp"
#include "qmpc/errors.hpp"

using namespace qmpc;

namespace {

double binom_sigma(double p, size_t trials) { return std::sqrt(p * (1 - p) / trials); }

Vector basis(Eigen::Index dim, Eigen::Index i) {
  Vector v = Vector::Zero(dim);
  v[i] = 1.0;
  return v;
}

// Closed form of the GL(2n) twirl on T1 T2 (x) E, from the orbit structure of GL acting on strings.
Matrix twirl_closed_form(const Matrix& rho, size_t n) {
  Eigen::Index d = Eigen::Index{1} << (2 * n);
  Eigen::Index de = rho.rows() / d;
  double dd = static_cast<double>(d);
  auto blk = [&](Eigen::Index i, Eigen::Index j) { return rho.block(i * de, j * de, de, de); };
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  Matrix row0 = Matrix::Zero(de, de), col0 = Matrix::Zero(de, de), diag = Matrix::Zero(de, de),
         off = Matrix::Zero(de, de);
  for (Eigen::Index y = 1; y < d; ++y) {
    row0 += blk(0, y);
    col0 += blk(y, 0);
    diag += blk(y, y);
    for (Eigen::Index x = 1; x < d; ++x) {
      if (x != y) off += blk(x, y);
    }
  }
  out.block(0, 0, de, de) = blk(0, 0);
  for (Eigen::Index y = 1; y < d; ++y) {
    out.block(0, y * de, de, de) += row0 / (dd - 1);
    out.block(y * de, 0, de, de) += col0 / (dd - 1);
    out.block(y * de, y * de, de, de) += diag / (dd - 1);
    for (Eigen::Index x = 1; x < d; ++x) {
      if (x != y) out.block(x * de, y * de, de, de) += off / ((dd - 1) * (dd - 2));
    }
  }
  return out;
}

Matrix random_density(size_t qubits, Rng& rng) {
  Vector v = random_state(qubits, rng);
  return v * v.adjoint();
}

}  // namespace

TEST(CliffordCode, identity_key_appends_zero_traps) {
  CodeParams params(3);
  DenseState st(1);
  st.apply_gate(GateKind::X, 0);
  Qubits reg = enc(params, st, 0, CliffordOp::identity(4));
  EXPECT_NEAR(std::norm(st.to_statevector(reg)[8]), 1.0, 1e-12);  // |1000>
}

TEST(CliffordCode, round_trip_restores_plaintext) {
  Rng rng(1);
  CodeParams params(3);
  for (int t = 0; t < 20; ++t) {
    Vector plain = random_state(1, rng);
    DenseState st = DenseState::from_amplitudes(plain);
    CliffordOp key = random_clifford(4, rng);
    Qubits reg = enc(params, st, 0, key);
    DecodeOutcome d = dec(params, st, reg, key, rng);
    ASSERT_TRUE(d.accept);
    EXPECT_NEAR(std::norm(plain.dot(st.to_statevector({*d.plain}))), 1.0, 1e-9);
  }
}

TEST(CliffordCode, round_trip_is_exact_on_tableau) {
  Rng rng(2);
  CodeParams params(5);
  for (int t = 0; t < 50; ++t) {
    StabilizerState st(1);
    st.apply_gate(GateKind::X, 0);
    CliffordOp key = random_clifford(6, rng);
    Qubits reg = enc(params, st, 0, key);
    DecodeOutcome d = dec(params, st, reg, key, rng);
    ASSERT_TRUE(d.accept);
    EXPECT_TRUE(st.measure_z({*d.plain}, rng).get(0));
  }
}

TEST(CliffordCode, trap_flip_with_identity_key_rejects) {
  Rng rng(3);
  CodeParams params(2);
  StabilizerState st(1);
  Qubits reg = enc(params, st, 0, CliffordOp::identity(3));
  st.apply_pauli(PauliOp::from_label("IIX"), reg);
  DecodeOutcome d = dec(params, st, reg, CliffordOp::identity(3), rng);
  EXPECT_FALSE(d.accept);
  EXPECT_FALSE(d.plain.has_value());
  EXPECT_EQ(st.num_qubits(), 0u);
}

TEST(CliffordCode, rejects_mismatched_key) {
  CodeParams params(2);
  StabilizerState st(1);
  EXPECT_THROW(enc(params, st, 0, CliffordOp::identity(2)), InvalidDimension);
  EXPECT_THROW(CodeParams(0), InvalidArgument);
}

TEST(CliffordCode, exact_key_average_matches_symplectic_count_at_n1) {
  // Non-identity Paulis on 2 qubits with no X on the trap: 4 * 2 - 1 of 15.
  for (uint64_t code = 1; code < 16; ++code) {
    PauliOp p(BitVec::from_u64(2, code & 3), BitVec::from_u64(2, code >> 2), 0);
    for (int ph = 0; ph < 4; ++ph) {
      p.phase = ph;
      AttackAverage avg = clifford_attack_exact_n1(p);
      EXPECT_EQ(avg.keys, 11520u);
      EXPECT_NEAR(avg.accept, 7.0 / 15.0, 1e-12);
      EXPECT_NEAR(avg.accept_altered, 6.0 / 15.0, 1e-12);
    }
  }
  EXPECT_NEAR(clifford_accept_surrogate(1), 7.0 / 15.0, 1e-15);
  EXPECT_NEAR(clifford_altered_surrogate(1), 6.0 / 15.0, 1e-15);
}

TEST(CliffordCode, data_z_attack_accept_rate_at_n3) {
  Rng rng(4);
  const size_t trials = 4000;
  PauliOp z = PauliOp::from_label("ZIII");
  AttackAverage avg = clifford_attack_sampled(3, z, trials, rng, BackendKind::Dense);
  double p = 31.0 / 255.0;
  EXPECT_NEAR(avg.accept, p, 3 * binom_sigma(p, trials));
  EXPECT_NEAR(clifford_accept_surrogate(3), p, 1e-15);
}

TEST(CliffordCode, wrong_key_accepts_with_probability_two_to_minus_n) {
  Rng rng(5);
  CodeParams params(3);
  const size_t trials = 4000;
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    DenseState st = DenseState::from_amplitudes(random_state(1, rng));
    Qubits reg = enc(params, st, 0, random_clifford(4, rng));
    acc += dec(params, st, reg, random_clifford(4, rng), rng).accept;
  }
  EXPECT_NEAR(static_cast<double>(acc) / trials, 0.125, 3 * binom_sigma(0.125, trials));
}

TEST(CliffordCode, acceptance_halves_per_trap) {
  Rng rng(6);
  const size_t trials = 10000;
  double prev = 0;
  for (size_t n = 2; n <= 5; ++n) {
    PauliOp p = PauliOp::random(n + 1, rng);
    while (p.is_trivial()) p = PauliOp::random(n + 1, rng);
    double r = clifford_attack_sampled(n, p, trials, rng).accept;
    double ref = clifford_accept_surrogate(n);
    EXPECT_NEAR(r, ref, 3 * binom_sigma(ref, trials) + 1e-12) << "n=" << n;
    EXPECT_LE(r, std::ldexp(1.0, -static_cast<int>(n) + 1) + 3 * binom_sigma(ref, trials));
    if (n > 2) EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(PauliFilter, classical_path_examples) {
  auto id = FilterSpec::id(1);
  EXPECT_FALSE(pauli_filter(id, PauliOp::identity(2)).flag);
  EXPECT_TRUE(pauli_filter(id, PauliOp::from_label("XI")).flag);
  EXPECT_FALSE(pauli_filter(FilterSpec::x(1), PauliOp::from_label("ZI")).flag);
  EXPECT_TRUE(pauli_filter(FilterSpec::x(1), PauliOp::from_label("YI")).flag);
  auto r = pauli_filter(id, PauliOp::from_label("IXZ"));
  EXPECT_FALSE(r.flag);
  EXPECT_EQ(r.residual.to_label(), "+XZ");
  EXPECT_THROW(pauli_filter(id, PauliOp::identity(1)), InvalidDimension);
}

TEST(PauliFilter, zero_filter_examples) {
  EXPECT_FALSE(zero_filter(PauliOp::identity(3), 2).flag);
  EXPECT_FALSE(zero_filter(PauliOp::from_label("ZZX"), 2).flag);
  EXPECT_TRUE(zero_filter(PauliOp::from_label("IXI"), 2).flag);
  EXPECT_TRUE(zero_filter(PauliOp::from_label("YII"), 2).flag);
}

TEST(PauliFilter, custom_set) {
  std::set<std::pair<BitVec, BitVec>> set{{BitVec::from_string("1"), BitVec::from_string("0")}};
  auto spec = FilterSpec::custom(1, set);
  EXPECT_FALSE(pauli_filter(spec, PauliOp::from_label("XZ")).flag);
  EXPECT_TRUE(pauli_filter(spec, PauliOp::from_label("IZ")).flag);
  EXPECT_THROW(FilterSpec::custom(2, set), InvalidDimension);
}

TEST(PauliFilter, decomposition_reassembles_unitary) {
  Rng rng(7);
  Matrix u = random_unitary(8, rng);
  auto comps = pauli_decompose(u, 1);
  ASSERT_EQ(comps.size(), 4u);
  Matrix sum = Matrix::Zero(8, 8);
  for (auto& c : comps) {
    Matrix p = PauliOp(c.a, c.b, 0).to_dense();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) sum.block(4 * i, 4 * j, 4, 4) += p(i, j) * c.u;
    }
  }
  EXPECT_LT((sum - u).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PauliFilter, identity_unitary_has_no_deviation_and_never_flags) {
  for (auto spec : {FilterSpec::id(1), FilterSpec::x(1), FilterSpec::zero(1)}) {
    Matrix u = Matrix::Identity(4, 4);
    EXPECT_LT(filter_equivalence_check(spec, u), 1e-12);
    EXPECT_LT(filter_choi_physical(spec, u).reject.norm(), 1e-12);
  }
}

TEST(PauliFilter, cnot_from_s_to_t_is_equivalent) {
  Matrix cnot = to_dense(CliffordOp::cnot(2, 0, 1));
  EXPECT_LT(filter_equivalence_check(FilterSpec::id(1), cnot), 1e-9);
  // CNOT = I (x) (I+X)/2 + Z (x) (I-X)/2: half weight on each component.
  FilterChoi c = filter_choi_physical(FilterSpec::id(1), cnot);
  EXPECT_NEAR(c.accept.trace().real(), 0.5, 1e-12);
  EXPECT_NEAR(c.reject.trace().real(), 0.5, 1e-12);
  FilterChoi x = filter_choi_physical(FilterSpec::x(1), cnot);
  EXPECT_NEAR(x.accept.trace().real(), 1.0, 1e-12);
}

TEST(PauliFilter, x_on_s_always_flags) {
  Matrix u = PauliOp::from_label("XI").to_dense();
  FilterChoi c = filter_choi_physical(FilterSpec::id(1), u);
  EXPECT_LT(c.accept.norm(), 1e-12);
  EXPECT_NEAR(c.reject.trace().real(), 1.0, 1e-12);
}

TEST(PauliFilter, random_unitaries_match_analytic_mixture) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    Matrix u2 = random_unitary(4, rng);
    Matrix u3 = random_unitary(8, rng);
    for (auto spec : {FilterSpec::id(1), FilterSpec::x(1), FilterSpec::zero(1)}) {
      EXPECT_LT(filter_equivalence_check(spec, u2), 1e-9);
      EXPECT_LT(filter_equivalence_check(spec, u3), 1e-9);
      FilterChoi c = filter_choi_physical(spec, u2);
      EXPECT_NEAR((c.accept + c.reject).trace().real(), 1.0, 1e-9);
    }
  }
}

TEST(GLTwirl, group_sizes) {
  EXPECT_EQ(gl_group(1).size(), 1u);
  EXPECT_EQ(gl_group(2).size(), 6u);
  EXPECT_EQ(gl_group(3).size(), 168u);
  EXPECT_EQ(gl_group(4).size(), 20160u);
  EXPECT_THROW(gl_group(5), ResourceLimit);
}

TEST(GLTwirl, unitary_permutes_basis) {
  GLElement g(BitMatrix::from_rows({"11", "01"}));
  Matrix u = gl_unitary(g);
  // g (1,0) = (1,0); g (0,1) = (1,1)
  EXPECT_EQ(u(2, 2), cplx(1, 0));
  EXPECT_EQ(u(3, 1), cplx(1, 0));
  EXPECT_EQ(u(0, 0), cplx(1, 0));
}

TEST(GLTwirl, exact_twirl_matches_closed_form) {
  Rng rng(9);
  for (size_t n : {1, 2}) {
    for (size_t env : {0, 1}) {
      Matrix rho = random_density(2 * n + env, rng);
      Matrix tw = gl_twirl(rho, n, 0, rng);
      EXPECT_LT((tw - twirl_closed_form(rho, n)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(GLTwirl, sampled_twirl_converges) {
  Rng rng(10);
  Matrix rho = random_density(6, rng);
  Matrix tw = gl_twirl(rho, 3, 4000, rng);
  EXPECT_LT((tw - twirl_closed_form(rho, 3)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(GLTwirl, zero_traps_pass_both_tests) {
  Rng rng(11);
  for (size_t n : {1, 2}) {
    Matrix env = random_density(1, rng);
    Eigen::Index d = Eigen::Index{1} << (2 * n);
    Matrix rho = Matrix::Zero(2 * d, 2 * d);
    rho.block(0, 0, 2, 2) = env;
    EXPECT_LT(gl_twirl_distance(rho, n, BitVec(n), 0, rng), 1e-12);
  }
}

TEST(GLTwirl, nonzero_basis_trap_distance) {
  // |x><x| with x != 0 is rejected by the full test and accepted by the half test
  // with probability (2^n - 1) / (4^n - 1) for s = 0, and 2^n / (4^n - 1) otherwise.
  Rng rng(12);
  size_t n = 2;
  Vector x = basis(16, 5);
  Matrix rho = x * x.adjoint();
  EXPECT_NEAR(gl_twirl_distance(rho, n, BitVec(2), 0, rng), 2.0 * 3.0 / 15.0, 1e-12);
  EXPECT_NEAR(gl_twirl_distance(rho, n, BitVec::from_string("01"), 0, rng), 2.0 * 4.0 / 15.0, 1e-12);
}

TEST(GLTwirl, bound_holds_on_random_and_plus_prime_states) {
  Rng rng(13);
  for (size_t n : {1, 2}) {
    Eigen::Index d = Eigen::Index{1} << (2 * n);
    Vector plus = Vector::Zero(2 * d);
    for (Eigen::Index x = 1; x < d; ++x) plus[2 * x] = 1.0;
    plus /= plus.norm();
    Vector mix = (basis(2 * d, 1) + plus) / std::sqrt(2.0);
    std::vector<Matrix> states{mix * mix.adjoint()};
    for (int i = 0; i < 10; ++i) states.push_back(random_density(2 * n + 1, rng));
    for (auto& rho : states) {
      for (uint64_t s = 0; s < (uint64_t{1} << n); ++s) {
        double dist = gl_twirl_distance(rho, n, BitVec::from_u64(n, s), 0, rng);
        EXPECT_LE(dist, gl_twirl_bound(n));
        EXPECT_LE(dist, 2.0 + 1e-9);
      }
    }
  }
}
