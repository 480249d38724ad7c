#include <gtest/gtest.h>

#include <cmath>

#include "qmpc/distill.hpp"
#include "qmpc/protocol.hpp"

using namespace qmpc;

namespace {

double sigma(double p, size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n)); }

CircuitIR bell() {
  CircuitIR c;
  c.players = 3;
  c.inputs = {{1, 1}, {2, 2}};
  c.discards = {1, 2};
  c.cliff(GateKind::H, 1).cnot(1, 2).measure(1, "m0").measure(2, "m1");
  return c;
}

ProtocolConfig config(int k, size_t n, BackendKind b = BackendKind::Tableau) {
  ProtocolConfig cfg;
  cfg.k = k;
  cfg.n = n;
  cfg.backend = b;
  return cfg;
}

std::shared_ptr<ScriptedAdversary> script(AttackRule r) {
  auto a = std::make_shared<ScriptedAdversary>();
  a->add(std::move(r));
  return a;
}

bool decodes_to(Session& s, int wire, PlayerId p, bool bit) {
  DecodeResult d = decode_wire(s, wire, p);
  return d.accept && s.store().prob_one(d.plain) == (bit ? 1.0 : 0.0);
}

}  // namespace

TEST(Config, rejects_bad_parameters) {
  EXPECT_THROW(config(1, 4).validate(), ConfigError);
  EXPECT_THROW(config(3, 0).validate(), ConfigError);
  ProtocolConfig cfg = config(3, 2);
  cfg.corrupted = {1, 2, 3};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.corrupted = {4};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.corrupted = {1, 2};
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Encode, honest_input_round_trips) {
  Session s(config(3, 3), 1);
  ASSERT_TRUE(encode_input(s, 2, 7, InputState::one()));
  EXPECT_EQ(s.transcript().quantum_rounds(), 3u);
  EXPECT_TRUE(decodes_to(s, 7, 2, true));
}

TEST(Encode, honest_ancilla_is_zero) {
  Session s(config(3, 4), 2);
  ASSERT_TRUE(encode_ancilla(s, 3));
  EXPECT_TRUE(decodes_to(s, 3, 1, false));
}

TEST(Encode, transit_x_on_data_is_caught) {
  const size_t trials = 4000;
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(3, 4);
    cfg.corrupted = {2};
    AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Transit, PauliOp::from_label("X"), {0});
    Session s(cfg, 100 + t, script(r));
    acc += encode_input(s, 1, 1, InputState::zero());
  }
  double p = 1.0 / 16;
  EXPECT_LE(static_cast<double>(acc) / trials, p + 3 * sigma(p, trials));
}

TEST(Encode, dirty_trap_from_owner_is_caught) {
  const size_t trials = 4000;
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(3, 4);
    cfg.corrupted = {1};
    AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Prepare, PauliOp::from_label("X"), {1});
    Session s(cfg, 9000 + t, script(r));
    acc += encode_input(s, 1, 1, InputState::zero());
  }
  double p = 1.0 / 16;
  EXPECT_LE(static_cast<double>(acc) / trials, p + 3 * sigma(p, trials));
}

TEST(Encode, one_submitted_as_ancilla_is_caught) {
  const size_t trials = 4000;
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(3, 4);
    cfg.corrupted = {1};
    AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Prepare, PauliOp::from_label("X"), {0});
    Session s(cfg, 20000 + t, script(r));
    acc += encode_ancilla(s, 1);
  }
  double p = 1.0 / 16;
  EXPECT_LE(static_cast<double>(acc) / trials, p + 3 * sigma(p, trials));
}

TEST(Encode, plus_submitted_as_ancilla_passes_about_half) {
  const size_t trials = 3000;
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(2, 2);
    cfg.corrupted = {1};
    AttackRule r;
    r.phase = Phase::Encode;
    r.point = HookPoint::Prepare;
    r.cls = AttackClass::Clifford;
    r.clifford = CliffordOp::h(1, 0);
    r.positions = {0};
    Session s(cfg, 30000 + t, script(r));
    acc += encode_ancilla(s, 1);
  }
  // Half the mass is |0>; the |1> half survives only by guessing the measured traps.
  double p = 0.5 + 0.5 / 4;
  EXPECT_NEAR(static_cast<double>(acc) / trials, p, 3 * sigma(p, trials) + 0.02);
}

TEST(Encode, abort_stores_bot) {
  ProtocolConfig cfg = config(3, 2);
  cfg.corrupted = {3};
  auto a = std::make_shared<ScriptedAdversary>();
  a->abort_on("enc.check");
  Session s(cfg, 5, a);
  EXPECT_FALSE(encode_input(s, 1, 4, InputState::one()));
  EXPECT_TRUE(s.aborted());
  EXPECT_FALSE(s.mpc().has_key(4));
}

TEST(Encode, trap_failure_stores_bot) {
  ProtocolConfig cfg = config(2, 2);
  cfg.corrupted = {2};
  AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Transit, PauliOp::from_label("XXXXX"));
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Session s(cfg, seed, script(r));
    if (encode_input(s, 1, 4, InputState::one())) continue;
    EXPECT_TRUE(s.mpc().is_bot(4));
    EXPECT_EQ(s.wire(4).status, WireStatus::Lost);
    return;
  }
  FAIL() << "attack never detected";
}

TEST(Clifford, uncontrolled_update_matches_gate) {
  Session s(config(3, 3), 3);
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
  ASSERT_TRUE(apply_single_clifford(s, GateKind::H, 1));
  DecodeResult d = decode_wire(s, 1, 1);
  ASSERT_TRUE(d.accept);
  EXPECT_NEAR(s.store().prob_one(d.plain), 0.5, 1e-12);
}

TEST(Clifford, zero_control_does_nothing) {
  ProtocolConfig cfg = config(2, 2);
  cfg.lazy_keys = false;
  Session s(cfg, 4);
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
  s.mpc().store_bit("m", false);
  CliffordOp before = s.mpc().read_key(1);
  ASSERT_TRUE(apply_single_clifford(s, GateKind::X, 1, "m"));
  EXPECT_EQ(s.mpc().read_key(1), before);
  EXPECT_TRUE(decodes_to(s, 1, 1, false));
}

TEST(Clifford, four_phase_gates_restore_key) {
  ProtocolConfig cfg = config(3, 2);
  cfg.lazy_keys = false;
  Session s(cfg, 5);
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::plus()));
  CliffordOp before = s.mpc().read_key(1);
  for (int i = 0; i < 4; ++i) ASSERT_TRUE(apply_single_clifford(s, GateKind::S, 1));
  EXPECT_TRUE(equal_up_to_phase(to_dense(s.mpc().read_key(1)), to_dense(before)));
  EXPECT_EQ(s.transcript().rounds_by_phase().count("clifford"), 0u);
}

TEST(Clifford, missing_control_record_is_a_violation) {
  Session s(config(2, 1), 6);
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
  EXPECT_THROW(apply_single_clifford(s, GateKind::X, 1, "nope"), ProtocolViolation);
}

TEST(Clifford, key_update_is_sound_for_every_gate) {
  const GateKind gates[] = {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::SDG};
  for (GateKind g : gates) {
    for (bool lazy : {true, false}) {
      ProtocolConfig cfg = config(2, 2, BackendKind::Dense);
      cfg.lazy_keys = lazy;
      Session s(cfg, 7);
      ASSERT_TRUE(encode_input(s, 1, 1, InputState{InputState::Kind::PlusI, {}}));
      ASSERT_TRUE(apply_single_clifford(s, g, 1));
      DecodeResult d = decode_wire(s, 1, 1);
      ASSERT_TRUE(d.accept);
      Vector expect = to_dense(CliffordOp::gate(1, g, 0)) * InputState{InputState::Kind::PlusI, {}}.vector();
      Vector got = s.store().statevector({d.plain});
      EXPECT_NEAR(std::abs(expect.dot(got)), 1.0, 1e-9) << gate_name(g);
    }
  }
}

TEST(Cnot, truth_table_with_control_bit) {
  for (bool ctrl : {false, true}) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Session s(config(3, 3), 10 + a * 2 + b);
        ASSERT_TRUE(encode_batch(s, {{1, 1, a ? InputState::one() : InputState::zero(), false},
                                     {2, 3, b ? InputState::one() : InputState::zero(), false}}));
        s.mpc().store_bit("m", ctrl);
        ASSERT_TRUE(apply_cnot(s, 1, 2, "m"));
        EXPECT_TRUE(decodes_to(s, 1, 1, a));
        EXPECT_TRUE(decodes_to(s, 2, 3, (ctrl && a) ? !b : b));
      }
    }
  }
}

TEST(Cnot, same_holder_skips_transfers) {
  Session s(config(4, 2), 11);
  ASSERT_TRUE(encode_batch(s, {{1, 2, InputState::one(), false}, {2, 2, InputState::zero(), false}}));
  size_t before = s.transcript().quantum_rounds();
  ASSERT_TRUE(apply_cnot(s, 1, 2));
  EXPECT_EQ(s.transcript().quantum_rounds() - before, 4u);
  EXPECT_TRUE(decodes_to(s, 2, 2, true));
}

TEST(Cnot, coincident_wires_rejected) {
  Session s(config(2, 1), 12);
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
  EXPECT_THROW(apply_cnot(s, 1, 1), InvalidArgument);
}

TEST(Cnot, attack_between_instruction_and_test_is_caught) {
  const size_t n = 4;
  const size_t trials = 3000;
  Rng pick(77);
  size_t acc = 0;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(3, n);
    cfg.corrupted = {1};
    PauliOp p(n + 1);
    while (p.is_trivial()) p = PauliOp::random(n + 1, pick);
    std::vector<size_t> pos(n + 1);
    for (size_t q = 0; q <= n; ++q) pos[q] = q;
    AttackRule r = AttackRule::pauli_at(Phase::Cnot, HookPoint::AfterInstruction, p, pos);
    Session s(cfg, 40000 + t, script(r));
    ASSERT_TRUE(encode_batch(s, {{1, 1, InputState::zero(), false}, {2, 2, InputState::zero(), false}}));
    acc += apply_cnot(s, 1, 2);
  }
  double p = 1.0 / 16;
  EXPECT_LE(static_cast<double>(acc) / trials, p + 3 * sigma(p, trials));
}

TEST(Measure, honest_one_gives_one) {
  Session s(config(3, 3), 13);
  ASSERT_TRUE(encode_input(s, 2, 1, InputState::one()));
  ASSERT_TRUE(measure_wire(s, 1, "m"));
  EXPECT_EQ(s.mpc().read_bit("m"), std::optional<bool>(true));
  EXPECT_EQ(s.transcript().rounds_by_phase().count("measure"), 0u);
  EXPECT_THROW(decode_wire(s, 1, 2), KeyErased);
}

TEST(Measure, flipped_data_report_is_caught) {
  ProtocolConfig cfg = config(2, 5);
  cfg.corrupted = {1};
  auto a = std::make_shared<ScriptedAdversary>();
  LieRule lie;
  lie.phase = Phase::Measure;
  lie.flip = BitVec::unit(6, 0);
  a->lie(lie);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Session s(cfg, seed, a);
    ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
    bool ok = measure_wire(s, 1, "m");
    // Flipping m without the matching c-pattern passes only when c = 0.
    if (ok) EXPECT_EQ(s.mpc().read_bit("m"), std::optional<bool>(true));
  }
}

TEST(Measure, trick_deviation_is_bounded) {
  Matrix rho(2, 2);
  rho << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
  for (size_t n = 3; n <= 6; ++n) {
    for (uint64_t b = 0; b < (uint64_t(1) << (n + 1)); ++b) {
      TrickDeviation d = measurement_trick_deviation(rho, n, BitVec::from_u64(n + 1, b));
      EXPECT_LE(d.total, std::ldexp(1.0, -static_cast<int>(n)) + 1e-12);
    }
  }
}

TEST(Decode, corrupted_trap_aborts_locally) {
  ProtocolConfig cfg = config(2, 3);
  cfg.corrupted = {2};
  AttackRule r = AttackRule::pauli_at(Phase::Decode, HookPoint::BeforeInstruction, PauliOp::from_label("X"), {2});
  Session s(cfg, 14, script(r));
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::zero()));
  s.mpc().store_key(1, CliffordOp(4));
  DecodeResult d = decode_wire(s, 1, 2);
  EXPECT_FALSE(d.accept);
  EXPECT_EQ(d.traps.to_string(), BitVec::unit(3, 1).to_string());
}

TEST(Decode, identity_attack_on_data_is_harmless) {
  ProtocolConfig cfg = config(3, 3);
  cfg.corrupted = {2};
  AttackRule r = AttackRule::pauli_at(Phase::Encode, HookPoint::Transit, PauliOp::from_label("I"), {0});
  Session s(cfg, 15, script(r));
  ASSERT_TRUE(encode_input(s, 1, 1, InputState::one()));
  EXPECT_TRUE(decodes_to(s, 1, 3, true));
}

TEST(Rounds, encoding_cnot_and_local_ops) {
  for (int k : {2, 3, 5}) {
    Session s(config(k, 2), 16);
    ASSERT_TRUE(encode_batch(s, {{1, 1, InputState::zero(), false},
                                 {2, k, InputState::one(), false},
                                 {3, 1, InputState::zero(), true}}));
    EXPECT_EQ(s.transcript().quantum_rounds(), static_cast<size_t>(k));
    size_t r0 = s.transcript().quantum_rounds();
    ASSERT_TRUE(apply_cnot(s, 1, 2));
    EXPECT_LE(s.transcript().quantum_rounds() - r0, static_cast<size_t>(k + 2));
    r0 = s.transcript().quantum_rounds();
    ASSERT_TRUE(apply_single_clifford(s, GateKind::H, 3));
    ASSERT_TRUE(measure_wire(s, 3, "m"));
    EXPECT_EQ(s.transcript().quantum_rounds(), r0);
    Account a = account(s.transcript());
    EXPECT_EQ(a.rounds_by_phase.at("encoding"), static_cast<size_t>(k));
  }
}

TEST(Rounds, three_cnots_stay_under_budget) {
  const int k = 4;
  CircuitIR c;
  c.players = k;
  c.inputs = {{1, 1}, {2, 2}, {3, 3}};
  c.outputs = {{1, 1}, {2, 2}, {3, 3}};
  c.cnot(1, 2).cnot(2, 3).cnot(3, 1);
  Session s(config(k, 2), 17);
  RunResult r = run_clifford_circuit(s, c);
  ASSERT_FALSE(r.aborted);
  EXPECT_LE(r.account.rounds_by_phase.at("encoding") + r.account.rounds_by_phase.at("cnot"),
            static_cast<size_t>(k + 3 * (k + 2)));
}

TEST(Circuit, bell_outcomes) {
  CircuitIR c = bell();
  auto ideal = ideal_distribution(c);
  ASSERT_EQ(ideal.size(), 2u);
  EXPECT_NEAR(ideal.at("m0=0 m1=0 |"), 0.5, 1e-12);
  EXPECT_NEAR(ideal.at("m0=1 m1=1 |"), 0.5, 1e-12);
  const size_t trials = 2000;
  size_t zeros = 0;
  for (size_t t = 0; t < trials; ++t) {
    Session s(config(3, 4), t);
    RunResult r = run_clifford_circuit(s, c);
    std::string o = r.outcome(s);
    ASSERT_TRUE(ideal.count(o)) << o;
    zeros += o == "m0=0 m1=0 |";
  }
  EXPECT_NEAR(static_cast<double>(zeros) / trials, 0.5, 3 * sigma(0.5, trials));
}

TEST(Circuit, bell_rounds_and_calls) {
  Session s(config(3, 4), 1);
  RunResult r = run_clifford_circuit(s, bell());
  EXPECT_EQ(r.account.quantum_rounds, 8u);
  EXPECT_EQ(r.account.mpc_calls, 14u);
}

TEST(Circuit, hadamard_measure_is_fair) {
  CircuitIR c;
  c.players = 3;
  c.inputs = {{1, 1}};
  c.discards = {1};
  c.cliff(GateKind::H, 1).measure(1, "m");
  const size_t trials = 4000;
  size_t zeros = 0;
  for (size_t t = 0; t < trials; ++t) {
    Session s(config(3, 3), 500 + t);
    RunResult r = run_clifford_circuit(s, c);
    zeros += !r.bits.at("m");
  }
  EXPECT_NEAR(static_cast<double>(zeros) / trials, 0.5, 3 * sigma(0.5, trials));
}

TEST(Circuit, classically_controlled_output) {
  CircuitIR c;
  c.players = 2;
  c.inputs = {{1, 1}};
  c.ancillas = {2};
  c.outputs = {{2, 2}};
  c.discards = {1};
  c.cliff(GateKind::X, 1).measure(1, "m").cliff(GateKind::X, 2, "m");
  Session s(config(2, 2), 18);
  RunResult r = run_clifford_circuit(s, c);
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(r.outcome(s), "m=1 | w2=1");
}

TEST(Circuit, lazy_and_eager_agree) {
  CircuitIR c = bell();
  c.cliff(GateKind::S, 1);
  c.ops.insert(c.ops.begin() + 1, c.ops.back());
  c.ops.pop_back();
  std::map<std::string, size_t> lazy, eager;
  const size_t trials = 600;
  for (size_t t = 0; t < trials; ++t) {
    ProtocolConfig cfg = config(3, 2);
    Session a(cfg, t);
    RunResult ra = run_clifford_circuit(a, c);
    ++lazy[ra.outcome(a)];
    cfg.lazy_keys = false;
    Session b(cfg, t);
    RunResult rb = run_clifford_circuit(b, c);
    ++eager[rb.outcome(b)];
    EXPECT_EQ(ra.account.quantum_rounds, rb.account.quantum_rounds);
    EXPECT_EQ(ra.account.mpc_calls, rb.account.mpc_calls);
  }
  ASSERT_EQ(lazy.size(), eager.size());
  for (const auto& [o, cnt] : lazy) {
    ASSERT_TRUE(eager.count(o));
    EXPECT_NEAR(static_cast<double>(cnt) / trials, static_cast<double>(eager[o]) / trials, 0.1);
  }
}

TEST(Circuit, recorded_transcript_has_instructions) {
  ProtocolConfig cfg = config(2, 1);
  cfg.record = true;
  Session s(cfg, 19);
  CircuitIR c;
  c.players = 2;
  c.inputs = {{1, 1}};
  c.discards = {1};
  c.measure(1, "m");
  RunResult r = run_clifford_circuit(s, c);
  ASSERT_FALSE(r.aborted);
  size_t instructions = 0;
  for (const auto& e : s.transcript().events()) instructions += e.type == "instruction";
  EXPECT_EQ(instructions, 2u);
  EXPECT_NE(s.transcript().to_jsonl().find("\"mpc-call\""), std::string::npos);
}

TEST(GlNetwork, realizes_linear_map) {
  Rng rng(21);
  for (size_t m : {1u, 3u, 6u, 9u}) {
    GLElement g = random_invertible(m, rng);
    auto net = gl_cnot_network(g);
    for (int t = 0; t < 10; ++t) {
      BitVec x = BitVec::random(m, rng);
      BitVec y = x;
      for (const auto& [c, tg] : net) {
        if (y.get(c)) y.flip(tg);
      }
      EXPECT_EQ(y, apply_to_basis(g, x));
    }
  }
}

TEST(TGadget, dense_fidelities) {
  struct Case {
    InputState in;
    InputState magic;
    Vector expect;
  };
  Vector t_plus = magic_vector();
  Vector zero(2);
  zero << 1, 0;
  std::vector<Case> cases = {{InputState::zero(), InputState::magic(), zero},
                             {InputState::plus(), InputState::magic(), t_plus},
                             {InputState::plus(), InputState::magic_perp(), magic_vector(true)}};
  for (const Case& cs : cases) {
    for (uint64_t seed = 0; seed < 8; ++seed) {
      Session s(config(2, 1, BackendKind::Dense), seed);
      ASSERT_TRUE(encode_batch(s, {{1, 1, cs.in, false}, {2, 1, cs.magic, false}}));
      ASSERT_TRUE(t_gadget(s, 1, 2, "c"));
      DecodeResult d = decode_wire(s, 2, 2);
      ASSERT_TRUE(d.accept);
      Vector got = s.store().statevector({d.plain});
      EXPECT_NEAR(std::norm(cs.expect.dot(got)), 1.0, 1e-9);
    }
  }
}

TEST(Mpqc, t_on_zero_measures_zero) {
  CircuitIR c;
  c.players = 3;
  c.inputs = {{1, 1}};
  c.discards = {1};
  c.t(1).measure(1, "m");
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Session s(config(3, 2, BackendKind::AuthWire), seed);
    RunResult r = run_mpqc(s, c);
    ASSERT_FALSE(r.aborted) << r.reason;
    EXPECT_FALSE(r.bits.at("m"));
  }
}

TEST(Mpqc, hadamard_t_hadamard_statistics) {
  CircuitIR c;
  c.players = 3;
  c.inputs = {{1, 1}};
  c.discards = {1};
  c.cliff(GateKind::H, 1).t(1).cliff(GateKind::H, 1).measure(1, "m");
  const size_t trials = 2000;
  size_t zeros = 0;
  for (size_t t = 0; t < trials; ++t) {
    Session s(config(3, 2, BackendKind::AuthWire), 700 + t);
    RunResult r = run_mpqc(s, c);
    ASSERT_FALSE(r.aborted);
    zeros += !r.bits.at("m");
  }
  double p = std::pow(std::cos(M_PI / 8), 2);
  EXPECT_NEAR(static_cast<double>(zeros) / trials, p, 3 * sigma(p, trials));
}

TEST(Mpqc, clifford_circuit_matches_plain_runner) {
  CircuitIR c = bell();
  Session a(config(3, 2), 3);
  Session b(config(3, 2), 3);
  RunResult ra = run_clifford_circuit(a, c);
  RunResult rb = run_mpqc(b, c);
  EXPECT_EQ(ra.outcome(a), rb.outcome(b));
  EXPECT_EQ(ra.account.quantum_rounds, rb.account.quantum_rounds);
}

TEST(Ideal, identity_circuit_returns_inputs) {
  CircuitIR c;
  c.players = 2;
  c.inputs = {{1, 1}, {2, 2}};
  c.outputs = {{1, 2}, {2, 1}};
  auto d = ideal_distribution(c, {{1, InputState::one()}});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.begin()->first, "| w1=1 w2=0");
}

TEST(Ideal, enc_abort_stores_bot) {
  Rng rng(22);
  IdealRequest req;
  req.kind = IdealKind::Enc;
  req.k = 3;
  req.n = 2;
  req.corrupted = {2};
  req.abort_bits = {{2, true}};
  CircuitIR c;
  c.players = 3;
  c.inputs = {{1, 1}};
  c.outputs = {{1, 1}};
  req.circuit = &c;
  IdealResult r = ideal_functionality(req, rng);
  EXPECT_TRUE(r.aborted);
  EXPECT_TRUE(r.S.is_bot(1));
  req.abort_bits = {{2, false}};
  IdealResult ok = ideal_functionality(req, rng);
  EXPECT_FALSE(ok.aborted);
  EXPECT_TRUE(ok.S.has_key(1));
}

TEST(Ideal, measure_only_circuit_stores_outcomes) {
  Rng rng(23);
  CircuitIR c;
  c.players = 2;
  c.inputs = {{1, 1}, {2, 2}};
  c.discards = {1, 2};
  c.measure(1, "a").measure(2, "b");
  IdealRequest req;
  req.kind = IdealKind::CliffordNoDecode;
  req.k = 2;
  req.n = 1;
  req.circuit = &c;
  req.inputs = {{2, InputState::one()}};
  IdealResult r = ideal_functionality(req, rng);
  EXPECT_EQ(r.S.read_bit("a"), std::optional<bool>(false));
  EXPECT_EQ(r.S.read_bit("b"), std::optional<bool>(true));
}

TEST(Distinguish, honest_adversary_has_no_advantage) {
  DistinguishSetup setup;
  setup.n = 3;
  AdvantageEstimate e = distinguishing_advantage(setup, 300, 1);
  EXPECT_EQ(e.advantage, 0.0);
}

TEST(Distinguish, encode_transit_x) {
  DistinguishSetup setup;
  setup.n = 5;
  setup.corrupted = {2};
  setup.adversary.add(AttackRule::pauli_at(Phase::Encode, HookPoint::Transit, PauliOp::from_label("X"), {0}));
  ASSERT_TRUE(simulator_flags(setup));
  AdvantageEstimate e = distinguishing_advantage(setup, 1500, 2);
  EXPECT_LE(e.advantage, 0.05);
}

TEST(Distinguish, measurement_lie) {
  DistinguishSetup setup;
  setup.target = DistinguishTarget::Measure;
  setup.n = 5;
  setup.corrupted = {1};
  LieRule lie;
  lie.phase = Phase::Measure;
  lie.flip = BitVec::unit(6, 0);
  setup.adversary.lie(lie);
  AdvantageEstimate e = distinguishing_advantage(setup, 1500, 3);
  EXPECT_LE(e.advantage, 0.05);
}

TEST(Distinguish, wilson_halfwidth_shrinks) {
  EXPECT_GT(wilson_halfwidth(50, 100), wilson_halfwidth(5000, 10000));
  EXPECT_GT(wilson_halfwidth(0, 100), 0.0);
}
