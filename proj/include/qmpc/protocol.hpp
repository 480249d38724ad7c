#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qmpc/backend.hpp"
#include "qmpc/errors.hpp"
#include "qmpc/gf2.hpp"
#include "qmpc/mpc.hpp"
#include "qmpc/pauli.hpp"

namespace qmpc {

// Circuits

enum class OpKind { Clifford, Cnot, Measure, T };

struct CircuitOp {
  OpKind kind = OpKind::Clifford;
  GateKind gate = GateKind::I;
  int w0 = -1;
  int w1 = -1;
  std::string ctrl;
  std::string label;
  int line = 0;
};

struct CircuitIR {
  int players = 2;
  std::map<int, PlayerId> inputs;
  std::set<int> ancillas;
  std::map<int, PlayerId> outputs;
  std::set<int> discards;
  std::vector<CircuitOp> ops;

  std::set<int> wires() const;
  size_t t_count() const;
  bool clifford_only() const;
  std::vector<std::string> labels() const;
  void validate() const;
  std::string to_text() const;

  CircuitIR& cliff(GateKind g, int w, std::string ctrl = "");
  CircuitIR& cnot(int c, int t, std::string ctrl = "");
  CircuitIR& measure(int w, std::string label);
  CircuitIR& t(int w);
};

struct InputState {
  enum class Kind { Zero, One, Plus, Minus, PlusI, Magic, MagicPerp, Amplitudes };
  Kind kind = Kind::Zero;
  Vector amps;

  static InputState zero() { return {Kind::Zero, {}}; }
  static InputState one() { return {Kind::One, {}}; }
  static InputState plus() { return {Kind::Plus, {}}; }
  static InputState magic() { return {Kind::Magic, {}}; }
  static InputState magic_perp() { return {Kind::MagicPerp, {}}; }
  static InputState amplitudes(Vector a) { return {Kind::Amplitudes, std::move(a)}; }
  Vector vector() const;
};

// Inner state store. Registers are kept with their keys factored out.

using Slot = uint32_t;

class InnerStore {
 public:
  virtual ~InnerStore() = default;
  virtual BackendKind kind() const = 0;
  virtual Slot alloc_data(const InputState& s) = 0;
  virtual Slot alloc_zero() = 0;
  virtual void apply_pauli(const std::vector<Slot>& slots, const PauliOp& p) = 0;
  virtual void apply_clifford(const std::vector<Slot>& slots, const CliffordOp& c) = 0;
  virtual void apply_unitary(const std::vector<Slot>& slots, const Matrix& u) = 0;
  virtual void apply_gate(GateKind g, Slot a, Slot b = 0) = 0;
  virtual void apply_t(Slot a) = 0;
  virtual void apply_linear(const std::vector<Slot>& slots, const GLElement& g) = 0;
  // True only when every slot is known to be |0>.
  virtual bool zero_basis(const std::vector<Slot>&) const { return false; }
  virtual bool measure(Slot a, Rng& rng) = 0;
  virtual bool measure_t_basis(Slot a, Rng& rng) = 0;
  virtual double prob_one(Slot a) const = 0;
  virtual Vector statevector(const std::vector<Slot>& slots) = 0;
};

std::unique_ptr<InnerStore> make_store(BackendKind kind);

// CNOT network realizing |x> -> |gx>, in application order (control, target).
std::vector<std::pair<size_t, size_t>> gl_cnot_network(const GLElement& g);
CliffordOp gl_clifford(const GLElement& g);

// Adversaries

enum class Phase { Encode, Clifford, Cnot, Measure, Decode, Magic };
std::string phase_name(Phase p);

enum class HookPoint { Prepare, Transit, BeforeInstruction, AfterInstruction };
std::string hook_name(HookPoint p);

// Register layouts seen by hooks:
//   Encode  M T1 T2            (2n+1)
//   Cnot    Mi T1i T2i Mj T1j T2j (4n+2), halves of 2n+1 after V
//   Measure, Decode  M T1      (n+1)
struct HookContext {
  Phase phase = Phase::Encode;
  HookPoint point = HookPoint::Transit;
  PlayerId player = 0;
  int wire = -1;
  int other_wire = -1;
  int hop = 0;
  size_t n = 0;
  bool ancilla = false;
  std::string stage;
};

class RegisterView {
 public:
  virtual ~RegisterView() = default;
  virtual size_t size() const = 0;
  virtual void apply_pauli(const PauliOp& p) = 0;
  virtual void apply_clifford(const CliffordOp& c) = 0;
  virtual void apply_unitary(const Matrix& u) = 0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual bool wants(const HookContext&) const { return false; }
  virtual void attack(const HookContext&, RegisterView&) {}
  virtual BitVec report(const HookContext&, const BitVec& measured) { return measured; }
  virtual bool abort_bit(PlayerId, const std::string& tag) { (void)tag; return false; }
};

enum class AttackClass { None, Pauli, Clifford, Dense };

struct AttackRule {
  Phase phase = Phase::Encode;
  HookPoint point = HookPoint::Transit;
  std::optional<PlayerId> player;
  std::optional<int> wire;
  std::optional<int> hop;
  std::optional<std::string> stage;
  AttackClass cls = AttackClass::Pauli;
  PauliOp pauli;
  CliffordOp clifford;
  Matrix unitary;
  std::vector<size_t> positions;
  size_t limit = 0;

  bool matches(const HookContext& ctx) const;
  static AttackRule pauli_at(Phase ph, HookPoint pt, PauliOp p, std::vector<size_t> positions = {});
};

struct LieRule {
  Phase phase = Phase::Encode;
  std::optional<int> wire;
  std::optional<std::string> stage;
  BitVec flip;
};

class ScriptedAdversary : public Adversary {
 public:
  ScriptedAdversary& add(AttackRule r);
  ScriptedAdversary& lie(LieRule r);
  ScriptedAdversary& abort_on(std::string tag, std::optional<PlayerId> player = {});

  bool wants(const HookContext& ctx) const override;
  void attack(const HookContext& ctx, RegisterView& view) override;
  BitVec report(const HookContext& ctx, const BitVec& measured) override;
  bool abort_bit(PlayerId p, const std::string& tag) override;

  AttackClass max_class() const;
  const std::vector<AttackRule>& rules() const { return rules_; }
  const std::vector<LieRule>& lies() const { return lies_; }
  const std::vector<std::pair<std::string, std::optional<PlayerId>>>& aborts() const { return aborts_; }
  size_t fired() const { return fired_total_; }

 private:
  std::vector<AttackRule> rules_;
  std::vector<size_t> fired_;
  std::vector<LieRule> lies_;
  std::vector<std::pair<std::string, std::optional<PlayerId>>> aborts_;
  size_t fired_total_ = 0;
};

// Transcript

struct TranscriptEvent {
  std::string type;
  size_t round = 0;
  std::string phase;
  PlayerId from = 0;
  PlayerId to = 0;
  int wire = -1;
  std::string detail;
};

class Transcript {
 public:
  explicit Transcript(bool record = false) : record_(record) {}

  bool recording() const { return record_; }
  void round(Phase p);
  void send(Phase p, PlayerId from, PlayerId to, int wire);
  void mpc_call(Phase p, const std::string& tag);
  void event(Phase p, std::string type, PlayerId player, int wire, std::string detail);

  size_t quantum_rounds() const { return rounds_; }
  size_t mpc_calls() const { return calls_; }
  const std::map<std::string, size_t>& rounds_by_phase() const { return rounds_by_phase_; }
  const std::map<std::string, size_t>& calls_by_phase() const { return calls_by_phase_; }
  const std::vector<TranscriptEvent>& events() const { return events_; }
  std::string to_jsonl() const;

 private:
  bool record_;
  size_t rounds_ = 0;
  size_t calls_ = 0;
  std::map<std::string, size_t> rounds_by_phase_;
  std::map<std::string, size_t> calls_by_phase_;
  std::vector<TranscriptEvent> events_;
};

struct Account {
  size_t quantum_rounds = 0;
  size_t mpc_calls = 0;
  std::map<std::string, size_t> rounds_by_phase;
  std::map<std::string, size_t> calls_by_phase;
};

Account account(const Transcript& t);

// Sessions

struct ProtocolConfig {
  int k = 3;
  size_t n = 4;
  BackendKind backend = BackendKind::Tableau;
  std::set<PlayerId> corrupted;
  bool record = false;
  bool lazy_keys = true;

  void validate() const;
};

enum class WireStatus { Plain, Encoded, Measured, Decoded, Lost };

struct WireRecord {
  PlayerId holder = 0;
  std::vector<Slot> reg;
  WireStatus status = WireStatus::Plain;
};

class Session {
 public:
  Session(ProtocolConfig cfg, uint64_t seed, std::shared_ptr<Adversary> adversary = {});

  const ProtocolConfig& config() const { return cfg_; }
  int k() const { return cfg_.k; }
  size_t n() const { return cfg_.n; }
  bool is_corrupted(PlayerId p) const { return cfg_.corrupted.count(p) > 0; }

  MPCState& mpc() { return mpc_; }
  const MPCState& mpc() const { return mpc_; }
  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  InnerStore& store() { return *store_; }
  Rng& rng() { return rng_; }
  Rng& mpc_rng() { return mpc_rng_; }
  Adversary* adversary() { return adversary_.get(); }

  bool aborted() const { return mpc_.aborted(); }
  void abort(std::optional<PlayerId> blame, const std::string& reason) { mpc_.abort(blame, reason); }

  MpcOutcome call(Phase p, const MpcCall& c);
  bool hook_wanted(const HookContext& ctx) const;

  WireRecord& wire(int w);
  const WireRecord& wire(int w) const;
  bool has_wire(int w) const { return wires_.count(w) > 0; }
  void set_wire(int w, WireRecord r) { wires_[w] = std::move(r); }
  int fresh_wire();

 private:
  ProtocolConfig cfg_;
  Rng rng_;
  Rng mpc_rng_;
  MPCState mpc_;
  Transcript transcript_;
  std::unique_ptr<InnerStore> store_;
  std::shared_ptr<Adversary> adversary_;
  std::map<int, WireRecord> wires_;
};

// Subprotocols. Each returns false once the session has aborted.

struct EncodeRequest {
  int wire = 0;
  PlayerId owner = 1;
  InputState input;
  bool ancilla = false;
};

bool encode_batch(Session& s, const std::vector<EncodeRequest>& reqs);
bool encode_input(Session& s, PlayerId owner, int wire, const InputState& input);
bool encode_ancilla(Session& s, int wire);
bool apply_single_clifford(Session& s, GateKind g, int wire, const std::string& ctrl = "");
bool apply_cnot(Session& s, int wi, int wj, const std::string& ctrl = "");
bool measure_wire(Session& s, int wire, const std::string& label);
bool transfer_wires(Session& s, Phase p, const std::vector<std::pair<int, PlayerId>>& moves);

struct DecodeResult {
  bool accept = false;
  Slot plain = 0;
  BitVec traps;
};

DecodeResult decode_wire(Session& s, int wire, PlayerId player);

struct WireOutput {
  int wire = 0;
  PlayerId player = 0;
  bool accept = false;
  Slot plain = 0;
};

struct RunResult {
  bool aborted = false;
  std::optional<PlayerId> blame;
  std::string reason;
  std::map<std::string, bool> bits;
  std::vector<WireOutput> outputs;
  Account account;

  std::string outcome(Session& s);
};

RunResult run_clifford_circuit(Session& s, const CircuitIR& c, const std::map<int, InputState>& inputs = {});
bool t_gadget(Session& s, int data, int magic, const std::string& label);

struct MpqcOptions {
  bool distill = false;
  bool retry_blocks = false;
};

RunResult run_mpqc(Session& s, const CircuitIR& c, const std::map<int, InputState>& inputs = {},
                   MpqcOptions opts = {});

// Ideal world

std::map<std::string, double> ideal_distribution(const CircuitIR& c, const std::map<int, InputState>& inputs = {});
std::string ideal_sample(const CircuitIR& c, const std::map<int, InputState>& inputs, Rng& rng);

enum class IdealKind { Mpqc, Enc, CliffordNoDecode, Magic };

struct IdealRequest {
  IdealKind kind = IdealKind::Mpqc;
  int k = 2;
  size_t n = 1;
  std::set<PlayerId> corrupted;
  std::map<PlayerId, bool> abort_bits;
  const CircuitIR* circuit = nullptr;
  std::map<int, InputState> inputs;
  size_t magic_count = 0;
};

struct IdealResult {
  bool aborted = false;
  std::unique_ptr<InnerStore> store;
  std::map<int, std::vector<Slot>> wires;
  std::map<int, PlayerId> holders;
  MPCState S;

  IdealResult(int k, std::set<PlayerId> corrupted) : S(k, std::move(corrupted)) {}
};

IdealResult ideal_functionality(const IdealRequest& req, Rng& rng);

// Real-vs-ideal experiment

enum class DistinguishTarget { Encode, Cnot, Measure };

struct DistinguishSetup {
  DistinguishTarget target = DistinguishTarget::Encode;
  int k = 3;
  size_t n = 5;
  std::set<PlayerId> corrupted;
  BackendKind backend = BackendKind::Tableau;
  ScriptedAdversary adversary;
};

struct AdvantageEstimate {
  double p_real = 0.0;
  double p_ideal = 0.0;
  double advantage = 0.0;
  double ci = 0.0;
  size_t trials = 0;
};

bool simulator_flags(const DistinguishSetup& setup);
AdvantageEstimate distinguishing_advantage(const DistinguishSetup& setup, size_t trials, uint64_t seed);

// Measurement check with CNOT_{1,c}: exact deviation for a point-mass bit-flip attack b.
struct TrickDeviation {
  double max_per_outcome = 0.0;
  double total = 0.0;
};

TrickDeviation measurement_trick_deviation(const Matrix& rho, size_t n, const BitVec& b);

double wilson_halfwidth(size_t successes, size_t trials, double z = 2.5758293035489);

}  // namespace qmpc
