#include <algorithm>

#include "qmpc/distill.hpp"
#include "qmpc/protocol.hpp"

namespace qmpc {

void ProtocolConfig::validate() const {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (n < 1) throw ConfigError("n must be at least 1");
  for (PlayerId p : corrupted) {
    if (p < 1 || p > k) throw ConfigError("corrupted player " + std::to_string(p) + " out of range");
  }
  if (static_cast<int>(corrupted.size()) >= k) throw ConfigError("at least one player must be honest");
}

Session::Session(ProtocolConfig cfg, uint64_t seed, std::shared_ptr<Adversary> adversary)
    : cfg_((cfg.validate(), std::move(cfg))),
      rng_(seed),
      mpc_rng_(seed ^ 0x9e3779b97f4a7c15ULL),
      mpc_(cfg_.k, cfg_.corrupted, seed),
      transcript_(cfg_.record),
      store_(make_store(cfg_.backend)),
      adversary_(std::move(adversary)) {}

MpcOutcome Session::call(Phase p, const MpcCall& c) {
  transcript_.mpc_call(p, c.tag);
  AbortPolicy policy;
  if (adversary_) {
    policy = [this](PlayerId player, const std::string& tag, const MpcValue&) {
      return adversary_->abort_bit(player, tag);
    };
  }
  MpcOutcome out = mpc_.invoke(c, mpc_rng_, policy);
  if (out.aborted) transcript_.event(p, "abort", mpc_.abort_blame().value_or(0), -1, c.tag);
  return out;
}

bool Session::hook_wanted(const HookContext& ctx) const {
  return adversary_ && is_corrupted(ctx.player) && adversary_->wants(ctx);
}

WireRecord& Session::wire(int w) {
  auto it = wires_.find(w);
  if (it == wires_.end()) throw InvalidArgument("unknown wire " + std::to_string(w));
  return it->second;
}

const WireRecord& Session::wire(int w) const {
  auto it = wires_.find(w);
  if (it == wires_.end()) throw InvalidArgument("unknown wire " + std::to_string(w));
  return it->second;
}

int Session::fresh_wire() {
  int w = wires_.empty() ? 1 << 20 : std::max(1 << 20, wires_.rbegin()->first + 1);
  wires_[w] = WireRecord{};
  return w;
}

namespace {

// Physical register = frame * inner. Unknown parts are uniformly random
// Cliffords nobody has looked at yet; they are sampled on first use.
struct Frame {
  std::vector<size_t> sizes;
  std::vector<std::optional<CliffordOp>> ops;

  static Frame known(CliffordOp c) {
    size_t m = c.qubits();
    return {{m}, {std::move(c)}};
  }
  static Frame unknown(size_t m) { return {{m}, {std::nullopt}}; }
  static Frame identity(size_t m) { return known(CliffordOp(m)); }

  Frame& append(const Frame& o) {
    sizes.insert(sizes.end(), o.sizes.begin(), o.sizes.end());
    ops.insert(ops.end(), o.ops.begin(), o.ops.end());
    return *this;
  }

  size_t size() const {
    size_t m = 0;
    for (size_t s : sizes) m += s;
    return m;
  }

  bool is_known() const {
    return std::all_of(ops.begin(), ops.end(), [](const auto& o) { return o.has_value(); });
  }

  CliffordOp materialize(Rng& rng) {
    CliffordOp out;
    for (size_t i = 0; i < ops.size(); ++i) {
      if (!ops[i]) ops[i] = random_clifford(sizes[i], rng);
      out = i == 0 ? *ops[i] : tensor(out, *ops[i]);
    }
    return out;
  }

  void advance(const std::optional<CliffordOp>& f, Rng& rng) {
    if (f && is_known()) {
      *this = known(compose(*f, materialize(rng)));
    } else {
      *this = unknown(size());
    }
  }
};

class FrameView : public RegisterView {
 public:
  FrameView(InnerStore& st, const std::vector<Slot>& slots, Frame& f, Rng& rng)
      : st_(st), slots_(slots), frame_(f), rng_(rng) {}

  size_t size() const override { return slots_.size(); }

  void apply_pauli(const PauliOp& p) override {
    ensure();
    st_.apply_pauli(slots_, conjugate_pauli(kinv_, p));
  }

  void apply_clifford(const CliffordOp& c) override {
    ensure();
    st_.apply_clifford(slots_, compose(kinv_, compose(c, k_)));
  }

  void apply_unitary(const Matrix& u) override {
    ensure();
    Matrix kd = to_dense(k_);
    st_.apply_unitary(slots_, kd.adjoint() * u * kd);
  }

 private:
  void ensure() {
    if (ready_) return;
    k_ = frame_.materialize(rng_);
    kinv_ = inverse(k_);
    ready_ = true;
  }

  InnerStore& st_;
  const std::vector<Slot>& slots_;
  Frame& frame_;
  Rng& rng_;
  bool ready_ = false;
  CliffordOp k_;
  CliffordOp kinv_;
};

PlayerId next_player(PlayerId p, int hops, int k) { return ((p - 1 + hops) % k) + 1; }

bool lazy_mode(const Session& s) { return s.config().lazy_keys && !s.transcript().recording(); }

HookContext make_ctx(const Session& s, Phase ph, HookPoint pt, PlayerId player, int wire, int hop, std::string stage) {
  HookContext c;
  c.phase = ph;
  c.point = pt;
  c.player = player;
  c.wire = wire;
  c.hop = hop;
  c.n = s.n();
  c.stage = std::move(stage);
  return c;
}

void run_hook(Session& s, const HookContext& ctx, const std::vector<Slot>& slots, Frame& f) {
  if (!s.hook_wanted(ctx)) return;
  FrameView view(s.store(), slots, f, s.rng());
  s.adversary()->attack(ctx, view);
  s.transcript().event(ctx.phase, "attack", ctx.player, ctx.wire, hook_name(ctx.point) + ":" + ctx.stage);
}

BitVec reported(Session& s, const HookContext& ctx, const BitVec& measured) {
  if (!s.adversary() || !s.is_corrupted(ctx.player)) return measured;
  BitVec r = s.adversary()->report(ctx, measured);
  if (r.size() != measured.size()) throw ProtocolViolation(ctx.player, "measurement report has the wrong length");
  return r;
}

MpcResult no_output(int k) {
  MpcResult r;
  r.outputs.assign(static_cast<size_t>(k), std::monostate{});
  return r;
}

CliffordOp pauli_clifford(const BitVec& x, const BitVec& z) { return CliffordOp::pauli(PauliOp(x, z)); }

// (E (x) X^r Z^s)(I (x) U_g), or (E (x) X^r Z^s) U_g when g covers the data qubit.
CliffordOp test_frame(const CliffordOp& e, const BitVec& r, const BitVec& s, const GLElement& g) {
  CliffordOp outer = tensor(e, pauli_clifford(r, s));
  CliffordOp ug = gl_clifford(g);
  if (ug.qubits() < outer.qubits()) ug = tensor(CliffordOp(1), ug);
  return compose(outer, ug);
}

CliffordOp cnot_fan(size_t n, const BitVec& c) {
  CliffordOp out(n + 1);
  for (size_t j = 0; j < n; ++j) {
    if (c.get(j)) out = compose(CliffordOp::cnot(n + 1, 0, 1 + j), out);
  }
  return out;
}

WireRecord& encoded_wire(Session& s, int w) {
  WireRecord& r = s.wire(w);
  if (r.status == WireStatus::Measured || r.status == WireStatus::Decoded) {
    throw KeyErased("wire " + std::to_string(w) + " has no key");
  }
  if (r.status != WireStatus::Encoded) throw InvalidArgument("wire " + std::to_string(w) + " is not encoded");
  return r;
}

bool control_bit(Session& s, const std::string& ctrl, PlayerId holder) {
  if (ctrl.empty()) return true;
  std::optional<bool> b = s.mpc().read_bit(ctrl);
  if (!b) throw ProtocolViolation(holder, "missing measurement record " + ctrl);
  return *b;
}

// An unsampled key stays unsampled unless something is about to look through it.
Frame key_frame(Session& s, int w, bool need) {
  if (!need && s.mpc().key_deferred(w)) return Frame::unknown(s.n() + 1);
  return Frame::known(s.mpc().read_key(w, s.mpc_rng()));
}

void record_instruction(Session& s, Phase p, PlayerId player, int wire, const std::string& name, const CliffordOp& v) {
  s.transcript().event(p, "instruction", player, wire, name + "=" + v.to_hex());
}

// Public authentication test on M T1 T2 currently under frame f: the tester
// applies W, measures T2 and the MPC compares against r.
bool public_test(Session& s, Phase ph, int wire, PlayerId player, std::vector<Slot>& reg, Frame& f,
                 const std::string& stage) {
  const size_t n = s.n();
  const bool lazy = lazy_mode(s);
  std::optional<CliffordOp> e;
  BitVec r, sv;
  std::optional<GLElement> g;
  MpcCall instr{stage + ".instruct", [&](const MpcMemory&, Rng& rng) {
                  r = BitVec::random(n, rng);
                  if (!lazy) {
                    e = random_clifford(n + 1, rng);
                    sv = BitVec::random(n, rng);
                    g = random_invertible(2 * n, rng);
                  }
                  return no_output(s.k());
                }};
  if (s.call(ph, instr).aborted) return false;

  run_hook(s, make_ctx(s, ph, HookPoint::BeforeInstruction, player, wire, 0, stage), reg, f);
  if (!lazy) {
    CliffordOp w = compose(test_frame(*e, r, sv, *g), inverse(f.materialize(s.rng())));
    record_instruction(s, ph, player, wire, stage, w);
  }
  HookContext after = make_ctx(s, ph, HookPoint::AfterInstruction, player, wire, 0, stage);
  std::vector<Slot> traps(reg.begin() + 1, reg.end());
  const bool want = s.hook_wanted(after);
  if (!g && (want || !s.store().zero_basis(traps))) g = random_invertible(2 * n, s.mpc_rng());
  if (want) {
    if (!e) e = random_clifford(n + 1, s.mpc_rng());
    if (sv.size() != n) sv = BitVec::random(n, s.mpc_rng());
    Frame tf = Frame::known(test_frame(*e, r, sv, *g));
    run_hook(s, after, reg, tf);
  }
  if (g) s.store().apply_linear(traps, *g);
  BitVec out(n);
  for (size_t j = 0; j < n; ++j) out.set(j, s.store().measure(reg[1 + n + j], s.rng()) ^ r.get(j));
  after.stage = stage + ".report";
  BitVec rep = reported(s, after, out);
  reg.resize(n + 1);

  bool ok = false;
  MpcCall check{stage + ".check", [&](const MpcMemory&, Rng&) {
                  ok = rep == r;
                  return no_output(s.k());
                }};
  MpcOutcome o = s.call(ph, check);
  WireRecord& rec = s.wire(wire);
  rec.reg = reg;
  if (o.aborted || !ok) {
    s.mpc().store_bot(wire);
    rec.status = WireStatus::Lost;
    if (!s.aborted()) s.abort(std::nullopt, stage + " test failed on wire " + std::to_string(wire));
    return false;
  }
  if (e) {
    s.mpc().store_key(wire, *e);
  } else {
    s.mpc().store_uniform_key(wire, n + 1);
  }
  rec.status = WireStatus::Encoded;
  return true;
}

}  // namespace

bool encode_batch(Session& s, const std::vector<EncodeRequest>& reqs) {
  if (s.aborted()) return false;
  if (reqs.empty()) return true;
  const size_t n = s.n();
  const int k = s.k();
  const size_t m = 2 * n + 1;
  const bool lazy = lazy_mode(s);
  const Phase ph = Phase::Encode;
  for (const EncodeRequest& r : reqs) {
    if (r.owner < 1 || r.owner > k) throw InvalidArgument("encode: owner out of range");
    if (s.has_wire(r.wire) && s.wire(r.wire).status != WireStatus::Plain) {
      throw InvalidArgument("wire " + std::to_string(r.wire) + " already encoded");
    }
  }

  std::vector<std::vector<CliffordOp>> F(reqs.size());
  MpcCall keys{"enc.keys", [&](const MpcMemory&, Rng& rng) {
                 if (!lazy) {
                   for (auto& fq : F) {
                     for (int i = 0; i < k; ++i) fq.push_back(random_clifford(m, rng));
                   }
                 }
                 return no_output(k);
               }};
  if (s.call(ph, keys).aborted) return false;
  auto fkey = [&](size_t q, PlayerId p) -> std::optional<CliffordOp> {
    if (lazy) return std::nullopt;
    return F[q][static_cast<size_t>(p - 1)];
  };

  std::vector<std::vector<Slot>> regs(reqs.size());
  std::vector<Frame> frames(reqs.size());
  for (size_t q = 0; q < reqs.size(); ++q) {
    const EncodeRequest& r = reqs[q];
    regs[q].push_back(s.store().alloc_data(r.ancilla ? InputState::zero() : r.input));
    for (size_t j = 0; j < 2 * n; ++j) regs[q].push_back(s.store().alloc_zero());
    frames[q] = Frame::identity(m);
    HookContext ctx = make_ctx(s, ph, HookPoint::Prepare, r.owner, r.wire, 0, "prepare");
    ctx.ancilla = r.ancilla;
    run_hook(s, ctx, regs[q], frames[q]);
    frames[q].advance(fkey(q, r.owner), s.rng());
  }

  for (int hop = 1; hop <= k; ++hop) {
    for (const EncodeRequest& r : reqs) {
      s.transcript().send(ph, next_player(r.owner, hop - 1, k), next_player(r.owner, hop, k), r.wire);
    }
    s.transcript().round(ph);
    for (size_t q = 0; q < reqs.size(); ++q) {
      PlayerId to = next_player(reqs[q].owner, hop, k);
      HookContext ctx = make_ctx(s, ph, HookPoint::Transit, to, reqs[q].wire, hop, "transit");
      ctx.ancilla = reqs[q].ancilla;
      run_hook(s, ctx, regs[q], frames[q]);
      if (hop < k) frames[q].advance(fkey(q, to), s.rng());
    }
  }

  struct Secret {
    std::optional<CliffordOp> e;
    BitVec r;
    BitVec s;
    std::optional<GLElement> g;
  };
  std::vector<Secret> sec(reqs.size());
  MpcCall instr{"enc.instruct", [&](const MpcMemory&, Rng& rng) {
                  for (size_t q = 0; q < reqs.size(); ++q) {
                    sec[q].r = BitVec::random(n, rng);
                    if (lazy) continue;
                    sec[q].e = random_clifford(n + 1, rng);
                    sec[q].s = BitVec::random(n, rng);
                    sec[q].g = random_invertible(reqs[q].ancilla ? m : 2 * n, rng);
                  }
                  return no_output(k);
                }};
  if (s.call(ph, instr).aborted) return false;

  std::vector<BitVec> reports(reqs.size());
  for (size_t q = 0; q < reqs.size(); ++q) {
    const EncodeRequest& r = reqs[q];
    Secret& x = sec[q];
    HookContext before = make_ctx(s, ph, HookPoint::BeforeInstruction, r.owner, r.wire, 0, "V");
    before.ancilla = r.ancilla;
    run_hook(s, before, regs[q], frames[q]);
    if (!lazy) {
      CliffordOp v = compose(test_frame(*x.e, x.r, x.s, *x.g), inverse(frames[q].materialize(s.rng())));
      record_instruction(s, ph, r.owner, r.wire, "V", v);
    }
    HookContext after = before;
    after.point = HookPoint::AfterInstruction;
    std::vector<Slot> lin = regs[q];
    if (!r.ancilla) lin.erase(lin.begin());
    const bool want = s.hook_wanted(after);
    if (!x.g && (want || !s.store().zero_basis(lin))) x.g = random_invertible(lin.size(), s.mpc_rng());
    if (want) {
      if (!x.e) x.e = random_clifford(n + 1, s.mpc_rng());
      if (x.s.size() != n) x.s = BitVec::random(n, s.mpc_rng());
      Frame tf = Frame::known(test_frame(*x.e, x.r, x.s, *x.g));
      run_hook(s, after, regs[q], tf);
    }
    if (x.g) s.store().apply_linear(lin, *x.g);
    BitVec out(n);
    for (size_t j = 0; j < n; ++j) out.set(j, s.store().measure(regs[q][1 + n + j], s.rng()) ^ x.r.get(j));
    after.stage = "report";
    reports[q] = reported(s, after, out);
    regs[q].resize(n + 1);
  }

  std::vector<bool> ok(reqs.size(), false);
  MpcCall check{"enc.check", [&](const MpcMemory&, Rng&) {
                  for (size_t q = 0; q < reqs.size(); ++q) ok[q] = reports[q] == sec[q].r;
                  return no_output(k);
                }};
  MpcOutcome o = s.call(ph, check);
  bool all = true;
  for (size_t q = 0; q < reqs.size(); ++q) {
    WireRecord rec;
    rec.holder = reqs[q].owner;
    rec.reg = regs[q];
    if (!o.aborted && ok[q]) {
      if (sec[q].e) {
        s.mpc().store_key(reqs[q].wire, *sec[q].e);
      } else {
        s.mpc().store_uniform_key(reqs[q].wire, n + 1);
      }
      rec.status = WireStatus::Encoded;
    } else {
      s.mpc().store_bot(reqs[q].wire);
      rec.status = WireStatus::Lost;
      all = false;
    }
    s.set_wire(reqs[q].wire, std::move(rec));
  }
  if (!all && !s.aborted()) s.abort(std::nullopt, "encoding check failed");
  return !s.aborted();
}

bool encode_input(Session& s, PlayerId owner, int wire, const InputState& input) {
  return encode_batch(s, {{wire, owner, input, false}});
}

bool encode_ancilla(Session& s, int wire) { return encode_batch(s, {{wire, 1, InputState::zero(), true}}); }

bool apply_single_clifford(Session& s, GateKind g, int wire, const std::string& ctrl) {
  if (s.aborted()) return false;
  if (!is_single_qubit(g)) throw InvalidArgument("apply_single_clifford: two-qubit gate");
  WireRecord& rec = encoded_wire(s, wire);
  bool on = control_bit(s, ctrl, rec.holder);
  MpcCall c{"clifford", [&](const MpcMemory&, Rng&) { return no_output(s.k()); }};
  if (s.call(Phase::Clifford, c).aborted) return false;
  if (!on) return true;
  if (!s.mpc().key_deferred(wire)) {
    CliffordOp gd = inverse(CliffordOp::gate(1, g, 0));
    s.mpc().store_key(wire, compose(s.mpc().read_key(wire), embed(gd, s.n() + 1, {0})));
  }
  s.store().apply_gate(g, rec.reg[0]);
  return true;
}

bool apply_cnot(Session& s, int wi, int wj, const std::string& ctrl) {
  if (s.aborted()) return false;
  if (wi == wj) throw InvalidArgument("apply_cnot: control and target coincide");
  const Phase ph = Phase::Cnot;
  const size_t n = s.n();
  const size_t m = 2 * n + 1;
  const int k = s.k();
  const bool lazy = lazy_mode(s);
  WireRecord& a = encoded_wire(s, wi);
  WireRecord& b = encoded_wire(s, wj);
  const PlayerId i = a.holder;
  const PlayerId j = b.holder;
  bool on = control_bit(s, ctrl, i);

  if (i != j) {
    s.transcript().send(ph, j, i, wj);
    s.transcript().round(ph);
    HookContext ctx = make_ctx(s, ph, HookPoint::Transit, i, wj, 0, "gather");
    if (s.hook_wanted(ctx)) {
      Frame f = key_frame(s, wj, true);
      run_hook(s, ctx, b.reg, f);
    }
    b.holder = i;
  }

  std::vector<Slot> reg = a.reg;
  for (size_t q = 0; q < n; ++q) reg.push_back(s.store().alloc_zero());
  reg.insert(reg.end(), b.reg.begin(), b.reg.end());
  for (size_t q = 0; q < n; ++q) reg.push_back(s.store().alloc_zero());
  HookContext prep = make_ctx(s, ph, HookPoint::Prepare, i, wi, 0, "T2");
  prep.other_wire = wj;
  const bool need = !lazy || s.hook_wanted(prep);
  Frame frame = key_frame(s, wi, need);
  frame.append(Frame::identity(n)).append(key_frame(s, wj, need)).append(Frame::identity(n));
  run_hook(s, prep, reg, frame);

  std::vector<CliffordOp> D;
  MpcCall keys{"cnot.keys", [&](const MpcMemory&, Rng& rng) {
                 if (!lazy) {
                   for (int h = 0; h < k; ++h) D.push_back(random_clifford(2 * m, rng));
                 }
                 return no_output(k);
               }};
  if (s.call(ph, keys).aborted) return false;
  auto dkey = [&](PlayerId p) -> std::optional<CliffordOp> {
    if (lazy) return std::nullopt;
    return D[static_cast<size_t>(p - 1)];
  };
  frame.advance(dkey(i), s.rng());
  for (int hop = 1; hop <= k; ++hop) {
    PlayerId from = next_player(i, hop - 1, k);
    PlayerId to = next_player(i, hop, k);
    s.transcript().send(ph, from, to, wi);
    s.transcript().send(ph, from, to, wj);
    s.transcript().round(ph);
    HookContext ctx = make_ctx(s, ph, HookPoint::Transit, to, wi, hop, "D");
    ctx.other_wire = wj;
    run_hook(s, ctx, reg, frame);
    if (hop < k) frame.advance(dkey(to), s.rng());
  }

  std::optional<CliffordOp> fi, fj;
  MpcCall instr{"cnot.instruct", [&](const MpcMemory&, Rng& rng) {
                  if (!lazy) {
                    fi = random_clifford(m, rng);
                    fj = random_clifford(m, rng);
                  }
                  return no_output(k);
                }};
  if (s.call(ph, instr).aborted) return false;
  HookContext before = make_ctx(s, ph, HookPoint::BeforeInstruction, i, wi, 0, "V");
  before.other_wire = wj;
  run_hook(s, before, reg, frame);
  if (!lazy) {
    CliffordOp logical = on ? CliffordOp::cnot(2 * m, 0, m) : CliffordOp(2 * m);
    CliffordOp v = compose(compose(tensor(*fi, *fj), logical), inverse(frame.materialize(s.rng())));
    record_instruction(s, ph, i, wi, "V", v);
  }
  if (on) s.store().apply_gate(GateKind::CNOT, reg[0], reg[m]);
  Frame half_i = fi ? Frame::known(*fi) : Frame::unknown(m);
  Frame half_j = fj ? Frame::known(*fj) : Frame::unknown(m);
  HookContext after = before;
  after.point = HookPoint::AfterInstruction;
  if (s.hook_wanted(after)) {
    Frame both = half_i;
    both.append(half_j);
    run_hook(s, after, reg, both);
    half_i.ops[0] = both.ops[0];
    half_j.ops[0] = both.ops[1];
  }
  std::vector<Slot> reg_i(reg.begin(), reg.begin() + static_cast<long>(m));
  std::vector<Slot> reg_j(reg.begin() + static_cast<long>(m), reg.end());

  if (i != j) {
    s.transcript().send(ph, i, j, wj);
    s.transcript().round(ph);
    run_hook(s, make_ctx(s, ph, HookPoint::Transit, j, wj, k + 1, "return"), reg_j, half_j);
    s.wire(wj).holder = j;
  }

  if (!public_test(s, ph, wi, i, reg_i, half_i, "W_i")) return false;
  return public_test(s, ph, wj, j, reg_j, half_j, "W_j");
}

bool measure_wire(Session& s, int wire, const std::string& label) {
  if (s.aborted()) return false;
  if (label.empty()) throw InvalidArgument("measure_wire: empty label");
  if (s.mpc().read_bit(label)) throw InvalidArgument("label " + label + " already holds a measurement");
  const Phase ph = Phase::Measure;
  const size_t n = s.n();
  WireRecord& rec = encoded_wire(s, wire);
  const PlayerId i = rec.holder;
  const bool lazy = lazy_mode(s);
  BitVec r, sv, c;
  MpcCall instr{"meas.instruct", [&](const MpcMemory&, Rng& rng) {
                  r = BitVec::random(n + 1, rng);
                  sv = BitVec::random(n + 1, rng);
                  c = BitVec::random(n, rng);
                  return no_output(s.k());
                }};
  if (s.call(ph, instr).aborted) return false;

  HookContext before = make_ctx(s, ph, HookPoint::BeforeInstruction, i, wire, 0, "V");
  Frame f = key_frame(s, wire, !lazy || s.hook_wanted(before));
  run_hook(s, before, rec.reg, f);
  if (!lazy) {
    CliffordOp post = compose(pauli_clifford(r, sv), cnot_fan(n, c));
    record_instruction(s, ph, i, wire, "V", compose(post, inverse(s.mpc().read_key(wire))));
  }
  HookContext after = make_ctx(s, ph, HookPoint::AfterInstruction, i, wire, 0, "V");
  if (s.hook_wanted(after)) {
    Frame pf = Frame::known(compose(pauli_clifford(r, sv), cnot_fan(n, c)));
    run_hook(s, after, rec.reg, pf);
  }
  bool mb = s.store().measure(rec.reg[0], s.rng());
  BitVec out(n + 1);
  out.set(0, mb ^ r.get(0));
  for (size_t q = 0; q < n; ++q) {
    bool t = s.store().measure(rec.reg[1 + q], s.rng());
    out.set(1 + q, t ^ (mb && c.get(q)) ^ r.get(1 + q));
  }
  s.transcript().event(ph, "measurement", i, wire, out.to_string());
  after.stage = "report";
  BitVec rep = reported(s, after, out);
  rec.reg.clear();

  bool ok = false;
  bool bit = false;
  MpcCall check{"meas.check", [&](const MpcMemory&, Rng&) {
                  BitVec d = rep ^ r;
                  bit = d.get(0);
                  ok = true;
                  for (size_t q = 0; q < n; ++q) ok = ok && d.get(1 + q) == (bit && c.get(q));
                  return no_output(s.k());
                }};
  MpcOutcome o = s.call(ph, check);
  if (o.aborted || !ok) {
    s.mpc().store_bot(wire);
    rec.status = WireStatus::Lost;
    if (!s.aborted()) s.abort(std::nullopt, "measurement check failed on wire " + std::to_string(wire));
    return false;
  }
  s.mpc().store_bit(label, bit);
  s.mpc().erase_key(wire);
  rec.status = WireStatus::Measured;
  return true;
}

bool transfer_wires(Session& s, Phase p, const std::vector<std::pair<int, PlayerId>>& moves) {
  if (s.aborted()) return false;
  std::vector<std::pair<int, PlayerId>> moving;
  for (const auto& [w, to] : moves) {
    WireRecord& rec = s.wire(w);
    if (rec.holder == to) continue;
    s.transcript().send(p, rec.holder, to, w);
    moving.emplace_back(w, to);
  }
  if (moving.empty()) return true;
  s.transcript().round(p);
  for (const auto& [w, to] : moving) {
    WireRecord& rec = s.wire(w);
    HookContext ctx = make_ctx(s, p, HookPoint::Transit, to, w, 0, "transfer");
    if (s.hook_wanted(ctx) && rec.status == WireStatus::Encoded) {
      Frame f = key_frame(s, w, true);
      run_hook(s, ctx, rec.reg, f);
    }
    rec.holder = to;
  }
  return true;
}

DecodeResult decode_wire(Session& s, int wire, PlayerId player) {
  DecodeResult res;
  if (s.aborted()) return res;
  encoded_wire(s, wire);
  if (!transfer_wires(s, Phase::Decode, {{wire, player}})) return res;
  WireRecord& rec = s.wire(wire);
  MpcCall rel{"dec.release", [&](const MpcMemory&, Rng&) { return no_output(s.k()); }};
  if (s.call(Phase::Decode, rel).aborted) return res;
  HookContext ctx = make_ctx(s, Phase::Decode, HookPoint::BeforeInstruction, player, wire, 0, "E");
  Frame f = key_frame(s, wire, s.hook_wanted(ctx));
  s.mpc().erase_key(wire);
  run_hook(s, ctx, rec.reg, f);
  const size_t n = s.n();
  res.traps = BitVec(n);
  for (size_t q = 0; q < n; ++q) res.traps.set(q, s.store().measure(rec.reg[1 + q], s.rng()));
  res.accept = res.traps.none();
  if (res.accept) {
    res.plain = rec.reg[0];
    rec.reg.resize(1);
    rec.status = WireStatus::Decoded;
  } else {
    s.store().measure(rec.reg[0], s.rng());
    rec.reg.clear();
    rec.status = WireStatus::Lost;
    s.transcript().event(Phase::Decode, "local-abort", player, wire, res.traps.to_string());
  }
  return res;
}

namespace {

bool run_op(Session& s, const CircuitOp& op, const std::map<int, int>& alias) {
  auto w = [&](int x) {
    auto it = alias.find(x);
    return it == alias.end() ? x : it->second;
  };
  switch (op.kind) {
    case OpKind::Clifford:
      return apply_single_clifford(s, op.gate, w(op.w0), op.ctrl);
    case OpKind::Cnot:
      return apply_cnot(s, w(op.w0), w(op.w1), op.ctrl);
    case OpKind::Measure:
      return measure_wire(s, w(op.w0), op.label);
    case OpKind::T:
      throw InvalidArgument("T gate outside run_mpqc");
  }
  return false;
}

std::vector<EncodeRequest> encode_requests(const CircuitIR& c, const std::map<int, InputState>& inputs) {
  std::vector<EncodeRequest> reqs;
  for (const auto& [w, p] : c.inputs) {
    auto it = inputs.find(w);
    reqs.push_back({w, p, it == inputs.end() ? InputState::zero() : it->second, false});
  }
  for (int w : c.ancillas) reqs.push_back({w, 1, InputState::zero(), true});
  return reqs;
}

void finish_run(Session& s, const CircuitIR& c, const std::map<int, int>& alias, RunResult& res) {
  auto w = [&](int x) {
    auto it = alias.find(x);
    return it == alias.end() ? x : it->second;
  };
  if (!s.aborted()) {
    std::vector<std::pair<int, PlayerId>> moves;
    for (const auto& [x, p] : c.outputs) moves.emplace_back(w(x), p);
    transfer_wires(s, Phase::Decode, moves);
    for (const auto& [x, p] : c.outputs) {
      DecodeResult d = decode_wire(s, w(x), p);
      res.outputs.push_back({x, p, d.accept, d.plain});
      if (!d.accept && !s.is_corrupted(p)) {
        res.aborted = true;
        res.reason = "player " + std::to_string(p) + " rejected wire " + std::to_string(x);
      }
    }
    for (int x : c.discards) {
      if (s.wire(w(x)).status == WireStatus::Encoded) {
        s.mpc().erase_key(w(x));
        s.wire(w(x)).status = WireStatus::Lost;
      }
    }
  }
  if (s.aborted()) {
    res.aborted = true;
    res.blame = s.mpc().abort_blame();
    res.reason = s.mpc().abort_reason();
  }
  for (const std::string& l : c.labels()) {
    if (auto b = s.mpc().read_bit(l)) res.bits[l] = *b;
  }
  res.account = account(s.transcript());
}

void check_players(const Session& s, const CircuitIR& c) {
  if (c.players != s.k()) {
    throw ConfigError("circuit declares " + std::to_string(c.players) + " players, session has " + std::to_string(s.k()));
  }
}

}  // namespace

std::string RunResult::outcome(Session& s) {
  if (aborted) return "abort";
  std::string out;
  for (const auto& [l, b] : bits) out += l + "=" + (b ? "1 " : "0 ");
  out += "|";
  for (const WireOutput& o : outputs) {
    bool b = o.accept && s.store().measure(o.plain, s.rng());
    out += " w" + std::to_string(o.wire) + "=" + (b ? "1" : "0");
  }
  return out;
}

RunResult run_clifford_circuit(Session& s, const CircuitIR& c, const std::map<int, InputState>& inputs) {
  c.validate();
  check_players(s, c);
  if (!c.clifford_only()) throw InvalidArgument("circuit contains T gates; use run_mpqc");
  RunResult res;
  std::map<int, int> alias;
  if (encode_batch(s, encode_requests(c, inputs))) {
    for (const CircuitOp& op : c.ops) {
      if (!run_op(s, op, alias)) break;
    }
  }
  finish_run(s, c, alias, res);
  return res;
}

bool t_gadget(Session& s, int data, int magic, const std::string& label) {
  if (!apply_cnot(s, magic, data)) return false;
  if (!measure_wire(s, data, label)) return false;
  if (!apply_single_clifford(s, GateKind::X, magic, label)) return false;
  return apply_single_clifford(s, GateKind::S, magic, label);
}

RunResult run_mpqc(Session& s, const CircuitIR& c, const std::map<int, InputState>& inputs, MpqcOptions opts) {
  c.validate();
  check_players(s, c);
  RunResult res;
  std::map<int, int> alias;
  std::vector<int> magic;
  size_t t = c.t_count();
  if (t > 0) {
    MagicOptions mo;
    mo.distill = opts.distill;
    mo.retry = opts.retry_blocks;
    MagicBatch mb = create_magic_states(s, t, mo);
    magic = mb.outputs;
  }
  if (!s.aborted() && encode_batch(s, encode_requests(c, inputs))) {
    size_t next = 0;
    for (const CircuitOp& op : c.ops) {
      bool ok;
      if (op.kind == OpKind::T) {
        int cur = alias.count(op.w0) ? alias[op.w0] : op.w0;
        int mw = magic.at(next);
        ok = t_gadget(s, cur, mw, "_t" + std::to_string(next));
        alias[op.w0] = mw;
        ++next;
      } else {
        ok = run_op(s, op, alias);
      }
      if (!ok) break;
    }
  }
  finish_run(s, c, alias, res);
  return res;
}

}  // namespace qmpc
