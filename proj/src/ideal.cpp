#include <algorithm>
#include <cmath>

#include "qmpc/protocol.hpp"

namespace qmpc {

namespace {

struct Branch {
  DenseState st;
  double p = 1.0;
  std::map<std::string, bool> bits;
};

std::string format_outcome(const std::map<std::string, bool>& bits, const std::vector<std::pair<int, bool>>& outs) {
  std::string s;
  for (const auto& [l, b] : bits) s += l + "=" + (b ? "1 " : "0 ");
  s += "|";
  for (const auto& [w, b] : outs) s += " w" + std::to_string(w) + "=" + (b ? "1" : "0");
  return s;
}

}  // namespace

std::map<std::string, double> ideal_distribution(const CircuitIR& c, const std::map<int, InputState>& inputs) {
  c.validate();
  std::set<int> ws = c.wires();
  if (ws.size() > dense_backend_limit) throw ResourceLimit("ideal_distribution: too many wires for dense simulation");
  Branch root;
  std::map<int, QubitId> q;
  for (int w : ws) {
    auto it = inputs.find(w);
    InputState in = c.inputs.count(w) && it != inputs.end() ? it->second : InputState::zero();
    q[w] = root.st.allocate_state(in.vector())[0];
  }
  std::vector<Branch> live{std::move(root)};
  for (const CircuitOp& op : c.ops) {
    std::vector<Branch> next;
    for (Branch& b : live) {
      bool on = op.ctrl.empty() || b.bits.at(op.ctrl);
      switch (op.kind) {
        case OpKind::Clifford:
          if (on) b.st.apply_gate(op.gate, q[op.w0]);
          next.push_back(std::move(b));
          break;
        case OpKind::Cnot:
          if (on) b.st.apply_gate(GateKind::CNOT, q[op.w0], q[op.w1]);
          next.push_back(std::move(b));
          break;
        case OpKind::T:
          b.st.apply_t(q[op.w0]);
          next.push_back(std::move(b));
          break;
        case OpKind::Measure: {
          double p1 = b.st.prob_one(q[op.w0]);
          for (int v = 0; v < 2; ++v) {
            double pv = v ? p1 : 1.0 - p1;
            if (pv < 1e-14) continue;
            Branch nb{b.st, b.p * pv, b.bits};
            nb.st.postselect_z(q[op.w0], v);
            nb.bits[op.label] = v;
            next.push_back(std::move(nb));
          }
          break;
        }
      }
    }
    live = std::move(next);
  }
  std::vector<int> outs;
  for (const auto& [w, p] : c.outputs) outs.push_back(w);
  std::map<std::string, double> dist;
  for (const Branch& b : live) {
    std::vector<size_t> bits;
    for (int w : outs) bits.push_back(size_t{1} << b.st.position(q[w]));
    std::vector<double> probs(size_t{1} << outs.size(), 0.0);
    const auto& amp = b.st.raw();
    for (size_t i = 0; i < amp.size(); ++i) {
      size_t key = 0;
      for (size_t k = 0; k < bits.size(); ++k) {
        if (i & bits[k]) key |= size_t{1} << k;
      }
      probs[key] += std::norm(amp[i]);
    }
    for (size_t key = 0; key < probs.size(); ++key) {
      if (probs[key] < 1e-14) continue;
      std::vector<std::pair<int, bool>> ob;
      for (size_t k = 0; k < outs.size(); ++k) ob.emplace_back(outs[k], (key >> k) & 1);
      dist[format_outcome(b.bits, ob)] += b.p * probs[key];
    }
  }
  return dist;
}

std::string ideal_sample(const CircuitIR& c, const std::map<int, InputState>& inputs, Rng& rng) {
  auto dist = ideal_distribution(c, inputs);
  double u = random_unit(rng);
  std::string last;
  for (const auto& [k, p] : dist) {
    last = k;
    u -= p;
    if (u < 0) return k;
  }
  return last;
}

IdealResult ideal_functionality(const IdealRequest& req, Rng& rng) {
  IdealResult res(req.k, req.corrupted);
  bool abort = false;
  for (const auto& [p, b] : req.abort_bits) {
    if (b && req.corrupted.count(p)) abort = true;
  }
  auto encode_reg = [&](int w, PlayerId holder, const InputState& in) {
    std::vector<Slot> reg{res.store->alloc_data(in)};
    for (size_t j = 0; j < req.n; ++j) reg.push_back(res.store->alloc_zero());
    res.wires[w] = reg;
    res.holders[w] = holder;
    res.S.store_key(w, random_clifford(req.n + 1, rng));
  };

  switch (req.kind) {
    case IdealKind::Enc: {
      if (!req.circuit) throw InvalidArgument("ideal enc needs a circuit for its input partition");
      res.store = make_store(BackendKind::AuthWire);
      for (const auto& [w, p] : req.circuit->inputs) {
        auto it = req.inputs.find(w);
        encode_reg(w, p, it == req.inputs.end() ? InputState::zero() : it->second);
      }
      for (int w : req.circuit->ancillas) encode_reg(w, 1, InputState::zero());
      if (abort) {
        for (auto& [w, reg] : res.wires) res.S.store_bot(w);
      }
      break;
    }
    case IdealKind::Magic: {
      res.store = make_store(BackendKind::AuthWire);
      for (size_t j = 0; j < req.magic_count; ++j) encode_reg(static_cast<int>(j), 1, InputState::magic());
      if (abort) {
        for (auto& [w, reg] : res.wires) res.S.store_bot(w);
      }
      break;
    }
    case IdealKind::Mpqc:
    case IdealKind::CliffordNoDecode: {
      if (!req.circuit) throw InvalidArgument("ideal functionality needs a circuit");
      const CircuitIR& c = *req.circuit;
      c.validate();
      if (req.kind == IdealKind::CliffordNoDecode && !c.clifford_only()) {
        throw InvalidArgument("clifford_nodecode takes Clifford circuits");
      }
      res.store = make_store(BackendKind::Dense);
      std::map<int, Slot> q;
      for (int w : c.wires()) {
        auto it = req.inputs.find(w);
        q[w] = res.store->alloc_data(c.inputs.count(w) && it != req.inputs.end() ? it->second : InputState::zero());
      }
      if (abort) {
        res.aborted = true;
        res.S.abort(std::nullopt, "abort bit");
        return res;
      }
      for (const CircuitOp& op : c.ops) {
        bool on = op.ctrl.empty() || *res.S.read_bit(op.ctrl);
        switch (op.kind) {
          case OpKind::Clifford:
            if (on) res.store->apply_gate(op.gate, q[op.w0]);
            break;
          case OpKind::Cnot:
            if (on) res.store->apply_gate(GateKind::CNOT, q[op.w0], q[op.w1]);
            break;
          case OpKind::T:
            res.store->apply_t(q[op.w0]);
            break;
          case OpKind::Measure:
            res.S.store_bit(op.label, res.store->measure(q[op.w0], rng));
            break;
        }
      }
      for (const auto& [w, p] : c.outputs) {
        res.wires[w] = {q[w]};
        res.holders[w] = p;
        if (req.kind == IdealKind::CliffordNoDecode) res.S.store_key(w, random_clifford(req.n + 1, rng));
      }
      break;
    }
  }
  res.aborted = abort;
  if (abort) res.S.abort(std::nullopt, "abort bit");
  return res;
}

// Distinguishing experiment

namespace {

bool applies(const DistinguishSetup& s, std::optional<PlayerId> p) { return !p || s.corrupted.count(*p); }

Phase target_phase(DistinguishTarget t) {
  switch (t) {
    case DistinguishTarget::Encode:
      return Phase::Encode;
    case DistinguishTarget::Cnot:
      return Phase::Cnot;
    case DistinguishTarget::Measure:
      return Phase::Measure;
  }
  return Phase::Encode;
}

bool in_experiment(const DistinguishSetup& s, Phase p) {
  if (p == Phase::Encode) return true;
  if (p == Phase::Decode) return s.target != DistinguishTarget::Measure;
  return p == target_phase(s.target);
}

// Pauli restricted to the register positions a rule touches, expanded to the full register.
PauliOp placed(const AttackRule& r, size_t m) {
  if (r.positions.empty()) return r.pauli;
  PauliOp full(m);
  for (size_t k = 0; k < r.positions.size(); ++k) {
    full.x.set(r.positions[k], r.pauli.x.get(k));
    full.z.set(r.positions[k], r.pauli.z.get(k));
  }
  return full;
}

size_t register_size(const AttackRule& r, size_t n) {
  if (r.positions.empty()) return r.pauli.size();
  size_t m = 0;
  for (size_t p : r.positions) m = std::max(m, p + 1);
  if (r.phase == Phase::Cnot && r.point != HookPoint::AfterInstruction) return std::max(m, 4 * n + 2);
  if (r.phase == Phase::Encode) return std::max(m, 2 * n + 1);
  return std::max(m, n + 1);
}

struct SimVerdict {
  bool flag = false;
  std::set<int> flips;
};

std::set<std::string> experiment_tags(DistinguishTarget t) {
  std::set<std::string> tags{"enc.keys", "enc.instruct", "enc.check"};
  if (t == DistinguishTarget::Measure) {
    tags.insert({"meas.instruct", "meas.check"});
  } else {
    tags.insert("dec.release");
  }
  if (t == DistinguishTarget::Cnot) {
    tags.insert({"cnot.keys", "cnot.instruct", "W_i.instruct", "W_i.check", "W_j.instruct", "W_j.check"});
  }
  return tags;
}

SimVerdict simulate(const DistinguishSetup& s) {
  if (s.adversary.max_class() > AttackClass::Pauli) {
    throw InvalidArgument("the filter simulators take Pauli-class scripts");
  }
  const size_t n = s.n;
  SimVerdict v;
  for (const AttackRule& r : s.adversary.rules()) {
    if (r.cls == AttackClass::None || !applies(s, r.player) || !in_experiment(s, r.phase)) continue;
    PauliOp p = placed(r, register_size(r, n));
    if (p.is_trivial()) continue;
    if (r.point == HookPoint::Prepare && r.phase == Phase::Encode) {
      // Zero filter on the traps; the data part passes through.
      for (size_t j = 1; j < p.size(); ++j) v.flag = v.flag || p.x.get(j);
      if (p.x.get(0)) {
        std::set<int> ws{1};
        if (s.target == DistinguishTarget::Cnot) ws.insert(2);
        if (r.wire) ws = {*r.wire};
        for (int w : ws) {
          if (!v.flips.erase(w)) v.flips.insert(w);
        }
      }
    } else if (r.point == HookPoint::Prepare && r.phase == Phase::Cnot) {
      size_t m = 2 * n + 1;
      for (size_t j = 0; j < p.size(); ++j) {
        size_t off = j % m;
        bool cipher = off <= n;
        v.flag = v.flag || (cipher ? (p.x.get(j) || p.z.get(j)) : p.x.get(j));
      }
    } else if (r.phase == Phase::Measure && r.point == HookPoint::AfterInstruction) {
      v.flag = v.flag || p.x.any();
    } else {
      v.flag = true;
    }
  }
  for (const LieRule& l : s.adversary.lies()) {
    if (!in_experiment(s, l.phase) || l.flip.none()) continue;
    bool liar = s.corrupted.count(1) || (s.target == DistinguishTarget::Cnot && s.corrupted.count(2));
    v.flag = v.flag || liar;
  }
  std::set<std::string> tags = experiment_tags(s.target);
  for (const auto& [tag, p] : s.adversary.aborts()) {
    if (tags.count(tag) && (p ? s.corrupted.count(*p) > 0 : !s.corrupted.empty())) v.flag = true;
  }
  return v;
}

PlayerId first_honest(const DistinguishSetup& s) {
  for (PlayerId p = 1; p <= s.k; ++p) {
    if (!s.corrupted.count(p)) return p;
  }
  throw ConfigError("no honest player");
}

bool real_trial(const DistinguishSetup& s, uint64_t seed) {
  ProtocolConfig cfg;
  cfg.k = s.k;
  cfg.n = s.n;
  cfg.backend = s.backend;
  cfg.corrupted = s.corrupted;
  auto adv = std::make_shared<ScriptedAdversary>(s.adversary);
  Session ses(cfg, seed, adv);
  PlayerId h = first_honest(s);
  auto decoded_one = [&](int w) {
    DecodeResult d = decode_wire(ses, w, h);
    return !ses.aborted() && d.accept && ses.store().measure(d.plain, ses.rng());
  };
  switch (s.target) {
    case DistinguishTarget::Encode:
      if (!encode_input(ses, 1, 1, InputState::one())) return false;
      return decoded_one(1);
    case DistinguishTarget::Measure:
      if (!encode_input(ses, 1, 1, InputState::one())) return false;
      if (!measure_wire(ses, 1, "m")) return false;
      return ses.mpc().read_bit("m").value_or(false);
    case DistinguishTarget::Cnot: {
      if (!encode_batch(ses, {{1, 1, InputState::one(), false}, {2, 2, InputState::zero(), false}})) return false;
      if (!apply_cnot(ses, 1, 2)) return false;
      bool a = decoded_one(1);
      bool b = decoded_one(2);
      return a && b;
    }
  }
  return false;
}

bool ideal_trial(const DistinguishSetup& s, const SimVerdict& v, Rng& rng) {
  CircuitIR c;
  c.players = s.k;
  c.inputs[1] = 1;
  c.outputs[1] = first_honest(s);
  std::map<int, InputState> in{{1, InputState::one()}, {2, InputState::zero()}};
  if (s.target == DistinguishTarget::Cnot) {
    c.inputs[2] = 2;
    c.outputs[2] = first_honest(s);
    c.cnot(1, 2);
  }
  if (s.target == DistinguishTarget::Measure) {
    c.outputs.clear();
    c.discards.insert(1);
    c.measure(1, "m");
  }
  IdealRequest req;
  req.kind = IdealKind::Mpqc;
  req.k = s.k;
  req.n = s.n;
  req.corrupted = s.corrupted;
  req.circuit = &c;
  req.inputs = in;
  if (v.flag) {
    for (PlayerId p : s.corrupted) req.abort_bits[p] = true;
  }
  for (int w : v.flips) {
    req.inputs[w] = req.inputs.count(w) && req.inputs[w].kind == InputState::Kind::One ? InputState::zero()
                                                                                       : InputState::one();
  }
  IdealResult r = ideal_functionality(req, rng);
  if (r.aborted) return false;
  if (s.target == DistinguishTarget::Measure) return *r.S.read_bit("m");
  bool ok = true;
  for (const auto& [w, slots] : r.wires) ok = ok && r.store->measure(slots[0], rng);
  return ok;
}

}  // namespace

bool simulator_flags(const DistinguishSetup& setup) { return simulate(setup).flag; }

AdvantageEstimate distinguishing_advantage(const DistinguishSetup& setup, size_t trials, uint64_t seed) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  SimVerdict v = simulate(setup);
  Rng rng(seed);
  size_t real = 0, ideal = 0;
  for (size_t t = 0; t < trials; ++t) {
    real += real_trial(setup, rng());
    ideal += ideal_trial(setup, v, rng);
  }
  AdvantageEstimate e;
  e.trials = trials;
  e.p_real = static_cast<double>(real) / static_cast<double>(trials);
  e.p_ideal = static_cast<double>(ideal) / static_cast<double>(trials);
  e.advantage = std::abs(e.p_real - e.p_ideal);
  e.ci = wilson_halfwidth(real, trials) + wilson_halfwidth(ideal, trials);
  return e;
}

TrickDeviation measurement_trick_deviation(const Matrix& rho, size_t n, const BitVec& b) {
  if (rho.rows() != 2 || rho.cols() != 2) throw InvalidDimension("measurement trick takes a single-qubit state");
  if (b.size() != n + 1) throw InvalidDimension("attack must act on n + 1 qubits");
  if (n > 20) throw ResourceLimit("measurement trick: n too large");
  // Bit 0 of a basis index is the data qubit, bit 1 + j trap j.
  uint64_t bx = b.to_u64();
  uint64_t cnt = uint64_t{1} << n;
  TrickDeviation d;
  for (int m = 0; m < 2; ++m) {
    double lhs = 0.0;
    for (uint64_t c = 0; c < cnt; ++c) {
      // <m, m.c| X^b CNOT_c (rho (x) |0><0|) CNOT_c X^b |m, m.c>
      uint64_t y = static_cast<uint64_t>(m) | (m ? c << 1 : 0);
      uint64_t pre = y ^ bx;
      uint64_t d0 = pre & 1;
      uint64_t traps = (pre >> 1) ^ (d0 ? c : 0);
      if (traps == 0) lhs += rho(static_cast<Eigen::Index>(d0), static_cast<Eigen::Index>(d0)).real();
    }
    lhs /= static_cast<double>(cnt);
    double ref = b.none() ? rho(m, m).real() : 0.0;
    double dev = std::abs(lhs - ref);
    d.max_per_outcome = std::max(d.max_per_outcome, dev);
    d.total += dev;
  }
  return d;
}

double wilson_halfwidth(size_t successes, size_t trials, double z) {
  if (trials == 0) return 1.0;
  double N = static_cast<double>(trials);
  double p = static_cast<double>(successes) / N;
  double z2 = z * z;
  return z / (1 + z2 / N) * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N));
}

}  // namespace qmpc
