#include <json.hpp>

#include "qmpc/protocol.hpp"

namespace qmpc {

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::Encode:
      return "encoding";
    case Phase::Clifford:
      return "clifford";
    case Phase::Cnot:
      return "cnot";
    case Phase::Measure:
      return "measure";
    case Phase::Decode:
      return "decoding";
    case Phase::Magic:
      return "magic";
  }
  return "?";
}

std::string hook_name(HookPoint p) {
  switch (p) {
    case HookPoint::Prepare:
      return "prepare";
    case HookPoint::Transit:
      return "transit";
    case HookPoint::BeforeInstruction:
      return "before-instruction";
    case HookPoint::AfterInstruction:
      return "after-instruction";
  }
  return "?";
}

bool AttackRule::matches(const HookContext& ctx) const {
  if (phase != ctx.phase || point != ctx.point) return false;
  if (player && *player != ctx.player) return false;
  if (wire && *wire != ctx.wire) return false;
  if (hop && *hop != ctx.hop) return false;
  if (stage && *stage != ctx.stage) return false;
  return true;
}

AttackRule AttackRule::pauli_at(Phase ph, HookPoint pt, PauliOp p, std::vector<size_t> positions) {
  AttackRule r;
  r.phase = ph;
  r.point = pt;
  r.cls = AttackClass::Pauli;
  r.pauli = std::move(p);
  r.positions = std::move(positions);
  return r;
}

ScriptedAdversary& ScriptedAdversary::add(AttackRule r) {
  rules_.push_back(std::move(r));
  fired_.push_back(0);
  return *this;
}

ScriptedAdversary& ScriptedAdversary::lie(LieRule r) {
  lies_.push_back(std::move(r));
  return *this;
}

ScriptedAdversary& ScriptedAdversary::abort_on(std::string tag, std::optional<PlayerId> player) {
  aborts_.emplace_back(std::move(tag), player);
  return *this;
}

bool ScriptedAdversary::wants(const HookContext& ctx) const {
  for (size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].cls == AttackClass::None) continue;
    if (rules_[i].limit && fired_[i] >= rules_[i].limit) continue;
    if (rules_[i].matches(ctx)) return true;
  }
  return false;
}

namespace {

std::vector<size_t> positions_or_all(const std::vector<size_t>& pos, size_t size) {
  if (!pos.empty()) return pos;
  std::vector<size_t> all(size);
  for (size_t i = 0; i < size; ++i) all[i] = i;
  return all;
}

}  // namespace

void ScriptedAdversary::attack(const HookContext& ctx, RegisterView& view) {
  for (size_t i = 0; i < rules_.size(); ++i) {
    const AttackRule& r = rules_[i];
    if (r.cls == AttackClass::None || !r.matches(ctx)) continue;
    if (r.limit && fired_[i] >= r.limit) continue;
    ++fired_[i];
    ++fired_total_;
    size_t m = view.size();
    std::vector<size_t> pos = positions_or_all(r.positions, m);
    for (size_t p : pos) {
      if (p >= m) throw InvalidArgument("attack position outside the register");
    }
    switch (r.cls) {
      case AttackClass::Pauli: {
        if (r.pauli.size() != pos.size()) throw InvalidDimension("attack Pauli size mismatch");
        PauliOp full(m);
        for (size_t k = 0; k < pos.size(); ++k) {
          full.x.set(pos[k], r.pauli.x.get(k));
          full.z.set(pos[k], r.pauli.z.get(k));
        }
        view.apply_pauli(full);
        break;
      }
      case AttackClass::Clifford:
        if (r.clifford.qubits() != pos.size()) throw InvalidDimension("attack Clifford size mismatch");
        view.apply_clifford(pos.size() == m && r.positions.empty() ? r.clifford : embed(r.clifford, m, pos));
        break;
      case AttackClass::Dense: {
        if (r.unitary.rows() != (Eigen::Index{1} << pos.size())) throw InvalidDimension("attack unitary size mismatch");
        if (pos.size() != m) throw InvalidArgument("dense attacks act on the whole register");
        view.apply_unitary(r.unitary);
        break;
      }
      case AttackClass::None:
        break;
    }
  }
}

BitVec ScriptedAdversary::report(const HookContext& ctx, const BitVec& measured) {
  BitVec out = measured;
  for (const LieRule& l : lies_) {
    if (l.phase != ctx.phase) continue;
    if (l.wire && *l.wire != ctx.wire) continue;
    if (l.stage && *l.stage != ctx.stage) continue;
    if (l.flip.size() != out.size()) continue;
    out ^= l.flip;
  }
  return out;
}

bool ScriptedAdversary::abort_bit(PlayerId p, const std::string& tag) {
  for (const auto& [t, player] : aborts_) {
    if (t == tag && (!player || *player == p)) return true;
  }
  return false;
}

AttackClass ScriptedAdversary::max_class() const {
  AttackClass c = AttackClass::None;
  for (const AttackRule& r : rules_) c = std::max(c, r.cls);
  return c;
}

void Transcript::round(Phase p) {
  ++rounds_;
  ++rounds_by_phase_[phase_name(p)];
}

void Transcript::send(Phase p, PlayerId from, PlayerId to, int wire) {
  if (!record_) return;
  events_.push_back({"send", rounds_, phase_name(p), from, to, wire, ""});
}

void Transcript::mpc_call(Phase p, const std::string& tag) {
  ++calls_;
  ++calls_by_phase_[phase_name(p)];
  if (record_) events_.push_back({"mpc-call", rounds_, phase_name(p), 0, 0, -1, tag});
}

void Transcript::event(Phase p, std::string type, PlayerId player, int wire, std::string detail) {
  if (!record_) return;
  events_.push_back({std::move(type), rounds_, phase_name(p), player, player, wire, std::move(detail)});
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const TranscriptEvent& e : events_) {
    nlohmann::ordered_json j;
    j["type"] = e.type;
    j["round"] = e.round;
    j["phase"] = e.phase;
    j["from"] = e.from;
    j["to"] = e.to;
    j["wire"] = e.wire;
    j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Account account(const Transcript& t) {
  return {t.quantum_rounds(), t.mpc_calls(), t.rounds_by_phase(), t.calls_by_phase()};
}

}  // namespace qmpc
