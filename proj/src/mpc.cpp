#include "qmpc/mpc.hpp"

#include "qmpc/errors.hpp"

namespace qmpc {

std::string describe(const MpcValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "bot"; }
    std::string operator()(bool b) const { return b ? "1" : "0"; }
    std::string operator()(uint64_t x) const { return std::to_string(x); }
    std::string operator()(const BitVec& b) const { return b.to_string(); }
    std::string operator()(const CliffordOp& c) const { return c.to_hex(); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

const MpcValue& MpcMemory::get(const std::string& name) const {
  auto it = cells_.find(name);
  if (it == cells_.end()) throw InvalidArgument("mpc memory has no cell " + name);
  return it->second;
}

MPCState::MPCState(int k, std::set<PlayerId> corrupted, uint64_t session)
    : k_(k), corrupted_(std::move(corrupted)), session_(session) {
  if (k < 2) throw ConfigError("at least two players are required");
  for (PlayerId p : corrupted_) {
    if (p < 1 || p > k) throw ConfigError("corrupted player out of range");
  }
  if (static_cast<int>(corrupted_.size()) >= k) throw ConfigError("at least one player must be honest");
}

void MPCState::abort(std::optional<PlayerId> blame, const std::string& reason) {
  if (aborted_) return;
  aborted_ = true;
  blame_ = blame;
  reason_ = reason;
}

MpcOutcome MPCState::invoke(const MpcCall& call, Rng& rng, const AbortPolicy& policy) {
  MpcLogEntry entry;
  entry.ordinal = log_.size();
  entry.tag = call.tag;
  if (aborted_) {
    entry.aborted = true;
    log_.push_back(std::move(entry));
    return {true, {}};
  }
  MpcResult res = call.f(mem_, rng);
  if (static_cast<int>(res.outputs.size()) != k_) res.outputs.resize(k_);
  std::optional<PlayerId> first;
  for (PlayerId p : corrupted_) {
    bool b = policy ? policy(p, call.tag, res.outputs[p - 1]) : false;
    entry.abort_bits.emplace_back(p, b);
    if (b && !first) first = p;
  }
  if (first) {
    entry.aborted = true;
    log_.push_back(std::move(entry));
    abort(first, "abort bit in " + call.tag);
    return {true, {}};
  }
  if (res.update) res.update(mem_);
  log_.push_back(std::move(entry));
  return {false, std::move(res.outputs)};
}

std::string MPCState::key_name(int wire) const {
  return "s" + std::to_string(session_) + "/key/" + std::to_string(wire);
}

void MPCState::store_key(int wire, CliffordOp key) {
  if (wire < 0) throw InvalidArgument("wire id must be non-negative");
  erased_.erase(wire);
  mem_.put(key_name(wire), std::move(key));
}

void MPCState::store_uniform_key(int wire, size_t qubits) {
  if (wire < 0) throw InvalidArgument("wire id must be non-negative");
  erased_.erase(wire);
  mem_.put(key_name(wire), static_cast<uint64_t>(qubits));
}

bool MPCState::key_deferred(int wire) const {
  std::string name = key_name(wire);
  return !erased_.count(wire) && mem_.contains(name) && std::holds_alternative<uint64_t>(mem_.get(name));
}

const CliffordOp& MPCState::read_key(int wire, Rng& rng) {
  if (key_deferred(wire)) {
    std::string name = key_name(wire);
    size_t m = static_cast<size_t>(std::get<uint64_t>(mem_.get(name)));
    mem_.put(name, random_clifford(m, rng));
  }
  return read_key(wire);
}

CliffordOp MPCState::release_key(int wire, Rng& rng) {
  CliffordOp key = read_key(wire, rng);
  erase_key(wire);
  return key;
}

const CliffordOp& MPCState::read_key(int wire) const {
  std::string name = key_name(wire);
  if (erased_.count(wire) || !mem_.contains(name)) throw KeyErased("key of wire " + std::to_string(wire) + " is not available");
  const MpcValue& v = mem_.get(name);
  if (!std::holds_alternative<CliffordOp>(v)) throw KeyErased("wire " + std::to_string(wire) + " holds the reject marker");
  return std::get<CliffordOp>(v);
}

CliffordOp MPCState::release_key(int wire) {
  CliffordOp key = read_key(wire);
  erase_key(wire);
  return key;
}

void MPCState::erase_key(int wire) {
  mem_.put(key_name(wire), std::monostate{});
  erased_.insert(wire);
}

void MPCState::store_bot(int wire) {
  mem_.put(key_name(wire), std::monostate{});
  erased_.erase(wire);
}

bool MPCState::has_key(int wire) const {
  std::string name = key_name(wire);
  if (erased_.count(wire) || !mem_.contains(name)) return false;
  const MpcValue& v = mem_.get(name);
  return std::holds_alternative<CliffordOp>(v) || std::holds_alternative<uint64_t>(v);
}

bool MPCState::is_bot(int wire) const {
  std::string name = key_name(wire);
  return !erased_.count(wire) && mem_.contains(name) && std::holds_alternative<std::monostate>(mem_.get(name));
}

void MPCState::store_bit(const std::string& label, bool bit) {
  mem_.put("s" + std::to_string(session_) + "/bit/" + label, bit);
}

std::optional<bool> MPCState::read_bit(const std::string& label) const {
  std::string name = "s" + std::to_string(session_) + "/bit/" + label;
  if (!mem_.contains(name)) return std::nullopt;
  const MpcValue& v = mem_.get(name);
  if (!std::holds_alternative<bool>(v)) return std::nullopt;
  return std::get<bool>(v);
}

}  // namespace qmpc
