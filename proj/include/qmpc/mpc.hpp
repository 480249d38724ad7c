#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qmpc/gf2.hpp"
#include "qmpc/pauli.hpp"

namespace qmpc {

using PlayerId = int;

// Classical values exchanged with the functionality. Monostate doubles as the erased marker.
using MpcValue = std::variant<std::monostate, bool, uint64_t, BitVec, CliffordOp, std::string>;

std::string describe(const MpcValue& v);

// Persistent memory of the functionality, keyed by (session, name).
class MpcMemory {
 public:
  bool contains(const std::string& name) const { return cells_.count(name) > 0; }
  const MpcValue& get(const std::string& name) const;
  void put(const std::string& name, MpcValue v) { cells_[name] = std::move(v); }
  void erase(const std::string& name) { cells_.erase(name); }
  size_t size() const { return cells_.size(); }

 private:
  std::unordered_map<std::string, MpcValue> cells_;
};

struct MpcResult {
  // outputs[i - 1] is delivered to player i.
  std::vector<MpcValue> outputs;
  // Memory update f_S; runs only when no corrupted player aborts.
  std::function<void(MpcMemory&)> update;
};

struct MpcCall {
  std::string tag;
  // Deterministic in (memory, inputs captured by the caller, the randomness stream it is handed).
  std::function<MpcResult(const MpcMemory&, Rng&)> f;
};

// Decides the abort bit of a corrupted player after it sees its own output.
using AbortPolicy = std::function<bool(PlayerId, const std::string& tag, const MpcValue& output)>;

struct MpcLogEntry {
  size_t ordinal = 0;
  std::string tag;
  std::vector<std::pair<PlayerId, bool>> abort_bits;
  bool aborted = false;
};

struct MpcOutcome {
  bool aborted = false;
  // Empty on abort; otherwise one entry per player.
  std::vector<MpcValue> outputs;

  const MpcValue& to(PlayerId p) const { return outputs.at(p - 1); }
};

// Ideal classical k-party computation with abort and persistent memory.
class MPCState {
 public:
  MPCState(int k, std::set<PlayerId> corrupted, uint64_t session = 0);

  int players() const { return k_; }
  const std::set<PlayerId>& corrupted() const { return corrupted_; }
  bool is_corrupted(PlayerId p) const { return corrupted_.count(p) > 0; }
  uint64_t session() const { return session_; }

  bool aborted() const { return aborted_; }
  std::optional<PlayerId> abort_blame() const { return blame_; }
  // Marks the session aborted; the first call fixes the attribution.
  void abort(std::optional<PlayerId> blame, const std::string& reason);
  const std::string& abort_reason() const { return reason_; }

  MpcOutcome invoke(const MpcCall& call, Rng& rng, const AbortPolicy& policy = {});

  void store_key(int wire, CliffordOp key);
  // A uniformly random key that nobody has seen yet; it is drawn from rng on first read.
  void store_uniform_key(int wire, size_t qubits);
  bool key_deferred(int wire) const;
  const CliffordOp& read_key(int wire) const;
  const CliffordOp& read_key(int wire, Rng& rng);
  CliffordOp release_key(int wire, Rng& rng);
  // Reads and erases in one step, as when a key is handed out for decoding.
  CliffordOp release_key(int wire);
  void erase_key(int wire);
  // Stores the reject marker in place of a key.
  void store_bot(int wire);
  bool has_key(int wire) const;
  bool is_bot(int wire) const;

  void store_bit(const std::string& label, bool bit);
  std::optional<bool> read_bit(const std::string& label) const;

  MpcMemory& memory() { return mem_; }
  const MpcMemory& memory() const { return mem_; }
  const std::vector<MpcLogEntry>& log() const { return log_; }
  size_t calls() const { return log_.size(); }

 private:
  std::string key_name(int wire) const;

  int k_;
  std::set<PlayerId> corrupted_;
  uint64_t session_;
  bool aborted_ = false;
  std::optional<PlayerId> blame_;
  std::string reason_;
  MpcMemory mem_;
  std::vector<MpcLogEntry> log_;
  std::set<int> erased_;
};

}  // namespace qmpc
