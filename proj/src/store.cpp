#include <algorithm>
#include <cmath>

#include "qmpc/protocol.hpp"

namespace qmpc {

std::vector<std::pair<size_t, size_t>> gl_cnot_network(const GLElement& g) {
  BitMatrix m = g.matrix();
  size_t d = m.rows();
  std::vector<std::pair<size_t, size_t>> rec;
  for (size_t c = 0; c < d; ++c) {
    if (!m.get(c, c)) {
      size_t r = c + 1;
      while (r < d && !m.get(r, c)) ++r;
      if (r == d) throw SingularMatrix("gl_cnot_network: singular matrix");
      m.row(c) ^= m.row(r);
      rec.emplace_back(r, c);
    }
    for (size_t r = 0; r < d; ++r) {
      if (r != c && m.get(r, c)) {
        m.row(r) ^= m.row(c);
        rec.emplace_back(c, r);
      }
    }
  }
  std::reverse(rec.begin(), rec.end());
  return rec;
}

CliffordOp gl_clifford(const GLElement& g) {
  size_t d = g.dim();
  CliffordOp c(d);
  for (size_t j = 0; j < d; ++j) {
    c.set_image(j, PauliOp(g.matrix().column(j), BitVec(d)));
    c.set_image(d + j, PauliOp(BitVec(d), g.inverse().row(j)));
  }
  return c;
}

namespace {

Qubits as_qubits(const std::vector<Slot>& s) { return Qubits(s.begin(), s.end()); }

class QubitStore : public InnerStore {
 public:
  explicit QubitStore(BackendKind k) : kind_(k) {
    if (k == BackendKind::Dense) {
      st_ = std::make_unique<DenseState>();
    } else {
      st_ = std::make_unique<StabilizerState>();
    }
  }

  BackendKind kind() const override { return kind_; }

  Slot alloc_data(const InputState& s) override {
    using K = InputState::Kind;
    if (s.kind == K::Magic || s.kind == K::MagicPerp || s.kind == K::Amplitudes) {
      return dense("non-stabilizer input").allocate_state(s.vector())[0];
    }
    QubitId q = st_->allocate(1)[0];
    switch (s.kind) {
      case K::One:
        st_->apply_gate(GateKind::X, q);
        break;
      case K::Plus:
        st_->apply_gate(GateKind::H, q);
        break;
      case K::Minus:
        st_->apply_gate(GateKind::X, q);
        st_->apply_gate(GateKind::H, q);
        break;
      case K::PlusI:
        st_->apply_gate(GateKind::H, q);
        st_->apply_gate(GateKind::S, q);
        break;
      default:
        break;
    }
    return q;
  }

  Slot alloc_zero() override { return st_->allocate(1)[0]; }

  void apply_pauli(const std::vector<Slot>& slots, const PauliOp& p) override {
    st_->apply_pauli(p, as_qubits(slots));
  }

  void apply_clifford(const std::vector<Slot>& slots, const CliffordOp& c) override {
    st_->apply_clifford(c, as_qubits(slots));
  }

  void apply_unitary(const std::vector<Slot>& slots, const Matrix& u) override {
    dense("dense attack").apply_gate_dense(u, as_qubits(slots));
  }

  void apply_gate(GateKind g, Slot a, Slot b) override { st_->apply_gate(g, a, b); }

  void apply_t(Slot a) override { dense("T gate").apply_t(a); }

  void apply_linear(const std::vector<Slot>& slots, const GLElement& g) override {
    if (slots.size() != g.dim()) throw InvalidDimension("apply_linear: size mismatch");
    for (const auto& [c, t] : gl_cnot_network(g)) st_->apply_gate(GateKind::CNOT, slots[c], slots[t]);
  }

  bool measure(Slot a, Rng& rng) override { return st_->measure_z({a}, rng).get(0); }

  bool measure_t_basis(Slot a, Rng& rng) override {
    DenseState& d = dense("T-basis measurement");
    return d.measure_t_basis(a, rng);
  }

  double prob_one(Slot a) const override { return st_->prob_one(a); }

  Vector statevector(const std::vector<Slot>& slots) override { return st_->to_statevector(as_qubits(slots)); }

 private:
  DenseState& dense(const char* what) {
    if (kind_ != BackendKind::Dense) throw InvalidArgument(std::string(what) + " needs the dense backend");
    return static_cast<DenseState&>(*st_);
  }

  BackendKind kind_;
  std::unique_ptr<QuantumState> st_;
};

// Basis states are kept as bits; anything else lives in small tableaux that merge on contact.
class TableauStore : public InnerStore {
 public:
  BackendKind kind() const override { return BackendKind::Tableau; }

  Slot alloc_data(const InputState& s) override {
    using K = InputState::Kind;
    if (s.kind == K::Magic || s.kind == K::MagicPerp || s.kind == K::Amplitudes) {
      throw InvalidArgument("non-stabilizer input needs the dense backend");
    }
    Slot a = alloc_zero();
    switch (s.kind) {
      case K::One:
        slots_[a].bit = true;
        break;
      case K::Plus:
        apply_gate(GateKind::H, a, 0);
        break;
      case K::Minus:
        slots_[a].bit = true;
        apply_gate(GateKind::H, a, 0);
        break;
      case K::PlusI:
        apply_gate(GateKind::H, a, 0);
        apply_gate(GateKind::S, a, 0);
        break;
      default:
        break;
    }
    return a;
  }

  Slot alloc_zero() override {
    slots_.push_back({});
    return static_cast<Slot>(slots_.size() - 1);
  }

  void apply_pauli(const std::vector<Slot>& slots, const PauliOp& p) override {
    if (slots.size() != p.size()) throw InvalidDimension("apply_pauli: size mismatch");
    for (size_t i = 0; i < slots.size(); ++i) {
      if (p.x.get(i)) apply_gate(GateKind::X, slots[i], 0);
      if (p.z.get(i)) apply_gate(GateKind::Z, slots[i], 0);
    }
  }

  void apply_clifford(const std::vector<Slot>& slots, const CliffordOp& c) override {
    if (slots.size() != c.qubits()) throw InvalidDimension("apply_clifford: size mismatch");
    size_t k = merge(slots);
    Qubits qs;
    for (Slot a : slots) qs.push_back(slots_.at(a).q);
    comps_[k].st.apply_clifford(c, qs);
  }

  void apply_unitary(const std::vector<Slot>&, const Matrix&) override {
    throw InvalidArgument("dense attack needs the dense backend");
  }

  void apply_gate(GateKind g, Slot a, Slot b) override {
    Info& s = slots_.at(a);
    if (g == GateKind::CNOT) {
      if (s.classical) {
        if (s.bit) apply_gate(GateKind::X, b, 0);
        return;
      }
      size_t k = merge({a, b});
      comps_[k].st.apply_gate(g, slots_[a].q, slots_[b].q);
      return;
    }
    if (s.classical) {
      switch (g) {
        case GateKind::X:
        case GateKind::Y:
          s.bit = !s.bit;
          return;
        case GateKind::I:
        case GateKind::Z:
        case GateKind::S:
        case GateKind::SDG:
          return;
        default:
          materialize(a);
          break;
      }
    }
    comps_[slots_[a].comp].st.apply_gate(g, slots_[a].q);
  }

  void apply_t(Slot) override { throw InvalidArgument("T gate needs the dense backend"); }

  bool zero_basis(const std::vector<Slot>& slots) const override {
    return std::all_of(slots.begin(), slots.end(), [&](Slot a) { return slots_.at(a).classical && !slots_.at(a).bit; });
  }

  void apply_linear(const std::vector<Slot>& slots, const GLElement& g) override {
    if (slots.size() != g.dim()) throw InvalidDimension("apply_linear: size mismatch");
    bool classical = std::all_of(slots.begin(), slots.end(), [&](Slot a) { return slots_.at(a).classical; });
    if (classical) {
      BitVec x(slots.size());
      for (size_t i = 0; i < slots.size(); ++i) x.set(i, slots_[slots[i]].bit);
      BitVec y = apply_to_basis(g, x);
      for (size_t i = 0; i < slots.size(); ++i) slots_[slots[i]].bit = y.get(i);
      return;
    }
    for (const auto& [c, t] : gl_cnot_network(g)) apply_gate(GateKind::CNOT, slots[c], slots[t]);
  }

  bool measure(Slot a, Rng& rng) override {
    Info& s = slots_.at(a);
    if (s.classical) return s.bit;
    Comp& c = comps_[s.comp];
    bool b = c.st.measure_z({s.q}, rng).get(0);
    c.members.erase(std::find(c.members.begin(), c.members.end(), a));
    s = Info{};
    s.bit = b;
    return b;
  }

  bool measure_t_basis(Slot, Rng&) override { throw InvalidArgument("T-basis measurement needs the dense backend"); }

  double prob_one(Slot a) const override {
    const Info& s = slots_.at(a);
    if (s.classical) return s.bit ? 1.0 : 0.0;
    return comps_[s.comp].st.prob_one(s.q);
  }

  Vector statevector(const std::vector<Slot>& slots) override {
    if (slots.empty()) return Vector::Ones(1);
    size_t k = merge(slots);
    Qubits qs;
    for (Slot a : slots) qs.push_back(slots_.at(a).q);
    return comps_[k].st.to_statevector(qs);
  }

 private:
  struct Info {
    bool classical = true;
    bool bit = false;
    size_t comp = 0;
    QubitId q = 0;
  };
  struct Comp {
    StabilizerState st;
    std::vector<Slot> members;
  };

  void materialize(Slot a) {
    Info& s = slots_[a];
    Comp c;
    c.st = StabilizerState(1);
    s.q = c.st.live_qubits()[0];
    if (s.bit) c.st.apply_gate(GateKind::X, s.q);
    c.members.push_back(a);
    s.classical = false;
    s.comp = comps_.size();
    comps_.push_back(std::move(c));
  }

  size_t merge(const std::vector<Slot>& slots) {
    for (Slot a : slots) {
      if (slots_.at(a).classical) materialize(a);
    }
    size_t k = slots_[slots[0]].comp;
    for (Slot a : slots) {
      size_t o = slots_[a].comp;
      if (o == k) continue;
      Comp& from = comps_[o];
      Qubits old = from.st.live_qubits();
      Qubits fresh = comps_[k].st.absorb(from.st);
      for (Slot m : from.members) {
        Info& s = slots_[m];
        s.q = fresh[static_cast<size_t>(std::find(old.begin(), old.end(), s.q) - old.begin())];
        s.comp = k;
        comps_[k].members.push_back(m);
      }
      from = Comp{};
    }
    return k;
  }

  std::vector<Comp> comps_;
  std::vector<Info> slots_;
};

// Data qubits live in small dense components; traps are classical bits.
class AuthStore : public InnerStore {
 public:
  BackendKind kind() const override { return BackendKind::AuthWire; }

  Slot alloc_data(const InputState& s) override {
    auto st = std::make_unique<DenseState>();
    QubitId q = st->allocate_state(s.vector())[0];
    comps_.push_back(std::move(st));
    slots_.push_back({true, comps_.size() - 1, q, false});
    return static_cast<Slot>(slots_.size() - 1);
  }

  Slot alloc_zero() override {
    slots_.push_back({false, 0, 0, false});
    return static_cast<Slot>(slots_.size() - 1);
  }

  bool zero_basis(const std::vector<Slot>& slots) const override {
    return std::all_of(slots.begin(), slots.end(), [&](Slot a) { return !slots_.at(a).data && !slots_.at(a).bit; });
  }

  void apply_pauli(const std::vector<Slot>& slots, const PauliOp& p) override {
    if (slots.size() != p.size()) throw InvalidDimension("apply_pauli: size mismatch");
    for (size_t i = 0; i < slots.size(); ++i) {
      Info& s = slots_.at(slots[i]);
      if (s.data) {
        if (p.x.get(i)) comp(s).apply_gate(GateKind::X, s.q);
        if (p.z.get(i)) comp(s).apply_gate(GateKind::Z, s.q);
      } else if (p.x.get(i)) {
        s.bit = !s.bit;
      }
    }
  }

  void apply_clifford(const std::vector<Slot>& slots, const CliffordOp& c) override {
    for (Slot a : slots) {
      if (!slots_.at(a).data) throw InvalidArgument("authwire backend supports only Pauli attacks on traps");
    }
    CliffordCircuit circ = decompose(c);
    for (const Gate& g : circ.gates) apply_gate(g.kind, slots[g.q0], g.kind == GateKind::CNOT ? slots[g.q1] : 0);
  }

  void apply_unitary(const std::vector<Slot>&, const Matrix&) override {
    throw InvalidArgument("dense attacks need the dense backend");
  }

  void apply_gate(GateKind g, Slot a, Slot b) override {
    if (g == GateKind::CNOT) {
      merge(slots_.at(a).comp, slots_.at(b).comp);
      Info& sa = slots_.at(a);
      Info& sb = slots_.at(b);
      if (!sa.data || !sb.data) throw InvalidArgument("authwire CNOT needs data slots");
      comp(sa).apply_gate(g, sa.q, sb.q);
      return;
    }
    Info& s = slots_.at(a);
    if (!s.data) throw InvalidArgument("authwire gates act on data slots");
    comp(s).apply_gate(g, s.q);
  }

  void apply_t(Slot a) override {
    Info& s = slots_.at(a);
    comp(s).apply_t(s.q);
  }

  void apply_linear(const std::vector<Slot>& slots, const GLElement& g) override {
    BitVec x(slots.size());
    for (size_t i = 0; i < slots.size(); ++i) x.set(i, classical(slots[i]));
    BitVec y = apply_to_basis(g, x);
    for (size_t i = 0; i < slots.size(); ++i) {
      if (x.get(i) == y.get(i)) continue;
      Info& s = slots_.at(slots[i]);
      if (s.data) {
        comp(s).apply_gate(GateKind::X, s.q);
      } else {
        s.bit = y.get(i);
      }
    }
  }

  bool measure(Slot a, Rng& rng) override {
    Info& s = slots_.at(a);
    if (!s.data) return s.bit;
    return comp(s).measure_z({s.q}, rng).get(0);
  }

  bool measure_t_basis(Slot a, Rng& rng) override {
    Info& s = slots_.at(a);
    if (!s.data) throw InvalidArgument("T-basis measurement on a trap slot");
    bool b = comp(s).measure_t_basis(s.q, rng);
    comp(s).measure_z({s.q}, rng);
    return b;
  }

  double prob_one(Slot a) const override {
    const Info& s = slots_.at(a);
    if (!s.data) return s.bit ? 1.0 : 0.0;
    return comps_.at(s.comp)->prob_one(s.q);
  }

  Vector statevector(const std::vector<Slot>& slots) override {
    if (slots.empty()) return Vector::Ones(1);
    for (Slot a : slots) merge(slots_.at(slots[0]).comp, slots_.at(a).comp);
    DenseState& d = comp(slots_.at(slots[0]));
    Qubits qs;
    for (Slot a : slots) qs.push_back(slots_.at(a).q);
    return d.to_statevector(qs);
  }

 private:
  struct Info {
    bool data;
    size_t comp;
    QubitId q;
    bool bit;
  };

  DenseState& comp(const Info& s) { return *comps_.at(s.comp); }

  bool classical(Slot a) {
    Info& s = slots_.at(a);
    if (!s.data) return s.bit;
    double p = comp(s).prob_one(s.q);
    if (p > 1e-9 && p < 1 - 1e-9) throw InvalidArgument("authwire backend needs classical data under a linear check");
    return p > 0.5;
  }

  void merge(size_t ca, size_t cb) {
    if (ca == cb) return;
    DenseState& b = *comps_.at(cb);
    Qubits old = b.live_qubits();
    Qubits fresh;
    if (!old.empty()) fresh = comps_.at(ca)->allocate_state(b.to_statevector(old));
    for (Info& s : slots_) {
      if (!s.data || s.comp != cb) continue;
      auto it = std::find(old.begin(), old.end(), s.q);
      if (it != old.end()) s.q = fresh[static_cast<size_t>(it - old.begin())];
      s.comp = ca;
    }
    comps_[cb] = std::make_unique<DenseState>();
  }

  std::vector<std::unique_ptr<DenseState>> comps_;
  std::vector<Info> slots_;
};

}  // namespace

std::unique_ptr<InnerStore> make_store(BackendKind kind) {
  if (kind == BackendKind::AuthWire) return std::make_unique<AuthStore>();
  if (kind == BackendKind::Tableau) return std::make_unique<TableauStore>();
  return std::make_unique<QubitStore>(kind);
}

}  // namespace qmpc
