#include "qmpc/backend.hpp"

#include <cmath>

#include "qmpc/errors.hpp"

namespace qmpc {

std::string backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::Tableau: return "tableau";
    case BackendKind::Dense: return "dense";
    case BackendKind::AuthWire: return "authwire";
  }
  return "?";
}

BackendKind parse_backend(const std::string& name) {
  if (name == "tableau") return BackendKind::Tableau;
  if (name == "dense") return BackendKind::Dense;
  if (name == "authwire") return BackendKind::AuthWire;
  throw ConfigError("unknown backend '" + name + "'");
}

size_t QuantumState::position(QubitId q) const {
  if (!contains(q)) throw InvalidArgument("qubit " + std::to_string(q) + " is not live");
  return static_cast<size_t>(pos_[q]);
}

QubitId QuantumState::add_qubit() {
  QubitId id = static_cast<QubitId>(pos_.size());
  pos_.push_back(static_cast<int64_t>(ids_.size()));
  ids_.push_back(id);
  return id;
}

void QuantumState::remove_position(size_t p) {
  pos_[ids_[p]] = -1;
  ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(p));
  for (size_t i = p; i < ids_.size(); ++i) pos_[ids_[i]] = static_cast<int64_t>(i);
}

// ---------------------------------------------------------------------------
// StabilizerState

Qubits StabilizerState::allocate(size_t count) {
  Qubits out;
  for (size_t k = 0; k < count; ++k) {
    size_t n = ids_.size();
    for (auto& r : destab_) {
      r.x.resize(n + 1);
      r.z.resize(n + 1);
    }
    for (auto& r : stab_) {
      r.x.resize(n + 1);
      r.z.resize(n + 1);
    }
    PauliOp d(n + 1), s(n + 1);
    d.x.set(n, true);
    s.z.set(n, true);
    destab_.push_back(std::move(d));
    stab_.push_back(std::move(s));
    out.push_back(add_qubit());
  }
  return out;
}

Qubits StabilizerState::absorb(const StabilizerState& other) {
  size_t n = ids_.size();
  size_t m = other.ids_.size();
  for (auto& r : destab_) {
    r.x.resize(n + m);
    r.z.resize(n + m);
  }
  for (auto& r : stab_) {
    r.x.resize(n + m);
    r.z.resize(n + m);
  }
  auto shifted = [&](const PauliOp& r) {
    PauliOp out(n + m);
    out.phase = r.phase;
    for (size_t i = 0; i < m; ++i) {
      out.x.set(n + i, r.x.get(i));
      out.z.set(n + i, r.z.get(i));
    }
    return out;
  };
  for (size_t i = 0; i < m; ++i) {
    destab_.push_back(shifted(other.destab_[i]));
    stab_.push_back(shifted(other.stab_[i]));
  }
  Qubits out;
  for (size_t i = 0; i < m; ++i) out.push_back(add_qubit());
  return out;
}

void StabilizerState::apply_gate(GateKind kind, QubitId q0, QubitId q1) {
  size_t a = position(q0);
  size_t b = kind == GateKind::CNOT ? position(q1) : 0;
  auto upd = [&](PauliOp& p) {
    switch (kind) {
      case GateKind::I: break;
      case GateKind::X: p.conj_x(a); break;
      case GateKind::Y: p.conj_y(a); break;
      case GateKind::Z: p.conj_z(a); break;
      case GateKind::H: p.conj_h(a); break;
      case GateKind::S: p.conj_s(a); break;
      case GateKind::SDG: p.conj_sdg(a); break;
      case GateKind::CNOT: p.conj_cnot(a, b); break;
    }
  };
  for (auto& r : destab_) upd(r);
  for (auto& r : stab_) upd(r);
}

void StabilizerState::apply_clifford(const CliffordOp& c, const Qubits& qubits) {
  size_t m = c.qubits();
  if (qubits.size() != m) throw InvalidArgument("apply_clifford: qubit count mismatch");
  std::vector<size_t> pos(m);
  for (size_t i = 0; i < m; ++i) pos[i] = position(qubits[i]);
  PauliOp& acc = scratch_out_;
  if (acc.size() != m) acc = PauliOp(m);
  auto upd = [&](PauliOp& row) {
    acc.x.clear();
    acc.z.clear();
    acc.phase = 0;
    bool touched = false;
    for (size_t i = 0; i < m; ++i) {
      if (row.x.get(pos[i])) {
        acc *= c.image_x(i);
        touched = true;
      }
    }
    for (size_t i = 0; i < m; ++i) {
      if (row.z.get(pos[i])) {
        acc *= c.image_z(i);
        touched = true;
      }
    }
    if (!touched) return;
    row.phase = (row.phase + acc.phase) & 3;
    for (size_t i = 0; i < m; ++i) {
      row.x.set(pos[i], acc.x.get(i));
      row.z.set(pos[i], acc.z.get(i));
    }
  };
  for (auto& r : destab_) upd(r);
  for (auto& r : stab_) upd(r);
}

void StabilizerState::apply_pauli(const PauliOp& p, const Qubits& qubits) {
  if (qubits.size() != p.size()) throw InvalidArgument("apply_pauli: qubit count mismatch");
  PauliOp full(ids_.size());
  for (size_t i = 0; i < qubits.size(); ++i) {
    size_t q = position(qubits[i]);
    full.x.set(q, p.x.get(i));
    full.z.set(q, p.z.get(i));
  }
  for (auto& r : destab_) {
    if (symplectic_product(r, full)) r.phase = (r.phase + 2) & 3;
  }
  for (auto& r : stab_) {
    if (symplectic_product(r, full)) r.phase = (r.phase + 2) & 3;
  }
}

bool StabilizerState::measure_one(size_t q, Rng& rng) {
  size_t n = ids_.size();
  size_t p = n;
  for (size_t i = 0; i < n; ++i) {
    if (stab_[i].x.get(q)) {
      p = i;
      break;
    }
  }
  bool outcome;
  if (p < n) {
    for (size_t i = 0; i < n; ++i) {
      if (i != p && stab_[i].x.get(q)) stab_[i] *= stab_[p];
      if (i != p && destab_[i].x.get(q)) destab_[i] *= stab_[p];
    }
    destab_[p] = stab_[p];
    outcome = random_bit(rng);
    PauliOp zq(n);
    zq.z.set(q, true);
    zq.phase = outcome ? 2 : 0;
    stab_[p] = std::move(zq);
  } else {
    PauliOp prod(n);
    size_t first = n;
    for (size_t i = 0; i < n; ++i) {
      if (destab_[i].x.get(q)) {
        prod *= stab_[i];
        if (first == n) first = i;
      }
    }
    outcome = prod.phase == 2;
    p = first;
    for (size_t i = first + 1; i < n; ++i) {
      if (destab_[i].x.get(q)) destab_[i] *= destab_[p];
    }
    stab_[p] = std::move(prod);
  }
  // Decouple the measured qubit: stab_[p] = +-Z_q, destab_[p] = X_q, nothing else touches q.
  PauliOp xq(n);
  xq.x.set(q, true);
  destab_[p] = std::move(xq);
  for (size_t i = 0; i < n; ++i) {
    if (i == p) continue;
    if (stab_[i].z.get(q)) stab_[i] *= stab_[p];
    if (destab_[i].z.get(q)) destab_[i] *= stab_[p];
  }
  std::swap(stab_[p], stab_.back());
  std::swap(destab_[p], destab_.back());
  stab_.pop_back();
  destab_.pop_back();
  for (auto& r : destab_) {
    r.x.erase(q);
    r.z.erase(q);
  }
  for (auto& r : stab_) {
    r.x.erase(q);
    r.z.erase(q);
  }
  remove_position(q);
  return outcome;
}

BitVec StabilizerState::measure_z(const Qubits& qubits, Rng& rng) {
  BitVec out(qubits.size());
  for (size_t i = 0; i < qubits.size(); ++i) out.set(i, measure_one(position(qubits[i]), rng));
  return out;
}

double StabilizerState::prob_one(QubitId qid) const {
  size_t q = position(qid);
  size_t n = ids_.size();
  for (size_t i = 0; i < n; ++i) {
    if (stab_[i].x.get(q)) return 0.5;
  }
  PauliOp prod(n);
  for (size_t i = 0; i < n; ++i) {
    if (destab_[i].x.get(q)) prod *= stab_[i];
  }
  return prod.phase == 2 ? 1.0 : 0.0;
}

Vector StabilizerState::to_statevector(const Qubits& qubits) const {
  size_t n = ids_.size();
  if (qubits.size() != n) throw InvalidArgument("to_statevector: order must list every qubit");
  if (n > dense_limit) throw ResourceLimit("to_statevector: state too large");
  std::vector<size_t> pos(n);
  for (size_t i = 0; i < n; ++i) pos[i] = position(qubits[i]);
  std::vector<PauliOp> gens;
  for (auto& s : stab_) {
    PauliOp g(n);
    g.phase = s.phase;
    for (size_t i = 0; i < n; ++i) {
      g.x.set(i, s.x.get(pos[i]));
      g.z.set(i, s.z.get(pos[i]));
    }
    gens.push_back(std::move(g));
  }
  size_t dim = size_t{1} << n;
  for (size_t y = 0; y < dim; ++y) {
    Vector v = Vector::Zero(dim);
    v[y] = 1;
    for (auto& g : gens) v = 0.5 * (v + apply_pauli_vector(g, v));
    if (v.norm() > 1e-6) return v / v.norm();
  }
  throw Error("stabilizer state has no support");
}

bool StabilizerState::is_consistent() const {
  size_t n = ids_.size();
  for (size_t i = 0; i < n; ++i) {
    if (!stab_[i].is_hermitian() || !destab_[i].is_hermitian()) return false;
    for (size_t j = 0; j < n; ++j) {
      if (symplectic_product(stab_[i], stab_[j])) return false;
      if (symplectic_product(destab_[i], destab_[j])) return false;
      if (symplectic_product(destab_[i], stab_[j]) != (i == j)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// DenseState

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_unitary(const Matrix& u) {
  if (u.rows() != u.cols()) throw InvalidOperator("gate matrix must be square");
  Matrix d = u * u.adjoint() - Matrix::Identity(u.rows(), u.cols());
  if (d.cwiseAbs().maxCoeff() > 1e-9) throw InvalidOperator("gate matrix is not unitary");
}

}  // namespace

DenseState DenseState::magic_t() {
  Vector v(2);
  v << kInvSqrt2, std::polar(kInvSqrt2, M_PI / 4);
  return from_amplitudes(v);
}

DenseState DenseState::from_amplitudes(const Vector& amps) {
  DenseState s;
  s.allocate_state(amps);
  return s;
}

Qubits DenseState::allocate(size_t count) {
  if (ids_.size() + count > dense_backend_limit) {
    throw ResourceLimit("dense backend limited to " + std::to_string(dense_backend_limit) + " qubits");
  }
  Qubits out;
  for (size_t k = 0; k < count; ++k) {
    amp_.resize(amp_.size() * 2, cplx(0, 0));
    out.push_back(add_qubit());
  }
  return out;
}

Qubits DenseState::allocate_state(const Vector& amps) {
  size_t k = 0;
  while ((size_t{1} << k) < static_cast<size_t>(amps.size())) ++k;
  if ((size_t{1} << k) != static_cast<size_t>(amps.size())) throw InvalidArgument("amplitude count must be 2^k");
  if (std::abs(amps.norm() - 1.0) > 1e-9) throw InvalidArgument("amplitudes must be normalized");
  size_t base = ids_.size();
  Qubits out = allocate(k);
  std::vector<cplx> next(amp_.size(), cplx(0, 0));
  size_t low = size_t{1} << base;
  for (size_t i = 0; i < low; ++i) {
    if (amp_[i] == cplx(0, 0)) continue;
    for (size_t j = 0; j < static_cast<size_t>(amps.size()); ++j) {
      size_t hi = 0;
      for (size_t b = 0; b < k; ++b) {
        if (j & (size_t{1} << (k - 1 - b))) hi |= size_t{1} << (base + b);
      }
      next[i | hi] = amp_[i] * amps[static_cast<Eigen::Index>(j)];
    }
  }
  amp_ = std::move(next);
  return out;
}

void DenseState::apply_1q(const cplx u[4], size_t p) {
  size_t bit = size_t{1} << p;
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (i & bit) continue;
    cplx a = amp_[i], b = amp_[i | bit];
    amp_[i] = u[0] * a + u[1] * b;
    amp_[i | bit] = u[2] * a + u[3] * b;
  }
}

void DenseState::apply_gate(GateKind kind, QubitId q0, QubitId q1) {
  size_t a = position(q0);
  size_t bit = size_t{1} << a;
  const cplx I(0, 1);
  switch (kind) {
    case GateKind::I: break;
    case GateKind::X:
      for (size_t i = 0; i < amp_.size(); ++i) {
        if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
      }
      break;
    case GateKind::Y: {
      const cplx u[4] = {0, -I, I, 0};
      apply_1q(u, a);
      break;
    }
    case GateKind::Z:
      for (size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) amp_[i] = -amp_[i];
      }
      break;
    case GateKind::H: {
      const cplx u[4] = {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
      apply_1q(u, a);
      break;
    }
    case GateKind::S:
      for (size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) amp_[i] *= I;
      }
      break;
    case GateKind::SDG:
      for (size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) amp_[i] *= -I;
      }
      break;
    case GateKind::CNOT: {
      size_t tbit = size_t{1} << position(q1);
      for (size_t i = 0; i < amp_.size(); ++i) {
        if ((i & bit) && !(i & tbit)) std::swap(amp_[i], amp_[i | tbit]);
      }
      break;
    }
  }
}

void DenseState::apply_t(QubitId q, bool dagger) {
  size_t bit = size_t{1} << position(q);
  cplx ph = std::polar(1.0, dagger ? -M_PI / 4 : M_PI / 4);
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (i & bit) amp_[i] *= ph;
  }
}

void DenseState::apply_clifford(const CliffordOp& c, const Qubits& qubits) {
  if (qubits.size() != c.qubits()) throw InvalidArgument("apply_clifford: qubit count mismatch");
  CliffordCircuit circ = decompose(c);
  for (const Gate& g : circ.gates) {
    apply_gate(g.kind, qubits[g.q0], g.kind == GateKind::CNOT ? qubits[g.q1] : 0);
  }
}

void DenseState::apply_pauli(const PauliOp& p, const Qubits& qubits) {
  if (qubits.size() != p.size()) throw InvalidArgument("apply_pauli: qubit count mismatch");
  size_t xm = 0, zm = 0;
  for (size_t i = 0; i < qubits.size(); ++i) {
    size_t bit = size_t{1} << position(qubits[i]);
    if (p.x.get(i)) xm |= bit;
    if (p.z.get(i)) zm |= bit;
  }
  static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  cplx ph = ipow[p.phase & 3];
  std::vector<cplx> next(amp_.size());
  for (size_t i = 0; i < amp_.size(); ++i) {
    double sgn = (std::popcount(zm & i) & 1) ? -1.0 : 1.0;
    next[i ^ xm] = ph * sgn * amp_[i];
  }
  amp_ = std::move(next);
}

void DenseState::apply_gate_dense(const Matrix& u, const Qubits& qubits) {
  check_unitary(u);
  size_t k = qubits.size();
  if (static_cast<size_t>(u.rows()) != (size_t{1} << k)) throw InvalidOperator("gate size does not match qubits");
  std::vector<size_t> bits(k);
  size_t mask = 0;
  for (size_t i = 0; i < k; ++i) {
    bits[i] = size_t{1} << position(qubits[i]);
    mask |= bits[i];
  }
  size_t dim = size_t{1} << k;
  std::vector<size_t> offs(dim, 0);
  for (size_t j = 0; j < dim; ++j) {
    for (size_t i = 0; i < k; ++i) {
      if (j & (size_t{1} << (k - 1 - i))) offs[j] |= bits[i];
    }
  }
  Vector local(dim);
  for (size_t base = 0; base < amp_.size(); ++base) {
    if (base & mask) continue;
    for (size_t j = 0; j < dim; ++j) local[j] = amp_[base | offs[j]];
    Vector out = u * local;
    for (size_t j = 0; j < dim; ++j) amp_[base | offs[j]] = out[j];
  }
}

double DenseState::prob_one(QubitId q) const {
  size_t bit = size_t{1} << position(q);
  double p = 0;
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (i & bit) p += std::norm(amp_[i]);
  }
  return p;
}

double DenseState::postselect_z(QubitId q, bool b) {
  size_t bit = size_t{1} << position(q);
  double p = 0;
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (bool(i & bit) == b) {
      p += std::norm(amp_[i]);
    } else {
      amp_[i] = 0;
    }
  }
  if (p > 0) {
    double s = 1.0 / std::sqrt(p);
    for (auto& a : amp_) a *= s;
  }
  return p;
}

bool DenseState::collapse_z(QubitId q, Rng& rng) {
  bool b = random_unit(rng) < prob_one(q);
  postselect_z(q, b);
  return b;
}

BitVec DenseState::measure_z(const Qubits& qubits, Rng& rng) {
  BitVec out(qubits.size());
  for (size_t k = 0; k < qubits.size(); ++k) {
    size_t p = position(qubits[k]);
    bool b = collapse_z(qubits[k], rng);
    out.set(k, b);
    size_t bit = size_t{1} << p;
    std::vector<cplx> next(amp_.size() / 2);
    for (size_t i = 0; i < next.size(); ++i) {
      size_t low = i & (bit - 1);
      size_t high = (i & ~(bit - 1)) << 1;
      next[i] = amp_[high | low | (b ? bit : 0)];
    }
    amp_ = std::move(next);
    remove_position(p);
  }
  return out;
}

bool DenseState::measure_t_basis(QubitId q, Rng& rng) {
  // (T H)^dagger maps |T> to |0> and |T-perp> to |1>.
  apply_t(q, true);
  apply_gate(GateKind::H, q);
  bool b = collapse_z(q, rng);
  apply_gate(GateKind::H, q);
  apply_t(q, false);
  return b;
}

Vector DenseState::to_statevector(const Qubits& qubits) const {
  size_t n = ids_.size();
  if (qubits.size() != n) throw InvalidArgument("to_statevector: order must list every qubit");
  std::vector<size_t> bits(n);
  for (size_t i = 0; i < n; ++i) bits[i] = size_t{1} << position(qubits[i]);
  Vector out(amp_.size());
  for (size_t j = 0; j < amp_.size(); ++j) {
    size_t idx = 0;
    for (size_t i = 0; i < n; ++i) {
      if (j & (size_t{1} << (n - 1 - i))) idx |= bits[i];
    }
    out[j] = amp_[idx];
  }
  return out;
}

double DenseState::norm() const {
  double s = 0;
  for (auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// AuthWire

AuthWire make_authwire(QuantumState& logical, QubitId ref, const CliffordOp& key) {
  if (key.qubits() < 1) throw InvalidDimension("key must act on at least one qubit");
  AuthWire w;
  w.logical = &logical;
  w.logical_ref = ref;
  w.key = key;
  w.trap_error = PauliOp(key.qubits() - 1);
  w.pad = PauliOp(key.qubits());
  return w;
}

AuthWire& authwire_apply_attack(AuthWire& w, const PauliOp& p) {
  if (p.size() != w.key.qubits()) throw InvalidDimension("attack must act on the whole ciphertext");
  if (p.is_trivial()) return w;
  PauliOp inner = conjugate_pauli(inverse(w.key), p);
  PauliOp data = inner.slice(0, 1);
  PauliOp traps = inner.slice(1, w.traps());
  data.phase = 0;
  traps.phase = 0;
  if (!data.is_trivial()) {
    data.phase = (data.x & data.z).popcount() & 3;
    w.logical->apply_pauli(data, {w.logical_ref});
  }
  w.trap_error *= traps;
  w.trap_error.phase = (w.trap_error.x & w.trap_error.z).popcount() & 3;
  return w;
}

bool authwire_accepts(const AuthWire& w) { return w.trap_error.x.none(); }

}  // namespace qmpc
