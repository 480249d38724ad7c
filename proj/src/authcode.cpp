#include "qmpc/authcode.hpp"

#include <cmath>
#include <map>

#include "qmpc/errors.hpp"

namespace qmpc {

namespace {

size_t log2_dim(Eigen::Index dim) {
  size_t q = 0;
  while ((Eigen::Index{1} << q) < dim) ++q;
  if ((Eigen::Index{1} << q) != dim) throw InvalidDimension("matrix dimension is not a power of two");
  return q;
}

// Index of a bit string with bit 0 as the most significant position.
size_t be_index(const BitVec& v) {
  size_t idx = 0;
  for (size_t i = 0; i < v.size(); ++i) idx = (idx << 1) | v.get(i);
  return idx;
}

BitVec be_bits(size_t m, size_t idx) {
  BitVec v(m);
  for (size_t i = 0; i < m; ++i) v.set(i, (idx >> (m - 1 - i)) & 1u);
  return v;
}

Matrix pauli_xz(const BitVec& a, const BitVec& b) { return PauliOp(a, b, 0).to_dense(); }

}  // namespace

CodeParams::CodeParams(size_t traps) : n(traps) {
  if (n == 0) throw InvalidArgument("the code needs at least one trap");
}

Qubits enc(const CodeParams& params, QuantumState& state, QubitId plain, const CliffordOp& key) {
  if (key.qubits() != params.qubits()) throw InvalidDimension("enc: key must act on n+1 qubits");
  Qubits reg{plain};
  Qubits traps = state.allocate(params.n);
  reg.insert(reg.end(), traps.begin(), traps.end());
  state.apply_clifford(key, reg);
  return reg;
}

DecodeOutcome dec(const CodeParams& params, QuantumState& state, const Qubits& cipher, const CliffordOp& key,
                  Rng& rng) {
  if (cipher.size() != params.qubits()) throw InvalidDimension("dec: ciphertext must have n+1 qubits");
  if (key.qubits() != params.qubits()) throw InvalidDimension("dec: key must act on n+1 qubits");
  state.apply_clifford(inverse(key), cipher);
  DecodeOutcome out;
  out.traps = state.measure_z(Qubits(cipher.begin() + 1, cipher.end()), rng);
  out.accept = out.traps.none();
  if (out.accept) {
    out.plain = cipher[0];
  } else {
    state.measure_z({cipher[0]}, rng);
  }
  return out;
}

double clifford_accept_surrogate(size_t n) {
  double num = std::ldexp(1.0, static_cast<int>(n + 2)) - 1.0;
  double den = std::ldexp(1.0, static_cast<int>(2 * n + 2)) - 1.0;
  return num / den;
}

double clifford_altered_surrogate(size_t n) {
  double num = 3.0 * std::ldexp(1.0, static_cast<int>(n));
  double den = std::ldexp(1.0, static_cast<int>(2 * n + 2)) - 1.0;
  return num / den;
}

AttackAverage clifford_attack_exact_n1(const PauliOp& attack) {
  if (attack.size() != 2) throw InvalidDimension("exact key average needs a 2-qubit attack");
  AttackAverage out;
  size_t acc = 0, altered = 0;
  static const std::vector<CliffordOp> group = clifford_group(2);
  for (const CliffordOp& key : group) {
    PauliOp inner = conjugate_pauli(inverse(key), attack);
    if (inner.x.get(1)) continue;
    ++acc;
    if (inner.x.get(0) || inner.z.get(0)) ++altered;
  }
  out.keys = group.size();
  out.accept = static_cast<double>(acc) / out.keys;
  out.accept_altered = static_cast<double>(altered) / out.keys;
  return out;
}

AttackAverage clifford_attack_sampled(size_t n, const PauliOp& attack, size_t trials, Rng& rng,
                                      BackendKind backend) {
  CodeParams params(n);
  if (attack.size() != params.qubits()) throw InvalidDimension("attack must act on n+1 qubits");
  if (backend == BackendKind::AuthWire) throw InvalidArgument("sampled attack needs a physical backend");
  size_t acc = 0, altered = 0;
  for (size_t t = 0; t < trials; ++t) {
    CliffordOp key = random_clifford(params.qubits(), rng);
    std::unique_ptr<QuantumState> st;
    if (backend == BackendKind::Tableau) {
      st = std::make_unique<StabilizerState>(1);
    } else {
      st = std::make_unique<DenseState>(1);
    }
    Qubits reg = enc(params, *st, st->live_qubits()[0], key);
    st->apply_pauli(attack, reg);
    DecodeOutcome d = dec(params, *st, reg, key, rng);
    if (!d.accept) continue;
    ++acc;
    PauliOp inner = conjugate_pauli(inverse(key), attack);
    if (inner.x.get(0) || inner.z.get(0)) ++altered;
  }
  AttackAverage out;
  out.keys = trials;
  out.accept = static_cast<double>(acc) / trials;
  out.accept_altered = static_cast<double>(altered) / trials;
  return out;
}

FilterSpec FilterSpec::id(size_t s) { return {FilterKind::Id, s, {}}; }
FilterSpec FilterSpec::x(size_t s) { return {FilterKind::X, s, {}}; }
FilterSpec FilterSpec::zero(size_t s) { return {FilterKind::Zero, s, {}}; }
FilterSpec FilterSpec::custom(size_t s, std::set<std::pair<BitVec, BitVec>> set) {
  for (auto& [a, b] : set) {
    if (a.size() != s || b.size() != s) throw InvalidDimension("filter set entries must match |S|");
  }
  return {FilterKind::FullPauliSet, s, std::move(set)};
}

bool FilterSpec::allows(const BitVec& a, const BitVec& b) const {
  switch (kind) {
    case FilterKind::Id:
      return a.none() && b.none();
    case FilterKind::X:
    case FilterKind::Zero:
      return a.none();
    case FilterKind::FullPauliSet:
      return pauli_set.count({a, b}) > 0;
  }
  return false;
}

std::string filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::FullPauliSet:
      return "full-pauli-set";
    case FilterKind::Id:
      return "id";
    case FilterKind::X:
      return "x";
    case FilterKind::Zero:
      return "zero";
  }
  return "?";
}

FilterOutcome pauli_filter(const FilterSpec& spec, const PauliOp& attack) {
  size_t s = spec.s_qubits;
  if (s == 0 || attack.size() <= s) throw InvalidDimension("pauli_filter: need |S| > 0 and |T| > 0");
  FilterOutcome out;
  out.flag = !spec.allows(attack.x.slice(0, s), attack.z.slice(0, s));
  out.residual = attack.slice(s, attack.size() - s);
  return out;
}

FilterOutcome zero_filter(const PauliOp& attack, size_t s_qubits) {
  return pauli_filter(FilterSpec::zero(s_qubits), attack);
}

std::vector<PauliComponent> pauli_decompose(const Matrix& u, size_t s_qubits) {
  size_t total = log2_dim(u.rows());
  if (u.rows() != u.cols() || total <= s_qubits) throw InvalidDimension("pauli_decompose: bad shape");
  Eigen::Index ds = Eigen::Index{1} << s_qubits;
  Eigen::Index dt = u.rows() / ds;
  std::vector<PauliComponent> out;
  for (Eigen::Index ai = 0; ai < ds; ++ai) {
    for (Eigen::Index bi = 0; bi < ds; ++bi) {
      BitVec a = be_bits(s_qubits, ai), b = be_bits(s_qubits, bi);
      Matrix p = pauli_xz(a, b);
      Matrix ut = Matrix::Zero(dt, dt);
      for (Eigen::Index k = 0; k < ds; ++k) {
        for (Eigen::Index l = 0; l < ds; ++l) {
          cplx c = std::conj(p(l, k));
          if (c == cplx(0, 0)) continue;
          ut += c * u.block(l * dt, k * dt, dt, dt);
        }
      }
      out.push_back({a, b, ut / static_cast<double>(ds)});
    }
  }
  return out;
}

namespace {

void check_filter_shape(const FilterSpec& spec, const Matrix& u, size_t& t) {
  size_t total = log2_dim(u.rows());
  if (total <= spec.s_qubits) throw InvalidDimension("filter: T must be non-empty");
  t = total - spec.s_qubits;
  if (spec.s_qubits + t > 3) throw ResourceLimit("filter equivalence is limited to |S|+|T| <= 3");
}

Matrix choi_of(const Matrix& ut) {
  Eigen::Index dt = ut.rows();
  Vector omega = Vector::Zero(dt * dt);
  for (Eigen::Index i = 0; i < dt; ++i) omega[i * dt + i] = 1.0 / std::sqrt(static_cast<double>(dt));
  Vector v = Vector::Zero(dt * dt);
  for (Eigen::Index i = 0; i < dt; ++i) {
    for (Eigen::Index j = 0; j < dt; ++j) {
      // (U (x) I) acts on the T index of |i>|r>.
      for (Eigen::Index r = 0; r < dt; ++r) v[i * dt + r] += ut(i, j) * omega[j * dt + r];
    }
  }
  return v * v.adjoint();
}

}  // namespace

FilterChoi filter_choi_physical(const FilterSpec& spec, const Matrix& u) {
  size_t t = 0;
  check_filter_shape(spec, u, t);
  size_t s = spec.s_qubits;
  DenseState st(2 * s + 2 * t);
  Qubits all = st.live_qubits();
  Qubits sp(all.begin(), all.begin() + s), sq(all.begin() + s, all.begin() + 2 * s);
  Qubits tq(all.begin() + 2 * s, all.begin() + 2 * s + t), rq(all.begin() + 2 * s + t, all.end());
  if (spec.kind != FilterKind::Zero) {
    for (size_t j = 0; j < s; ++j) {
      st.apply_gate(GateKind::H, sp[j]);
      st.apply_gate(GateKind::CNOT, sp[j], sq[j]);
    }
  }
  for (size_t j = 0; j < t; ++j) {
    st.apply_gate(GateKind::H, rq[j]);
    st.apply_gate(GateKind::CNOT, rq[j], tq[j]);
  }
  Qubits on = sq;
  on.insert(on.end(), tq.begin(), tq.end());
  st.apply_gate_dense(u, on);
  Vector psi = st.to_statevector(all);

  Eigen::Index dss = Eigen::Index{1} << (2 * s);
  Eigen::Index dtr = Eigen::Index{1} << (2 * t);
  Matrix proj = Matrix::Zero(dss, dss);
  if (spec.kind == FilterKind::Zero) {
    proj(0, 0) = 1.0;
  } else {
    Eigen::Index ds = Eigen::Index{1} << s;
    Vector phi = Vector::Zero(dss);
    for (Eigen::Index i = 0; i < ds; ++i) phi[i * ds + i] = 1.0 / std::sqrt(static_cast<double>(ds));
    for (Eigen::Index ai = 0; ai < ds; ++ai) {
      for (Eigen::Index bi = 0; bi < ds; ++bi) {
        BitVec a = be_bits(s, ai), b = be_bits(s, bi);
        if (!spec.allows(a, b)) continue;
        Matrix p = pauli_xz(a, b);
        Vector bell = Vector::Zero(dss);
        for (Eigen::Index i = 0; i < ds; ++i) bell.segment(i * ds, ds) = p * phi.segment(i * ds, ds);
        proj += bell * bell.adjoint();
      }
    }
  }
  Matrix a(dss, dtr);
  for (Eigen::Index k = 0; k < dss; ++k) {
    for (Eigen::Index j = 0; j < dtr; ++j) a(k, j) = psi[k * dtr + j];
  }
  Matrix a0 = proj * a;
  Matrix a1 = a - a0;
  return {a0.transpose() * a0.conjugate(), a1.transpose() * a1.conjugate()};
}

FilterChoi filter_choi_analytic(const FilterSpec& spec, const Matrix& u) {
  size_t t = 0;
  check_filter_shape(spec, u, t);
  Eigen::Index dtr = Eigen::Index{1} << (2 * t);
  FilterChoi out{Matrix::Zero(dtr, dtr), Matrix::Zero(dtr, dtr)};
  auto comps = pauli_decompose(u, spec.s_qubits);
  if (spec.kind == FilterKind::Zero) {
    Eigen::Index dt = Eigen::Index{1} << t;
    std::map<BitVec, Matrix> by_a;
    for (auto& c : comps) {
      auto it = by_a.find(c.a);
      if (it == by_a.end()) {
        by_a.emplace(c.a, c.u);
      } else {
        it->second += c.u;
      }
    }
    for (auto& [a, ua] : by_a) {
      if (ua.rows() != dt) throw InvalidDimension("filter: component shape mismatch");
      (a.none() ? out.accept : out.reject) += choi_of(ua);
    }
    return out;
  }
  for (auto& c : comps) (spec.allows(c.a, c.b) ? out.accept : out.reject) += choi_of(c.u);
  return out;
}

double filter_equivalence_check(const FilterSpec& spec, const Matrix& u) {
  FilterChoi p = filter_choi_physical(spec, u);
  FilterChoi a = filter_choi_analytic(spec, u);
  return std::max((p.accept - a.accept).cwiseAbs().maxCoeff(), (p.reject - a.reject).cwiseAbs().maxCoeff());
}

Matrix gl_unitary(const GLElement& g) {
  size_t m = g.dim();
  if (m > dense_limit) throw ResourceLimit("gl_unitary: too many qubits");
  Eigen::Index dim = Eigen::Index{1} << m;
  Matrix u = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) u(be_index(apply_to_basis(g, be_bits(m, i))), i) = 1.0;
  return u;
}

std::vector<GLElement> gl_group(size_t m) {
  if (m == 0 || m > 4) throw ResourceLimit("gl_group: only m <= 4 is enumerable");
  std::vector<GLElement> out;
  uint64_t total = uint64_t{1} << (m * m);
  for (uint64_t code = 0; code < total; ++code) {
    BitMatrix a(m, m);
    for (size_t r = 0; r < m; ++r) {
      for (size_t c = 0; c < m; ++c) a.set(r, c, (code >> (r * m + c)) & 1u);
    }
    if (rank(a) == m) out.emplace_back(std::move(a));
  }
  return out;
}

namespace {

void accumulate_twirl(const Matrix& rho, const GLElement& g, size_t m, Matrix& acc) {
  Eigen::Index dt = Eigen::Index{1} << m;
  Eigen::Index de = rho.rows() / dt;
  std::vector<Eigen::Index> perm(dt);
  for (Eigen::Index i = 0; i < dt; ++i) perm[i] = be_index(apply_to_basis(g, be_bits(m, i)));
  for (Eigen::Index i = 0; i < dt; ++i) {
    for (Eigen::Index j = 0; j < dt; ++j) {
      acc.block(perm[i] * de, perm[j] * de, de, de) += rho.block(i * de, j * de, de, de);
    }
  }
}

}  // namespace

Matrix gl_twirl(const Matrix& rho, size_t n, size_t samples, Rng& rng) {
  size_t m = 2 * n;
  Eigen::Index dt = Eigen::Index{1} << m;
  if (rho.rows() % dt != 0 || rho.rows() != rho.cols()) throw InvalidDimension("gl_twirl: rho shape");
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  if (samples == 0) {
    auto group = gl_group(m);
    for (auto& g : group) accumulate_twirl(rho, g, m, acc);
    return acc / static_cast<double>(group.size());
  }
  for (size_t k = 0; k < samples; ++k) accumulate_twirl(rho, random_invertible(m, rng), m, acc);
  return acc / static_cast<double>(samples);
}

double gl_test_distance(const Matrix& rho, const Matrix& twirled, size_t n, const BitVec& s) {
  if (s.size() != n) throw InvalidDimension("gl_test_distance: s must have n bits");
  Eigen::Index dt = Eigen::Index{1} << (2 * n);
  Eigen::Index de = rho.rows() / dt;
  Eigen::Index sidx = static_cast<Eigen::Index>(be_index(s));
  Eigen::Index low = (Eigen::Index{1} << n) - 1;
  auto full = [&](Eigen::Index ti) { return s.none() && ti == 0; };
  auto half = [&](Eigen::Index ti) { return (ti & low) == sidx; };
  Matrix acc_diff = Matrix::Zero(rho.rows(), rho.cols());
  Matrix rej_f = Matrix::Zero(de, de), rej_h = Matrix::Zero(de, de);
  for (Eigen::Index i = 0; i < dt; ++i) {
    for (Eigen::Index j = 0; j < dt; ++j) {
      if (full(i) && full(j)) acc_diff.block(i * de, j * de, de, de) += rho.block(i * de, j * de, de, de);
      if (half(i) && half(j)) acc_diff.block(i * de, j * de, de, de) -= twirled.block(i * de, j * de, de, de);
    }
    if (!full(i)) rej_f += rho.block(i * de, i * de, de, de);
    if (!half(i)) rej_h += twirled.block(i * de, i * de, de, de);
  }
  return trace_norm(acc_diff) + trace_norm(rej_f - rej_h);
}

double gl_twirl_distance(const Matrix& rho, size_t n, const BitVec& s, size_t samples, Rng& rng) {
  return gl_test_distance(rho, gl_twirl(rho, n, samples, rng), n, s);
}

double gl_twirl_bound(size_t n) { return 12.0 * std::pow(2.0, -static_cast<double>(n) / 2.0); }

}  // namespace qmpc
