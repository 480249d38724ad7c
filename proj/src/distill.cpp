#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "qmpc/distill.hpp"

namespace qmpc {

namespace {

const cplx kOmega = std::polar(1.0, M_PI / 4);

// Block positions q = 0..14 stand for the nonzero a = q + 1 in F2^4. The code
// C' = simplex + {0, 1}; these five positions form an information set for it.
constexpr std::array<int, 5> kInfo = {0, 1, 3, 7, 14};

struct BlockCode {
  BitMatrix M;     // x_P = M (u, b)
  BitMatrix Minv;  // (u, b) = Minv x_P
  std::vector<int> coset;
  // lambda[a] . x_P = z_a on coset position a.
  std::vector<BitVec> lambda;
};

BitVec row_of(int q) {
  BitVec r(5);
  int a = q + 1;
  for (int i = 0; i < 4; ++i) r.set(static_cast<size_t>(i), (a >> i) & 1);
  r.set(4, true);
  return r;
}

const BlockCode& block_code() {
  static const BlockCode code = [] {
    BlockCode c;
    c.M = BitMatrix(5, 5);
    for (size_t p = 0; p < 5; ++p) c.M.row(p) = row_of(kInfo[p]);
    c.Minv = invert(c.M);
    BitMatrix t = c.Minv.transpose();
    for (int q = 0; q < 15; ++q) {
      if (std::find(kInfo.begin(), kInfo.end(), q) != kInfo.end()) continue;
      c.coset.push_back(q);
      c.lambda.push_back(t * row_of(q));
    }
    return c;
  }();
  return code;
}

BlockLayout build_block() {
  const BlockCode& code = block_code();
  BlockLayout L;
  CircuitIR& c = L.circuit;
  c.players = 2;
  for (int q = 0; q < 15; ++q) {
    c.inputs[q] = 1;
    if (q != kInfo[4]) c.discards.insert(q);
  }
  c.outputs[kInfo[4]] = 1;
  L.output = kInfo[4];
  for (size_t j = 0; j < code.coset.size(); ++j) {
    for (size_t p = 0; p < 5; ++p) {
      if (code.lambda[j].get(p)) c.cnot(kInfo[p], code.coset[j]);
    }
  }
  for (int q : code.coset) {
    std::string l = "v" + std::to_string(q);
    c.measure(q, l);
    L.coset.push_back(l);
  }
  for (size_t j = 0; j < code.coset.size(); ++j) {
    std::string l = L.coset[j];
    std::vector<int> R;
    for (size_t p = 0; p < 5; ++p) {
      if (code.lambda[j].get(p)) R.push_back(kInfo[p]);
    }
    for (int r : R) c.cliff(GateKind::S, r, l);
    for (size_t x = 0; x < R.size(); ++x) {
      for (size_t y = x + 1; y < R.size(); ++y) {
        c.cliff(GateKind::H, R[y], l);
        c.cnot(R[x], R[y], l);
        c.cliff(GateKind::H, R[y], l);
      }
    }
  }
  for (const auto& [ctl, tgt] : gl_cnot_network(GLElement(code.Minv, code.M))) c.cnot(kInfo[ctl], kInfo[tgt]);
  for (size_t i = 0; i < 4; ++i) {
    std::string l = "s" + std::to_string(i);
    c.cliff(GateKind::H, kInfo[i]);
    c.measure(kInfo[i], l);
    L.syndrome.push_back(l);
  }
  c.cliff(GateKind::X, kInfo[4]);
  int line = 0;
  for (CircuitOp& op : c.ops) op.line = ++line;
  c.validate();
  return L;
}

cplx ipow(int e) {
  static const cplx t[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return t[e & 3];
}

}  // namespace

size_t magic_copies(size_t t, int k, size_t n) { return (t + static_cast<size_t>(k)) * n; }

Vector magic_vector(bool perp) {
  Vector v(2);
  double r = 1.0 / std::sqrt(2.0);
  v << r, (perp ? -r : r) * kOmega;
  return v;
}

BitVec dephase_T(DenseState& st, const Qubits& qubits, Rng& rng) {
  BitVec mask(qubits.size());
  for (size_t i = 0; i < qubits.size(); ++i) {
    if (!random_bit(rng)) continue;
    mask.set(i, true);
    st.apply_gate(GateKind::X, qubits[i]);
    st.apply_gate(GateKind::S, qubits[i]);
  }
  return mask;
}

const BlockLayout& distill_block() {
  static const BlockLayout layout = build_block();
  return layout;
}

BlockResult bk_distill_block(DenseState& st, const Qubits& qubits, Rng& rng) {
  if (qubits.size() != 15) throw InvalidArgument("bk_distill_block takes 15 qubits");
  const BlockLayout& L = distill_block();
  std::map<std::string, bool> bits;
  for (const CircuitOp& op : L.circuit.ops) {
    bool on = op.ctrl.empty() || bits.at(op.ctrl);
    switch (op.kind) {
      case OpKind::Clifford:
        if (on) st.apply_gate(op.gate, qubits[static_cast<size_t>(op.w0)]);
        break;
      case OpKind::Cnot:
        if (on) st.apply_gate(GateKind::CNOT, qubits[static_cast<size_t>(op.w0)], qubits[static_cast<size_t>(op.w1)]);
        break;
      case OpKind::Measure:
        bits[op.label] = st.measure_z({qubits[static_cast<size_t>(op.w0)]}, rng).get(0);
        break;
      case OpKind::T:
        throw InvalidArgument("distillation block contains a T gate");
    }
  }
  BlockResult r;
  r.accept = std::none_of(L.syndrome.begin(), L.syndrome.end(), [&](const std::string& l) { return bits.at(l); });
  r.output = qubits[static_cast<size_t>(L.output)];
  return r;
}

DistillRun distill_circuit(DenseState& st, const Qubits& qubits, size_t t, Rng& rng) {
  if (t == 0 || qubits.size() % t != 0) throw InvalidArgument("distill_circuit: m must be a multiple of t");
  if (qubits.size() / t != 15) throw InvalidArgument("distill_circuit: blocks must hold 15 qubits");
  DistillRun run;
  run.dephase = dephase_T(st, qubits, rng);
  run.permutation.resize(qubits.size());
  std::iota(run.permutation.begin(), run.permutation.end(), size_t{0});
  std::shuffle(run.permutation.begin(), run.permutation.end(), rng);
  for (size_t b = 0; b < t; ++b) {
    Qubits block;
    for (size_t i = 0; i < 15; ++i) block.push_back(qubits[run.permutation[15 * b + i]]);
    run.blocks.push_back(bk_distill_block(st, block, rng));
  }
  return run;
}

DistillEstimate distill_quality(double eps, size_t trials, Rng& rng) {
  if (eps < 0 || eps >= 1) throw InvalidArgument("eps must lie in [0, 1)");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const BlockCode& code = block_code();
  const double a0 = std::sqrt(1 - eps);
  const double a1 = std::sqrt(eps);
  const double r2 = 1.0 / std::sqrt(2.0);
  // Coherent input per qubit, dephased by the sign s.
  auto amp = [&](bool s, int x) {
    double c = s ? a0 - a1 : a0 + a1;
    double d = s ? a0 + a1 : a0 - a1;
    return x ? kOmega * d * r2 : cplx(c * r2, 0);
  };
  // z_a(x_P) for every coset position and every x_P.
  std::vector<std::array<int, 32>> z(code.coset.size());
  for (size_t j = 0; j < code.coset.size(); ++j) {
    for (int x = 0; x < 32; ++x) z[j][static_cast<size_t>(x)] = std::popcount(code.lambda[j].to_u64() & static_cast<uint64_t>(x)) & 1;
  }
  std::array<int, 32> xp_of_y{};
  for (int y = 0; y < 32; ++y) {
    BitVec yv = BitVec::from_u64(5, static_cast<uint64_t>(y));
    xp_of_y[static_cast<size_t>(y)] = static_cast<int>((code.M * yv).to_u64());
  }

  double sum_acc = 0, sum_err = 0;
  std::vector<std::pair<double, double>> per;
  per.reserve(trials);
  for (size_t t = 0; t < trials; ++t) {
    std::array<bool, 15> s{};
    for (auto& b : s) b = random_bit(rng);
    std::array<int, 15> x{};
    for (int q = 0; q < 15; ++q) {
      double p1 = std::norm(amp(s[q], 1));
      x[q] = random_unit(rng) < p1;
    }
    int xp = 0;
    for (size_t p = 0; p < 5; ++p) xp |= x[kInfo[p]] << p;
    std::vector<int> v(code.coset.size());
    for (size_t j = 0; j < code.coset.size(); ++j) v[j] = x[code.coset[j]] ^ z[j][static_cast<size_t>(xp)];

    std::array<cplx, 32> st{};
    double norm = 0;
    for (int xq = 0; xq < 32; ++xq) {
      cplx a(1, 0);
      for (size_t p = 0; p < 5; ++p) a *= amp(s[kInfo[p]], (xq >> p) & 1);
      int phase = 0;
      for (size_t j = 0; j < code.coset.size(); ++j) {
        int zj = z[j][static_cast<size_t>(xq)];
        a *= amp(s[code.coset[j]], zj ^ v[j]);
        phase += v[j] * zj;
      }
      st[static_cast<size_t>(xq)] = a * ipow(phase);
      norm += std::norm(a);
    }
    cplx out[2] = {0, 0};
    for (int y = 0; y < 32; ++y) out[y >> 4] += st[static_cast<size_t>(xp_of_y[static_cast<size_t>(y)])] / 4.0;
    double acc_norm = std::norm(out[0]) + std::norm(out[1]);
    double p_acc = acc_norm / norm;
    // Output after the final X is (out[1], out[0]).
    double err = 0;
    if (acc_norm > 0) err = std::norm((out[1] - std::conj(kOmega) * out[0]) * r2) / acc_norm;
    sum_acc += p_acc;
    sum_err += p_acc * err;
    per.emplace_back(p_acc, err);
  }
  DistillEstimate e;
  e.eps = eps;
  e.trials = trials;
  e.accept_rate = sum_acc / static_cast<double>(trials);
  e.error = sum_acc > 0 ? sum_err / sum_acc : 0.0;
  double var = 0;
  for (const auto& [p, er] : per) var += p * p * (er - e.error) * (er - e.error);
  e.ci = sum_acc > 0 ? 2.5758293035489 * std::sqrt(var) / sum_acc : 0.0;
  return e;
}

DistillEstimate distill_quality_dense(double eps, size_t trials, Rng& rng) {
  if (trials == 0) throw InvalidArgument("trials must be positive");
  size_t acc = 0, err = 0;
  for (size_t t = 0; t < trials; ++t) {
    DenseState st;
    Qubits q;
    for (int i = 0; i < 15; ++i) q.push_back(st.allocate_state(magic_vector(random_unit(rng) < eps))[0]);
    DistillRun run = distill_circuit(st, q, 1, rng);
    if (!run.blocks[0].accept) continue;
    ++acc;
    err += st.measure_t_basis(run.blocks[0].output, rng);
  }
  DistillEstimate e;
  e.eps = eps;
  e.trials = trials;
  e.accept_rate = static_cast<double>(acc) / static_cast<double>(trials);
  e.error = acc ? static_cast<double>(err) / static_cast<double>(acc) : 0.0;
  e.ci = wilson_halfwidth(err, std::max<size_t>(acc, 1));
  return e;
}

double distill_threshold() { return 0.5 * (1 - std::sqrt(3.0 / 7.0)); }

namespace {

Vector to_t_basis(const Vector& psi, size_t m) {
  if (m > 12) throw ResourceLimit("low-weight projection is limited to 12 qubits");
  if (static_cast<size_t>(psi.size()) != (size_t{1} << m)) throw InvalidDimension("state size does not match m");
  Matrix bd(2, 2);
  Vector t0 = magic_vector(false), t1 = magic_vector(true);
  bd.row(0) = t0.adjoint();
  bd.row(1) = t1.adjoint();
  Vector out = psi;
  size_t dim = size_t{1} << m;
  for (size_t q = 0; q < m; ++q) {
    size_t bit = size_t{1} << (m - 1 - q);
    for (size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      cplx a = out[static_cast<Eigen::Index>(i)], b = out[static_cast<Eigen::Index>(i | bit)];
      out[static_cast<Eigen::Index>(i)] = bd(0, 0) * a + bd(0, 1) * b;
      out[static_cast<Eigen::Index>(i | bit)] = bd(1, 0) * a + bd(1, 1) * b;
    }
  }
  return out;
}

}  // namespace

double lw_weight(const Vector& psi, size_t m, size_t l_cut) {
  Vector c = to_t_basis(psi, m);
  double w = 0, tot = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    double p = std::norm(c[i]);
    tot += p;
    if (static_cast<size_t>(std::popcount(static_cast<uint64_t>(i))) <= l_cut) w += p;
  }
  return tot > 0 ? w / tot : 0.0;
}

double lw_weight(const Matrix& rho, size_t m, size_t l_cut) {
  if (rho.rows() != rho.cols()) throw InvalidDimension("density matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double w = 0;
  for (Eigen::Index j = 0; j < rho.rows(); ++j) {
    double lam = es.eigenvalues()[j];
    if (lam <= 1e-15) continue;
    w += lam * lw_weight(Vector(es.eigenvectors().col(j)), m, l_cut);
  }
  return w / rho.trace().real();
}

Vector planted_state(size_t m, const std::vector<size_t>& perp) {
  if (m > 12) throw ResourceLimit("planted_state is limited to 12 qubits");
  Vector out = Vector::Ones(1);
  for (size_t q = 0; q < m; ++q) {
    Vector f = magic_vector(std::find(perp.begin(), perp.end(), q) != perp.end());
    Vector next(out.size() * 2);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      next[2 * i] = out[i] * f[0];
      next[2 * i + 1] = out[i] * f[1];
    }
    out = std::move(next);
  }
  return out;
}

SamplingCheck sampling_bound_check(const Vector& psi, size_t m, size_t k, double delta, size_t trials, Rng& rng) {
  if (k > m) throw InvalidArgument("cannot test more qubits than the state holds");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  Vector c = to_t_basis(psi, m);
  double tot = c.squaredNorm();
  size_t l_cut = static_cast<size_t>(std::floor(delta * static_cast<double>(m - k)));
  SamplingCheck out;
  out.trials = trials;
  out.bound = std::pow(2.0, -delta * delta * static_cast<double>(k));
  std::vector<size_t> order(m);
  for (size_t t = 0; t < trials; ++t) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    uint64_t tested = 0;
    for (size_t i = 0; i < k; ++i) tested |= uint64_t{1} << (m - 1 - order[i]);
    double pass = 0, low = 0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      uint64_t idx = static_cast<uint64_t>(i);
      if (idx & tested) continue;
      double p = std::norm(c[i]) / tot;
      pass += p;
      if (static_cast<size_t>(std::popcount(idx)) <= l_cut) low += p;
    }
    out.pass_rate += pass;
    out.violation += pass - low;
  }
  out.pass_rate /= static_cast<double>(trials);
  out.violation /= static_cast<double>(trials);
  return out;
}

// Protocol-level magic states

namespace {

bool run_block_op(Session& s, const CircuitOp& op, const std::vector<int>& wires, const std::string& prefix) {
  std::string ctrl = op.ctrl.empty() ? "" : prefix + op.ctrl;
  int a = wires.at(static_cast<size_t>(op.w0));
  switch (op.kind) {
    case OpKind::Clifford:
      return apply_single_clifford(s, op.gate, a, ctrl);
    case OpKind::Cnot:
      return apply_cnot(s, a, wires.at(static_cast<size_t>(op.w1)), ctrl);
    case OpKind::Measure:
      return measure_wire(s, a, prefix + op.label);
    case OpKind::T:
      break;
  }
  throw InvalidArgument("distillation block contains a T gate");
}

}  // namespace

MagicBatch create_magic_states(Session& s, size_t t, MagicOptions opts) {
  MagicBatch mb;
  if (t == 0) return mb;
  const int k = s.k();
  const size_t n = s.n();
  const size_t ell = magic_copies(t, k, n);
  const size_t tested = static_cast<size_t>(k - 1) * n;
  if (opts.distill && ell - tested < 15 * t) {
    throw ConfigError("distillation needs (t + 1) n >= 15 t surviving copies");
  }
  mb.count = ell;
  std::vector<EncodeRequest> reqs;
  for (size_t i = 0; i < ell; ++i) {
    int w = s.fresh_wire();
    mb.wires.push_back(w);
    reqs.push_back({w, 1, InputState::magic(), false});
  }
  if (!encode_batch(s, reqs)) {
    mb.aborted = true;
    return mb;
  }

  std::vector<size_t> perm(ell);
  BitVec zhat;
  MpcCall pick{"magic.sets", [&](const MpcMemory&, Rng& rng) {
                 std::iota(perm.begin(), perm.end(), size_t{0});
                 std::shuffle(perm.begin(), perm.end(), rng);
                 zhat = BitVec::random(ell, rng);
                 MpcResult r;
                 r.outputs.assign(static_cast<size_t>(k), std::monostate{});
                 return r;
               }};
  if (s.call(Phase::Magic, pick).aborted) {
    mb.aborted = true;
    return mb;
  }
  for (PlayerId i = 2; i <= k; ++i) {
    auto& set = mb.test_sets[i];
    for (size_t j = 0; j < n; ++j) set.push_back(perm[static_cast<size_t>(i - 2) * n + j]);
  }
  mb.survivors.assign(perm.begin() + static_cast<long>(tested), perm.end());

  std::vector<std::pair<int, PlayerId>> moves;
  for (const auto& [i, set] : mb.test_sets) {
    for (size_t idx : set) moves.emplace_back(mb.wires[idx], i);
  }
  transfer_wires(s, Phase::Magic, moves);
  for (const auto& [i, set] : mb.test_sets) {
    for (size_t idx : set) {
      if (s.aborted()) break;
      DecodeResult d = decode_wire(s, mb.wires[idx], i);
      if (s.is_corrupted(i)) continue;
      if (!d.accept) {
        s.abort(std::nullopt, "player " + std::to_string(i) + " rejected a magic-state copy");
        break;
      }
      if (s.store().measure_t_basis(d.plain, s.rng())) {
        s.abort(std::nullopt, "player " + std::to_string(i) + " found a T-perp copy");
        break;
      }
    }
  }
  if (s.aborted()) {
    mb.aborted = true;
    return mb;
  }

  std::vector<int> pool;
  for (size_t idx : mb.survivors) pool.push_back(mb.wires[idx]);
  size_t used = 0;
  if (!opts.distill) {
    mb.outputs.assign(pool.begin(), pool.begin() + static_cast<long>(t));
    used = t;
  } else {
    const BlockLayout& L = distill_block();
    size_t block = 0;
    while (mb.outputs.size() < t) {
      if (used + 15 > pool.size()) {
        s.abort(std::nullopt, "distillation ran out of magic-state copies");
        break;
      }
      std::vector<int> ws(pool.begin() + static_cast<long>(used), pool.begin() + static_cast<long>(used + 15));
      used += 15;
      std::string prefix = "_d" + std::to_string(block++) + ".";
      bool ok = true;
      for (int w : ws) {
        size_t idx = static_cast<size_t>(std::find(mb.wires.begin(), mb.wires.end(), w) - mb.wires.begin());
        std::string l = "_z" + std::to_string(w);
        s.mpc().store_bit(l, zhat.get(idx));
        ok = ok && apply_single_clifford(s, GateKind::X, w, l) && apply_single_clifford(s, GateKind::S, w, l);
      }
      for (const CircuitOp& op : L.circuit.ops) {
        if (!ok) break;
        ok = run_block_op(s, op, ws, prefix);
      }
      if (!ok) break;
      bool accept = true;
      for (const std::string& l : L.syndrome) accept = accept && !*s.mpc().read_bit(prefix + l);
      if (accept) {
        mb.outputs.push_back(ws[static_cast<size_t>(L.output)]);
        continue;
      }
      ++mb.rejected_blocks;
      if (s.wire(ws[static_cast<size_t>(L.output)]).status == WireStatus::Encoded) {
        s.mpc().erase_key(ws[static_cast<size_t>(L.output)]);
        s.wire(ws[static_cast<size_t>(L.output)]).status = WireStatus::Lost;
      }
      if (!opts.retry) {
        s.abort(std::nullopt, "distillation block rejected");
        break;
      }
    }
  }
  for (size_t i = used; i < pool.size(); ++i) {
    if (s.wire(pool[i]).status != WireStatus::Encoded) continue;
    s.mpc().erase_key(pool[i]);
    s.wire(pool[i]).status = WireStatus::Lost;
  }
  mb.aborted = s.aborted();
  return mb;
}

}  // namespace qmpc
