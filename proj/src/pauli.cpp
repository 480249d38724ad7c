#include "qmpc/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qmpc/errors.hpp"

namespace qmpc {

namespace {

// Basis index mask of a bit vector; qubit 0 is the most significant tensor factor.
uint64_t index_mask(const BitVec& v) {
  uint64_t mask = 0;
  size_t m = v.size();
  for (size_t q = 0; q < m; ++q) {
    if (v.get(q)) mask |= uint64_t{1} << (m - 1 - q);
  }
  return mask;
}

const cplx kIPow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

// Returns P|psi>.
Vector apply_pauli_dense(const PauliOp& p, const Vector& psi) {
  uint64_t xm = index_mask(p.x);
  uint64_t zm = index_mask(p.z);
  Vector out(psi.size());
  for (uint64_t b = 0; b < static_cast<uint64_t>(psi.size()); ++b) {
    // X^x Z^z |b> = (-1)^{z.b} |b ^ x>
    double sgn = (std::popcount(zm & b) & 1) ? -1.0 : 1.0;
    out[b ^ xm] = kIPow[p.phase & 3] * sgn * psi[b];
  }
  return out;
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15]; }

std::string bits_to_hex(const BitVec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); i += 4) {
    unsigned nib = 0;
    for (size_t k = 0; k < 4; ++k) {
      nib <<= 1;
      if (i + k < v.size() && v.get(i + k)) nib |= 1;
    }
    s += hex_digit(nib);
  }
  return s;
}

BitVec hex_to_bits(std::string_view s, size_t m) {
  if (s.size() != (m + 3) / 4) throw InvalidArgument("hex block has the wrong length");
  BitVec v(m);
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    unsigned nib;
    if (c >= '0' && c <= '9') {
      nib = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nib = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nib = c - 'A' + 10;
    } else {
      throw InvalidArgument("bad hex digit");
    }
    for (size_t k = 0; k < 4; ++k) {
      size_t pos = 4 * i + k;
      if (nib & (8u >> k)) {
        if (pos >= m) throw InvalidArgument("hex padding bits must be zero");
        v.set(pos, true);
      }
    }
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Vector apply_pauli_vector(const PauliOp& p, const Vector& psi) { return apply_pauli_dense(p, psi); }

PauliOp::PauliOp(BitVec x_, BitVec z_, int phase_) : x(std::move(x_)), z(std::move(z_)), phase(phase_ & 3) {
  if (x.size() != z.size()) throw InvalidDimension("Pauli x and z lengths differ");
}

PauliOp PauliOp::from_label(std::string_view label) {
  int ph = 0;
  size_t i = 0;
  while (i < label.size() && (label[i] == '+' || label[i] == '-' || label[i] == 'i')) {
    if (label[i] == '-') ph += 2;
    if (label[i] == 'i') ph += 1;
    ++i;
  }
  std::string_view body = label.substr(i);
  PauliOp p(body.size());
  for (size_t q = 0; q < body.size(); ++q) {
    switch (body[q]) {
      case 'I': break;
      case 'X': p.x.set(q, true); break;
      case 'Z': p.z.set(q, true); break;
      case 'Y':
        p.x.set(q, true);
        p.z.set(q, true);
        ph += 1;
        break;
      default: throw InvalidArgument("bad Pauli letter");
    }
  }
  p.phase = ph & 3;
  return p;
}

PauliOp PauliOp::single(size_t m, size_t q, char letter) {
  std::string s(m, 'I');
  s[q] = letter;
  return from_label(s);
}

PauliOp PauliOp::random(size_t m, Rng& rng) {
  PauliOp p(BitVec::random(m, rng), BitVec::random(m, rng), 0);
  p.phase = (p.x & p.z).popcount() & 3;
  return p;
}

PauliOp PauliOp::parse(std::string_view text) {
  auto parts = split(text, ' ');
  if (parts.size() != 3 || parts[0].substr(0, 2) != "X:" || parts[1].substr(0, 2) != "Z:" ||
      parts[2].substr(0, 3) != "ph:") {
    throw InvalidArgument("Pauli text must look like 'X:0110 Z:0011 ph:2'");
  }
  BitVec x = BitVec::from_string(parts[0].substr(2));
  BitVec z = BitVec::from_string(parts[1].substr(2));
  std::string ph(parts[2].substr(3));
  if (ph.size() != 1 || ph[0] < '0' || ph[0] > '3') throw InvalidArgument("phase must be 0..3");
  return PauliOp(std::move(x), std::move(z), ph[0] - '0');
}

bool PauliOp::sign() const {
  if (!is_hermitian()) throw InvalidOperator("sign of a non-Hermitian Pauli");
  return ((phase - (x & z).popcount()) & 3) == 2;
}

size_t PauliOp::weight() const {
  size_t w = 0;
  for (size_t i = 0; i < x.num_words(); ++i) w += std::popcount(x.words()[i] | z.words()[i]);
  return w;
}

PauliOp& PauliOp::operator*=(const PauliOp& o) {
  if (o.size() != size()) throw InvalidDimension("Pauli size mismatch");
  // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{z1.x2} X^{x1+x2} Z^{z1+z2}
  size_t cross = 0;
  const uint64_t* zw = z.words();
  const uint64_t* ow = o.x.words();
  for (size_t i = 0; i < x.num_words(); ++i) cross += std::popcount(zw[i] & ow[i]);
  phase = (phase + o.phase + 2 * cross) & 3;
  x ^= o.x;
  z ^= o.z;
  return *this;
}

bool PauliOp::operator<(const PauliOp& o) const {
  if (x != o.x) return x < o.x;
  if (z != o.z) return z < o.z;
  return (phase & 3) < (o.phase & 3);
}

bool PauliOp::commutes(const PauliOp& o) const { return !symplectic_product(*this, o); }

bool symplectic_product(const PauliOp& a, const PauliOp& b) {
  if (a.size() != b.size()) throw InvalidDimension("Pauli size mismatch");
  uint64_t acc = 0;
  for (size_t i = 0; i < a.x.num_words(); ++i) {
    acc ^= (a.x.words()[i] & b.z.words()[i]) ^ (a.z.words()[i] & b.x.words()[i]);
  }
  return std::popcount(acc) & 1;
}

PauliOp PauliOp::restrict(const std::vector<size_t>& qubits) const {
  PauliOp p(qubits.size());
  for (size_t i = 0; i < qubits.size(); ++i) {
    p.x.set(i, x.get(qubits[i]));
    p.z.set(i, z.get(qubits[i]));
  }
  p.phase = phase;
  return p;
}

PauliOp PauliOp::slice(size_t begin, size_t len) const {
  return PauliOp(x.slice(begin, len), z.slice(begin, len), phase);
}

PauliOp PauliOp::tensor(const PauliOp& a, const PauliOp& b) {
  return PauliOp(BitVec::concat(a.x, b.x), BitVec::concat(a.z, b.z), a.phase + b.phase);
}

void PauliOp::conj_h(size_t q) {
  bool xq = x.get(q), zq = z.get(q);
  // H X^a Z^b H = Z^a X^b = (-1)^{ab} X^b Z^a
  if (xq && zq) phase = (phase + 2) & 3;
  x.set(q, zq);
  z.set(q, xq);
}

void PauliOp::conj_s(size_t q) {
  if (x.get(q)) {
    phase = (phase + 1) & 3;
    z.flip(q);
  }
}

void PauliOp::conj_sdg(size_t q) {
  if (x.get(q)) {
    phase = (phase + 3) & 3;
    z.flip(q);
  }
}

void PauliOp::conj_cnot(size_t c, size_t t) {
  if (x.get(c)) x.flip(t);
  if (z.get(t)) z.flip(c);
}

std::string PauliOp::to_text() const {
  return "X:" + x.to_string() + " Z:" + z.to_string() + " ph:" + std::to_string(phase & 3);
}

std::string PauliOp::to_label() const {
  int ph = phase;
  std::string body(size(), 'I');
  for (size_t q = 0; q < size(); ++q) {
    bool a = x.get(q), b = z.get(q);
    if (a && b) {
      body[q] = 'Y';
      ph -= 1;
    } else if (a) {
      body[q] = 'X';
    } else if (b) {
      body[q] = 'Z';
    }
  }
  static const char* prefix[4] = {"+", "+i", "-", "-i"};
  return std::string(prefix[ph & 3]) + body;
}

Matrix PauliOp::to_dense() const {
  size_t m = size();
  if (m > dense_limit) throw ResourceLimit("Pauli too large for a dense matrix");
  size_t dim = size_t{1} << m;
  Matrix u = Matrix::Zero(dim, dim);
  for (size_t b = 0; b < dim; ++b) {
    Vector e = Vector::Zero(dim);
    e[b] = 1;
    u.col(b) = apply_pauli_dense(*this, e);
  }
  return u;
}

std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::I: return "I";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::SDG: return "SDG";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

GateKind parse_gate_name(std::string_view name) {
  for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::SDG,
                     GateKind::CNOT}) {
    if (gate_name(k) == name) return k;
  }
  throw InvalidArgument("unknown gate " + std::string(name));
}

bool is_single_qubit(GateKind k) { return k != GateKind::CNOT; }

CliffordOp::CliffordOp(size_t m) : m_(m), images_(2 * m, PauliOp(m)) {
  for (size_t q = 0; q < m; ++q) {
    images_[q].x.set(q, true);
    images_[m + q].z.set(q, true);
  }
}

CliffordOp CliffordOp::gate(size_t m, GateKind kind, size_t q0, size_t q1) {
  CliffordOp c(m);
  c.then(kind, q0, q1);
  return c;
}

CliffordOp CliffordOp::pauli(const PauliOp& p) {
  CliffordOp c(p.size());
  for (size_t g = 0; g < 2 * c.m_; ++g) {
    if (symplectic_product(p, c.images_[g])) c.images_[g].phase = (c.images_[g].phase + 2) & 3;
  }
  return c;
}

CliffordOp CliffordOp::from_circuit(const CliffordCircuit& circ) {
  CliffordOp c(circ.qubits);
  for (const Gate& g : circ.gates) c.then(g.kind, g.q0, g.q1);
  return c;
}

CliffordOp CliffordOp::from_tableau(const BitMatrix& symplectic, const BitVec& signs) {
  size_t n2 = symplectic.rows();
  if (n2 % 2 || symplectic.cols() != n2 || signs.size() != n2) throw InvalidDimension("tableau must be 2m x 2m");
  size_t m = n2 / 2;
  CliffordOp c(m);
  for (size_t g = 0; g < n2; ++g) {
    PauliOp p(symplectic.row(g).slice(0, m), symplectic.row(g).slice(m, m), 0);
    p.phase = ((p.x & p.z).popcount() + 2 * signs.get(g)) & 3;
    c.images_[g] = std::move(p);
  }
  if (!c.is_valid()) throw InvalidOperator("tableau is not symplectic");
  return c;
}

BitMatrix CliffordOp::symplectic() const {
  BitMatrix s(2 * m_, 2 * m_);
  for (size_t g = 0; g < 2 * m_; ++g) s.row(g) = BitVec::concat(images_[g].x, images_[g].z);
  return s;
}

BitVec CliffordOp::phases() const {
  BitVec r(2 * m_);
  for (size_t g = 0; g < 2 * m_; ++g) r.set(g, images_[g].sign());
  return r;
}

bool CliffordOp::is_valid() const {
  if (images_.size() != 2 * m_) return false;
  for (size_t a = 0; a < 2 * m_; ++a) {
    if (!images_[a].is_hermitian() || images_[a].size() != m_) return false;
    for (size_t b = a + 1; b < 2 * m_; ++b) {
      bool expect = b == a + m_ && a < m_;
      if (symplectic_product(images_[a], images_[b]) != expect) return false;
    }
  }
  return true;
}

bool CliffordOp::is_identity() const { return *this == CliffordOp(m_); }

bool CliffordOp::operator<(const CliffordOp& o) const {
  if (m_ != o.m_) return m_ < o.m_;
  return images_ < o.images_;
}

void CliffordOp::then(GateKind kind, size_t q0, size_t q1) {
  if (q0 >= m_ || (kind == GateKind::CNOT && (q1 >= m_ || q1 == q0))) throw InvalidArgument("bad gate qubits");
  for (auto& p : images_) {
    switch (kind) {
      case GateKind::I: break;
      case GateKind::X: p.conj_x(q0); break;
      case GateKind::Y: p.conj_y(q0); break;
      case GateKind::Z: p.conj_z(q0); break;
      case GateKind::H: p.conj_h(q0); break;
      case GateKind::S: p.conj_s(q0); break;
      case GateKind::SDG: p.conj_sdg(q0); break;
      case GateKind::CNOT: p.conj_cnot(q0, q1); break;
    }
  }
}

std::string CliffordOp::to_hex() const {
  std::string s = "C" + std::to_string(m_) + ":";
  for (size_t g = 0; g < 2 * m_; ++g) {
    if (g) s += '.';
    s += bits_to_hex(BitVec::concat(images_[g].x, images_[g].z));
  }
  s += ":" + bits_to_hex(phases());
  return s;
}

CliffordOp CliffordOp::from_hex(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3 || parts[0].empty() || parts[0][0] != 'C') throw InvalidArgument("bad Clifford hex text");
  size_t m = std::stoul(std::string(parts[0].substr(1)));
  auto rows = split(parts[1], '.');
  if (m == 0 || rows.size() != 2 * m) throw InvalidArgument("Clifford hex row count mismatch");
  BitMatrix s(2 * m, 2 * m);
  for (size_t g = 0; g < 2 * m; ++g) s.row(g) = hex_to_bits(rows[g], 2 * m);
  return from_tableau(s, hex_to_bits(parts[2], 2 * m));
}

PauliOp conjugate_pauli(const CliffordOp& c, const PauliOp& p) {
  size_t m = c.qubits();
  if (p.size() != m) throw InvalidDimension("conjugate_pauli: size mismatch");
  PauliOp acc(m);
  acc.phase = p.phase;
  for (size_t q = 0; q < m; ++q) {
    if (p.x.get(q)) acc *= c.image_x(q);
  }
  for (size_t q = 0; q < m; ++q) {
    if (p.z.get(q)) acc *= c.image_z(q);
  }
  return acc;
}

CliffordOp compose(const CliffordOp& a, const CliffordOp& b) {
  if (a.qubits() != b.qubits()) throw InvalidDimension("compose: size mismatch");
  CliffordOp out(a.qubits());
  for (size_t g = 0; g < 2 * a.qubits(); ++g) out.set_image(g, conjugate_pauli(a, b.image(g)));
  return out;
}

CliffordOp inverse(const CliffordOp& c) {
  size_t m = c.qubits();
  CliffordOp inv(m);
  // The preimage Q of a generator has Q.x_i = <target, img(Z_i)> and Q.z_i = <target, img(X_i)>.
  for (size_t g = 0; g < 2 * m; ++g) {
    bool is_x = g < m;
    size_t j = g % m;
    PauliOp q(m);
    for (size_t i = 0; i < m; ++i) {
      const PauliOp& iz = c.image_z(i);
      const PauliOp& ix = c.image_x(i);
      q.x.set(i, is_x ? iz.z.get(j) : iz.x.get(j));
      q.z.set(i, is_x ? ix.z.get(j) : ix.x.get(j));
    }
    q.phase = (q.x & q.z).popcount() & 3;
    PauliOp img = conjugate_pauli(c, q);
    q.phase = (q.phase + 4 - img.phase) & 3;
    inv.set_image(g, std::move(q));
  }
  return inv;
}

CliffordOp random_clifford(size_t m, Rng& rng) {
  if (m == 0) throw InvalidDimension("random_clifford: m must be positive");
  std::vector<PauliOp> a, b;
  a.reserve(m);
  b.reserve(m);
  auto project = [&](PauliOp v) {
    // Symplectic Gram-Schmidt against the pairs chosen so far.
    PauliOp orig = v;
    for (size_t k = 0; k < a.size(); ++k) {
      if (symplectic_product(orig, b[k])) {
        v.x ^= a[k].x;
        v.z ^= a[k].z;
      }
      if (symplectic_product(orig, a[k])) {
        v.x ^= b[k].x;
        v.z ^= b[k].z;
      }
    }
    return v;
  };
  for (size_t i = 0; i < m; ++i) {
    PauliOp v;
    do {
      v = project(PauliOp(BitVec::random(m, rng), BitVec::random(m, rng)));
    } while (v.is_trivial());
    PauliOp w;
    do {
      w = project(PauliOp(BitVec::random(m, rng), BitVec::random(m, rng)));
    } while (!symplectic_product(v, w));
    a.push_back(std::move(v));
    b.push_back(std::move(w));
  }
  CliffordOp c(m);
  for (size_t i = 0; i < m; ++i) {
    a[i].phase = ((a[i].x & a[i].z).popcount() + 2 * random_bit(rng)) & 3;
    b[i].phase = ((b[i].x & b[i].z).popcount() + 2 * random_bit(rng)) & 3;
    c.set_image(i, std::move(a[i]));
    c.set_image(m + i, std::move(b[i]));
  }
  return c;
}

std::vector<CliffordOp> clifford_group(size_t m) {
  if (m == 0 || m > 2) throw ResourceLimit("clifford_group: only m = 1 or 2 is enumerable");
  std::vector<CliffordOp> gens;
  for (size_t q = 0; q < m; ++q) {
    gens.push_back(CliffordOp::h(m, q));
    gens.push_back(CliffordOp::s(m, q));
  }
  if (m == 2) gens.push_back(CliffordOp::cnot(m, 0, 1));
  std::set<CliffordOp> seen{CliffordOp::identity(m)};
  std::vector<CliffordOp> frontier{CliffordOp::identity(m)};
  while (!frontier.empty()) {
    std::vector<CliffordOp> next;
    for (auto& c : frontier) {
      for (auto& g : gens) {
        CliffordOp d = compose(g, c);
        if (seen.insert(d).second) next.push_back(std::move(d));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

CliffordOp tensor(const CliffordOp& a, const CliffordOp& b) {
  size_t ma = a.qubits(), mb = b.qubits();
  CliffordOp out(ma + mb);
  PauliOp ia(ma), ib(mb);
  for (size_t q = 0; q < ma; ++q) {
    out.set_image(q, PauliOp::tensor(a.image_x(q), ib));
    out.set_image(ma + mb + q, PauliOp::tensor(a.image_z(q), ib));
  }
  for (size_t q = 0; q < mb; ++q) {
    out.set_image(ma + q, PauliOp::tensor(ia, b.image_x(q)));
    out.set_image(ma + mb + ma + q, PauliOp::tensor(ia, b.image_z(q)));
  }
  return out;
}

CliffordOp embed(const CliffordOp& c, size_t m, const std::vector<size_t>& qubits) {
  if (qubits.size() != c.qubits()) throw InvalidDimension("embed: qubit list size mismatch");
  for (size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] >= m) throw InvalidArgument("embed: qubit out of range");
    for (size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) throw InvalidArgument("embed: repeated qubit");
    }
  }
  CliffordOp out(m);
  auto lift = [&](const PauliOp& p) {
    PauliOp r(m);
    r.phase = p.phase;
    for (size_t i = 0; i < qubits.size(); ++i) {
      r.x.set(qubits[i], p.x.get(i));
      r.z.set(qubits[i], p.z.get(i));
    }
    return r;
  };
  for (size_t i = 0; i < qubits.size(); ++i) {
    out.set_image(qubits[i], lift(c.image_x(i)));
    out.set_image(m + qubits[i], lift(c.image_z(i)));
  }
  return out;
}

CliffordCircuit decompose(const CliffordOp& c) {
  size_t m = c.qubits();
  CliffordOp w = c;
  std::vector<Gate> applied;
  auto apply = [&](GateKind k, size_t q0, size_t q1 = 0) {
    w.then(k, q0, q1);
    applied.push_back({k, q0, q1});
  };
  for (size_t i = 0; i < m; ++i) {
    {
      const PauliOp& a = w.image_x(i);
      size_t j = i;
      while (j < m && !a.x.get(j)) ++j;
      if (j == m) {
        j = i;
        while (!w.image_x(i).z.get(j)) ++j;
        apply(GateKind::H, j);
      }
      if (!w.image_x(i).x.get(i)) apply(GateKind::CNOT, j, i);
      for (size_t k = i + 1; k < m; ++k) {
        if (w.image_x(i).x.get(k)) apply(GateKind::CNOT, i, k);
      }
      for (size_t k = i + 1; k < m; ++k) {
        if (w.image_x(i).z.get(k)) {
          apply(GateKind::H, k);
          apply(GateKind::CNOT, i, k);
        }
      }
      if (w.image_x(i).z.get(i)) apply(GateKind::S, i);
    }
    for (size_t k = i + 1; k < m; ++k) {
      if (w.image_z(i).x.get(k)) {
        if (w.image_z(i).z.get(k)) apply(GateKind::S, k);
        apply(GateKind::H, k);
      }
    }
    for (size_t k = i + 1; k < m; ++k) {
      if (w.image_z(i).z.get(k)) apply(GateKind::CNOT, k, i);
    }
    if (w.image_z(i).x.get(i)) {
      apply(GateKind::H, i);
      apply(GateKind::S, i);
      apply(GateKind::H, i);
    }
  }
  CliffordCircuit out;
  out.qubits = m;
  for (size_t q = 0; q < m; ++q) {
    bool fx = w.image_x(q).sign(), fz = w.image_z(q).sign();
    if (fx && fz) {
      out.gates.push_back({GateKind::Y, q, 0});
    } else if (fx) {
      out.gates.push_back({GateKind::Z, q, 0});
    } else if (fz) {
      out.gates.push_back({GateKind::X, q, 0});
    }
  }
  for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
    Gate g = *it;
    if (g.kind == GateKind::S) {
      g.kind = GateKind::SDG;
    } else if (g.kind == GateKind::SDG) {
      g.kind = GateKind::S;
    }
    out.gates.push_back(g);
  }
  return out;
}

Matrix to_dense(const CliffordOp& c) {
  size_t m = c.qubits();
  if (m > dense_limit) throw ResourceLimit("Clifford on " + std::to_string(m) + " qubits exceeds the dense limit");
  size_t dim = size_t{1} << m;
  // C|0> is the joint +1 eigenvector of the images of Z_j.
  Vector psi;
  for (size_t y = 0; y < dim; ++y) {
    Vector v = Vector::Zero(dim);
    v[y] = 1;
    for (size_t q = 0; q < m; ++q) v = 0.5 * (v + apply_pauli_dense(c.image_z(q), v));
    if (v.norm() > 1e-6) {
      psi = v / v.norm();
      break;
    }
  }
  Matrix u(dim, dim);
  for (size_t col = 0; col < dim; ++col) {
    PauliOp xs(m);
    for (size_t q = 0; q < m; ++q) {
      if (col & (size_t{1} << (m - 1 - q))) xs.x.set(q, true);
    }
    u.col(col) = apply_pauli_dense(conjugate_pauli(c, xs), psi);
  }
  for (size_t r = 0; r < dim; ++r) {
    if (std::abs(u(r, 0)) > 1e-9) {
      u *= std::conj(u(r, 0)) / std::abs(u(r, 0));
      break;
    }
  }
  return u;
}

bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  cplx ip = (b.adjoint() * a).trace();
  if (std::abs(ip) < 1e-12) return a.norm() < tol && b.norm() < tol;
  cplx ph = ip / std::abs(ip);
  return (a - ph * b).cwiseAbs().maxCoeff() < tol;
}

double trace_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

Vector random_state(size_t m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  size_t dim = size_t{1} << m;
  Vector v(dim);
  for (size_t i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
  return v / v.norm();
}

Matrix random_unitary(size_t dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(dim, dim);
  for (size_t r = 0; r < dim; ++r) {
    for (size_t c = 0; c < dim; ++c) z(r, c) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (size_t i = 0; i < dim; ++i) {
    cplx d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

double pauli_twirl_distance(const Matrix& rho, size_t m, size_t samples, Rng& rng) {
  size_t dim = size_t{1} << m;
  Matrix avg = Matrix::Zero(dim, dim);
  if (samples == 0) {
    for (uint64_t xb = 0; xb < dim; ++xb) {
      for (uint64_t zb = 0; zb < dim; ++zb) {
        Matrix p = PauliOp(BitVec::from_u64(m, xb), BitVec::from_u64(m, zb)).to_dense();
        avg += p * rho * p.adjoint();
      }
    }
    avg /= static_cast<double>(dim * dim);
  } else {
    for (size_t s = 0; s < samples; ++s) {
      Matrix p = PauliOp::random(m, rng).to_dense();
      avg += p * rho * p.adjoint();
    }
    avg /= static_cast<double>(samples);
  }
  Matrix tau = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return trace_norm(avg - tau);
}

TwirlStats pauli_twirl_check(size_t m, size_t trials, Rng& rng, size_t samples) {
  if (m > dense_limit) throw ResourceLimit("pauli_twirl_check: register too large");
  if (samples == 0 && m > 3) samples = 4096;
  TwirlStats st;
  for (size_t t = 0; t < trials; ++t) {
    Vector psi = random_state(m, rng);
    Matrix rho = psi * psi.adjoint();
    double d = pauli_twirl_distance(rho, m, samples, rng);
    st.max_distance = std::max(st.max_distance, d);
    st.mean_distance += d;
    ++st.states;
  }
  if (st.states) st.mean_distance /= static_cast<double>(st.states);
  return st;
}

}  // namespace qmpc
