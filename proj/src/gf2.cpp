#include "qmpc/gf2.hpp"

#include <algorithm>

#include "qmpc/errors.hpp"

namespace qmpc {

namespace {

uint64_t tail_mask(size_t m) {
  size_t r = m & 63;
  return r == 0 ? ~uint64_t{0} : (uint64_t{1} << r) - 1;
}

}  // namespace

BitVec BitVec::from_string(std::string_view bits) {
  BitVec v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i, true);
    } else if (bits[i] != '0') {
      throw InvalidArgument("bit string may only contain 0 and 1");
    }
  }
  return v;
}

BitVec BitVec::from_u64(size_t m, uint64_t value) {
  BitVec v(m);
  if (m > 0) {
    v.w_[0] = m >= 64 ? value : value & tail_mask(m);
  }
  return v;
}

BitVec BitVec::random(size_t m, Rng& rng) {
  BitVec v(m);
  for (auto& w : v.w_) w = rng();
  if (!v.w_.empty()) v.w_.back() &= tail_mask(m);
  return v;
}

BitVec BitVec::unit(size_t m, size_t i) {
  BitVec v(m);
  v.set(i, true);
  return v;
}

void BitVec::clear() { std::fill(w_.begin(), w_.end(), 0); }

BitVec& BitVec::operator^=(const BitVec& o) {
  if (o.n_ != n_) throw InvalidDimension("BitVec length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

BitVec& BitVec::operator&=(const BitVec& o) {
  if (o.n_ != n_) throw InvalidDimension("BitVec length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  return *this;
}

bool BitVec::operator<(const BitVec& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return std::lexicographical_compare(w_.begin(), w_.end(), o.w_.begin(), o.w_.end());
}

bool BitVec::dot(const BitVec& o) const {
  if (o.n_ != n_) throw InvalidDimension("BitVec length mismatch");
  uint64_t acc = 0;
  for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
  return std::popcount(acc) & 1;
}

size_t BitVec::popcount() const {
  size_t c = 0;
  for (uint64_t w : w_) c += std::popcount(w);
  return c;
}

bool BitVec::any() const {
  for (uint64_t w : w_) {
    if (w) return true;
  }
  return false;
}

std::string BitVec::to_string() const {
  std::string s(n_, '0');
  for (size_t i = 0; i < n_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

BitVec BitVec::slice(size_t begin, size_t len) const {
  if (begin + len > n_) throw InvalidDimension("slice out of range");
  BitVec out(len);
  for (size_t i = 0; i < len; ++i) {
    if (get(begin + i)) out.set(i, true);
  }
  return out;
}

BitVec BitVec::concat(const BitVec& a, const BitVec& b) {
  BitVec out(a.n_ + b.n_);
  for (size_t i = 0; i < a.n_; ++i) {
    if (a.get(i)) out.set(i, true);
  }
  for (size_t i = 0; i < b.n_; ++i) {
    if (b.get(i)) out.set(a.n_ + i, true);
  }
  return out;
}

void BitVec::resize(size_t m) {
  if (m < n_ && m > 0) {
    w_.resize(num_words_for(m));
    w_.back() &= tail_mask(m);
  } else {
    w_.resize(num_words_for(m), 0);
  }
  n_ = m;
}

void BitVec::erase(size_t i) {
  if (i >= n_) throw InvalidDimension("erase out of range");
  size_t wi = i >> 6;
  uint64_t low = w_[wi] & ((uint64_t{1} << (i & 63)) - 1);
  uint64_t high = (i & 63) == 63 ? 0 : (w_[wi] >> ((i & 63) + 1)) << (i & 63);
  w_[wi] = low | high;
  for (size_t k = wi + 1; k < w_.size(); ++k) {
    w_[k - 1] |= (w_[k] & 1u) << 63;
    w_[k] >>= 1;
  }
  resize(n_ - 1);
}

BitMatrix BitMatrix::identity(size_t m) {
  BitMatrix a(m, m);
  for (size_t i = 0; i < m; ++i) a.set(i, i, true);
  return a;
}

BitMatrix BitMatrix::random(size_t rows, size_t cols, Rng& rng) {
  BitMatrix a(rows, cols);
  for (auto& r : a.rows_) r = BitVec::random(cols, rng);
  return a;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) return {};
  BitMatrix a(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != a.cols_) throw InvalidDimension("ragged matrix rows");
    a.rows_[r] = BitVec::from_string(rows[r]);
  }
  return a;
}

BitVec BitMatrix::column(size_t c) const {
  BitVec v(rows());
  for (size_t r = 0; r < rows(); ++r) {
    if (get(r, c)) v.set(r, true);
  }
  return v;
}

BitVec BitMatrix::operator*(const BitVec& x) const {
  if (x.size() != cols_) throw InvalidArgument("matrix-vector dimension mismatch");
  BitVec y(rows());
  for (size_t r = 0; r < rows(); ++r) {
    if (rows_[r].dot(x)) y.set(r, true);
  }
  return y;
}

BitMatrix BitMatrix::operator*(const BitMatrix& b) const {
  if (b.rows() != cols_) throw InvalidArgument("matrix-matrix dimension mismatch");
  BitMatrix c(rows(), b.cols());
  for (size_t r = 0; r < rows(); ++r) {
    for (size_t k = 0; k < cols_; ++k) {
      if (get(r, k)) c.rows_[r] ^= b.rows_[k];
    }
  }
  return c;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows());
  for (size_t r = 0; r < rows(); ++r) {
    for (size_t c = 0; c < cols_; ++c) {
      if (get(r, c)) t.set(c, r, true);
    }
  }
  return t;
}

bool BitMatrix::is_identity() const {
  if (rows() != cols_) return false;
  for (size_t r = 0; r < rows(); ++r) {
    if (rows_[r] != BitVec::unit(cols_, r)) return false;
  }
  return true;
}

std::string BitMatrix::to_string() const {
  std::string s;
  for (size_t r = 0; r < rows(); ++r) {
    if (r) s += '\n';
    s += rows_[r].to_string();
  }
  return s;
}

size_t rank(const BitMatrix& mat) {
  BitMatrix a = mat;
  size_t rk = 0;
  for (size_t c = 0; c < a.cols() && rk < a.rows(); ++c) {
    size_t piv = rk;
    while (piv < a.rows() && !a.get(piv, c)) ++piv;
    if (piv == a.rows()) continue;
    std::swap(a.row(piv), a.row(rk));
    for (size_t r = 0; r < a.rows(); ++r) {
      if (r != rk && a.get(r, c)) a.row(r) ^= a.row(rk);
    }
    ++rk;
  }
  return rk;
}

BitMatrix invert(const BitMatrix& mat) {
  if (mat.rows() != mat.cols()) throw InvalidDimension("cannot invert a non-square matrix");
  size_t m = mat.rows();
  BitMatrix a = mat;
  BitMatrix inv = BitMatrix::identity(m);
  for (size_t c = 0; c < m; ++c) {
    size_t piv = c;
    while (piv < m && !a.get(piv, c)) ++piv;
    if (piv == m) throw SingularMatrix("matrix is singular over GF(2)");
    std::swap(a.row(piv), a.row(c));
    std::swap(inv.row(piv), inv.row(c));
    for (size_t r = 0; r < m; ++r) {
      if (r != c && a.get(r, c)) {
        a.row(r) ^= a.row(c);
        inv.row(r) ^= inv.row(c);
      }
    }
  }
  return inv;
}

GLElement::GLElement(BitMatrix matrix) : matrix_(std::move(matrix)), inverse_(invert(matrix_)) {}

GLElement random_invertible(size_t m, Rng& rng) {
  if (m == 0) throw InvalidDimension("GL(0) is not supported");
  BitMatrix a(m, m);
  // Reduced copies of accepted rows, kept with distinct pivots, decide span membership.
  std::vector<BitVec> basis;
  std::vector<size_t> pivots;
  for (size_t r = 0; r < m; ++r) {
    while (true) {
      BitVec cand = BitVec::random(m, rng);
      BitVec red = cand;
      for (size_t k = 0; k < basis.size(); ++k) {
        if (red.get(pivots[k])) red ^= basis[k];
      }
      if (red.none()) continue;
      size_t p = 0;
      while (!red.get(p)) ++p;
      for (auto& b : basis) {
        if (b.get(p)) b ^= red;
      }
      basis.push_back(red);
      pivots.push_back(p);
      a.row(r) = cand;
      break;
    }
  }
  return GLElement(std::move(a));
}

BitVec apply_to_basis(const GLElement& g, const BitVec& x) {
  if (x.size() != g.dim()) throw InvalidArgument("apply_to_basis: dimension mismatch");
  return g.matrix() * x;
}

}  // namespace qmpc
