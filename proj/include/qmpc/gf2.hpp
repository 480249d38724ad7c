#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "qmpc/rng.hpp"

namespace qmpc {

// Packed vector over GF(2). Length is fixed at construction.
class BitVec {
 public:
  using Words = boost::container::small_vector<uint64_t, 2>;

  BitVec() = default;
  explicit BitVec(size_t m) : n_(m), w_(num_words_for(m), 0) {}

  static BitVec from_string(std::string_view bits);
  static BitVec from_u64(size_t m, uint64_t value);
  static BitVec random(size_t m, Rng& rng);
  static BitVec unit(size_t m, size_t i);

  size_t size() const { return n_; }
  size_t num_words() const { return w_.size(); }
  uint64_t* words() { return w_.data(); }
  const uint64_t* words() const { return w_.data(); }

  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (v) {
      w_[i >> 6] |= mask;
    } else {
      w_[i >> 6] &= ~mask;
    }
  }
  void flip(size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }
  void clear();

  BitVec& operator^=(const BitVec& o);
  BitVec& operator&=(const BitVec& o);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }
  bool operator<(const BitVec& o) const;

  bool dot(const BitVec& o) const;
  size_t popcount() const;
  bool any() const;
  bool none() const { return !any(); }

  // Low 64 bits as an integer; bit i of the vector is bit i of the result.
  uint64_t to_u64() const { return w_.empty() ? 0 : w_[0]; }
  std::string to_string() const;

  BitVec slice(size_t begin, size_t len) const;
  static BitVec concat(const BitVec& a, const BitVec& b);
  void resize(size_t m);
  // Removes bit i, shifting higher bits down.
  void erase(size_t i);

  static size_t num_words_for(size_t m) { return (m + 63) / 64; }

 private:
  size_t n_ = 0;
  Words w_;
};

// Dense rows x cols matrix over GF(2), one packed BitVec per row.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

  static BitMatrix identity(size_t m);
  static BitMatrix random(size_t rows, size_t cols, Rng& rng);
  static BitMatrix from_rows(const std::vector<std::string>& rows);

  size_t rows() const { return rows_.size(); }
  size_t cols() const { return cols_; }
  bool get(size_t r, size_t c) const { return rows_[r].get(c); }
  void set(size_t r, size_t c, bool v) { rows_[r].set(c, v); }
  const BitVec& row(size_t r) const { return rows_[r]; }
  BitVec& row(size_t r) { return rows_[r]; }
  BitVec column(size_t c) const;

  BitVec operator*(const BitVec& x) const;
  BitMatrix operator*(const BitMatrix& b) const;
  bool operator==(const BitMatrix& o) const { return cols_ == o.cols_ && rows_ == o.rows_; }
  bool operator!=(const BitMatrix& o) const { return !(*this == o); }
  bool operator<(const BitMatrix& o) const { return rows_ < o.rows_; }

  BitMatrix transpose() const;
  bool is_identity() const;
  std::string to_string() const;

 private:
  size_t cols_ = 0;
  std::vector<BitVec> rows_;
};

size_t rank(const BitMatrix& mat);
BitMatrix invert(const BitMatrix& mat);

// An element of GL(m, F2) with its inverse cached.
class GLElement {
 public:
  explicit GLElement(BitMatrix matrix);
  GLElement(BitMatrix matrix, BitMatrix inverse) : matrix_(std::move(matrix)), inverse_(std::move(inverse)) {}

  static GLElement identity(size_t m) { return GLElement(BitMatrix::identity(m), BitMatrix::identity(m)); }

  size_t dim() const { return matrix_.rows(); }
  const BitMatrix& matrix() const { return matrix_; }
  const BitMatrix& inverse() const { return inverse_; }
  GLElement inverted() const { return GLElement(inverse_, matrix_); }

 private:
  BitMatrix matrix_;
  BitMatrix inverse_;
};

GLElement random_invertible(size_t m, Rng& rng);
BitVec apply_to_basis(const GLElement& g, const BitVec& x);

}  // namespace qmpc
