#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>
#include <string>

namespace deadpatch {

// Bit-packed GF(2) vector. Words are little-endian within the vector: bit i
// lives in word i/64 at position i%64.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    size_t size() const { return n_; }
    bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }
    void flip(size_t i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    void xor_in(const BitVec &o);
    size_t popcount() const;
    bool any() const;
    // Index of the lowest set bit, or SIZE_MAX if empty.
    size_t first_one() const;
    // Parity of the AND of two vectors (the GF(2) inner product).
    static bool dot(const BitVec &a, const BitVec &b);

    bool operator==(const BitVec &o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec &o) const { return !(*this == o); }

    const std::vector<uint64_t> &words() const { return w_; }
    std::vector<uint64_t> &words() { return w_; }

    std::vector<size_t> ones() const;
    std::string str() const;

  private:
    size_t n_ = 0;
    std::vector<uint64_t> w_;
};

// Dense bit-packed GF(2) matrix, row-major. Row operations are whole-word
// XORs, which is what makes rref on patch-sized check matrices cheap.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64),
          w_(rows * stride_, 0) {}

    static BitMatrix identity(size_t n);
    static BitMatrix from_rows(const std::vector<BitVec> &rows, size_t cols);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    bool get(size_t r, size_t c) const {
        return (w_[r * stride_ + (c >> 6)] >> (c & 63)) & 1;
    }
    void set(size_t r, size_t c, bool v) {
        uint64_t m = uint64_t(1) << (c & 63);
        uint64_t &word = w_[r * stride_ + (c >> 6)];
        if (v) word |= m; else word &= ~m;
    }

    void xor_rows(size_t dst, size_t src);  // row[dst] ^= row[src]
    void swap_rows(size_t a, size_t b);
    BitVec row(size_t r) const;
    void set_row(size_t r, const BitVec &v);
    BitVec col(size_t c) const;
    size_t row_weight(size_t r) const;
    size_t col_weight(size_t c) const;

    BitMatrix mul(const BitMatrix &o) const;
    BitVec mul_vec(const BitVec &v) const;  // matrix * column vector
    BitMatrix transposed() const;

    bool operator==(const BitMatrix &o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && w_ == o.w_;
    }

    std::string str() const;

  private:
    size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<uint64_t> w_;
    friend struct RrefResult;
    friend RrefResult rref(const BitMatrix &m);
};

struct RrefResult {
    BitMatrix reduced;    // reduced row-echelon form
    BitMatrix transform;  // invertible; transform * input == reduced
    size_t rank = 0;
    std::vector<size_t> pivot_cols;  // one per pivot row, increasing
};

RrefResult rref(const BitMatrix &m);

// Rows form a basis of { v : m * v == 0 }. Row count is cols - rank.
BitMatrix nullspace(const BitMatrix &m);

size_t rank_of(const BitMatrix &m);

// Inverse of a square invertible matrix; throws std::invalid_argument if
// singular.
BitMatrix inverse(const BitMatrix &m);

// Solve m * x = b for one solution; returns false if inconsistent.
bool solve(const BitMatrix &m, const BitVec &b, BitVec &x_out);

}  // namespace deadpatch
