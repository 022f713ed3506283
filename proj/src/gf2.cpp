#include "deadpatch/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace deadpatch {

void BitVec::xor_in(const BitVec &o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec::xor_in: size mismatch");
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
}

size_t BitVec::popcount() const {
    size_t c = 0;
    for (uint64_t w : w_) c += std::popcount(w);
    return c;
}

bool BitVec::any() const {
    for (uint64_t w : w_)
        if (w) return true;
    return false;
}

size_t BitVec::first_one() const {
    for (size_t i = 0; i < w_.size(); ++i)
        if (w_[i]) return i * 64 + std::countr_zero(w_[i]);
    return SIZE_MAX;
}

bool BitVec::dot(const BitVec &a, const BitVec &b) {
    if (a.n_ != b.n_) throw std::invalid_argument("BitVec::dot: size mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < a.w_.size(); ++i) acc ^= a.w_[i] & b.w_[i];
    return std::popcount(acc) & 1;
}

std::vector<size_t> BitVec::ones() const {
    std::vector<size_t> out;
    for (size_t wi = 0; wi < w_.size(); ++wi) {
        uint64_t w = w_[wi];
        while (w) {
            out.push_back(wi * 64 + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

std::string BitVec::str() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVec> &rows, size_t cols) {
    BitMatrix m(rows.size(), cols);
    for (size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
    return m;
}

void BitMatrix::xor_rows(size_t dst, size_t src) {
    uint64_t *d = &w_[dst * stride_];
    const uint64_t *s = &w_[src * stride_];
    for (size_t i = 0; i < stride_; ++i) d[i] ^= s[i];
}

void BitMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) return;
    for (size_t i = 0; i < stride_; ++i)
        std::swap(w_[a * stride_ + i], w_[b * stride_ + i]);
}

BitVec BitMatrix::row(size_t r) const {
    BitVec v(cols_);
    for (size_t i = 0; i < stride_; ++i) v.words()[i] = w_[r * stride_ + i];
    return v;
}

void BitMatrix::set_row(size_t r, const BitVec &v) {
    if (v.size() != cols_) throw std::invalid_argument("set_row: size mismatch");
    for (size_t i = 0; i < stride_; ++i) w_[r * stride_ + i] = v.words()[i];
}

BitVec BitMatrix::col(size_t c) const {
    BitVec v(rows_);
    for (size_t r = 0; r < rows_; ++r)
        if (get(r, c)) v.set(r, true);
    return v;
}

size_t BitMatrix::row_weight(size_t r) const {
    size_t c = 0;
    for (size_t i = 0; i < stride_; ++i) c += std::popcount(w_[r * stride_ + i]);
    return c;
}

size_t BitMatrix::col_weight(size_t c) const {
    size_t n = 0;
    for (size_t r = 0; r < rows_; ++r) n += get(r, c);
    return n;
}

BitMatrix BitMatrix::mul(const BitMatrix &o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("BitMatrix::mul: shape mismatch");
    BitMatrix out(rows_, o.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        uint64_t *dst = &out.w_[r * out.stride_];
        for (size_t k = 0; k < cols_; ++k) {
            if (!get(r, k)) continue;
            const uint64_t *src = &o.w_[k * o.stride_];
            for (size_t i = 0; i < o.stride_; ++i) dst[i] ^= src[i];
        }
    }
    return out;
}

BitVec BitMatrix::mul_vec(const BitVec &v) const {
    if (v.size() != cols_) throw std::invalid_argument("mul_vec: size mismatch");
    BitVec out(rows_);
    for (size_t r = 0; r < rows_; ++r) {
        uint64_t acc = 0;
        const uint64_t *rw = &w_[r * stride_];
        for (size_t i = 0; i < stride_; ++i) acc ^= rw[i] & v.words()[i];
        if (std::popcount(acc) & 1) out.set(r, true);
    }
    return out;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix out(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t i = 0; i < stride_; ++i) {
            uint64_t w = w_[r * stride_ + i];
            while (w) {
                size_t c = i * 64 + std::countr_zero(w);
                out.set(c, r, true);
                w &= w - 1;
            }
        }
    return out;
}

std::string BitMatrix::str() const {
    std::string s;
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
        s += '\n';
    }
    return s;
}

RrefResult rref(const BitMatrix &m) {
    RrefResult res;
    res.reduced = m;
    res.transform = BitMatrix::identity(m.rows());
    BitMatrix &a = res.reduced;
    BitMatrix &t = res.transform;
    size_t r = 0;
    for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        size_t pivot = r;
        while (pivot < m.rows() && !a.get(pivot, c)) ++pivot;
        if (pivot == m.rows()) continue;
        a.swap_rows(r, pivot);
        t.swap_rows(r, pivot);
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i != r && a.get(i, c)) {
                a.xor_rows(i, r);
                t.xor_rows(i, r);
            }
        }
        res.pivot_cols.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

BitMatrix nullspace(const BitMatrix &m) {
    RrefResult rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t c : rr.pivot_cols) is_pivot[c] = true;
    BitMatrix out(m.cols() - rr.rank, m.cols());
    size_t row = 0;
    for (size_t c = 0; c < m.cols(); ++c) {
        if (is_pivot[c]) continue;
        out.set(row, c, true);
        for (size_t p = 0; p < rr.rank; ++p)
            if (rr.reduced.get(p, c)) out.set(row, rr.pivot_cols[p], true);
        ++row;
    }
    return out;
}

size_t rank_of(const BitMatrix &m) { return rref(m).rank; }

BitMatrix inverse(const BitMatrix &m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
    RrefResult rr = rref(m);
    if (rr.rank != m.rows()) throw std::invalid_argument("inverse: singular matrix");
    return rr.transform;
}

bool solve(const BitMatrix &m, const BitVec &b, BitVec &x_out) {
    if (b.size() != m.rows()) throw std::invalid_argument("solve: size mismatch");
    RrefResult rr = rref(m);
    BitVec tb = rr.transform.mul_vec(b);
    for (size_t r = rr.rank; r < m.rows(); ++r)
        if (tb.get(r)) return false;
    BitVec x(m.cols());
    for (size_t p = 0; p < rr.rank; ++p)
        if (tb.get(p)) x.set(rr.pivot_cols[p], true);
    x_out = x;
    return true;
}

}  // namespace deadpatch
