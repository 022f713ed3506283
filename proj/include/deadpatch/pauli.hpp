#pragma once

#include "deadpatch/gf2.hpp"

#include <cstdint>
#include <string>

namespace deadpatch {

enum class PauliKind : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(PauliKind p);
PauliKind pauli_from_char(char c);

// n-qubit Pauli operator. Internally P = i^r * prod_q sigma_q with sigma in
// {I, X, Y, Z}; qubit q has x bit x_bits[q], z bit z_bits[q] (Y = both).
// The phase exponent r is tracked mod 4, but every operator the pipeline
// produces is Hermitian, so r stays even and sign() is well defined.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(size_t n) : n_(n), x_(n), z_(n) {}
    PauliString(size_t n, const std::string &ops);  // e.g. "XIZY"

    static PauliString single(size_t n, size_t q, PauliKind p);

    size_t num_qubits() const { return n_; }
    const BitVec &x_bits() const { return x_; }
    const BitVec &z_bits() const { return z_; }
    BitVec &x_bits() { return x_; }
    BitVec &z_bits() { return z_; }

    PauliKind at(size_t q) const;
    void set(size_t q, PauliKind p);

    size_t weight() const;
    bool is_identity() const { return !x_.any() && !z_.any(); }
    // +1 -> +, -1 -> -. Throws if the tracked phase is imaginary.
    int sign() const;
    uint8_t phase_exponent() const { return r_; }
    void set_sign(int s);
    void strip_phase() { r_ = 0; }

    std::string str() const;

    bool operator==(const PauliString &o) const {
        return n_ == o.n_ && r_ == o.r_ && x_ == o.x_ && z_ == o.z_;
    }

    friend PauliString pauli_mul(const PauliString &a, const PauliString &b);
    friend bool pauli_commutes(const PauliString &a, const PauliString &b);

  private:
    size_t n_ = 0;
    uint8_t r_ = 0;  // phase exponent of i, mod 4
    BitVec x_, z_;
};

// Group product with phase tracked mod 4; associative, and p*p == identity
// for Hermitian p.
PauliString pauli_mul(const PauliString &a, const PauliString &b);

// True iff the symplectic inner product a.x*b.z + a.z*b.x vanishes mod 2.
bool pauli_commutes(const PauliString &a, const PauliString &b);

}  // namespace deadpatch
