#include "deadpatch/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace deadpatch {

char pauli_char(PauliKind p) {
    switch (p) {
        case PauliKind::I: return 'I';
        case PauliKind::X: return 'X';
        case PauliKind::Y: return 'Y';
        case PauliKind::Z: return 'Z';
    }
    return '?';
}

PauliKind pauli_from_char(char c) {
    switch (c) {
        case 'I': return PauliKind::I;
        case 'X': return PauliKind::X;
        case 'Y': return PauliKind::Y;
        case 'Z': return PauliKind::Z;
    }
    throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
}

PauliString::PauliString(size_t n, const std::string &ops) : PauliString(n) {
    if (ops.size() != n) throw std::invalid_argument("PauliString: length mismatch");
    for (size_t q = 0; q < n; ++q) set(q, pauli_from_char(ops[q]));
}

PauliString PauliString::single(size_t n, size_t q, PauliKind p) {
    PauliString s(n);
    s.set(q, p);
    return s;
}

PauliKind PauliString::at(size_t q) const {
    bool x = x_.get(q), z = z_.get(q);
    if (x && z) return PauliKind::Y;
    if (x) return PauliKind::X;
    if (z) return PauliKind::Z;
    return PauliKind::I;
}

void PauliString::set(size_t q, PauliKind p) {
    x_.set(q, p == PauliKind::X || p == PauliKind::Y);
    z_.set(q, p == PauliKind::Z || p == PauliKind::Y);
}

size_t PauliString::weight() const {
    size_t c = 0;
    for (size_t i = 0; i < x_.words().size(); ++i)
        c += std::popcount(x_.words()[i] | z_.words()[i]);
    return c;
}

int PauliString::sign() const {
    if (r_ & 1) throw std::logic_error("PauliString::sign: imaginary phase");
    return r_ == 0 ? 1 : -1;
}

void PauliString::set_sign(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("set_sign: want +1/-1");
    r_ = (s == 1) ? 0 : 2;
}

std::string PauliString::str() const {
    std::string out = r_ == 0 ? "+" : (r_ == 2 ? "-" : (r_ == 1 ? "i" : "-i"));
    for (size_t q = 0; q < n_; ++q) out += pauli_char(at(q));
    return out;
}

PauliString pauli_mul(const PauliString &a, const PauliString &b) {
    if (a.n_ != b.n_) throw std::invalid_argument("pauli_mul: length mismatch");
    PauliString out(a.n_);
    // Per-qubit phase contribution g in {-1,0,+1} (power of i), with Y = iXZ
    // absorbed so single-qubit products follow the usual table.
    int64_t plus = 0, minus = 0;
    size_t words = a.x_.words().size();
    for (size_t i = 0; i < words; ++i) {
        uint64_t x1 = a.x_.words()[i], z1 = a.z_.words()[i];
        uint64_t x2 = b.x_.words()[i], z2 = b.z_.words()[i];
        uint64_t p = (x1 & ~z1 & x2 & z2)    // X * Y -> +i Z
                   | (x1 & z1 & ~x2 & z2)    // Y * Z -> +i X
                   | (~x1 & z1 & x2 & ~z2);  // Z * X -> +i Y
        uint64_t m = (x1 & ~z1 & ~x2 & z2)   // X * Z -> -i Y
                   | (x1 & z1 & x2 & ~z2)    // Y * X -> -i Z
                   | (~x1 & z1 & x2 & z2);   // Z * Y -> -i X
        plus += std::popcount(p);
        minus += std::popcount(m);
        out.x_.words()[i] = x1 ^ x2;
        out.z_.words()[i] = z1 ^ z2;
    }
    out.r_ = uint8_t((int64_t(a.r_) + b.r_ + plus - minus) & 3);
    return out;
}

bool pauli_commutes(const PauliString &a, const PauliString &b) {
    if (a.n_ != b.n_) throw std::invalid_argument("pauli_commutes: length mismatch");
    int parity = 0;
    size_t words = a.x_.words().size();
    for (size_t i = 0; i < words; ++i) {
        parity ^= std::popcount(a.x_.words()[i] & b.z_.words()[i]) & 1;
        parity ^= std::popcount(a.z_.words()[i] & b.x_.words()[i]) & 1;
    }
    return parity == 0;
}

}  // namespace deadpatch
