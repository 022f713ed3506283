#pragma once

#include "deadpatch/pauli.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deadpatch {

constexpr uint32_t kNoQubit = UINT32_MAX;

// Coordinates in half-integer lattice units, stored doubled so they stay
// exact. Data qubits have both components even; A/C-type auxiliaries one
// even and one odd; B auxiliaries both odd.
struct Coord {
    int x2 = 0, y2 = 0;
    double x() const { return x2 / 2.0; }
    double y() const { return y2 / 2.0; }
    bool operator==(const Coord &o) const { return x2 == o.x2 && y2 == o.y2; }
};

enum class OpKind : uint8_t { InitX, InitZ, MeasX, MeasZ, MeasPP, Idle };

inline bool op_is_measurement(OpKind k) {
    return k == OpKind::MeasX || k == OpKind::MeasZ || k == OpKind::MeasPP;
}

struct Operation {
    OpKind kind = OpKind::Idle;
    uint32_t q1 = kNoQubit;
    uint32_t q2 = kNoQubit;                 // second target for MeasPP only
    PauliKind p1 = PauliKind::I;            // MeasPP Pauli on q1
    PauliKind p2 = PauliKind::I;            // MeasPP Pauli on q2
    int64_t outcome = -1;                   // dense index for measurement kinds

    size_t num_targets() const { return q2 == kNoQubit ? 1 : 2; }
};

struct Circuit {
    uint32_t n_qubits = 0;
    std::vector<std::vector<Operation>> steps;

    size_t num_outcomes() const;
    size_t num_operations() const;
    // Assign outcome indices 0..M-1 in program order (step, then qubit order
    // as stored).
    void renumber_outcomes(int64_t base = 0);
    // Stable-sort operations within each step by first target.
    void canonicalize();
};

// One violation message per problem found: per-step single-use and
// target-arity constraints.
std::vector<std::string> validate(const Circuit &c);

// Steps of b appended after a; outcome indices renumbered densely.
Circuit concat(const Circuit &a, const Circuit &b);

struct CircuitTriple {
    uint32_t n_qubits = 0;
    std::vector<Coord> coords;   // indexed by qubit id
    Circuit prior;               // noiseless
    Circuit body;                // noisy
    Circuit posterior;           // noiseless

    size_t num_outcomes() const {
        return prior.num_outcomes() + body.num_outcomes() + posterior.num_outcomes();
    }
    // Renumber so outcome indices run 0..M-1 across prior, body, posterior.
    void renumber();
    Circuit concatenated() const;
};

std::string serialize(const CircuitTriple &t);

struct ParseError {
    size_t line;
    std::string reason;
};

// Throws std::runtime_error carrying line number and reason on bad input.
CircuitTriple parse(const std::string &text);

}  // namespace deadpatch
