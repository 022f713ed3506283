#pragma once

#include "deadpatch/circuit.hpp"
#include "deadpatch/gf2.hpp"
#include "deadpatch/patch.hpp"
#include "deadpatch/pauli.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deadpatch {

// A circuit check: a parity of measurement outcomes that is deterministic in
// the absence of faults. `outcomes` is a mask over the triple's outcome
// indices; `expected` is the noiseless parity (absorbed so the normalized
// check value is 0 on noiseless runs).
struct Check {
    BitVec outcomes;
    bool expected = false;
};

struct CheckBasis {
    size_t num_outcomes = 0;
    std::vector<Check> checks;
};

// Stabilizer simulation with symbolic measurement outcomes. Deterministic
// measurements are detected by a rank test against the tracked group; each
// one yields a check of the outcome code.
class SymbolicSimulator {
  public:
    explicit SymbolicSimulator(size_t n_qubits, size_t max_outcomes);

    void apply(const Operation &op);
    void run(const Circuit &c);

    const CheckBasis &checks() const { return basis_; }
    CheckBasis take_checks() { return std::move(basis_); }

    // Current stabilizer generators (Pauli part only).
    std::vector<PauliString> generators() const;

  private:
    struct Row {
        PauliString p;      // phase exponent always 0
        BitVec syms;        // symbolic sign: XOR of these internal symbols
        bool neg = false;   // plus constant sign bit
    };
    size_t n_;
    size_t n_symbols_ = 0;
    size_t max_symbols_;
    std::vector<Row> stabs_;
    std::vector<PauliString> destabs_;
    CheckBasis basis_;

    // Echelonized map internal-symbol-combination -> outcome set, used to
    // turn deterministic outcome expressions into checks over outcomes.
    struct Rel {
        BitVec syms;
        BitVec outcomes;
        bool neg;
    };
    std::map<size_t, Rel> rels_;  // keyed by leading symbol index

    size_t fresh_symbol();
    void measure(const PauliString &p, int64_t outcome);
    void reset(uint32_t q, bool x_basis);
    void record_outcome_expr(int64_t outcome, BitVec syms, bool neg);
    void row_mul(Row &dst, const Row &src);
};

CheckBasis compute_outcome_code(const CircuitTriple &t);

// An elementary fault: a Pauli applied after a given flattened position of
// the concatenated circuit (positions index the body), plus any intrinsic
// outcome flips.
struct Fault {
    uint32_t op_id = 0;       // flattened op position in the concatenated circuit
    uint32_t after_step = 0;  // global step index; the Pauli acts from the next step
    uint32_t q[2] = {kNoQubit, kNoQubit};
    PauliKind p[2] = {PauliKind::I, PauliKind::I};
    std::vector<int64_t> outcome_flips;
    double probability = 0.0;
};

struct FaultSet {
    std::vector<Fault> faults;
    // Faults grouped per noisy operation for the sampler: op_groups[i] is a
    // [begin, end) range into `faults`, all variants of one operation.
    std::vector<std::pair<uint32_t, uint32_t>> op_groups;
    double p = 0.0;  // EM3 parameter (0 for the minimal placeholder set)
};

FaultSet enumerate_faults_minimal(const CircuitTriple &t);
FaultSet enumerate_faults_em3(const CircuitTriple &t, double p);

struct CheckMatrix {
    BitMatrix m;  // rows = checks, cols = faults
    std::vector<double> col_probability;
};

struct LogicalEffectMatrix {
    BitMatrix m;  // rows = logical observables (X-like, Z-like), cols = faults
    std::vector<std::string> row_labels;
};

struct CodeSpec {
    std::vector<PauliString> stabilizers;
    std::vector<std::pair<PauliString, PauliString>> logicals;  // (X-like, Z-like)
};

CheckMatrix compute_check_matrix(const CircuitTriple &t, const CheckBasis &basis,
                                 const FaultSet &fs);

struct LogicalEffectResult {
    LogicalEffectMatrix lm;
    CodeSpec input_code;
    CodeSpec output_code;
};

LogicalEffectResult compute_logical_effect(const CircuitTriple &t, const FaultSet &fs);

// Extract the code stabilized on alive data qubits at the end of a noiseless
// run (aux support eliminated), plus a canonical anticommuting logical pair.
// Returns nullopt if the data subspace does not carry exactly one logical
// qubit.
std::optional<CodeSpec> extract_code(const CircuitTriple &t, bool after_prior_only,
                                     const std::vector<uint32_t> &data_qubits);

struct FaultDistanceResult {
    size_t distance = 0;
    bool exact = true;  // false: only "distance >= distance" established
};

// Minimum |F| with cm*1_F = 0 and lm*1_F != 0. Uses the graph realization
// when the matrix is graph-like; otherwise a bounded exhaustive search.
FaultDistanceResult fault_distance(const CheckMatrix &cm, const LogicalEffectMatrix &lm,
                                   size_t exhaustive_cap = 9);

// Space-like code distances (d_Z, d_X) of the instantaneous stabilizer
// groups of a damaged patch, minimized over the Z-complete and X-complete
// round phases.
std::pair<size_t, size_t> isg_code_distance(const NGonSet &s);

std::string check_matrix_to_coo(const BitMatrix &m);
std::string fault_set_to_json(const FaultSet &fs);

}  // namespace deadpatch
