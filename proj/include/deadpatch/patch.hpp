#pragma once

#include "deadpatch/circuit.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace deadpatch {

enum class Basis : uint8_t { Z, X };
inline char basis_char(Basis b) { return b == Basis::Z ? 'Z' : 'X'; }

enum class QubitKind : uint8_t { Data, AuxA, AuxB, AuxC, AuxBoundary };

struct QubitInfo {
    Coord coord;
    QubitKind kind = QubitKind::Data;
    bool alive = true;
};

enum class GadgetVariant : uint8_t { Standard, RerouteNoB, SplitHalf };

// One stabilizer-extraction unit: an n-gon measures the product of `basis`
// Paulis over its data qubits. `slots` give each data qubit's pairwise-
// measurement time slot within the round (1..4, inherited from the parent
// plaquette role so damaged patches keep the global schedule).
struct NGon {
    Basis basis = Basis::Z;
    std::vector<uint32_t> data;   // ordered by slot (gadget order)
    std::vector<int> slots;       // same length as data
    std::vector<uint32_t> aux;    // assigned auxiliaries (A,B,C for bulk 4-gons)
    uint32_t gadget_aux = kNoQubit;  // auxiliary the gadget drives; none for 1-gons
    GadgetVariant variant = GadgetVariant::Standard;
    Coord anchor;                 // parent plaquette center (or virtual center)

    size_t n() const { return data.size(); }
};

enum class Scheme : uint8_t { None, MIA, Auger };

struct DeadConfig {
    std::set<uint32_t> dead;
    size_t n_dead() const { return dead.size(); }
};

struct NGonSet {
    int L = 0;
    std::vector<QubitInfo> qubits;
    std::vector<NGon> ngons;
    Scheme scheme = Scheme::None;

    size_t n_qubits() const { return qubits.size(); }
    size_t n_alive() const;
    std::vector<uint32_t> data_qubits() const;       // all data ids
    std::vector<uint32_t> alive_data_qubits() const;
};

// Square L x L good-boundary patch: (L-1)^2 bulk 4-gons in checkerboard,
// 2(L-1) boundary 2-gons, one auxiliary on every mixed-parity lattice point.
// Z logical runs horizontally, X vertically.
NGonSet build_patch(int L);

// Dead-component rules. Both expect scheme == None and leave dead qubits out
// of every returned n-gon.
NGonSet apply_mia(const NGonSet &s, const DeadConfig &d);
NGonSet apply_auger(const NGonSet &s, const DeadConfig &d);

// Lower to a circuit triple on the pipelined 6-step-per-round schedule:
// prior = data init + 2 noiseless rounds, body = noisy_rounds rounds,
// posterior = 2 noiseless rounds. Alive idle qubits get explicit IDLE ops.
CircuitTriple lower_to_circuit(const NGonSet &s, size_t noisy_rounds);

// True iff the damaged patch still encodes exactly one logical qubit
// (checked through the outcome-analysis machinery on the noiseless circuit).
bool forms_logical_qubit(const NGonSet &s);

// JSON debug dump / load of the n-gon structure (per-gon basis/data/aux/
// variant) plus qubit table.
std::string ngonset_to_json(const NGonSet &s);

std::string dead_config_to_json(int L, const DeadConfig &d);
DeadConfig dead_config_from_json(const std::string &text, int *L_out = nullptr);

}  // namespace deadpatch
