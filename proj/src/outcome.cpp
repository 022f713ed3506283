#include "deadpatch/outcome.hpp"

#include "deadpatch/graphreal.hpp"
#include "json.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace deadpatch {

// ---------------------------------------------------------------------------
// Symbolic stabilizer simulation
// ---------------------------------------------------------------------------

SymbolicSimulator::SymbolicSimulator(size_t n_qubits, size_t max_outcomes)
    : n_(n_qubits), max_symbols_(n_qubits + max_outcomes) {
    stabs_.reserve(n_);
    destabs_.reserve(n_);
    // Unknown initial state: a uniformly random Z eigenstate is
    // indistinguishable from the maximally mixed state under stabilizer
    // measurements, so every qubit starts as Z with a fresh symbol.
    for (size_t q = 0; q < n_; ++q) {
        Row r;
        r.p = PauliString::single(n_, q, PauliKind::Z);
        r.syms = BitVec(max_symbols_);
        r.syms.set(fresh_symbol(), true);
        stabs_.push_back(std::move(r));
        destabs_.push_back(PauliString::single(n_, q, PauliKind::X));
    }
}

size_t SymbolicSimulator::fresh_symbol() {
    if (n_symbols_ >= max_symbols_) throw std::logic_error("symbol budget exceeded");
    return n_symbols_++;
}

void SymbolicSimulator::row_mul(Row &dst, const Row &src) {
    PauliString prod = pauli_mul(dst.p, src.p);
    uint8_t r = prod.phase_exponent();
    if (r & 1) throw std::logic_error("non-Hermitian stabilizer product");
    dst.neg ^= src.neg ^ (r == 2);
    prod.set_sign(1);
    dst.p = std::move(prod);
    dst.syms.xor_in(src.syms);
}

void SymbolicSimulator::record_outcome_expr(int64_t outcome, BitVec syms, bool neg) {
    BitVec outcomes(basis_.num_outcomes);
    outcomes.set(size_t(outcome), true);
    // Reduce the symbol expression against earlier outcome relations.
    while (syms.any()) {
        size_t lead = syms.first_one();
        auto it = rels_.find(lead);
        if (it == rels_.end()) {
            rels_.emplace(lead, Rel{std::move(syms), std::move(outcomes), neg});
            return;
        }
        syms.xor_in(it->second.syms);
        outcomes.xor_in(it->second.outcomes);
        neg ^= it->second.neg;
    }
    basis_.checks.push_back(Check{std::move(outcomes), neg});
}

void SymbolicSimulator::measure(const PauliString &p, int64_t outcome) {
    std::vector<size_t> anti;
    for (size_t i = 0; i < n_; ++i)
        if (!pauli_commutes(stabs_[i].p, p)) anti.push_back(i);

    if (!anti.empty()) {
        size_t a = anti[0];
        for (size_t k = 1; k < anti.size(); ++k) row_mul(stabs_[anti[k]], stabs_[a]);
        for (size_t i = 0; i < n_; ++i)
            if (i != a && !pauli_commutes(destabs_[i], p)) {
                PauliString prod = pauli_mul(destabs_[i], stabs_[a].p);
                prod.strip_phase();  // destabilizer signs are never used
                destabs_[i] = std::move(prod);
            }
        destabs_[a] = stabs_[a].p;
        Row fresh;
        fresh.p = p;
        fresh.p.set_sign(1);
        fresh.syms = BitVec(max_symbols_);
        fresh.neg = false;
        size_t s = fresh_symbol();
        fresh.syms.set(s, true);
        stabs_[a] = std::move(fresh);
        if (outcome >= 0) {
            BitVec e(max_symbols_);
            e.set(s, true);
            record_outcome_expr(outcome, std::move(e), false);
        }
        return;
    }

    // Deterministic: P equals a product of stabilizers; destabilizer pairing
    // reads off the combination.
    Row prod;
    prod.p = PauliString(n_);
    prod.syms = BitVec(max_symbols_);
    for (size_t i = 0; i < n_; ++i)
        if (!pauli_commutes(destabs_[i], p)) row_mul(prod, stabs_[i]);
    if (!(prod.p.x_bits() == p.x_bits()) || !(prod.p.z_bits() == p.z_bits()))
        throw std::logic_error("deterministic measurement reconstruction failed");
    if (outcome >= 0) record_outcome_expr(outcome, std::move(prod.syms), prod.neg);
}

void SymbolicSimulator::reset(uint32_t q, bool x_basis) {
    PauliString target = PauliString::single(
        n_, q, x_basis ? PauliKind::X : PauliKind::Z);
    std::vector<size_t> anti;
    for (size_t i = 0; i < n_; ++i)
        if (!pauli_commutes(stabs_[i].p, target)) anti.push_back(i);

    if (!anti.empty()) {
        size_t a = anti[0];
        for (size_t k = 1; k < anti.size(); ++k) row_mul(stabs_[anti[k]], stabs_[a]);
        for (size_t i = 0; i < n_; ++i)
            if (i != a && !pauli_commutes(destabs_[i], target)) {
                destabs_[i] = pauli_mul(destabs_[i], stabs_[a].p);
                destabs_[i].strip_phase();
            }
        destabs_[a] = stabs_[a].p;
        Row fresh;
        fresh.p = target;
        fresh.syms = BitVec(max_symbols_);
        fresh.neg = false;  // reset forces the +1 eigenstate
        stabs_[a] = std::move(fresh);
        return;
    }

    // Qubit already collapsed in this basis: flip the sign to +1 by a
    // correction conditioned on the current symbolic sign.
    Row expr;
    expr.p = PauliString(n_);
    expr.syms = BitVec(max_symbols_);
    for (size_t i = 0; i < n_; ++i)
        if (!pauli_commutes(destabs_[i], target)) row_mul(expr, stabs_[i]);
    if (!(expr.p.x_bits() == target.x_bits()) || !(expr.p.z_bits() == target.z_bits()))
        throw std::logic_error("reset reconstruction failed");
    PauliString correction = PauliString::single(
        n_, q, x_basis ? PauliKind::Z : PauliKind::X);
    for (size_t i = 0; i < n_; ++i)
        if (!pauli_commutes(stabs_[i].p, correction)) {
            stabs_[i].syms.xor_in(expr.syms);
            stabs_[i].neg ^= expr.neg;
        }
}

void SymbolicSimulator::apply(const Operation &op) {
    switch (op.kind) {
        case OpKind::Idle:
            return;
        case OpKind::InitX:
            reset(op.q1, true);
            return;
        case OpKind::InitZ:
            reset(op.q1, false);
            return;
        case OpKind::MeasX:
            measure(PauliString::single(n_, op.q1, PauliKind::X), op.outcome);
            return;
        case OpKind::MeasZ:
            measure(PauliString::single(n_, op.q1, PauliKind::Z), op.outcome);
            return;
        case OpKind::MeasPP: {
            PauliString p(n_);
            p.set(op.q1, op.p1);
            p.set(op.q2, op.p2);
            measure(p, op.outcome);
            return;
        }
    }
}

void SymbolicSimulator::run(const Circuit &c) {
    basis_.num_outcomes = std::max(basis_.num_outcomes, c.num_outcomes());
    for (const auto &step : c.steps)
        for (const auto &op : step) apply(op);
}

std::vector<PauliString> SymbolicSimulator::generators() const {
    std::vector<PauliString> out;
    out.reserve(n_);
    for (const auto &r : stabs_) out.push_back(r.p);
    return out;
}

CheckBasis compute_outcome_code(const CircuitTriple &t) {
    for (const Circuit *c : {&t.prior, &t.body, &t.posterior}) {
        auto v = validate(*c);
        if (!v.empty())
            throw std::invalid_argument("compute_outcome_code: invalid circuit: " + v[0]);
    }
    Circuit all = t.concatenated();
    SymbolicSimulator sim(t.n_qubits, all.num_outcomes());
    sim.run(all);
    return sim.take_checks();
}

// ---------------------------------------------------------------------------
// Fault enumeration
// ---------------------------------------------------------------------------

namespace {

struct FlatOp {
    uint32_t step;   // global step index in the concatenated circuit
    Operation op;
};

struct Flattened {
    std::vector<FlatOp> ops;
    uint32_t body_first_step = 0;
    uint32_t body_first_op = 0;
    uint32_t body_last_op = 0;  // one past the end
};

Flattened flatten(const CircuitTriple &t) {
    Flattened f;
    uint32_t step = 0;
    auto add = [&](const Circuit &c) {
        for (const auto &s : c.steps) {
            std::vector<Operation> ops = s;
            std::stable_sort(ops.begin(), ops.end(),
                             [](const Operation &a, const Operation &b) { return a.q1 < b.q1; });
            for (const auto &op : ops) f.ops.push_back(FlatOp{step, op});
            ++step;
        }
    };
    add(t.prior);
    f.body_first_step = step;
    f.body_first_op = uint32_t(f.ops.size());
    add(t.body);
    f.body_last_op = uint32_t(f.ops.size());
    add(t.posterior);
    return f;
}

std::vector<uint32_t> alive_qubits(const CircuitTriple &t) {
    std::vector<bool> seen(t.n_qubits, false);
    for (const Circuit *c : {&t.prior, &t.body, &t.posterior})
        for (const auto &s : c->steps)
            for (const auto &op : s) {
                seen[op.q1] = true;
                if (op.q2 != kNoQubit) seen[op.q2] = true;
            }
    std::vector<uint32_t> out;
    for (uint32_t q = 0; q < t.n_qubits; ++q)
        if (seen[q]) out.push_back(q);
    return out;
}

}  // namespace

FaultSet enumerate_faults_minimal(const CircuitTriple &t) {
    Flattened f = flatten(t);
    FaultSet out;
    out.p = 0.0;
    uint32_t input_step = f.body_first_step == 0 ? 0 : f.body_first_step - 1;
    for (uint32_t q : alive_qubits(t)) {
        for (PauliKind pk : {PauliKind::X, PauliKind::Z}) {
            Fault fault;
            fault.op_id = f.body_first_op;
            fault.after_step = input_step;
            fault.q[0] = q;
            fault.p[0] = pk;
            fault.probability = 1.0;
            out.faults.push_back(std::move(fault));
        }
    }
    for (uint32_t i = f.body_first_op; i < f.body_last_op; ++i) {
        const FlatOp &fo = f.ops[i];
        for (PauliKind pk : {PauliKind::X, PauliKind::Z}) {
            Fault fault;
            fault.op_id = i;
            fault.after_step = fo.step;
            fault.q[0] = fo.op.q1;
            fault.p[0] = pk;
            fault.probability = 1.0;
            out.faults.push_back(std::move(fault));
        }
    }
    return out;
}

FaultSet enumerate_faults_em3(const CircuitTriple &t, double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("enumerate_faults_em3: p outside [0,1]");
    Flattened f = flatten(t);
    FaultSet out;
    out.p = p;
    static const PauliKind paulis[4] = {PauliKind::I, PauliKind::X, PauliKind::Y,
                                        PauliKind::Z};
    for (uint32_t i = f.body_first_op; i < f.body_last_op; ++i) {
        const FlatOp &fo = f.ops[i];
        const Operation &op = fo.op;
        uint32_t begin = uint32_t(out.faults.size());
        auto base = [&]() {
            Fault fault;
            fault.op_id = i;
            fault.after_step = fo.step;
            return fault;
        };
        switch (op.kind) {
            case OpKind::MeasPP:
                for (int flip = 0; flip < 2; ++flip)
                    for (PauliKind p1 : paulis)
                        for (PauliKind p2 : paulis) {
                            if (!flip && p1 == PauliKind::I && p2 == PauliKind::I)
                                continue;
                            Fault fault = base();
                            fault.q[0] = op.q1;
                            fault.p[0] = p1;
                            fault.q[1] = op.q2;
                            fault.p[1] = p2;
                            if (flip) fault.outcome_flips.push_back(op.outcome);
                            fault.probability = p / 31.0;
                            out.faults.push_back(std::move(fault));
                        }
                break;
            case OpKind::MeasX:
            case OpKind::MeasZ:
                for (int flip = 0; flip < 2; ++flip)
                    for (PauliKind pk : paulis) {
                        if (!flip && pk == PauliKind::I) continue;
                        Fault fault = base();
                        fault.q[0] = op.q1;
                        fault.p[0] = pk;
                        if (flip) fault.outcome_flips.push_back(op.outcome);
                        fault.probability = p / 7.0;
                        out.faults.push_back(std::move(fault));
                    }
                break;
            case OpKind::InitX:
            case OpKind::InitZ: {
                Fault fault = base();
                fault.q[0] = op.q1;
                fault.p[0] = op.kind == OpKind::InitZ ? PauliKind::X : PauliKind::Z;
                fault.probability = p;
                out.faults.push_back(std::move(fault));
                break;
            }
            case OpKind::Idle:
                for (PauliKind pk : {PauliKind::X, PauliKind::Y, PauliKind::Z}) {
                    Fault fault = base();
                    fault.q[0] = op.q1;
                    fault.p[0] = pk;
                    fault.probability = p / 3.0;
                    out.faults.push_back(std::move(fault));
                }
                break;
        }
        out.op_groups.push_back({begin, uint32_t(out.faults.size())});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fault propagation
// ---------------------------------------------------------------------------

namespace {

bool single_anticommutes(PauliKind a, PauliKind b) {
    if (a == PauliKind::I || b == PauliKind::I) return false;
    return a != b;
}

// Per-qubit timeline of measurement/reset ops, for cheap fault propagation.
struct QubitTimeline {
    struct Entry {
        uint32_t step;
        PauliKind measured;  // Pauli measured on this qubit (I for resets)
        int64_t outcome;     // -1 for resets
        bool is_reset;
    };
    std::vector<std::vector<Entry>> per_qubit;

    explicit QubitTimeline(const CircuitTriple &t) {
        per_qubit.resize(t.n_qubits);
        uint32_t step = 0;
        for (const Circuit *c : {&t.prior, &t.body, &t.posterior}) {
            for (const auto &s : c->steps) {
                for (const auto &op : s) {
                    switch (op.kind) {
                        case OpKind::InitX:
                        case OpKind::InitZ:
                            per_qubit[op.q1].push_back({step, PauliKind::I, -1, true});
                            break;
                        case OpKind::MeasX:
                            per_qubit[op.q1].push_back({step, PauliKind::X, op.outcome, false});
                            break;
                        case OpKind::MeasZ:
                            per_qubit[op.q1].push_back({step, PauliKind::Z, op.outcome, false});
                            break;
                        case OpKind::MeasPP:
                            per_qubit[op.q1].push_back({step, op.p1, op.outcome, false});
                            per_qubit[op.q2].push_back({step, op.p2, op.outcome, false});
                            break;
                        case OpKind::Idle:
                            break;
                    }
                }
                ++step;
            }
        }
    }

    // Outcomes flipped by Pauli `pk` on qubit `q` placed after global step
    // `after`, and whether the component survives to the circuit end.
    void propagate(uint32_t q, PauliKind pk, uint32_t after,
                   std::vector<int64_t> &flips, bool &survives) const {
        survives = true;
        const auto &tl = per_qubit[q];
        size_t lo = 0, hi = tl.size();
        while (lo < hi) {  // first entry with step > after
            size_t mid = (lo + hi) / 2;
            if (tl[mid].step > after) hi = mid; else lo = mid + 1;
        }
        for (size_t k = lo; k < tl.size(); ++k) {
            if (tl[k].is_reset) {
                survives = false;
                return;
            }
            if (single_anticommutes(pk, tl[k].measured))
                flips.push_back(tl[k].outcome);
        }
    }
};

}  // namespace

CheckMatrix compute_check_matrix(const CircuitTriple &t, const CheckBasis &basis,
                                 const FaultSet &fs) {
    QubitTimeline tl(t);
    size_t n_checks = basis.checks.size();
    // outcome index -> set of checks containing it
    std::vector<BitVec> incidence(basis.num_outcomes, BitVec(n_checks));
    for (size_t c = 0; c < n_checks; ++c)
        for (size_t o : basis.checks[c].outcomes.ones()) incidence[o].set(c, true);

    CheckMatrix out;
    out.m = BitMatrix(n_checks, fs.faults.size());
    out.col_probability.reserve(fs.faults.size());
    std::vector<int64_t> flips;
    for (size_t fi = 0; fi < fs.faults.size(); ++fi) {
        const Fault &f = fs.faults[fi];
        flips.assign(f.outcome_flips.begin(), f.outcome_flips.end());
        for (int k = 0; k < 2; ++k) {
            if (f.q[k] == kNoQubit || f.p[k] == PauliKind::I) continue;
            bool survives;
            tl.propagate(f.q[k], f.p[k], f.after_step, flips, survives);
        }
        BitVec colv(n_checks);
        for (int64_t o : flips) colv.xor_in(incidence[size_t(o)]);
        for (size_t r : colv.ones()) out.m.set(r, fi, true);
        out.col_probability.push_back(f.probability);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Code extraction and logical effect
// ---------------------------------------------------------------------------

namespace {

std::vector<uint32_t> alive_data_from_triple(const CircuitTriple &t) {
    std::vector<uint32_t> out;
    for (uint32_t q : alive_qubits(t)) {
        const Coord &c = t.coords[q];
        if (c.x2 % 2 == 0 && c.y2 % 2 == 0) out.push_back(q);
    }
    return out;
}

// Symplectic row vector of a Pauli over a chosen qubit subset:
// [x bits | z bits].
BitVec symplectic_row(const PauliString &p, const std::vector<uint32_t> &qubits) {
    BitVec v(2 * qubits.size());
    for (size_t i = 0; i < qubits.size(); ++i) {
        if (p.x_bits().get(qubits[i])) v.set(i, true);
        if (p.z_bits().get(qubits[i])) v.set(qubits.size() + i, true);
    }
    return v;
}

PauliString pauli_from_symplectic(const BitVec &v, const std::vector<uint32_t> &qubits,
                                  size_t n) {
    PauliString p(n);
    size_t m = qubits.size();
    for (size_t i = 0; i < m; ++i) {
        bool x = v.get(i), z = v.get(m + i);
        if (x && z) p.set(qubits[i], PauliKind::Y);
        else if (x) p.set(qubits[i], PauliKind::X);
        else if (z) p.set(qubits[i], PauliKind::Z);
    }
    return p;
}

bool in_rowspan(const BitMatrix &rr_reduced, const std::vector<size_t> &pivots,
                BitVec v) {
    for (size_t p = 0; p < pivots.size(); ++p)
        if (v.get(pivots[p])) v.xor_in(rr_reduced.row(p));
    return !v.any();
}

}  // namespace

std::optional<CodeSpec> extract_code(const CircuitTriple &t, bool after_prior_only,
                                     const std::vector<uint32_t> &data_qubits) {
    Circuit all = after_prior_only ? t.prior : t.concatenated();
    SymbolicSimulator sim(t.n_qubits, all.num_outcomes());
    sim.run(all);
    std::vector<PauliString> gens = sim.generators();

    // Eliminate non-data support: echelonize with aux columns leading so the
    // trailing rows span the data-supported subgroup.
    std::vector<bool> is_data(t.n_qubits, false);
    for (uint32_t q : data_qubits) is_data[q] = true;
    std::vector<uint32_t> aux;
    for (uint32_t q = 0; q < t.n_qubits; ++q)
        if (!is_data[q]) aux.push_back(q);

    size_t na = aux.size(), nd = data_qubits.size();
    BitMatrix m(gens.size(), 2 * na + 2 * nd);
    for (size_t g = 0; g < gens.size(); ++g) {
        BitVec va = symplectic_row(gens[g], aux);
        BitVec vd = symplectic_row(gens[g], data_qubits);
        for (size_t i = 0; i < 2 * na; ++i)
            if (va.get(i)) m.set(g, i, true);
        for (size_t i = 0; i < 2 * nd; ++i)
            if (vd.get(i)) m.set(g, 2 * na + i, true);
    }
    RrefResult rr = rref(m);
    std::vector<BitVec> data_rows;
    for (size_t r = 0; r < rr.rank; ++r) {
        if (rr.pivot_cols[r] < 2 * na) continue;  // touches aux support
        BitVec v(2 * nd);
        for (size_t i = 0; i < 2 * nd; ++i)
            if (rr.reduced.get(r, 2 * na + i)) v.set(i, true);
        data_rows.push_back(std::move(v));
    }

    size_t k_rank = data_rows.size();
    if (nd < k_rank || nd - k_rank != 1) return std::nullopt;

    CodeSpec spec;
    for (const BitVec &v : data_rows)
        spec.stabilizers.push_back(pauli_from_symplectic(v, data_qubits, t.n_qubits));

    // Logical pair. Try pure-type representatives first (CSS path), then a
    // generic anticommuting pair from the centralizer.
    BitMatrix stab_m = BitMatrix::from_rows(data_rows, 2 * nd);
    RrefResult stab_rr = rref(stab_m);

    // Commutation constraint matrix: rows are stabilizers with (x|z) swapped.
    BitMatrix constraint(data_rows.size(), 2 * nd);
    for (size_t r = 0; r < data_rows.size(); ++r)
        for (size_t i = 0; i < nd; ++i) {
            if (data_rows[r].get(i)) constraint.set(r, nd + i, true);
            if (data_rows[r].get(nd + i)) constraint.set(r, i, true);
        }
    BitMatrix cent = nullspace(constraint);

    std::vector<BitVec> nontrivial;
    for (size_t r = 0; r < cent.rows(); ++r) {
        BitVec v = cent.row(r);
        if (!in_rowspan(stab_rr.reduced, stab_rr.pivot_cols, v))
            nontrivial.push_back(std::move(v));
    }
    if (nontrivial.empty()) return std::nullopt;

    auto find_pure = [&](bool want_x) -> std::optional<BitVec> {
        // Nontrivial centralizer element supported purely on one Pauli type.
        for (const BitVec &v : nontrivial) {
            bool has_x = false, has_z = false;
            for (size_t i = 0; i < nd; ++i) {
                has_x |= v.get(i);
                has_z |= v.get(nd + i);
            }
            if (want_x && has_x && !has_z) return v;
            if (!want_x && has_z && !has_x) return v;
        }
        // Combinations of two basis elements often purify; keep it cheap.
        for (size_t a = 0; a < nontrivial.size(); ++a)
            for (size_t b = a + 1; b < nontrivial.size(); ++b) {
                BitVec v = nontrivial[a];
                v.xor_in(nontrivial[b]);
                if (in_rowspan(stab_rr.reduced, stab_rr.pivot_cols, v)) continue;
                bool has_x = false, has_z = false;
                for (size_t i = 0; i < nd; ++i) {
                    has_x |= v.get(i);
                    has_z |= v.get(nd + i);
                }
                if (want_x && has_x && !has_z) return v;
                if (!want_x && has_z && !has_x) return v;
            }
        return std::nullopt;
    };

    auto sympl_pairing = [&](const BitVec &a, const BitVec &b) {
        bool acc = false;
        for (size_t i = 0; i < nd; ++i) {
            if (a.get(i) && b.get(nd + i)) acc = !acc;
            if (a.get(nd + i) && b.get(i)) acc = !acc;
        }
        return acc;  // true iff anticommute
    };

    std::optional<BitVec> lx = find_pure(true), lz = find_pure(false);
    if (lx && lz && sympl_pairing(*lx, *lz)) {
        spec.logicals.push_back({pauli_from_symplectic(*lx, data_qubits, t.n_qubits),
                                 pauli_from_symplectic(*lz, data_qubits, t.n_qubits)});
        return spec;
    }
    for (size_t a = 0; a < nontrivial.size(); ++a)
        for (size_t b = a + 1; b < nontrivial.size(); ++b)
            if (sympl_pairing(nontrivial[a], nontrivial[b])) {
                spec.logicals.push_back(
                    {pauli_from_symplectic(nontrivial[a], data_qubits, t.n_qubits),
                     pauli_from_symplectic(nontrivial[b], data_qubits, t.n_qubits)});
                return spec;
            }
    return std::nullopt;
}

LogicalEffectResult compute_logical_effect(const CircuitTriple &t, const FaultSet &fs) {
    std::vector<uint32_t> data = alive_data_from_triple(t);
    auto out_code = extract_code(t, false, data);
    if (!out_code) throw std::runtime_error("compute_logical_effect: no logical qubit found");
    auto in_code = extract_code(t, true, data);
    if (!in_code) throw std::runtime_error("compute_logical_effect: no input logical qubit");

    LogicalEffectResult res;
    res.input_code = *in_code;
    res.output_code = *out_code;

    const PauliString &lx = res.output_code.logicals[0].first;
    const PauliString &lz = res.output_code.logicals[0].second;
    res.lm.row_labels = {"X_L", "Z_L"};
    res.lm.m = BitMatrix(2, fs.faults.size());

    QubitTimeline tl(t);
    std::vector<int64_t> flips;
    for (size_t fi = 0; fi < fs.faults.size(); ++fi) {
        const Fault &f = fs.faults[fi];
        PauliString e_end(t.n_qubits);
        for (int k = 0; k < 2; ++k) {
            if (f.q[k] == kNoQubit || f.p[k] == PauliKind::I) continue;
            flips.clear();
            bool survives;
            tl.propagate(f.q[k], f.p[k], f.after_step, flips, survives);
            if (survives) e_end.set(f.q[k], f.p[k]);
        }
        if (e_end.is_identity()) continue;
        if (!pauli_commutes(e_end, lx)) res.lm.m.set(0, fi, true);
        if (!pauli_commutes(e_end, lz)) res.lm.m.set(1, fi, true);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Fault distance
// ---------------------------------------------------------------------------

namespace {

struct LabeledGraph {
    // Node count excludes the boundary, which is node `n`.
    size_t n = 0;
    struct Edge {
        uint32_t u, v;
        uint32_t label;
        uint32_t weight;  // 0 or 1 here (unit fault weight)
    };
    std::vector<Edge> edges;
    std::vector<std::vector<uint32_t>> adj;  // node -> edge ids

    void finish() {
        adj.assign(n + 1, {});
        for (uint32_t e = 0; e < edges.size(); ++e) {
            adj[edges[e].u].push_back(e);
            if (edges[e].v != edges[e].u) adj[edges[e].v].push_back(e);
        }
    }
};

// Minimum-weight closed walk with nonzero accumulated label; 0/1 weights.
// Exact for cycle-structured solution spaces (any valid fault set decomposes
// into closed walks, and a nonzero-label one is at least this short).
size_t min_nonzero_label_cycle(const LabeledGraph &g, uint32_t label_states) {
    size_t best = SIZE_MAX;
    std::vector<uint32_t> dist;
    for (uint32_t e0 = 0; e0 < g.edges.size(); ++e0) {
        const auto &seed = g.edges[e0];
        if (seed.label == 0) continue;
        // 0/1 BFS from seed.v back to seed.u avoiding the seed edge.
        size_t states = (g.n + 1) * label_states;
        dist.assign(states, UINT32_MAX);
        std::deque<uint32_t> dq;
        uint32_t start = seed.v * label_states + seed.label;
        dist[start] = seed.weight;
        dq.push_back(start);
        while (!dq.empty()) {
            uint32_t s = dq.front();
            dq.pop_front();
            uint32_t node = s / label_states, lab = s % label_states;
            uint32_t d = dist[s];
            if (node == seed.u && lab != 0) {
                if (d < best) best = d;
                break;
            }
            for (uint32_t ei : g.adj[node]) {
                if (ei == e0) continue;
                const auto &e = g.edges[ei];
                uint32_t other = e.u == node ? e.v : e.u;
                uint32_t ns = other * label_states + (lab ^ e.label);
                uint32_t nd = d + e.weight;
                if (nd < dist[ns]) {
                    dist[ns] = nd;
                    if (e.weight) dq.push_back(ns); else dq.push_front(ns);
                }
            }
        }
    }
    return best;
}

}  // namespace

FaultDistanceResult fault_distance(const CheckMatrix &cm, const LogicalEffectMatrix &lm,
                                   size_t exhaustive_cap) {
    if (cm.m.cols() != lm.m.cols())
        throw std::invalid_argument("fault_distance: column mismatch");
    size_t n_logicals = lm.m.rows();
    if (n_logicals > 5) throw std::invalid_argument("fault_distance: too many logical rows");

    GraphicResult gr = realize_graph(cm.m);
    if (gr.status == GraphicStatus::Graphic) {
        LabeledGraph g;
        g.n = gr.realized.rows();
        uint32_t boundary = uint32_t(g.n);
        for (size_t c = 0; c < gr.realized.cols(); ++c) {
            uint32_t label = 0;
            for (size_t r = 0; r < n_logicals; ++r)
                if (lm.m.get(r, c)) label |= 1u << r;
            std::vector<size_t> rows;
            for (size_t r = 0; r < g.n; ++r)
                if (gr.realized.get(r, c)) rows.push_back(r);
            if (rows.empty()) {
                if (label != 0) return {1, true};  // undetectable bad fault
                continue;
            }
            LabeledGraph::Edge e;
            e.u = uint32_t(rows[0]);
            e.v = rows.size() == 2 ? uint32_t(rows[1]) : boundary;
            e.label = label;
            e.weight = 1;
            g.edges.push_back(e);
        }
        g.finish();
        size_t best = min_nonzero_label_cycle(g, 1u << n_logicals);
        if (best == SIZE_MAX) return {exhaustive_cap + 1, false};
        return {best, true};
    }

    // Not graphic: bounded exhaustive search over fault subsets.
    size_t n = cm.m.cols();
    std::vector<BitVec> cols(n), lcols(n);
    for (size_t c = 0; c < n; ++c) {
        cols[c] = cm.m.col(c);
        lcols[c] = lm.m.col(c);
    }
    size_t best = SIZE_MAX;
    std::vector<size_t> pick;
    BitVec syn(cm.m.rows()), lab(n_logicals);
    std::function<void(size_t, size_t)> rec = [&](size_t start, size_t depth) {
        if (!syn.any() && lab.any() && depth > 0) {
            best = std::min(best, depth);
            return;
        }
        if (depth >= std::min(best == SIZE_MAX ? exhaustive_cap : best - 1, exhaustive_cap))
            return;
        for (size_t c = start; c < n; ++c) {
            syn.xor_in(cols[c]);
            lab.xor_in(lcols[c]);
            rec(c + 1, depth + 1);
            syn.xor_in(cols[c]);
            lab.xor_in(lcols[c]);
        }
    };
    rec(0, 0);
    if (best == SIZE_MAX) return {exhaustive_cap + 1, false};
    return {best, true};
}

// ---------------------------------------------------------------------------
// Instantaneous stabilizer group distances
// ---------------------------------------------------------------------------

namespace {

// Minimum weight vector w over `n` columns with zero syndrome on all
// constraint bits and odd parity on the final (target) bit. Branches on the
// support of the first violated constraint, which keeps the search shallow.
size_t min_codeword_bb(const std::vector<BitVec> &constraint_cols, size_t n, size_t cap) {
    size_t best = cap + 1;
    size_t n_bits = constraint_cols.empty() ? 1 : constraint_cols[0].size();
    std::vector<std::vector<uint32_t>> support(n_bits);
    for (size_t q = 0; q < n; ++q)
        for (size_t b : constraint_cols[q].ones()) support[b].push_back(uint32_t(q));
    BitVec acc(n_bits);
    std::vector<bool> used(n, false);
    std::function<void(size_t)> rec = [&](size_t depth) {
        BitVec rest = acc;
        bool want_target = !acc.get(n_bits - 1);
        rest.set(n_bits - 1, false);
        size_t violated = rest.first_one();
        if (violated == SIZE_MAX && !want_target) {
            best = std::min(best, depth);
            return;
        }
        if (depth + 1 >= best) return;
        size_t branch_bit = violated != SIZE_MAX ? violated : n_bits - 1;
        for (uint32_t q : support[branch_bit]) {
            if (used[q]) continue;
            used[q] = true;
            acc.xor_in(constraint_cols[q]);
            rec(depth + 1);
            acc.xor_in(constraint_cols[q]);
            used[q] = false;
        }
    };
    rec(0);
    return best;
}

struct IsgSide {
    std::vector<BitVec> own;       // measured supports of this Pauli type
    std::vector<BitVec> opposite;  // of the other type
};

// d for logicals of type T: min weight support w (over alive data) with
// even overlap against every opposite-type super (combinations of opposite
// measured ops commuting with all own-type ops) and odd overlap with the
// chosen conjugate logical.
size_t isg_distance_one_type(const std::vector<BitVec> &own,
                             const std::vector<BitVec> &opp, size_t n_data,
                             size_t cap) {
    // Conjugate logical: opposite-type vector orthogonal to all own supports
    // and outside span(opp).
    BitMatrix own_m = BitMatrix::from_rows(own, n_data);
    BitMatrix opp_m = BitMatrix::from_rows(opp, n_data);
    BitMatrix cands = nullspace(own_m);
    RrefResult opp_rr = rref(opp_m);
    std::optional<BitVec> conj;
    for (size_t r = 0; r < cands.rows(); ++r) {
        BitVec v = cands.row(r);
        if (!in_rowspan(opp_rr.reduced, opp_rr.pivot_cols, v)) {
            conj = std::move(v);
            break;
        }
    }
    if (!conj) throw std::runtime_error("isg_code_distance: no logical qubit");

    // Frustration pattern of each own-type op over the opposite gons.
    std::vector<std::vector<uint32_t>> frustrated;
    bool graphable = true;
    for (const BitVec &m : own) {
        std::vector<uint32_t> d;
        for (uint32_t g = 0; g < opp.size(); ++g)
            if (BitVec::dot(m, opp[g])) d.push_back(g);
        if (d.size() > 2) graphable = false;
        if (!d.empty()) frustrated.push_back(std::move(d));
    }
    // Qubit incidence over opposite gons must be <= 2 for the graph method.
    std::vector<std::vector<uint32_t>> qubit_gons(n_data);
    for (uint32_t g = 0; g < opp.size() && graphable; ++g)
        for (size_t q : opp[g].ones()) {
            qubit_gons[q].push_back(g);
            if (qubit_gons[q].size() > 2) graphable = false;
        }

    if (graphable) {
        LabeledGraph g;
        g.n = opp.size();
        uint32_t boundary = uint32_t(g.n);
        for (size_t q = 0; q < n_data; ++q) {
            LabeledGraph::Edge e;
            const auto &gs = qubit_gons[q];
            e.u = gs.size() >= 1 ? gs[0] : boundary;
            e.v = gs.size() == 2 ? gs[1] : boundary;
            e.label = conj->get(q) ? 1 : 0;
            e.weight = 1;
            g.edges.push_back(e);
        }
        for (const auto &d : frustrated) {
            LabeledGraph::Edge e;
            e.u = d[0];
            e.v = d.size() == 2 ? d[1] : boundary;
            e.label = 0;
            e.weight = 0;
            g.edges.push_back(e);
        }
        g.finish();
        size_t best = min_nonzero_label_cycle(g, 2);
        if (best != SIZE_MAX) return best;
        throw std::runtime_error("isg_code_distance: no logical representative found");
    }

    // Fallback: bounded search. Constraints are the opposite-type supers
    // (combinations of opposite gons commuting with every own-type op).
    BitMatrix a(own.size(), opp.size());
    for (size_t r = 0; r < own.size(); ++r)
        for (uint32_t g = 0; g < opp.size(); ++g)
            if (BitVec::dot(own[r], opp[g])) a.set(r, g, true);
    BitMatrix super_coeff = nullspace(a);
    std::vector<BitVec> supers;
    for (size_t r = 0; r < super_coeff.rows(); ++r) {
        BitVec sup(n_data);
        for (size_t g : super_coeff.row(r).ones()) sup.xor_in(opp[g]);
        supers.push_back(std::move(sup));
    }
    size_t n_constraints = supers.size();
    std::vector<BitVec> cols(n_data, BitVec(n_constraints + 1));
    for (size_t q = 0; q < n_data; ++q) {
        for (size_t s = 0; s < n_constraints; ++s)
            if (supers[s].get(q)) cols[q].set(s, true);
        if (conj->get(q)) cols[q].set(n_constraints, true);
    }
    size_t best = min_codeword_bb(cols, n_data, cap);
    if (best > cap) throw std::runtime_error("isg_code_distance: exceeded search cap");
    return best;
}

}  // namespace

std::pair<size_t, size_t> isg_code_distance(const NGonSet &s) {
    std::vector<uint32_t> data = s.alive_data_qubits();
    std::vector<size_t> col_of(s.qubits.size(), SIZE_MAX);
    for (size_t i = 0; i < data.size(); ++i) col_of[data[i]] = i;

    std::vector<BitVec> mz, mx;
    for (const auto &g : s.ngons) {
        BitVec v(data.size());
        for (uint32_t q : g.data) v.set(col_of[q], true);
        (g.basis == Basis::Z ? mz : mx).push_back(std::move(v));
    }
    size_t dz = isg_distance_one_type(mz, mx, data.size(), 9);
    size_t dx = isg_distance_one_type(mx, mz, data.size(), 9);
    return {dz, dx};
}

bool forms_logical_qubit(const NGonSet &s) {
    CircuitTriple t = lower_to_circuit(s, 1);
    std::vector<uint32_t> data = s.alive_data_qubits();
    return extract_code(t, false, data).has_value();
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

std::string check_matrix_to_coo(const BitMatrix &m) {
    std::ostringstream os;
    os << m.rows() << ' ' << m.cols() << '\n';
    for (size_t r = 0; r < m.rows(); ++r)
        for (size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c)) os << r << ' ' << c << '\n';
    return os.str();
}

std::string fault_set_to_json(const FaultSet &fs) {
    nlohmann::json j;
    j["p"] = fs.p;
    j["faults"] = nlohmann::json::array();
    for (const auto &f : fs.faults) {
        nlohmann::json fj;
        fj["op_id"] = f.op_id;
        fj["after_step"] = f.after_step;
        nlohmann::json pv = nlohmann::json::array();
        for (int k = 0; k < 2; ++k)
            if (f.q[k] != kNoQubit && f.p[k] != PauliKind::I)
                pv.push_back({{"q", f.q[k]}, {"p", std::string(1, pauli_char(f.p[k]))}});
        fj["pauli"] = pv;
        fj["outcome_flips"] = f.outcome_flips;
        fj["probability"] = f.probability;
        j["faults"].push_back(fj);
    }
    return j.dump();
}

}  // namespace deadpatch
