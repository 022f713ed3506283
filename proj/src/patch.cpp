#include "deadpatch/patch.hpp"

#include "json.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace deadpatch {

namespace {

// Per-basis time slot of each plaquette corner. The orders (Z: NW,SW,NE,SE;
// X: NW,NE,SW,SE) keep hooks benign for good boundaries and give every data
// qubit four distinct slots across its four (possibly virtual) plaquettes.
enum Corner { NW, SW, NE, SE };

int corner_slot(Basis b, Corner c) {
    static const int z_slot[4] = {1, 2, 3, 4};  // NW SW NE SE
    static const int x_slot[4] = {1, 3, 2, 4};  // NW SW NE SE -> NW1 NE2 SW3 SE4
    return b == Basis::Z ? z_slot[c] : x_slot[c];
}

struct Builder {
    int L;
    std::map<std::pair<int, int>, uint32_t> id_at;  // (x2,y2) -> qubit id
    NGonSet out;

    uint32_t qubit(int x2, int y2) const { return id_at.at({x2, y2}); }
};

}  // namespace

size_t NGonSet::n_alive() const {
    size_t n = 0;
    for (const auto &q : qubits) n += q.alive;
    return n;
}

std::vector<uint32_t> NGonSet::data_qubits() const {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < qubits.size(); ++i)
        if (qubits[i].kind == QubitKind::Data) out.push_back(i);
    return out;
}

std::vector<uint32_t> NGonSet::alive_data_qubits() const {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < qubits.size(); ++i)
        if (qubits[i].kind == QubitKind::Data && qubits[i].alive) out.push_back(i);
    return out;
}

NGonSet build_patch(int L) {
    if (L < 2) throw std::invalid_argument("build_patch: L must be >= 2");
    Builder b;
    b.L = L;
    b.out.L = L;

    // Every half-integer point of the bounding box hosts exactly one qubit.
    // Ids in (y,x) raster order.
    for (int y2 = 0; y2 <= 2 * (L - 1); ++y2)
        for (int x2 = 0; x2 <= 2 * (L - 1); ++x2) {
            QubitInfo q;
            q.coord = Coord{x2, y2};
            bool ex = x2 % 2 == 0, ey = y2 % 2 == 0;
            q.kind = (ex && ey) ? QubitKind::Data
                   : (!ex && !ey) ? QubitKind::AuxB
                                  : QubitKind::AuxA;  // refined below
            b.id_at[{x2, y2}] = uint32_t(b.out.qubits.size());
            b.out.qubits.push_back(q);
        }

    auto corner_xy = [](int i, int j, Corner c) -> std::pair<int, int> {
        switch (c) {
            case NW: return {i, j + 1};
            case SW: return {i, j};
            case NE: return {i + 1, j + 1};
            case SE: return {i + 1, j};
        }
        return {0, 0};
    };

    // Bulk 4-gons. Z-gons own their left/right edge midpoints as A/C,
    // X-gons their bottom/top; B sits at the center. This tiling leaves
    // exactly the boundary 2-gon midpoints unclaimed.
    for (int j = 0; j <= L - 2; ++j)
        for (int i = 0; i <= L - 2; ++i) {
            Basis basis = ((i + j) % 2 == 0) ? Basis::Z : Basis::X;
            NGon g;
            g.basis = basis;
            g.anchor = Coord{2 * i + 1, 2 * j + 1};
            std::vector<std::pair<int, uint32_t>> slot_data;
            for (Corner c : {NW, SW, NE, SE}) {
                auto [x, y] = corner_xy(i, j, c);
                slot_data.push_back({corner_slot(basis, c), b.qubit(2 * x, 2 * y)});
            }
            std::sort(slot_data.begin(), slot_data.end());
            for (auto &[slot, q] : slot_data) {
                g.slots.push_back(slot);
                g.data.push_back(q);
            }
            uint32_t a, bq, c;
            bq = b.qubit(2 * i + 1, 2 * j + 1);
            if (basis == Basis::Z) {
                a = b.qubit(2 * i, 2 * j + 1);
                c = b.qubit(2 * i + 2, 2 * j + 1);
            } else {
                a = b.qubit(2 * i + 1, 2 * j);
                c = b.qubit(2 * i + 1, 2 * j + 2);
            }
            b.out.qubits[a].kind = QubitKind::AuxA;
            b.out.qubits[c].kind = QubitKind::AuxC;
            g.aux = {a, bq, c};
            g.gadget_aux = basis == Basis::Z ? a : c;
            b.out.ngons.push_back(std::move(g));
        }

    // Boundary 2-gons continue the checkerboard of the virtual plaquettes
    // just outside the patch; each keeps its virtual corner slots.
    auto add_2gon = [&](Basis basis, Coord anchor, std::pair<int, int> qa, int sa,
                        std::pair<int, int> qb, int sb, std::pair<int, int> aux) {
        NGon g;
        g.basis = basis;
        g.anchor = anchor;
        std::vector<std::pair<int, uint32_t>> slot_data = {
            {sa, b.qubit(2 * qa.first, 2 * qa.second)},
            {sb, b.qubit(2 * qb.first, 2 * qb.second)}};
        std::sort(slot_data.begin(), slot_data.end());
        for (auto &[slot, q] : slot_data) {
            g.slots.push_back(slot);
            g.data.push_back(q);
        }
        uint32_t ax = b.qubit(aux.first, aux.second);
        b.out.qubits[ax].kind = QubitKind::AuxBoundary;
        g.aux = {ax};
        g.gadget_aux = ax;
        b.out.ngons.push_back(std::move(g));
    };

    for (int i = 0; i <= L - 2; ++i) {
        if (i % 2 == 0)  // bottom, X-type: virtual plaquette (i,-1), corners NW/NE
            add_2gon(Basis::X, Coord{2 * i + 1, -1}, {i, 0}, corner_slot(Basis::X, NW),
                     {i + 1, 0}, corner_slot(Basis::X, NE), {2 * i + 1, 0});
        if ((i + L - 1) % 2 != 0)  // top, X-type: virtual (i, L-1), corners SW/SE
            add_2gon(Basis::X, Coord{2 * i + 1, 2 * L - 1}, {i, L - 1},
                     corner_slot(Basis::X, SW), {i + 1, L - 1}, corner_slot(Basis::X, SE),
                     {2 * i + 1, 2 * (L - 1)});
    }
    for (int j = 0; j <= L - 2; ++j) {
        if (j % 2 != 0)  // left, Z-type: virtual (-1, j), corners SE/NE
            add_2gon(Basis::Z, Coord{-1, 2 * j + 1}, {0, j}, corner_slot(Basis::Z, SE),
                     {0, j + 1}, corner_slot(Basis::Z, NE), {0, 2 * j + 1});
        if ((L - 1 + j) % 2 == 0)  // right, Z-type: virtual (L-1, j), corners SW/NW
            add_2gon(Basis::Z, Coord{2 * L - 1, 2 * j + 1}, {L - 1, j},
                     corner_slot(Basis::Z, SW), {L - 1, j + 1}, corner_slot(Basis::Z, NW),
                     {2 * L - 2, 2 * j + 1});
    }

    return b.out;
}

namespace {

void check_damage_pre(const NGonSet &s, const DeadConfig &d) {
    if (s.scheme != Scheme::None)
        throw std::invalid_argument("damage rules expect an undamaged patch");
    for (uint32_t q : d.dead)
        if (q >= s.qubits.size())
            throw std::invalid_argument("dead qubit id out of range");
}

// Split a 2+-gon whose designated side auxiliaries may be dead. For a bulk
// 4-gon: the half next to a live side auxiliary becomes a 2-gon driven by
// it; a half whose side auxiliary is dead degrades to direct per-qubit
// readout (1-gons), same as a boundary 2-gon losing its auxiliary.
void split_bulk_4gon(const NGon &g, const std::vector<QubitInfo> &qubits,
                     std::vector<NGon> &out) {
    uint32_t aux_a = g.aux[0], aux_c = g.aux[2];
    bool a_alive = qubits[aux_a].alive;
    bool c_alive = qubits[aux_c].alive;

    // Halves by slot: the two earliest slots of a Z-gon are its left (A)
    // pair, the two latest its right (C) pair; mirrored for X-gons where A
    // owns the bottom (late) pair and C the top (early) pair.
    std::vector<std::pair<int, uint32_t>> sd;
    for (size_t k = 0; k < g.data.size(); ++k) sd.push_back({g.slots[k], g.data[k]});
    std::sort(sd.begin(), sd.end());
    std::vector<std::pair<int, uint32_t>> early = {sd[0], sd[1]}, late = {sd[2], sd[3]};
    auto &a_half = g.basis == Basis::Z ? early : late;
    auto &c_half = g.basis == Basis::Z ? late : early;

    auto emit_half = [&](const std::vector<std::pair<int, uint32_t>> &half,
                         uint32_t side_aux, bool side_alive) {
        if (side_alive) {
            NGon h;
            h.basis = g.basis;
            h.anchor = g.anchor;
            h.variant = GadgetVariant::SplitHalf;
            for (auto &[slot, q] : half) {
                h.slots.push_back(slot);
                h.data.push_back(q);
            }
            h.aux = {side_aux};
            h.gadget_aux = side_aux;
            out.push_back(std::move(h));
        } else {
            for (auto &[slot, q] : half) {
                NGon h;
                h.basis = g.basis;
                h.anchor = g.anchor;
                h.variant = GadgetVariant::SplitHalf;
                h.slots = {slot};
                h.data = {q};
                h.gadget_aux = kNoQubit;
                out.push_back(std::move(h));
            }
        }
    };
    emit_half(a_half, aux_a, a_alive);
    emit_half(c_half, aux_c, c_alive);
}

// Drop dead data qubits from every n-gon; delete emptied gons, demote
// 2-gons to direct-readout 1-gons.
std::vector<NGon> reduce_data_deaths(std::vector<NGon> gons,
                                     const std::vector<QubitInfo> &qubits) {
    std::vector<NGon> out;
    for (auto &g : gons) {
        NGon r;
        r.basis = g.basis;
        r.anchor = g.anchor;
        r.variant = g.variant;
        for (size_t k = 0; k < g.data.size(); ++k) {
            if (!qubits[g.data[k]].alive) continue;
            r.data.push_back(g.data[k]);
            r.slots.push_back(g.slots[k]);
        }
        if (r.data.empty()) continue;
        if (r.data.size() == 1) {
            r.gadget_aux = kNoQubit;  // 1-gons are mid-circuit data readout
        } else {
            r.gadget_aux = g.gadget_aux;
            r.aux = g.aux;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

NGonSet apply_mia(const NGonSet &s, const DeadConfig &d) {
    check_damage_pre(s, d);
    NGonSet out = s;
    for (uint32_t q : d.dead) out.qubits[q].alive = false;

    std::vector<NGon> gons;
    for (const auto &g : out.ngons) {
        if (g.n() == 4) {
            uint32_t a = g.aux[0], bq = g.aux[1], c = g.aux[2];
            bool a_dead = !out.qubits[a].alive;
            bool b_dead = !out.qubits[bq].alive;
            bool c_dead = !out.qubits[c].alive;
            if (a_dead || c_dead) {
                split_bulk_4gon(g, out.qubits, gons);
            } else {
                NGon kept = g;
                if (b_dead) kept.variant = GadgetVariant::RerouteNoB;
                gons.push_back(std::move(kept));
            }
        } else {  // boundary 2-gon
            if (!out.qubits[g.gadget_aux].alive) {
                for (size_t k = 0; k < g.data.size(); ++k) {
                    NGon h;
                    h.basis = g.basis;
                    h.anchor = g.anchor;
                    h.variant = GadgetVariant::SplitHalf;
                    h.slots = {g.slots[k]};
                    h.data = {g.data[k]};
                    h.gadget_aux = kNoQubit;
                    gons.push_back(std::move(h));
                }
            } else {
                gons.push_back(g);
            }
        }
    }
    out.ngons = reduce_data_deaths(std::move(gons), out.qubits);
    out.scheme = Scheme::MIA;
    return out;
}

NGonSet apply_auger(const NGonSet &s, const DeadConfig &d) {
    check_damage_pre(s, d);
    NGonSet out = s;
    for (uint32_t q : d.dead) out.qubits[q].alive = false;

    // Collateral disabling: any dead auxiliary in a bulk 4-gon kills all of
    // that plaquette's data qubits. Deterministic order by qubit index is
    // irrelevant here since disabling is monotone.
    for (const auto &g : out.ngons) {
        if (g.n() != 4) continue;
        bool aux_dead = false;
        for (uint32_t a : g.aux) aux_dead |= !out.qubits[a].alive;
        if (aux_dead)
            for (uint32_t q : g.data) out.qubits[q].alive = false;
    }

    std::vector<NGon> gons;
    for (const auto &g : out.ngons) {
        if (g.n() == 4) {
            bool aux_dead = false;
            for (uint32_t a : g.aux) aux_dead |= !out.qubits[a].alive;
            if (aux_dead) continue;  // whole plaquette disabled and idle
            gons.push_back(g);
        } else {
            // Boundary 2-gons use the MIA salvage rule in both schemes.
            if (!out.qubits[g.gadget_aux].alive) {
                for (size_t k = 0; k < g.data.size(); ++k) {
                    NGon h;
                    h.basis = g.basis;
                    h.anchor = g.anchor;
                    h.variant = GadgetVariant::SplitHalf;
                    h.slots = {g.slots[k]};
                    h.data = {g.data[k]};
                    h.gadget_aux = kNoQubit;
                    gons.push_back(std::move(h));
                }
            } else {
                gons.push_back(g);
            }
        }
    }
    out.ngons = reduce_data_deaths(std::move(gons), out.qubits);
    out.scheme = Scheme::Auger;
    return out;
}

namespace {

constexpr int kRoundSteps = 6;

// Append one full pipelined round to `steps`. Every n-gon completes within
// the round; alive untargeted qubits idle explicitly.
void append_round(const NGonSet &s, std::vector<std::vector<Operation>> &steps) {
    size_t base = steps.size();
    for (int k = 0; k < kRoundSteps; ++k) steps.emplace_back();

    auto put = [&](int slot, Operation op) { steps[base + slot].push_back(op); };

    for (const auto &g : s.ngons) {
        PauliKind data_pauli = g.basis == Basis::Z ? PauliKind::Z : PauliKind::X;
        if (g.n() == 1) {
            Operation m;
            m.kind = g.basis == Basis::Z ? OpKind::MeasZ : OpKind::MeasX;
            m.q1 = g.data[0];
            put(g.slots[0], m);
            continue;
        }
        int lo = *std::min_element(g.slots.begin(), g.slots.end());
        int hi = *std::max_element(g.slots.begin(), g.slots.end());
        Operation init;
        init.kind = OpKind::InitX;
        init.q1 = g.gadget_aux;
        put(lo - 1, init);
        for (size_t k = 0; k < g.data.size(); ++k) {
            Operation mpp;
            mpp.kind = OpKind::MeasPP;
            mpp.q1 = g.gadget_aux;
            mpp.p1 = PauliKind::Z;
            mpp.q2 = g.data[k];
            mpp.p2 = data_pauli;
            put(g.slots[k], mpp);
        }
        // Even-length chains close in the X basis; odd ones in Z so the
        // product of pairwise outcomes plus the readout gives the n-gon
        // stabilizer outcome.
        Operation fin;
        fin.kind = (g.n() % 2 == 0) ? OpKind::MeasX : OpKind::MeasZ;
        fin.q1 = g.gadget_aux;
        put(hi + 1, fin);
    }

    for (int k = 0; k < kRoundSteps; ++k) {
        std::vector<bool> busy(s.qubits.size(), false);
        for (const auto &op : steps[base + k]) {
            busy[op.q1] = true;
            if (op.q2 != kNoQubit) busy[op.q2] = true;
        }
        for (uint32_t q = 0; q < s.qubits.size(); ++q) {
            if (!s.qubits[q].alive || busy[q]) continue;
            Operation idle;
            idle.kind = OpKind::Idle;
            idle.q1 = q;
            steps[base + k].push_back(idle);
        }
    }
}

}  // namespace

CircuitTriple lower_to_circuit(const NGonSet &s, size_t noisy_rounds) {
    for (const auto &g : s.ngons) {
        if (g.variant != GadgetVariant::Standard &&
            g.variant != GadgetVariant::RerouteNoB &&
            g.variant != GadgetVariant::SplitHalf)
            throw std::invalid_argument("lower_to_circuit: unknown gadget variant");
        for (uint32_t q : g.data)
            if (!s.qubits[q].alive)
                throw std::invalid_argument("lower_to_circuit: dead data qubit in n-gon");
        if (g.n() > 1 && (g.gadget_aux == kNoQubit || !s.qubits[g.gadget_aux].alive))
            throw std::invalid_argument("lower_to_circuit: n-gon lacks a live auxiliary");
    }

    CircuitTriple t;
    t.n_qubits = uint32_t(s.qubits.size());
    t.coords.resize(s.qubits.size());
    for (uint32_t q = 0; q < s.qubits.size(); ++q) t.coords[q] = s.qubits[q].coord;

    t.prior.n_qubits = t.n_qubits;
    t.body.n_qubits = t.n_qubits;
    t.posterior.n_qubits = t.n_qubits;

    // Prior: initialize alive data, then two noiseless rounds.
    {
        std::vector<Operation> init_step;
        for (uint32_t q = 0; q < s.qubits.size(); ++q) {
            if (!s.qubits[q].alive) continue;
            Operation op;
            op.kind = s.qubits[q].kind == QubitKind::Data ? OpKind::InitZ : OpKind::Idle;
            op.q1 = q;
            init_step.push_back(op);
        }
        t.prior.steps.push_back(std::move(init_step));
        append_round(s, t.prior.steps);
        append_round(s, t.prior.steps);
    }
    for (size_t r = 0; r < noisy_rounds; ++r) append_round(s, t.body.steps);
    append_round(s, t.posterior.steps);
    append_round(s, t.posterior.steps);

    t.prior.canonicalize();
    t.body.canonicalize();
    t.posterior.canonicalize();
    t.renumber();
    return t;
}

std::string ngonset_to_json(const NGonSet &s) {
    nlohmann::json j;
    j["L"] = s.L;
    j["scheme"] = s.scheme == Scheme::None ? "none" : s.scheme == Scheme::MIA ? "mia" : "auger";
    j["qubits"] = nlohmann::json::array();
    for (uint32_t q = 0; q < s.qubits.size(); ++q) {
        const auto &info = s.qubits[q];
        const char *kind =
            info.kind == QubitKind::Data ? "data"
            : info.kind == QubitKind::AuxA ? "aux_a"
            : info.kind == QubitKind::AuxB ? "aux_b"
            : info.kind == QubitKind::AuxC ? "aux_c" : "aux_boundary";
        j["qubits"].push_back({{"id", q},
                               {"x", info.coord.x()},
                               {"y", info.coord.y()},
                               {"kind", kind},
                               {"alive", info.alive}});
    }
    j["ngons"] = nlohmann::json::array();
    for (const auto &g : s.ngons) {
        const char *variant = g.variant == GadgetVariant::Standard ? "standard"
                            : g.variant == GadgetVariant::RerouteNoB ? "reroute_no_b"
                                                                     : "split_half";
        nlohmann::json gj{{"basis", std::string(1, basis_char(g.basis))},
                          {"data", g.data},
                          {"slots", g.slots},
                          {"aux", g.aux},
                          {"variant", variant},
                          {"anchor", {g.anchor.x(), g.anchor.y()}}};
        gj["gadget_aux"] = g.gadget_aux == kNoQubit ? nlohmann::json(nullptr)
                                                    : nlohmann::json(g.gadget_aux);
        j["ngons"].push_back(gj);
    }
    return j.dump(2);
}

std::string dead_config_to_json(int L, const DeadConfig &d) {
    nlohmann::json j;
    j["L"] = L;
    j["dead"] = std::vector<uint32_t>(d.dead.begin(), d.dead.end());
    return j.dump();
}

DeadConfig dead_config_from_json(const std::string &text, int *L_out) {
    nlohmann::json j = nlohmann::json::parse(text);
    DeadConfig d;
    for (auto &v : j.at("dead")) d.dead.insert(v.get<uint32_t>());
    if (L_out) *L_out = j.at("L").get<int>();
    return d;
}

}  // namespace deadpatch
