#include "deadpatch/graphreal.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

namespace deadpatch {

namespace {

// Union-find over tree-edge endpoint slots (edge t has slots 2t, 2t+1).
struct Slots {
    std::vector<uint32_t> parent;
    explicit Slots(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    uint32_t find(uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(uint32_t a, uint32_t b) { parent[find(a)] = find(b); }
};

struct TreeAssembler {
    size_t r;
    Slots slots;
    // vertex (slot root) -> incident edges; fragments tracked via edge DSU.
    std::vector<uint32_t> frag;  // edge -> fragment root (DSU)
    std::vector<uint32_t> degree_cache;

    explicit TreeAssembler(size_t rank) : r(rank), slots(2 * rank), frag(rank) {
        std::iota(frag.begin(), frag.end(), 0);
    }
    uint32_t frag_find(uint32_t e) {
        while (frag[e] != e) e = frag[e] = frag[frag[e]];
        return e;
    }
    uint32_t end_vertex(uint32_t edge, int side) { return slots.find(2 * edge + side); }

    size_t vertex_degree(uint32_t v, const std::vector<std::vector<uint32_t>> &vertex_edges) {
        return vertex_edges[v].size();
    }
};

// Attempt to assemble a tree over the rank pivot edges such that every
// constraint (a set of pivot edges) forms a path. Returns the per-edge
// endpoint vertex ids on success.
struct AssembledForest {
    size_t n_vertices = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edge_ends;  // per tree edge
    std::vector<uint32_t> component;                       // per vertex
    size_t n_components = 0;
};

std::optional<AssembledForest> assemble_tree(size_t r,
                                             const std::vector<std::vector<uint32_t>> &constraints) {
    TreeAssembler ta(r);

    // vertex root -> incident (edge, side); rebuilt lazily after merges.
    auto incident = [&](uint32_t v) {
        std::vector<std::pair<uint32_t, int>> out;
        for (uint32_t e = 0; e < r; ++e)
            for (int s = 0; s < 2; ++s)
                if (ta.end_vertex(e, s) == v) out.push_back({e, s});
        return out;
    };

    for (const auto &S : constraints) {
        if (S.size() < 2) continue;
        // Group the constraint's edges into connected components under the
        // current vertex identifications.
        std::vector<int> comp(S.size(), -1);
        int n_comp = 0;
        for (size_t i = 0; i < S.size(); ++i) {
            if (comp[i] >= 0) continue;
            comp[i] = n_comp;
            std::vector<size_t> stack{i};
            while (!stack.empty()) {
                size_t j = stack.back();
                stack.pop_back();
                uint32_t u0 = ta.end_vertex(S[j], 0), u1 = ta.end_vertex(S[j], 1);
                for (size_t k = 0; k < S.size(); ++k) {
                    if (comp[k] >= 0) continue;
                    uint32_t v0 = ta.end_vertex(S[k], 0), v1 = ta.end_vertex(S[k], 1);
                    if (v0 == u0 || v0 == u1 || v1 == u0 || v1 == u1) {
                        comp[k] = n_comp;
                        stack.push_back(k);
                    }
                }
            }
            ++n_comp;
        }

        // Two edges of the constraint in the same fragment but different
        // S-components can never become path-contiguous: give up.
        for (size_t i = 0; i < S.size(); ++i)
            for (size_t j = i + 1; j < S.size(); ++j)
                if (comp[i] != comp[j] && ta.frag_find(S[i]) == ta.frag_find(S[j]))
                    return std::nullopt;

        // Per component: must already be a path; find its two end vertices.
        struct PathEnds {
            uint32_t a, b;
            uint32_t min_edge;
        };
        std::vector<PathEnds> ends(n_comp, {0, 0, UINT32_MAX});
        for (int ci = 0; ci < n_comp; ++ci) {
            std::vector<uint32_t> edges;
            for (size_t i = 0; i < S.size(); ++i)
                if (comp[i] == ci) edges.push_back(S[i]);
            // Degree of each touched vertex within this component.
            std::vector<std::pair<uint32_t, int>> deg;
            auto bump = [&](uint32_t v) {
                for (auto &d : deg)
                    if (d.first == v) {
                        ++d.second;
                        return;
                    }
                deg.push_back({v, 1});
            };
            for (uint32_t e : edges) {
                uint32_t v0 = ta.end_vertex(e, 0), v1 = ta.end_vertex(e, 1);
                bump(v0);
                if (v1 != v0) bump(v1);
            }
            std::vector<uint32_t> odd;
            for (auto &d : deg) {
                if (d.second > 2) return std::nullopt;  // branch inside constraint
                if (d.second == 1) odd.push_back(d.first);
            }
            if (odd.size() != 2) return std::nullopt;  // cycle or degenerate
            // The path may not pass through any vertex twice; degrees <= 2
            // plus connectivity plus edge count == vertex count - 1 imply a
            // simple path here.
            ends[ci] = {odd[0], odd[1], *std::min_element(edges.begin(), edges.end())};
        }

        // Chain components deterministically (by smallest edge id), joining
        // ends with the smallest current degree to keep later options open.
        std::vector<int> order(n_comp);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return ends[a].min_edge < ends[b].min_edge; });
        for (int k = 1; k < n_comp; ++k) {
            PathEnds &prev = ends[order[k - 1]];
            PathEnds &cur = ends[order[k]];
            auto deg_of = [&](uint32_t v) { return incident(v).size(); };
            uint32_t pa = prev.a, pb = prev.b, ca = cur.a, cb = cur.b;
            // After joining, the chained path's free ends are the unused pair.
            uint32_t join_p = pb, keep_p = pa;
            if (k == 1) {
                if (deg_of(pa) < deg_of(pb)) std::swap(join_p, keep_p);
            } else {
                // prev.a was fixed as the surviving end of the chain so far.
                join_p = pb;
                keep_p = pa;
            }
            uint32_t join_c = ca, keep_c = cb;
            if (deg_of(cb) < deg_of(ca)) {
                join_c = cb;
                keep_c = ca;
            }
            ta.slots.unite(join_p, join_c);
            uint32_t fa = ta.frag_find(prev.min_edge), fb = ta.frag_find(cur.min_edge);
            if (fa != fb) ta.frag[fa] = fb;
            ends[order[k]] = {ta.slots.find(keep_p), ta.slots.find(keep_c), cur.min_edge};
        }
    }

    // Convert to explicit vertices; detect accidental cycles (must be a forest).
    AssembledForest out;
    std::vector<int> vertex_id(2 * r, -1);
    for (uint32_t e = 0; e < r; ++e)
        for (int s = 0; s < 2; ++s) {
            uint32_t root = ta.slots.find(2 * e + s);
            if (vertex_id[root] < 0) vertex_id[root] = int(out.n_vertices++);
        }
    out.edge_ends.resize(r);
    for (uint32_t e = 0; e < r; ++e) {
        uint32_t a = uint32_t(vertex_id[ta.slots.find(2 * e)]);
        uint32_t b = uint32_t(vertex_id[ta.slots.find(2 * e + 1)]);
        if (a == b) return std::nullopt;  // self-loop: not a tree edge
        out.edge_ends[e] = {a, b};
    }
    // Forest check + component labels via DSU over vertices.
    std::vector<uint32_t> vp(out.n_vertices);
    std::iota(vp.begin(), vp.end(), 0);
    std::function<uint32_t(uint32_t)> vfind = [&](uint32_t x) {
        while (vp[x] != x) x = vp[x] = vp[vp[x]];
        return x;
    };
    for (auto &[a, b] : out.edge_ends) {
        uint32_t ra = vfind(a), rb = vfind(b);
        if (ra == rb) return std::nullopt;  // cycle
        vp[ra] = rb;
    }
    out.component.resize(out.n_vertices);
    std::vector<int> comp_id(out.n_vertices, -1);
    for (uint32_t v = 0; v < out.n_vertices; ++v) {
        uint32_t root = vfind(v);
        if (comp_id[root] < 0) comp_id[root] = int(out.n_components++);
        out.component[v] = uint32_t(comp_id[root]);
    }
    return out;
}

// Build the basis change from an assembled forest: per component delete one
// vertex (absorbed into the boundary), remaining vertices become rows.
std::optional<GraphicResult> realization_from_forest(const AssembledForest &f,
                                                     const RrefResult &rr,
                                                     const BitMatrix &input) {
    size_t r = rr.rank;
    // Deterministic boundary choice: the first-seen vertex of each component.
    std::vector<bool> is_boundary(f.n_vertices, false);
    std::vector<bool> seen(f.n_components, false);
    std::vector<int> row_of(f.n_vertices, -1);
    size_t next_row = 0;
    for (uint32_t v = 0; v < f.n_vertices; ++v) {
        if (!seen[f.component[v]]) {
            seen[f.component[v]] = true;
            is_boundary[v] = true;
        } else {
            row_of[v] = int(next_row++);
        }
    }
    if (next_row != r) return std::nullopt;

    BitMatrix b(r, r);
    for (uint32_t e = 0; e < r; ++e) {
        auto [u, v] = f.edge_ends[e];
        if (row_of[u] >= 0) b.set(size_t(row_of[u]), e, true);
        if (row_of[v] >= 0) b.set(size_t(row_of[v]), e, true);
    }

    // Full-size basis change: act with b on the first r rows of the rref
    // transform, keep the null rows as-is.
    size_t rows = input.rows();
    BitMatrix e_full = BitMatrix::identity(rows);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) e_full.set(i, j, b.get(i, j));
    GraphicResult res;
    res.status = GraphicStatus::Graphic;
    res.basis_change = e_full.mul(rr.transform);
    res.realized = res.basis_change.mul(input);
    return res;
}

std::optional<GraphicResult> try_order(const BitMatrix &input, const RrefResult &rr,
                                       const std::vector<uint32_t> &col_order) {
    size_t r = rr.rank;
    std::vector<bool> is_pivot(input.cols(), false);
    std::vector<int> pivot_row(input.cols(), -1);
    for (size_t p = 0; p < r; ++p) {
        is_pivot[rr.pivot_cols[p]] = true;
        pivot_row[rr.pivot_cols[p]] = int(p);
    }
    std::vector<std::vector<uint32_t>> constraints;
    for (uint32_t c : col_order) {
        if (is_pivot[c]) continue;
        std::vector<uint32_t> s;
        for (size_t p = 0; p < r; ++p)
            if (rr.reduced.get(p, c)) s.push_back(uint32_t(p));
        if (s.size() >= 2) constraints.push_back(std::move(s));
    }
    auto forest = assemble_tree(r, constraints);
    if (!forest) return std::nullopt;
    auto res = realization_from_forest(*forest, rr, input);
    if (!res) return std::nullopt;
    if (!verify_realization(input, *res)) return std::nullopt;
    return res;
}

// Exhaustive search over invertible basis changes; exact for rank <= 5.
// Column weights only grow as rows are added, so partial assignments prune.
std::optional<GraphicResult> exhaustive_realize(const BitMatrix &input, const RrefResult &rr) {
    size_t r = rr.rank;
    size_t rows = input.rows();
    size_t cols = input.cols();
    // Precompute every nonzero row combination of the compacted rref.
    std::vector<BitVec> combo(1u << r, BitVec(cols));
    for (uint32_t v = 1; v < (1u << r); ++v) {
        uint32_t low = v & (v - 1);
        uint32_t bit = v ^ low;
        combo[v] = combo[low];
        combo[v].xor_in(rr.reduced.row(size_t(std::countr_zero(bit))));
    }

    std::vector<uint32_t> rows_chosen(r, 0);
    std::vector<uint32_t> span;
    std::vector<uint8_t> col_count(cols, 0);
    std::function<bool(size_t)> rec = [&](size_t depth) -> bool {
        if (depth == r) return true;
        for (uint32_t v = 1; v < (1u << r); ++v) {
            if (std::find(span.begin(), span.end(), v) != span.end()) continue;
            bool ok = true;
            for (size_t c : combo[v].ones())
                if (col_count[c] == 2) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            for (size_t c : combo[v].ones()) ++col_count[c];
            size_t old = span.size();
            span.push_back(v);
            for (size_t k = 0; k < old; ++k) span.push_back(span[k] ^ v);
            rows_chosen[depth] = v;
            if (rec(depth + 1)) return true;
            span.resize(old);
            for (size_t c : combo[v].ones()) --col_count[c];
        }
        return false;
    };
    if (!rec(0)) return std::nullopt;

    BitMatrix e_full = BitMatrix::identity(rows);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            e_full.set(i, j, (rows_chosen[i] >> j) & 1);
    GraphicResult res;
    res.status = GraphicStatus::Graphic;
    res.basis_change = e_full.mul(rr.transform);
    res.realized = res.basis_change.mul(input);
    return res;
}

uint64_t splitmix64(uint64_t &x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

GraphicResult realize_graph(const BitMatrix &m, uint64_t shuffle_seed) {
    RrefResult rr = rref(m);
    size_t r = rr.rank;

    GraphicResult not_graphic;
    not_graphic.status = GraphicStatus::NotGraphic;

    if (r == 0) {
        GraphicResult res;
        res.status = GraphicStatus::Graphic;
        res.basis_change = BitMatrix::identity(m.rows());
        res.realized = m;
        return res;
    }

    // Natural column order first, then a few deterministic fallbacks.
    std::vector<uint32_t> order(m.cols());
    std::iota(order.begin(), order.end(), 0);
    if (auto res = try_order(m, rr, order)) return *res;

    std::vector<uint32_t> by_size = order;
    std::stable_sort(by_size.begin(), by_size.end(), [&](uint32_t a, uint32_t b) {
        return rr.reduced.col_weight(a) < rr.reduced.col_weight(b);
    });
    if (auto res = try_order(m, rr, by_size)) return *res;

    std::reverse(order.begin(), order.end());
    if (auto res = try_order(m, rr, order)) return *res;

    uint64_t state = shuffle_seed ^ 0xdeadbeefULL;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<uint32_t> shuffled(m.cols());
        std::iota(shuffled.begin(), shuffled.end(), 0);
        for (size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[splitmix64(state) % i]);
        if (auto res = try_order(m, rr, shuffled)) return *res;
    }

    if (r <= 5) {
        if (auto res = exhaustive_realize(m, rr)) return *res;
        return not_graphic;
    }
    return not_graphic;
}

bool verify_realization(const BitMatrix &m, const GraphicResult &r) {
    if (r.status != GraphicStatus::Graphic) return false;
    if (r.basis_change.rows() != m.rows() || r.basis_change.cols() != m.rows())
        return false;
    if (rank_of(r.basis_change) != m.rows()) return false;
    if (!(r.basis_change.mul(m) == r.realized)) return false;
    for (size_t c = 0; c < r.realized.cols(); ++c)
        if (r.realized.col_weight(c) > 2) return false;
    return true;
}

}  // namespace deadpatch
