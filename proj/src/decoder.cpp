#include "deadpatch/decoder.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace deadpatch {

namespace {

double edge_weight(double p) {
    double q = std::min(std::max(p, 1e-300), 0.5);
    return std::log((1.0 - q) / q);
}

}  // namespace

DecodingGraph build_decoding_graph(const CheckMatrix &cm_full, const LogicalEffectMatrix &lm,
                                   const GraphicResult &r) {
    if (r.status != GraphicStatus::Graphic)
        throw std::invalid_argument("build_decoding_graph: realization is not graphic");
    size_t n_checks = cm_full.m.rows();
    size_t n_faults = cm_full.m.cols();
    size_t n_logicals = lm.m.rows();

    BitMatrix realized = r.basis_change.mul(cm_full.m);

    DecodingGraph g;
    g.n_checks = n_checks;
    g.n_logicals = n_logicals;
    g.fault_checks.resize(n_faults);
    g.fault_labels.assign(n_faults, 0);

    struct Col {
        std::vector<uint32_t> nodes;
        uint32_t label = 0;
        double p = 0.0;
    };
    std::vector<Col> cols(n_faults);
    for (size_t c = 0; c < n_faults; ++c) {
        Col &col = cols[c];
        for (size_t row = 0; row < n_checks; ++row)
            if (realized.get(row, c)) col.nodes.push_back(uint32_t(row));
        for (size_t row = 0; row < n_logicals; ++row)
            if (lm.m.get(row, c)) col.label |= 1u << row;
        col.p = cm_full.col_probability[c];
        g.fault_checks[c] = col.nodes;
        g.fault_labels[c] = col.label;
    }

    // Pass 1: weight <= 2 columns become edges; parallels with equal labels
    // merge by independent OR.
    std::map<std::tuple<int32_t, int32_t, uint32_t>, size_t> edge_index;
    auto add_edge = [&](int32_t u, int32_t v, uint32_t label, double p,
                        uint32_t fault_id) -> size_t {
        if (u > v) std::swap(u, v);
        auto key = std::make_tuple(u, v, label);
        auto it = edge_index.find(key);
        if (it != edge_index.end()) {
            DecodingEdge &e = g.edges[it->second];
            e.probability = merge_probabilities(e.probability, p);
            e.fault_ids.push_back(fault_id);
            return it->second;
        }
        DecodingEdge e;
        e.u = u;
        e.v = v;
        e.logical_label = label;
        e.probability = p;
        e.fault_ids.push_back(fault_id);
        g.edges.push_back(std::move(e));
        edge_index[key] = g.edges.size() - 1;
        return g.edges.size() - 1;
    };

    std::vector<uint32_t> hyper;
    for (uint32_t c = 0; c < n_faults; ++c) {
        const Col &col = cols[c];
        if (col.nodes.empty()) {
            if (col.label != 0 && col.p > 0.0)
                throw std::runtime_error(
                    "build_decoding_graph: undetectable fault with logical action");
            continue;
        }
        if (col.nodes.size() == 1) {
            add_edge(int32_t(col.nodes[0]), kBoundaryNode, col.label, col.p, c);
        } else if (col.nodes.size() == 2) {
            add_edge(int32_t(col.nodes[0]), int32_t(col.nodes[1]), col.label, col.p, c);
        } else {
            hyper.push_back(c);
        }
    }

    // Adjacency over current edges for the decomposition search.
    auto build_adj = [&]() {
        std::vector<std::vector<uint32_t>> adj(n_checks + 1);
        for (uint32_t e = 0; e < g.edges.size(); ++e) {
            int32_t u = g.edges[e].u, v = g.edges[e].v;
            adj[u == kBoundaryNode ? n_checks : size_t(u)].push_back(e);
            adj[v == kBoundaryNode ? n_checks : size_t(v)].push_back(e);
        }
        return adj;
    };
    auto adj = build_adj();
    auto node_id = [&](int32_t v) { return v == kBoundaryNode ? n_checks : size_t(v); };

    // Pass 2: hyperedge splitting. Greedy shortest pairing by BFS over the
    // edge span; boundary may absorb one leftover node.
    for (uint32_t c : hyper) {
        const Col &col = cols[c];
        std::vector<bool> pending(n_checks + 1, false);
        for (uint32_t v : col.nodes) pending[v] = true;
        size_t remaining = col.nodes.size();
        std::vector<uint32_t> decomposition;
        uint32_t label_sum = 0;
        bool failed = false;
        while (remaining > 0 && !failed) {
            uint32_t src = 0;
            while (src < n_checks && !pending[src]) ++src;
            // BFS by hop count; deterministic tie-break by edge id order.
            std::vector<int32_t> via_edge(n_checks + 1, -1);
            std::vector<uint8_t> visited(n_checks + 1, 0);
            std::queue<size_t> q;
            q.push(src);
            visited[src] = 1;
            size_t goal = SIZE_MAX;
            while (!q.empty() && goal == SIZE_MAX) {
                size_t at = q.front();
                q.pop();
                for (uint32_t ei : adj[at]) {
                    const DecodingEdge &e = g.edges[ei];
                    size_t other = node_id(e.u) == at ? node_id(e.v) : node_id(e.u);
                    if (visited[other]) continue;
                    visited[other] = 1;
                    via_edge[other] = int32_t(ei);
                    if ((other < n_checks && pending[other] && other != src) ||
                        (other == n_checks && remaining % 2 == 1)) {
                        goal = other;
                        break;
                    }
                    q.push(other);
                }
            }
            if (goal == SIZE_MAX) {
                failed = true;
                break;
            }
            for (size_t at = goal; at != src;) {
                uint32_t ei = uint32_t(via_edge[at]);
                decomposition.push_back(ei);
                label_sum ^= g.edges[ei].logical_label;
                const DecodingEdge &e = g.edges[ei];
                at = node_id(e.u) == at ? node_id(e.v) : node_id(e.u);
            }
            pending[src] = false;
            --remaining;
            if (goal < n_checks) {
                pending[goal] = false;
                --remaining;
            }
        }
        if (failed || label_sum != col.label)
            throw std::runtime_error(
                "build_decoding_graph: hyperedge admits no label-consistent decomposition");
        for (uint32_t ei : decomposition) {
            DecodingEdge &e = g.edges[ei];
            e.probability = merge_probabilities(e.probability, col.p);
            e.fault_ids.push_back(c);
        }
    }

    for (auto &e : g.edges) e.weight = edge_weight(e.probability);
    return g;
}

// ---------------------------------------------------------------------------
// Weighted union-find decoder
// ---------------------------------------------------------------------------

namespace {

struct UfState {
    const DecodingGraph &g;
    size_t n;  // nodes incl. boundary at index n_checks
    std::vector<int32_t> parent;
    std::vector<uint8_t> parity;       // defect parity per root
    std::vector<uint8_t> has_boundary; // per root
    std::vector<double> support;       // per edge
    std::vector<std::vector<uint32_t>> adj;

    explicit UfState(const DecodingGraph &graph, const Syndrome &s) : g(graph) {
        n = g.n_checks + 1;
        parent.assign(n, -1);
        parity.assign(n, 0);
        has_boundary.assign(n, 0);
        has_boundary[g.n_checks] = 1;
        support.assign(g.edges.size(), 0.0);
        adj.assign(n, {});
        for (uint32_t e = 0; e < g.edges.size(); ++e) {
            adj[node(g.edges[e].u)].push_back(e);
            adj[node(g.edges[e].v)].push_back(e);
        }
        for (size_t i = 0; i < g.n_checks; ++i)
            if (s.get(i)) parity[i] = 1;
    }

    size_t node(int32_t v) const { return v == kBoundaryNode ? g.n_checks : size_t(v); }

    size_t find(size_t x) {
        while (parent[x] >= 0) {
            if (parent[parent[x]] >= 0) parent[x] = parent[parent[x]];
            x = size_t(parent[x]);
        }
        return x;
    }

    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);  // deterministic: smaller id is root
        parent[b] = int32_t(a);
        parity[a] ^= parity[b];
        has_boundary[a] |= has_boundary[b];
    }

    bool active(size_t root) { return parity[root] && !has_boundary[root]; }
};

}  // namespace

uint32_t decode_uf(const DecodingGraph &g, const Syndrome &s) {
    if (s.size() != g.n_checks)
        throw std::invalid_argument("decode_uf: syndrome length mismatch");
    UfState st(g, s);

    // Grow the smallest active cluster by its minimum frontier slack until
    // no active (odd, boundary-free) cluster remains.
    while (true) {
        // Locate the smallest active cluster in one sweep.
        std::vector<size_t> root_of(st.n);
        std::vector<size_t> size_of(st.n, 0);
        bool any_active = false;
        for (size_t v = 0; v < st.n; ++v) {
            root_of[v] = st.find(v);
            ++size_of[root_of[v]];
        }
        size_t grow_root = 0, best_size = SIZE_MAX;
        for (size_t v = 0; v < st.n; ++v) {
            if (st.parent[v] >= 0 || !st.active(v)) continue;
            any_active = true;
            if (size_of[v] < best_size) {
                best_size = size_of[v];
                grow_root = v;
            }
        }
        if (!any_active) break;
        std::vector<size_t> members;
        for (size_t v = 0; v < st.n; ++v)
            if (root_of[v] == grow_root) members.push_back(v);

        double min_slack = std::numeric_limits<double>::infinity();
        std::vector<uint32_t> frontier;
        for (size_t v : members)
            for (uint32_t ei : st.adj[v]) {
                const DecodingEdge &e = g.edges[ei];
                size_t a = st.find(st.node(e.u)), b = st.find(st.node(e.v));
                if (a == b) continue;  // internal or already merged
                double slack = e.weight - st.support[ei];
                frontier.push_back(ei);
                min_slack = std::min(min_slack, slack);
            }
        if (frontier.empty())
            throw std::logic_error("decode_uf: stranded odd cluster");
        std::sort(frontier.begin(), frontier.end());
        frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
        for (uint32_t ei : frontier) {
            st.support[ei] += min_slack;
            const DecodingEdge &e = g.edges[ei];
            if (st.support[ei] >= e.weight - 1e-12)
                st.unite(st.node(e.u), st.node(e.v));
        }
    }

    // Peeling within the forest of saturated edges.
    std::vector<uint8_t> defect(st.n, 0);
    for (size_t i = 0; i < g.n_checks; ++i) defect[i] = s.get(i);

    std::vector<std::vector<uint32_t>> sat_adj(st.n);
    for (uint32_t ei = 0; ei < g.edges.size(); ++ei) {
        const DecodingEdge &e = g.edges[ei];
        if (st.support[ei] >= e.weight - 1e-12) {
            sat_adj[st.node(e.u)].push_back(ei);
            sat_adj[st.node(e.v)].push_back(ei);
        }
    }

    uint32_t label = 0;
    std::vector<int32_t> tree_parent_edge(st.n, -1);
    std::vector<int8_t> state(st.n, 0);  // 0 unvisited, 1 visited
    // Root BFS trees at the boundary first so leftover defects flow into it.
    std::vector<size_t> order;
    std::vector<size_t> bfs;
    auto run_bfs = [&](size_t root) {
        bfs.clear();
        bfs.push_back(root);
        state[root] = 1;
        for (size_t qi = 0; qi < bfs.size(); ++qi) {
            size_t at = bfs[qi];
            order.push_back(at);
            for (uint32_t ei : sat_adj[at]) {
                const DecodingEdge &e = g.edges[ei];
                size_t other = st.node(e.u) == at ? st.node(e.v) : st.node(e.u);
                if (state[other]) continue;
                state[other] = 1;
                tree_parent_edge[other] = int32_t(ei);
                bfs.push_back(other);
            }
        }
    };
    order.clear();
    run_bfs(st.n - 1);  // boundary node
    for (size_t v = 0; v < st.n; ++v)
        if (!state[v] && !sat_adj[v].empty()) run_bfs(v);

    for (size_t i = order.size(); i-- > 0;) {
        size_t v = order[i];
        if (!defect[v] || tree_parent_edge[v] < 0) continue;
        uint32_t ei = uint32_t(tree_parent_edge[v]);
        const DecodingEdge &e = g.edges[ei];
        size_t other = st.node(e.u) == v ? st.node(e.v) : st.node(e.u);
        label ^= e.logical_label;
        defect[v] = 0;
        defect[other] ^= 1;
    }
    defect[st.n - 1] = 0;  // boundary absorbs
    for (size_t v = 0; v + 1 < st.n; ++v)
        if (defect[v]) throw std::logic_error("decode_uf: unresolved defect");
    return label;
}

// ---------------------------------------------------------------------------
// Exact matching decoder
// ---------------------------------------------------------------------------

namespace {

struct DijkstraResult {
    std::vector<double> dist;
    std::vector<uint32_t> label;  // label of the chosen shortest path
};

DijkstraResult dijkstra(const DecodingGraph &g, const std::vector<std::vector<uint32_t>> &adj,
                        size_t src) {
    size_t n = g.n_checks + 1;
    DijkstraResult res;
    res.dist.assign(n, std::numeric_limits<double>::infinity());
    res.label.assign(n, 0);
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    res.dist[src] = 0.0;
    pq.push({0.0, src});
    auto node = [&](int32_t v) { return v == kBoundaryNode ? g.n_checks : size_t(v); };
    while (!pq.empty()) {
        auto [d, at] = pq.top();
        pq.pop();
        if (d > res.dist[at] + 1e-15) continue;
        for (uint32_t ei : adj[at]) {
            const DecodingEdge &e = g.edges[ei];
            size_t other = node(e.u) == at ? node(e.v) : node(e.u);
            double nd = d + e.weight;
            if (nd < res.dist[other] - 1e-15) {
                res.dist[other] = nd;
                res.label[other] = res.label[at] ^ e.logical_label;
                pq.push({nd, other});
            }
        }
    }
    return res;
}

}  // namespace

uint32_t decode_exact(const DecodingGraph &g, const Syndrome &s, size_t max_defects) {
    if (s.size() != g.n_checks)
        throw std::invalid_argument("decode_exact: syndrome length mismatch");
    std::vector<size_t> defects;
    for (size_t i = 0; i < g.n_checks; ++i)
        if (s.get(i)) defects.push_back(i);
    if (defects.empty()) return 0;
    if (defects.size() > max_defects)
        throw std::invalid_argument("decode_exact: too many defects");

    std::vector<std::vector<uint32_t>> adj(g.n_checks + 1);
    for (uint32_t e = 0; e < g.edges.size(); ++e) {
        auto node = [&](int32_t v) { return v == kBoundaryNode ? g.n_checks : size_t(v); };
        adj[node(g.edges[e].u)].push_back(e);
        adj[node(g.edges[e].v)].push_back(e);
    }

    size_t k = defects.size();
    std::vector<DijkstraResult> from(k);
    for (size_t i = 0; i < k; ++i) from[i] = dijkstra(g, adj, defects[i]);

    const double inf = std::numeric_limits<double>::infinity();
    size_t full = size_t(1) << k;
    std::vector<double> dp(full, inf);
    std::vector<int32_t> choice(full, -1);  // packed (i, j) or (i, boundary)
    dp[0] = 0.0;
    for (size_t mask = 1; mask < full; ++mask) {
        size_t i = 0;
        while (!((mask >> i) & 1)) ++i;
        size_t rest = mask & ~(size_t(1) << i);
        // Match i to the boundary.
        double db = from[i].dist[g.n_checks];
        if (dp[rest] + db < dp[mask]) {
            dp[mask] = dp[rest] + db;
            choice[mask] = int32_t(i << 8 | 0xff);
        }
        // Match i to another defect j.
        for (size_t j = i + 1; j < k; ++j) {
            if (!((mask >> j) & 1)) continue;
            size_t rest2 = rest & ~(size_t(1) << j);
            double dij = from[i].dist[defects[j]];
            if (dp[rest2] + dij < dp[mask]) {
                dp[mask] = dp[rest2] + dij;
                choice[mask] = int32_t(i << 8 | j);
            }
        }
    }
    if (dp[full - 1] == inf)
        throw std::logic_error("decode_exact: inconsistent syndrome");

    uint32_t label = 0;
    size_t mask = full - 1;
    while (mask) {
        int32_t ch = choice[mask];
        size_t i = size_t(ch) >> 8, j = size_t(ch) & 0xff;
        if (j == 0xff) {
            label ^= from[i].label[g.n_checks];
            mask &= ~(size_t(1) << i);
        } else {
            label ^= from[i].label[defects[j]];
            mask &= ~(size_t(1) << i);
            mask &= ~(size_t(1) << j);
        }
    }
    return label;
}

std::string DecodingGraph::to_json() const {
    nlohmann::json j;
    j["n_checks"] = n_checks;
    j["n_logicals"] = n_logicals;
    j["boundary_node"] = -1;
    j["edges"] = nlohmann::json::array();
    for (const auto &e : edges) {
        j["edges"].push_back({{"u", e.u},
                              {"v", e.v},
                              {"probability", e.probability},
                              {"weight", e.weight},
                              {"logical_label", e.logical_label},
                              {"fault_ids", e.fault_ids}});
    }
    return j.dump();
}

}  // namespace deadpatch
