#pragma once

#include "deadpatch/gf2.hpp"
#include "deadpatch/graphreal.hpp"
#include "deadpatch/outcome.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace deadpatch {

// Graph-like reweighted fault model. Node ids 0..n_checks-1 are checks in
// the realized basis; kBoundaryNode absorbs weight-1 columns.
constexpr int32_t kBoundaryNode = -1;

struct DecodingEdge {
    int32_t u = kBoundaryNode;
    int32_t v = kBoundaryNode;
    double probability = 0.0;
    double weight = 0.0;  // ln((1-p)/p)
    uint32_t logical_label = 0;
    std::vector<uint32_t> fault_ids;
};

struct DecodingGraph {
    size_t n_checks = 0;
    size_t n_logicals = 0;
    std::vector<DecodingEdge> edges;
    // Per-fault syndrome/label lookup for simulation, in the realized basis.
    std::vector<std::vector<uint32_t>> fault_checks;
    std::vector<uint32_t> fault_labels;

    std::string to_json() const;
};

// Builds the decoding graph from the full noise model expressed in the
// realized check basis. Columns of weight <= 2 become edges; heavier columns
// are decomposed over existing edges (hyperedge splitting) with their
// probability folded into each component edge by the independent-OR rule.
// Throws std::runtime_error when a hyperedge admits no label-consistent
// decomposition (callers drop such configurations).
DecodingGraph build_decoding_graph(const CheckMatrix &cm_full, const LogicalEffectMatrix &lm,
                                   const GraphicResult &r);

using Syndrome = BitVec;

// Weighted union-find decoder: grows clusters until neutral, then peels a
// correction. Returns the predicted logical flip bits.
uint32_t decode_uf(const DecodingGraph &g, const Syndrome &s);

// Exact minimum-weight perfect-matching decoder via all-pairs Dijkstra plus
// a DP over defect subsets. Only valid for small defect counts.
uint32_t decode_exact(const DecodingGraph &g, const Syndrome &s, size_t max_defects = 20);

// Independent-OR combination of two fault probabilities.
inline double merge_probabilities(double p1, double p2) {
    return p1 * (1.0 - p2) + p2 * (1.0 - p1);
}

}  // namespace deadpatch
