#pragma once

#include "deadpatch/gf2.hpp"

#include <cstdint>

namespace deadpatch {

enum class GraphicStatus : uint8_t { Graphic, NotGraphic };

struct GraphicResult {
    GraphicStatus status = GraphicStatus::NotGraphic;
    BitMatrix basis_change;  // invertible; basis_change * input == realized
    BitMatrix realized;      // column weights all <= 2
};

// Decide whether the row space of `m` admits a basis with column weights at
// most two (a graphic matrix) and produce the basis change when it does.
//
// The solver works on the row-reduced echelon form: pivot columns become the
// edges of a tree to be assembled, and every other column constrains a set
// of tree edges to lie on a common path. Several deterministic constraint
// orders (plus seeded shuffles) are tried; for matrices of rank <= 5 an
// exhaustive search over invertible basis changes settles the answer
// exactly, which also covers the classical non-graphic witnesses.
GraphicResult realize_graph(const BitMatrix &m, uint64_t shuffle_seed = 0);

bool verify_realization(const BitMatrix &m, const GraphicResult &r);

}  // namespace deadpatch
