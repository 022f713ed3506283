#pragma once

#include "deadpatch/decoder.hpp"
#include "deadpatch/outcome.hpp"
#include "deadpatch/stats.hpp"

#include <cstdint>
#include <vector>

namespace deadpatch {

struct StoppingRule {
    uint64_t max_shots = 1'000'000;
    uint64_t max_failures = 1'000;
};

struct RunStats {
    uint64_t shots = 0;
    uint64_t failures = 0;
    double p_logical_median = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    uint64_t seed = 0;
    double wall_time_s = 0.0;
};

// Draw one shot's fault indicator: each noisy operation independently fires
// with probability fs.p, choosing uniformly among its fault variants.
// Returns the indices of triggered faults.
void sample_faults(const FaultSet &fs, RngStream &rng, std::vector<uint32_t> &out);

// Monte-Carlo memory experiment over a prebuilt decoding graph. Shots are
// processed in fixed-size chunks (parallelizable) so stopping is
// deterministic for a given seed.
RunStats run_memory(const DecodingGraph &g, const FaultSet &fs, const StoppingRule &rule,
                    uint64_t seed, size_t n_threads = 0);

}  // namespace deadpatch
