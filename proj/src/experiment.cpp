#include "deadpatch/experiment.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

namespace deadpatch {

void sample_faults(const FaultSet &fs, RngStream &rng, std::vector<uint32_t> &out) {
    out.clear();
    double p = fs.p;
    if (p <= 0.0) return;
    for (const auto &[begin, end] : fs.op_groups) {
        if (begin == end) continue;
        double u = rng.next_double();
        if (u >= p) continue;
        // Reuse the residual randomness to pick the variant uniformly.
        uint32_t n = end - begin;
        uint32_t pick = uint32_t((u / p) * n);
        if (pick >= n) pick = n - 1;
        out.push_back(begin + pick);
    }
}

namespace {

struct ShotTable {
    // Per fault: realized-basis syndrome bits and logical label.
    const DecodingGraph &g;
    explicit ShotTable(const DecodingGraph &graph) : g(graph) {}

    // Returns true on logical failure.
    bool run_shot(const FaultSet &fs, uint64_t seed, uint64_t shot,
                  std::vector<uint32_t> &scratch, Syndrome &syn) const {
        RngStream rng(seed, shot);
        sample_faults(fs, rng, scratch);
        for (size_t i = 0; i < syn.size(); ++i) syn.set(i, false);
        uint32_t truth = 0;
        for (uint32_t f : scratch) {
            for (uint32_t c : g.fault_checks[f]) syn.flip(c);
            truth ^= g.fault_labels[f];
        }
        uint32_t predicted = decode_uf(g, syn);
        return predicted != truth;
    }
};

}  // namespace

RunStats run_memory(const DecodingGraph &g, const FaultSet &fs, const StoppingRule &rule,
                    uint64_t seed, size_t n_threads) {
    if (rule.max_shots == 0 || rule.max_failures == 0)
        throw std::invalid_argument("run_memory: stopping rule must be positive");
    auto t0 = std::chrono::steady_clock::now();
    ShotTable table(g);

    const uint64_t chunk = 4096;
    uint64_t shots = 0, failures = 0;
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());

    while (shots < rule.max_shots && failures < rule.max_failures) {
        // Fixed batch size keeps the stopping point independent of the
        // thread count, so results are byte-identical across machines.
        uint64_t batch = std::min(uint64_t(65536), rule.max_shots - shots);
        std::atomic<uint64_t> batch_failures{0};
        std::atomic<uint64_t> next{0};
        auto worker = [&]() {
            std::vector<uint32_t> scratch;
            Syndrome syn(g.n_checks);
            uint64_t local = 0;
            while (true) {
                uint64_t i = next.fetch_add(chunk);
                if (i >= batch) break;
                uint64_t hi = std::min(i + chunk, batch);
                for (uint64_t k = i; k < hi; ++k)
                    local += table.run_shot(fs, seed, shots + k, scratch, syn);
            }
            batch_failures += local;
        };
        std::vector<std::thread> pool;
        for (size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto &th : pool) th.join();
        shots += batch;
        failures += batch_failures.load();
    }

    RunStats out;
    out.shots = shots;
    out.failures = failures;
    out.seed = seed;
    out.p_logical_median = beta_posterior_median(failures, shots);
    auto [lo, hi] = beta_ci(failures, shots);
    out.ci_lo = lo;
    out.ci_hi = hi;
    out.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace deadpatch
