#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gsdmm/corpus.hpp"
#include "gsdmm/merge.hpp"
#include "gsdmm/model.hpp"
#include "gsdmm/random.hpp"

namespace gsdmm {

enum class Algorithm { Gsdmm, GsdmmPlus };

struct RunConfig {
    Algorithm algorithm = Algorithm::Gsdmm;
    std::size_t k_max = 500;
    std::optional<std::size_t> k_real;
    double alpha = 0.1;
    double beta = 0.1;
    std::size_t iterations = 20;
    std::uint64_t seed = 0;
    std::size_t entropy_refreshes_per_sweep = 15;
    double entropy_epsilon = 1e-9;
    bool entropy_normalized = true;
    bool shuffle = false;

    // Default settings for each algorithm (GSDMM: alpha = beta = 0.1;
    // GSDMM+: alpha = 0.1, beta = 0.01). K_max = 500, 20 iterations.
    static RunConfig defaults(Algorithm algorithm);

    void validate() const;
};

struct SweepRecord {
    std::size_t iteration = 0;
    std::size_t active_clusters = 0;  // clusters holding at least one document
    std::size_t moved_docs = 0;
    std::optional<double> acc;
    std::optional<double> nmi;
};

using SweepTrace = std::vector<SweepRecord>;

struct SweepSettings {
    bool prune_empty = false;
    std::size_t entropy_refreshes = 15;
    double entropy_epsilon = 1e-9;
    bool entropy_normalized = true;
    bool shuffle = false;
};

// Called after every completed sweep with the current state.
using SweepObserver = std::function<void(const ModelState&, const SweepRecord&)>;

struct RunResult {
    std::vector<ClusterId> assignments;
    ModelState state;
    SweepTrace trace;
    MergeLog merges;
    bool merge_skipped = false;  // k_real exceeded the clusters left after sampling
};

ModelState random_init(const Corpus& corpus, const RunConfig& cfg, RandomStream& rng);

ModelState adaptive_init(const Corpus& corpus, const RunConfig& cfg, RandomStream& rng);
// adaptive_init with the founding documents fixed by the caller.
ModelState adaptive_init_with_seeds(const Corpus& corpus, const RunConfig& cfg, std::span<const DocIndex> seed_docs,
                                    RandomStream& rng);

// Draws an index with probability proportional to weights[i] / total.
std::size_t sample_index(std::span<const double> weights, double total, RandomStream& rng);

// One pass over all documents. When `weights` holds an EntropyTable it is
// refreshed in place on the configured schedule. Returns the number of
// documents that changed cluster.
std::size_t gibbs_sweep(ModelState& state, const Corpus& corpus, WeightingScheme& weights,
                        const SweepSettings& settings, RandomStream& rng);

RunResult run_gsdmm(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer = {});
RunResult run_gsdmm_plus(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer = {});
// Dispatches on cfg.algorithm.
RunResult run(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer = {});

}  // namespace gsdmm
