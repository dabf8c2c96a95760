#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gsdmm/model.hpp"

namespace gsdmm {

// Sparse term weights of one cluster, sorted by word id.
struct TfIcfVector {
    std::vector<std::pair<WordId, double>> weights;
    double norm = 0.0;
};

// icf_t = 1 + ln((1 + K) / (1 + cf(t))) over the active clusters.
std::vector<double> compute_icf(const ModelState& state);

// tf is the relative frequency n_z^t / n_z.
TfIcfVector tficf_vector(const ModelState& state, ClusterId z, std::span<const double> icf);

double cosine(const TfIcfVector& u, const TfIcfVector& v);

struct MergeCandidate {
    ClusterId a;
    ClusterId b;
    double similarity;
    std::uint64_t stamp_a;
    std::uint64_t stamp_b;
};

struct MergeStep {
    ClusterId a;  // survivor
    ClusterId b;  // absorbed
    double similarity;
};

using MergeLog = std::vector<MergeStep>;

// Greedily merges the most similar pair of clusters until k_real remain.
// Ids in the log refer to the pre-merge indexing; absorbed clusters are
// compacted away once merging finishes.
MergeLog merge_to_k(ModelState& state, std::size_t k_real);

}  // namespace gsdmm
