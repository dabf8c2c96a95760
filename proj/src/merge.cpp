#include "gsdmm/merge.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gsdmm/error.hpp"

namespace gsdmm {

std::vector<double> compute_icf(const ModelState& state) {
    const std::size_t k = state.active_clusters();
    if (k == 0) throw Error(Errc::InactiveCluster, "icf needs at least one active cluster");
    std::vector<std::size_t> cf(state.vocab_size(), 0);
    for (const auto& c : state.clusters()) {
        for (std::size_t w = 0; w < cf.size(); ++w) cf[w] += c.word_counts[w] > 0;
    }
    std::vector<double> icf(cf.size());
    for (std::size_t w = 0; w < cf.size(); ++w)
        icf[w] = 1.0 + std::log((1.0 + static_cast<double>(k)) / (1.0 + static_cast<double>(cf[w])));
    return icf;
}

TfIcfVector tficf_vector(const ModelState& state, ClusterId z, std::span<const double> icf) {
    const auto& c = state.cluster(z);
    if (c.n == 0) throw Error(Errc::EmptyCluster, "cluster " + std::to_string(z) + " has no tokens");
    TfIcfVector v;
    double sq = 0.0;
    const double n = static_cast<double>(c.n);
    for (std::size_t w = 0; w < c.word_counts.size(); ++w) {
        if (c.word_counts[w] == 0) continue;
        const double weight = c.word_counts[w] / n * icf[w];
        v.weights.emplace_back(static_cast<WordId>(w), weight);
        sq += weight * weight;
    }
    v.norm = std::sqrt(sq);
    return v;
}

double cosine(const TfIcfVector& u, const TfIcfVector& v) {
    if (!(u.norm > 0.0) || !(v.norm > 0.0)) throw Error(Errc::ZeroNorm, "cosine of a zero vector");
    double dot = 0.0;
    auto i = u.weights.begin();
    auto j = v.weights.begin();
    while (i != u.weights.end() && j != v.weights.end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            dot += i->second * j->second;
            ++i;
            ++j;
        }
    }
    return std::clamp(dot / (u.norm * v.norm), 0.0, 1.0);
}

namespace {

// Max-heap on similarity; equal similarities pop the lexicographically
// smallest (a, b) first.
struct CandidateOrder {
    bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
        if (x.similarity != y.similarity) return x.similarity < y.similarity;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    }
};

}  // namespace

MergeLog merge_to_k(ModelState& state, std::size_t k_real) {
    const std::size_t k = state.active_clusters();
    if (k_real < 1 || k_real > k)
        throw Error(Errc::KRealOutOfRange,
                    "k_real = " + std::to_string(k_real) + " outside [1, " + std::to_string(k) + "]");
    MergeLog log;
    if (k_real == k) return log;

    const auto icf = compute_icf(state);
    std::vector<TfIcfVector> vectors;
    vectors.reserve(k);
    for (ClusterId z = 0; z < k; ++z) vectors.push_back(tficf_vector(state, z, icf));

    std::vector<std::uint64_t> stamp(k, 0);
    std::vector<bool> alive(k, true);

    std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, CandidateOrder> queue;
    for (ClusterId a = 0; a < k; ++a) {
        for (ClusterId b = a + 1; b < k; ++b) queue.push({a, b, cosine(vectors[a], vectors[b]), 0, 0});
    }

    std::size_t remaining = k;
    while (remaining > k_real) {
        const auto top = queue.top();
        queue.pop();
        if (!alive[top.a] || !alive[top.b] || stamp[top.a] != top.stamp_a || stamp[top.b] != top.stamp_b) continue;

        state.merge_into(top.a, top.b);
        log.push_back({top.a, top.b, top.similarity});
        alive[top.b] = false;
        ++stamp[top.a];
        ++stamp[top.b];
        --remaining;

        vectors[top.a] = tficf_vector(state, top.a, icf);
        for (ClusterId c = 0; c < k; ++c) {
            if (c == top.a || !alive[c]) continue;
            const auto lo = std::min(top.a, c);
            const auto hi = std::max(top.a, c);
            queue.push({lo, hi, cosine(vectors[lo], vectors[hi]), stamp[lo], stamp[hi]});
        }
    }

    state.remove_empty_clusters();
    return log;
}

}  // namespace gsdmm
