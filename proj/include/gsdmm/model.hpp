#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gsdmm/corpus.hpp"

namespace gsdmm {

using ClusterId = std::uint32_t;
using DocIndex = std::uint32_t;

inline constexpr ClusterId kUnassigned = std::numeric_limits<ClusterId>::max();

// Sufficient statistics of one cluster. word_counts is dense over the
// vocabulary so the sampler's inner loop is a direct index.
struct ClusterStats {
    std::uint32_t m = 0;                     // documents
    std::uint64_t n = 0;                     // word tokens
    std::vector<std::uint32_t> word_counts;  // per word id

    bool operator==(const ClusterStats&) const = default;
};

// The only mutable object during sampling. Cluster indices are 0-based and
// contiguous over [0, active_clusters()).
class ModelState {
public:
    ModelState(std::size_t num_docs, std::size_t vocab_size, std::size_t num_clusters, double alpha);
    // k_max is the cluster count used in the prior's denominator; it stays
    // fixed when clusters are pruned or merged.
    ModelState(std::size_t num_docs, std::size_t vocab_size, std::size_t num_clusters, double alpha,
               std::size_t k_max);

    // Rebuilds a state from a complete assignment vector.
    static ModelState from_assignments(const Corpus& corpus, std::span<const ClusterId> assignments,
                                       std::size_t num_clusters, double alpha);

    std::size_t active_clusters() const { return clusters_.size(); }
    std::size_t k_max() const { return k_max_; }
    double alpha() const { return alpha_; }
    std::size_t num_docs() const { return assignments_.size(); }
    std::size_t vocab_size() const { return vocab_size_; }
    // Documents currently counted in some cluster.
    std::size_t assigned_docs() const { return assigned_docs_; }
    std::size_t non_empty_clusters() const;

    const ClusterStats& cluster(ClusterId z) const;
    const std::vector<ClusterStats>& clusters() const { return clusters_; }
    ClusterId assignment(DocIndex d) const { return assignments_.at(d); }
    const std::vector<ClusterId>& assignments() const { return assignments_; }
    std::span<const DocIndex> members(ClusterId z) const;

    void add_document(DocIndex d, const Document& doc, ClusterId z);
    // Returns the cluster the document was removed from.
    ClusterId remove_document(DocIndex d, const Document& doc);

    // Deletes an empty cluster; the last cluster takes over its index.
    void remove_cluster(ClusterId z);
    // Folds every document and count of `absorbed` into `keep`; `absorbed`
    // stays active but empty until remove_empty_clusters().
    void merge_into(ClusterId keep, ClusterId absorbed);
    void remove_empty_clusters();

    // Statistics and assignments equal; member ordering is ignored.
    bool same_statistics(const ModelState& other) const;

    // Throws std::logic_error describing the first violated count invariant.
    void check_invariants(const Corpus& corpus) const;

private:
    void require_active(ClusterId z) const;

    std::size_t vocab_size_;
    std::size_t k_max_;
    double alpha_;
    std::size_t assigned_docs_ = 0;
    std::vector<ClusterStats> clusters_;
    std::vector<ClusterId> assignments_;
    std::vector<std::vector<DocIndex>> members_;
    std::vector<std::uint32_t> member_pos_;
};

struct UniformBeta {
    double beta;
};

struct EntropyTable {
    std::vector<double> h;
    double sum_h = 0.0;
    double epsilon = 1e-9;
    bool normalized = true;
};

using WeightingScheme = std::variant<UniformBeta, EntropyTable>;

// Per-word pseudo-count and its vocabulary-wide total.
double pseudo_count(const WeightingScheme& w, WordId word);
double pseudo_total(const WeightingScheme& w, std::size_t vocab_size);

// (m_z + alpha) / (assigned + k_max * alpha), with the document under
// consideration already removed from the state.
double prior_cluster_factor(const ModelState& state, ClusterId z);

// Natural-log unnormalized conditional of `doc` joining cluster z, omitting
// the z-independent prior denominator. Returns -inf when alpha = 0 and the
// cluster holds no documents.
double doc_cluster_log_score(const Document& doc, ClusterId z, const ModelState& state, const WeightingScheme& w);

// Fills `scores` with doc_cluster_log_score for every active cluster.
void doc_log_scores(const Document& doc, const ModelState& state, const WeightingScheme& w,
                    std::vector<double>& scores);

// Normalizes log scores in place into probabilities (max-subtraction).
// Throws NonFiniteScore when no entry is finite.
void normalize_log_scores(std::vector<double>& scores);

std::vector<double> conditional_distribution(const Document& doc, const ModelState& state, const WeightingScheme& w);

EntropyTable word_entropy(const ModelState& state, double epsilon, bool normalized);

std::vector<double> posterior_phi(const ModelState& state, ClusterId z, double beta);

std::vector<std::pair<std::string, double>> top_words(const ModelState& state, ClusterId z, std::size_t n,
                                                       double beta, const Vocabulary& vocab);

}  // namespace gsdmm
