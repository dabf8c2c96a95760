#include "gsdmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gsdmm/error.hpp"

namespace gsdmm {

namespace {

// Factors are multiplied in short runs before taking a log; eight factors in
// the range produced by count tables cannot overflow or underflow a double.
constexpr int kProductRun = 8;

class LogProduct {
public:
    void mul(double x) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            std::ostringstream os;
            os << "log argument " << x << " is not positive";
            throw Error(Errc::NonFiniteScore, os.str());
        }
        product_ *= x;
        if (++pending_ == kProductRun) flush();
    }

    double value() {
        flush();
        return log_;
    }

private:
    void flush() {
        if (pending_ == 0) return;
        log_ += std::log(product_);
        product_ = 1.0;
        pending_ = 0;
    }

    double log_ = 0.0;
    double product_ = 1.0;
    int pending_ = 0;
};

double log_score_unchecked(const Document& doc, const ClusterStats& c, double prior_num, const WeightingScheme& w,
                           double total_pseudo) {
    if (prior_num == 0.0) return -std::numeric_limits<double>::infinity();

    LogProduct num;
    num.mul(prior_num);
    if (const auto* u = std::get_if<UniformBeta>(&w)) {
        for (const auto& wc : doc.counts) {
            const double base = static_cast<double>(c.word_counts[wc.word]) + u->beta;
            for (std::uint32_t j = 0; j < wc.count; ++j) num.mul(base + j);
        }
    } else {
        const auto& h = std::get<EntropyTable>(w).h;
        for (const auto& wc : doc.counts) {
            const double base = static_cast<double>(c.word_counts[wc.word]) + h[wc.word];
            for (std::uint32_t j = 0; j < wc.count; ++j) num.mul(base + j);
        }
    }

    LogProduct den;
    const double base = static_cast<double>(c.n) + total_pseudo;
    for (std::uint32_t i = 0; i < doc.total_len; ++i) den.mul(base + i);

    return num.value() - den.value();
}

}  // namespace

ModelState::ModelState(std::size_t num_docs, std::size_t vocab_size, std::size_t num_clusters, double alpha)
    : ModelState(num_docs, vocab_size, num_clusters, alpha, num_clusters) {}

ModelState::ModelState(std::size_t num_docs, std::size_t vocab_size, std::size_t num_clusters, double alpha,
                       std::size_t k_max)
    : vocab_size_(vocab_size),
      k_max_(k_max),
      alpha_(alpha),
      clusters_(num_clusters),
      assignments_(num_docs, kUnassigned),
      members_(num_clusters),
      member_pos_(num_docs, 0) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidConfig, "alpha must be >= 0");
    if (num_clusters > k_max) throw Error(Errc::InvalidConfig, "cluster count exceeds k_max");
    for (auto& c : clusters_) c.word_counts.assign(vocab_size, 0);
}

ModelState ModelState::from_assignments(const Corpus& corpus, std::span<const ClusterId> assignments,
                                        std::size_t num_clusters, double alpha) {
    if (assignments.size() != corpus.size()) throw Error(Errc::LengthMismatch, "assignment count != corpus size");
    ModelState state(corpus.size(), corpus.vocab_size(), num_clusters, alpha);
    for (DocIndex d = 0; d < corpus.size(); ++d) state.add_document(d, corpus[d], assignments[d]);
    return state;
}

std::size_t ModelState::non_empty_clusters() const {
    return static_cast<std::size_t>(
        std::count_if(clusters_.begin(), clusters_.end(), [](const ClusterStats& c) { return c.m > 0; }));
}

void ModelState::require_active(ClusterId z) const {
    if (z >= clusters_.size())
        throw Error(Errc::InactiveCluster, "cluster " + std::to_string(z) + " is not active (K_active = " +
                                               std::to_string(clusters_.size()) + ")");
}

const ClusterStats& ModelState::cluster(ClusterId z) const {
    require_active(z);
    return clusters_[z];
}

std::span<const DocIndex> ModelState::members(ClusterId z) const {
    require_active(z);
    return members_[z];
}

void ModelState::add_document(DocIndex d, const Document& doc, ClusterId z) {
    require_active(z);
    if (assignments_.at(d) != kUnassigned)
        throw std::logic_error("document " + std::to_string(d) + " is already assigned");
    auto& c = clusters_[z];
    c.m += 1;
    c.n += doc.total_len;
    for (const auto& wc : doc.counts) c.word_counts[wc.word] += wc.count;
    assignments_[d] = z;
    member_pos_[d] = static_cast<std::uint32_t>(members_[z].size());
    members_[z].push_back(d);
    ++assigned_docs_;
}

ClusterId ModelState::remove_document(DocIndex d, const Document& doc) {
    const ClusterId z = assignments_.at(d);
    if (z == kUnassigned) throw std::logic_error("document " + std::to_string(d) + " is not assigned");
    auto& c = clusters_[z];
    c.m -= 1;
    c.n -= doc.total_len;
    for (const auto& wc : doc.counts) c.word_counts[wc.word] -= wc.count;
    assignments_[d] = kUnassigned;

    auto& mem = members_[z];
    const auto pos = member_pos_[d];
    mem[pos] = mem.back();
    member_pos_[mem[pos]] = pos;
    mem.pop_back();
    --assigned_docs_;
    return z;
}

void ModelState::remove_cluster(ClusterId z) {
    require_active(z);
    if (clusters_[z].m != 0) throw Error(Errc::InvalidConfig, "cannot remove non-empty cluster " + std::to_string(z));
    const auto last = static_cast<ClusterId>(clusters_.size() - 1);
    if (z != last) {
        clusters_[z] = std::move(clusters_[last]);
        members_[z] = std::move(members_[last]);
        for (auto d : members_[z]) assignments_[d] = z;
    }
    clusters_.pop_back();
    members_.pop_back();
}

void ModelState::merge_into(ClusterId keep, ClusterId absorbed) {
    require_active(keep);
    require_active(absorbed);
    if (keep == absorbed) throw std::logic_error("cannot merge a cluster with itself");
    auto& dst = clusters_[keep];
    auto& src = clusters_[absorbed];
    dst.m += src.m;
    dst.n += src.n;
    for (std::size_t w = 0; w < vocab_size_; ++w) dst.word_counts[w] += src.word_counts[w];
    src.m = 0;
    src.n = 0;
    std::fill(src.word_counts.begin(), src.word_counts.end(), 0u);

    auto& dst_mem = members_[keep];
    for (auto d : members_[absorbed]) {
        assignments_[d] = keep;
        member_pos_[d] = static_cast<std::uint32_t>(dst_mem.size());
        dst_mem.push_back(d);
    }
    members_[absorbed].clear();
}

void ModelState::remove_empty_clusters() {
    for (auto z = static_cast<std::ptrdiff_t>(clusters_.size()) - 1; z >= 0; --z) {
        if (clusters_[z].m == 0) remove_cluster(static_cast<ClusterId>(z));
    }
}

bool ModelState::same_statistics(const ModelState& other) const {
    return vocab_size_ == other.vocab_size_ && k_max_ == other.k_max_ && alpha_ == other.alpha_ &&
           assigned_docs_ == other.assigned_docs_ && clusters_ == other.clusters_ &&
           assignments_ == other.assignments_;
}

void ModelState::check_invariants(const Corpus& corpus) const {
    auto fail = [](const std::string& msg) { throw std::logic_error("model state invariant violated: " + msg); };
    if (corpus.size() != assignments_.size()) fail("corpus size mismatch");
    if (clusters_.size() > k_max_) fail("K_active > K_max");

    std::vector<ClusterStats> expect(clusters_.size());
    for (auto& c : expect) c.word_counts.assign(vocab_size_, 0);
    std::size_t assigned = 0;
    for (DocIndex d = 0; d < assignments_.size(); ++d) {
        const auto z = assignments_[d];
        if (z == kUnassigned) continue;
        if (z >= clusters_.size()) fail("document " + std::to_string(d) + " assigned to inactive cluster");
        ++assigned;
        auto& c = expect[z];
        c.m += 1;
        c.n += corpus[d].total_len;
        for (const auto& wc : corpus[d].counts) c.word_counts[wc.word] += wc.count;
    }
    if (assigned != assigned_docs_) fail("assigned document count");
    std::size_t sum_m = 0;
    for (ClusterId z = 0; z < clusters_.size(); ++z) {
        const auto& c = clusters_[z];
        sum_m += c.m;
        const auto sum_w = std::accumulate(c.word_counts.begin(), c.word_counts.end(), std::uint64_t{0});
        if (sum_w != c.n) fail("n_z != sum_w n_z^w for cluster " + std::to_string(z));
        if (c != expect[z]) fail("cluster " + std::to_string(z) + " disagrees with assignments");
        if (members_[z].size() != c.m) fail("member index size for cluster " + std::to_string(z));
        for (auto d : members_[z]) {
            if (assignments_[d] != z) fail("member index entry for cluster " + std::to_string(z));
        }
    }
    if (sum_m != assigned_docs_) fail("sum_z m_z != assigned documents");
}

double pseudo_count(const WeightingScheme& w, WordId word) {
    if (const auto* u = std::get_if<UniformBeta>(&w)) return u->beta;
    return std::get<EntropyTable>(w).h.at(word);
}

double pseudo_total(const WeightingScheme& w, std::size_t vocab_size) {
    if (const auto* u = std::get_if<UniformBeta>(&w)) return static_cast<double>(vocab_size) * u->beta;
    return std::get<EntropyTable>(w).sum_h;
}

double prior_cluster_factor(const ModelState& state, ClusterId z) {
    const auto& c = state.cluster(z);
    const double k = static_cast<double>(state.k_max());
    return (c.m + state.alpha()) / (static_cast<double>(state.assigned_docs()) + k * state.alpha());
}

double doc_cluster_log_score(const Document& doc, ClusterId z, const ModelState& state, const WeightingScheme& w) {
    const auto& c = state.cluster(z);
    return log_score_unchecked(doc, c, c.m + state.alpha(), w, pseudo_total(w, state.vocab_size()));
}

void doc_log_scores(const Document& doc, const ModelState& state, const WeightingScheme& w,
                    std::vector<double>& scores) {
    const double total = pseudo_total(w, state.vocab_size());
    const auto& clusters = state.clusters();
    scores.resize(clusters.size());
    for (std::size_t z = 0; z < clusters.size(); ++z)
        scores[z] = log_score_unchecked(doc, clusters[z], clusters[z].m + state.alpha(), w, total);
}

void normalize_log_scores(std::vector<double>& scores) {
    const double top = scores.empty() ? -std::numeric_limits<double>::infinity()
                                      : *std::max_element(scores.begin(), scores.end());
    if (!std::isfinite(top)) throw Error(Errc::NonFiniteScore, "no cluster has a finite score");
    double sum = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - top);
        sum += s;
    }
    for (auto& s : scores) s /= sum;
}

std::vector<double> conditional_distribution(const Document& doc, const ModelState& state, const WeightingScheme& w) {
    std::vector<double> p;
    doc_log_scores(doc, state, w, p);
    normalize_log_scores(p);
    return p;
}

EntropyTable word_entropy(const ModelState& state, double epsilon, bool normalized) {
    if (!(epsilon > 0.0)) throw Error(Errc::InvalidConfig, "entropy epsilon must be positive");
    const std::size_t k = state.active_clusters();
    if (k == 0) throw Error(Errc::InactiveCluster, "word entropy needs at least one active cluster");
    const std::size_t v = state.vocab_size();
    const double log_k = std::log(static_cast<double>(k));

    EntropyTable table;
    table.epsilon = epsilon;
    table.normalized = normalized;
    table.h.assign(v, 0.0);

    std::vector<double> totals(v, 0.0);
    std::vector<std::uint32_t> lo(v, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> hi(v, 0);
    for (const auto& c : state.clusters()) {
        for (std::size_t w = 0; w < v; ++w) {
            const auto n = c.word_counts[w];
            totals[w] += n;
            lo[w] = std::min(lo[w], n);
            hi[w] = std::max(hi[w], n);
        }
    }

    std::vector<double> denom(v);
    for (std::size_t w = 0; w < v; ++w) denom[w] = totals[w] + static_cast<double>(k) * epsilon;
    for (const auto& c : state.clusters()) {
        for (std::size_t w = 0; w < v; ++w) {
            const double p = (c.word_counts[w] + epsilon) / denom[w];
            table.h[w] -= p * std::log(p);
        }
    }

    for (std::size_t w = 0; w < v; ++w) {
        // Equal counts in every cluster give p_k = 1/K exactly.
        if (lo[w] == hi[w]) table.h[w] = log_k;
        // A single cluster carries no information; 1 keeps the pseudo-counts positive.
        if (k == 1) table.h[w] = 1.0;
        else if (normalized) table.h[w] = std::clamp(table.h[w] / log_k, 0.0, 1.0);
    }
    table.sum_h = std::accumulate(table.h.begin(), table.h.end(), 0.0);
    return table;
}

std::vector<double> posterior_phi(const ModelState& state, ClusterId z, double beta) {
    const auto& c = state.cluster(z);
    const double denom = static_cast<double>(c.n) + static_cast<double>(state.vocab_size()) * beta;
    std::vector<double> phi(state.vocab_size());
    for (std::size_t w = 0; w < phi.size(); ++w) phi[w] = (c.word_counts[w] + beta) / denom;
    return phi;
}

std::vector<std::pair<std::string, double>> top_words(const ModelState& state, ClusterId z, std::size_t n,
                                                       double beta, const Vocabulary& vocab) {
    const auto phi = posterior_phi(state, z, beta);
    std::vector<WordId> ids(phi.size());
    std::iota(ids.begin(), ids.end(), WordId{0});
    const auto take = std::min(n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                      [&](WordId a, WordId b) { return phi[a] != phi[b] ? phi[a] > phi[b] : a < b; });
    std::vector<std::pair<std::string, double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.emplace_back(vocab.word(ids[i]), phi[ids[i]]);
    return out;
}

}  // namespace gsdmm
