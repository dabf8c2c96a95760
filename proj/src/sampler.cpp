#include "gsdmm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "gsdmm/error.hpp"
#include "gsdmm/eval.hpp"

namespace gsdmm {

RunConfig RunConfig::defaults(Algorithm algorithm) {
    RunConfig cfg;
    cfg.algorithm = algorithm;
    cfg.alpha = 0.1;
    cfg.beta = algorithm == Algorithm::Gsdmm ? 0.1 : 0.01;
    return cfg;
}

void RunConfig::validate() const {
    auto bad = [](const std::string& msg) { throw Error(Errc::InvalidConfig, msg); };
    if (k_max < 1) bad("k_max must be >= 1");
    if (k_real && (*k_real < 1 || *k_real > k_max)) bad("k_real must lie in [1, k_max]");
    if (iterations < 1) bad("iterations must be >= 1");
    if (!(alpha >= 0.0)) bad("alpha must be >= 0");
    if (!(beta > 0.0)) bad("beta must be > 0");
    if (!(entropy_epsilon > 0.0)) bad("entropy epsilon must be > 0");
}

namespace {

SweepSettings settings_for(const RunConfig& cfg, bool prune) {
    return {prune, cfg.entropy_refreshes_per_sweep, cfg.entropy_epsilon, cfg.entropy_normalized, cfg.shuffle};
}

struct GoldLabels {
    std::vector<std::uint32_t> ids;

    explicit GoldLabels(const Corpus& corpus) {
        if (!corpus.fully_labeled()) return;
        std::vector<std::string> labels;
        labels.reserve(corpus.size());
        for (const auto& d : corpus.documents()) labels.push_back(*d.gold_label);
        ids = densify(labels);
    }

    void annotate(SweepRecord& rec, const ModelState& state) const {
        if (ids.empty()) return;
        const auto pred = densify(state.assignments());
        rec.acc = accuracy(pred, ids);
        rec.nmi = nmi(pred, ids);
    }
};

std::vector<ClusterId> compact_assignments(ModelState& state) {
    state.remove_empty_clusters();
    return state.assignments();
}

}  // namespace

ModelState random_init(const Corpus& corpus, const RunConfig& cfg, RandomStream& rng) {
    ModelState state(corpus.size(), corpus.vocab_size(), cfg.k_max, cfg.alpha);
    for (DocIndex d = 0; d < corpus.size(); ++d)
        state.add_document(d, corpus[d], static_cast<ClusterId>(rng.below(cfg.k_max)));
    return state;
}

ModelState adaptive_init_with_seeds(const Corpus& corpus, const RunConfig& cfg, std::span<const DocIndex> seed_docs,
                                    RandomStream& rng) {
    if (seed_docs.size() != cfg.k_max) throw Error(Errc::InvalidConfig, "need exactly k_max seed documents");
    ModelState state(corpus.size(), corpus.vocab_size(), cfg.k_max, cfg.alpha);
    for (ClusterId z = 0; z < seed_docs.size(); ++z) state.add_document(seed_docs[z], corpus[seed_docs[z]], z);

    const WeightingScheme w = UniformBeta{cfg.beta};
    std::vector<double> scores;
    for (DocIndex d = 0; d < corpus.size(); ++d) {
        if (state.assignment(d) != kUnassigned) continue;
        doc_log_scores(corpus[d], state, w, scores);
        normalize_log_scores(scores);
        state.add_document(d, corpus[d], static_cast<ClusterId>(sample_index(scores, 1.0, rng)));
    }
    return state;
}

ModelState adaptive_init(const Corpus& corpus, const RunConfig& cfg, RandomStream& rng) {
    if (cfg.k_max > corpus.size())
        throw Error(Errc::KMaxExceedsCorpus, "k_max = " + std::to_string(cfg.k_max) + " exceeds the " +
                                                 std::to_string(corpus.size()) + " documents available");
    std::vector<DocIndex> order(corpus.size());
    std::iota(order.begin(), order.end(), DocIndex{0});
    for (std::size_t i = 0; i < cfg.k_max; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
    order.resize(cfg.k_max);
    return adaptive_init_with_seeds(corpus, cfg, order, rng);
}

std::size_t sample_index(std::span<const double> weights, double total, RandomStream& rng) {
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

std::size_t gibbs_sweep(ModelState& state, const Corpus& corpus, WeightingScheme& weights,
                        const SweepSettings& settings, RandomStream& rng) {
    const std::size_t num_docs = corpus.size();
    std::vector<DocIndex> order(num_docs);
    std::iota(order.begin(), order.end(), DocIndex{0});
    if (settings.shuffle) {
        for (std::size_t i = num_docs; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }

    auto* entropy = std::get_if<EntropyTable>(&weights);
    const std::size_t refresh_every =
        (entropy && settings.entropy_refreshes > 0)
            ? std::max<std::size_t>(1, (num_docs + settings.entropy_refreshes - 1) / settings.entropy_refreshes)
            : 0;

    std::vector<double> scores;
    std::size_t moved = 0;
    for (std::size_t pos = 0; pos < num_docs; ++pos) {
        const DocIndex d = order[pos];
        const Document& doc = corpus[d];
        const ClusterId old = state.remove_document(d, doc);

        bool pruned = false;
        if (settings.prune_empty && state.cluster(old).n == 0 && state.active_clusters() > 1) {
            state.remove_cluster(old);
            pruned = true;
        }
        if (refresh_every && pos % refresh_every == 0)
            *entropy = word_entropy(state, settings.entropy_epsilon, settings.entropy_normalized);

        doc_log_scores(doc, state, weights, scores);
        const double top = *std::max_element(scores.begin(), scores.end());
        if (!std::isfinite(top))
            throw Error(Errc::NonFiniteScore, "document " + doc.doc_id + " has no finite cluster score");
        double total = 0.0;
        for (auto& s : scores) {
            s = std::exp(s - top);
            total += s;
        }
        const auto z = static_cast<ClusterId>(sample_index(scores, total, rng));
        state.add_document(d, doc, z);
        if (pruned || z != old) ++moved;
    }
    return moved;
}

RunResult run_gsdmm(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::Gsdmm) throw Error(Errc::InvalidConfig, "run_gsdmm requires algorithm = GSDMM");

    RandomStream init_rng(cfg.seed, Stream::Init);
    RandomStream sweep_rng(cfg.seed, Stream::Sweep);
    const GoldLabels gold(corpus);

    ModelState state = random_init(corpus, cfg, init_rng);
    WeightingScheme weights = UniformBeta{cfg.beta};
    const auto settings = settings_for(cfg, false);

    SweepTrace trace;
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        SweepRecord rec;
        rec.iteration = it;
        rec.moved_docs = gibbs_sweep(state, corpus, weights, settings, sweep_rng);
        rec.active_clusters = state.non_empty_clusters();
        gold.annotate(rec, state);
        spdlog::debug("gsdmm sweep {}: {} clusters, {} moved", it, rec.active_clusters, rec.moved_docs);
        if (observer) observer(state, rec);
        trace.push_back(rec);
    }

    auto assignments = compact_assignments(state);
    return {std::move(assignments), std::move(state), std::move(trace), {}, false};
}

RunResult run_gsdmm_plus(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer) {
    cfg.validate();
    if (cfg.algorithm != Algorithm::GsdmmPlus)
        throw Error(Errc::InvalidConfig, "run_gsdmm_plus requires algorithm = GSDMM+");

    RandomStream init_rng(cfg.seed, Stream::Init);
    RandomStream sweep_rng(cfg.seed, Stream::Sweep);
    const GoldLabels gold(corpus);

    ModelState state = adaptive_init(corpus, cfg, init_rng);
    WeightingScheme weights = word_entropy(state, cfg.entropy_epsilon, cfg.entropy_normalized);
    const auto settings = settings_for(cfg, true);

    SweepTrace trace;
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        SweepRecord rec;
        rec.iteration = it;
        rec.moved_docs = gibbs_sweep(state, corpus, weights, settings, sweep_rng);
        rec.active_clusters = state.non_empty_clusters();
        gold.annotate(rec, state);
        spdlog::debug("gsdmm+ sweep {}: {} clusters, {} moved", it, rec.active_clusters, rec.moved_docs);
        if (observer) observer(state, rec);
        trace.push_back(rec);
    }

    RunResult result{{}, std::move(state), std::move(trace), {}, false};
    if (cfg.k_real) {
        const auto active = result.state.active_clusters();
        if (*cfg.k_real > active) {
            spdlog::warn("{}: k_real = {} exceeds the {} clusters left after sampling; merge skipped",
                         to_string(Errc::KRealExceedsActive), *cfg.k_real, active);
            result.merge_skipped = true;
        } else {
            result.merges = merge_to_k(result.state, *cfg.k_real);
        }
    }
    result.assignments = compact_assignments(result.state);
    return result;
}

RunResult run(const Corpus& corpus, const RunConfig& cfg, const SweepObserver& observer) {
    return cfg.algorithm == Algorithm::Gsdmm ? run_gsdmm(corpus, cfg, observer)
                                             : run_gsdmm_plus(corpus, cfg, observer);
}

}  // namespace gsdmm
