#include "gsdmm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gsdmm/error.hpp"
#include "gsdmm/eval.hpp"
#include "gsdmm/random.hpp"

namespace gsdmm {

namespace {

std::vector<double> sample_dirichlet(std::size_t dim, double concentration, RandomStream& rng) {
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> x(dim);
    double sum = 0.0;
    // Tiny concentrations can underflow every component; redraw in that case.
    while (!(sum > 0.0)) {
        for (auto& xi : x) xi = gamma(rng);
        sum = std::accumulate(x.begin(), x.end(), 0.0);
    }
    for (auto& xi : x) xi /= sum;
    return x;
}

std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    std::partial_sum(p.begin(), p.end(), c.begin());
    return c;
}

std::size_t draw(const std::vector<double>& cdf, RandomStream& rng) {
    const double u = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

double log_delta(std::span<const double> x) {
    double s = 0.0;
    double total = 0.0;
    for (double xi : x) {
        s += std::lgamma(xi);
        total += xi;
    }
    return s - std::lgamma(total);
}

}  // namespace

void GenSpec::validate() const {
    auto bad = [](const std::string& msg) { throw Error(Errc::InvalidConfig, msg); };
    if (k < 1) bad("k must be >= 1");
    if (v < 2) bad("v must be >= 2");
    if (doc_len < 1) bad("doc_len must be >= 1");
    if (mean_len && !(*mean_len >= 1.0)) bad("mean document length must be >= 1");
    if (!(alpha_gen > 0.0)) bad("alpha_gen must be > 0");
    if (!(beta_gen > 0.0)) bad("beta_gen must be > 0");
}

std::string synthetic_word(std::size_t index, std::size_t v) {
    std::size_t width = 3;
    for (std::size_t cap = 26 * 26 * 26; cap < v; cap *= 26) ++width;
    std::string w(width, 'a');
    for (std::size_t i = 0; i < width; ++i) {
        w[width - 1 - i] = static_cast<char>('a' + index % 26);
        index /= 26;
    }
    return "zq" + w;
}

GeneratedCorpus generate_corpus(const GenSpec& spec) {
    spec.validate();
    RandomStream rng(spec.seed, Stream::Generator);

    GeneratedCorpus out;
    out.theta = sample_dirichlet(spec.k, spec.alpha_gen, rng);
    out.phi.reserve(spec.k);
    for (std::size_t z = 0; z < spec.k; ++z) out.phi.push_back(sample_dirichlet(spec.v, spec.beta_gen, rng));

    const auto theta_cdf = cumulative(out.theta);
    std::vector<std::vector<double>> phi_cdf;
    for (const auto& p : out.phi) phi_cdf.push_back(cumulative(p));

    std::vector<std::string> words(spec.v);
    for (std::size_t w = 0; w < spec.v; ++w) words[w] = synthetic_word(w, spec.v);

    std::poisson_distribution<std::size_t> extra(std::max(spec.mean_len.value_or(2.0) - 1.0, 1e-12));
    const auto pad = std::to_string(spec.d).size();
    out.raw.reserve(spec.d);
    out.labels.reserve(spec.d);
    for (std::size_t d = 0; d < spec.d; ++d) {
        const auto z = draw(theta_cdf, rng);
        const std::size_t len = spec.mean_len ? 1 + extra(rng) : spec.doc_len;
        std::string text;
        for (std::size_t i = 0; i < len; ++i) {
            if (i) text += ' ';
            text += words[draw(phi_cdf[z], rng)];
        }
        auto id = std::to_string(d);
        id.insert(0, pad - id.size(), '0');
        out.raw.push_back({"doc" + id, std::move(text), "topic" + std::to_string(z)});
        out.labels.push_back(static_cast<std::uint32_t>(z));
    }

    if (spec.d == 0) return out;

    TokenRules rules;
    rules.min_df = 1;
    rules.min_word_len = 1;
    rules.max_word_len = 64;
    out.corpus = build_corpus(out.raw, rules).corpus;

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t w = 0; w < words.size(); ++w) index.emplace(words[w], w);
    for (const auto& w : out.corpus.vocabulary().words()) out.source_word.push_back(index.at(w));
    return out;
}

void write_jsonl(std::ostream& out, const std::vector<RawDocument>& docs) {
    for (const auto& d : docs) {
        nlohmann::ordered_json obj;
        obj["id"] = d.doc_id;
        obj["text"] = d.text;
        if (d.label) obj["label"] = *d.label;
        out << obj.dump() << '\n';
    }
}

double oracle_delta_ratio(const Document& doc, ClusterId z, const ModelState& state, const WeightingScheme& w) {
    const auto& c = state.cluster(z);
    const std::size_t v = state.vocab_size();
    std::vector<double> without(v), with(v);
    for (std::size_t t = 0; t < v; ++t) {
        const double pc = pseudo_count(w, static_cast<WordId>(t));
        if (!(pc > 0.0)) throw Error(Errc::NonPositiveArgument, "pseudo-count must be positive for word " + std::to_string(t));
        without[t] = c.word_counts[t] + pc;
        with[t] = without[t];
    }
    for (const auto& wc : doc.counts) with[wc.word] += wc.count;

    const double prior = c.m + state.alpha();
    if (!(prior > 0.0)) throw Error(Errc::NonPositiveArgument, "m + alpha must be positive");
    return std::exp(log_delta(with) - log_delta(without)) * prior;
}

JointEnumeration::JointEnumeration(const Corpus& corpus, std::size_t k, double alpha, const WeightingScheme& w)
    : num_docs_(corpus.size()), k_(k) {
    if (k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
    if (!(alpha > 0.0)) throw Error(Errc::NonPositiveArgument, "alpha must be positive for the joint");
    std::size_t total = 1;
    for (std::size_t d = 0; d < num_docs_; ++d) {
        total *= k;
        if (total > 1'000'000) throw Error(Errc::InstanceTooLarge, "k^D exceeds 10^6");
    }

    const std::size_t v = corpus.vocab_size();
    std::vector<double> pseudo(v);
    for (std::size_t t = 0; t < v; ++t) {
        pseudo[t] = pseudo_count(w, static_cast<WordId>(t));
        if (!(pseudo[t] > 0.0)) throw Error(Errc::NonPositiveArgument, "pseudo-count must be positive");
    }
    const std::vector<double> alpha_vec(k, alpha);
    const double log_delta_alpha = log_delta(alpha_vec);
    const double log_delta_pseudo = log_delta(pseudo);

    log_joint_.resize(total);
    std::vector<ClusterId> z(num_docs_, 0);
    std::vector<double> m(k);
    std::vector<std::vector<double>> n(k, std::vector<double>(v));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t d = 0; d < num_docs_; ++d) {
            z[d] = static_cast<ClusterId>(rest % k);
            rest /= k;
        }
        for (std::size_t c = 0; c < k; ++c) {
            m[c] = alpha;
            n[c] = pseudo;
        }
        for (std::size_t d = 0; d < num_docs_; ++d) {
            m[z[d]] += 1.0;
            for (const auto& wc : corpus[d].counts) n[z[d]][wc.word] += wc.count;
        }
        double lj = log_delta(m) - log_delta_alpha;
        for (std::size_t c = 0; c < k; ++c) lj += log_delta(n[c]) - log_delta_pseudo;
        log_joint_[idx] = lj;
    }
}

std::size_t JointEnumeration::index_of(std::span<const ClusterId> z) const {
    if (z.size() != num_docs_) throw Error(Errc::LengthMismatch, "assignment length mismatch");
    std::size_t idx = 0;
    for (std::size_t d = num_docs_; d-- > 0;) {
        if (z[d] >= k_) throw Error(Errc::InactiveCluster, "cluster id out of range");
        idx = idx * k_ + z[d];
    }
    return idx;
}

double JointEnumeration::log_joint(std::span<const ClusterId> z) const { return log_joint_[index_of(z)]; }

double JointEnumeration::log_normalizer() const {
    const double top = *std::max_element(log_joint_.begin(), log_joint_.end());
    double s = 0.0;
    for (double lj : log_joint_) s += std::exp(lj - top);
    return top + std::log(s);
}

std::vector<double> JointEnumeration::conditional(std::size_t d, std::span<const ClusterId> z) const {
    std::vector<ClusterId> probe(z.begin(), z.end());
    std::vector<double> p(k_);
    for (std::size_t c = 0; c < k_; ++c) {
        probe.at(d) = static_cast<ClusterId>(c);
        p[c] = log_joint_[index_of(probe)];
    }
    const double top = *std::max_element(p.begin(), p.end());
    double s = 0.0;
    for (auto& x : p) {
        x = std::exp(x - top);
        s += x;
    }
    for (auto& x : p) x /= s;
    return p;
}

JointEnumeration oracle_enumerate_joint(const Corpus& corpus, std::size_t k, double alpha, const WeightingScheme& w) {
    return JointEnumeration(corpus, k, alpha, w);
}

double oracle_assignment_bruteforce(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold) {
    const auto conf = confusion_matrix(pred, gold);
    const std::size_t kp = conf.size();
    const std::size_t kg = conf.front().size();
    const std::size_t n = std::max(kp, kg);
    if (n > 6) throw Error(Errc::TooManyClusters, "brute-force accuracy supports at most 6 clusters");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::size_t best = 0;
    do {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < kp; ++i)
            if (perm[i] < kg) hit += conf[i][perm[i]];
        best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

}  // namespace gsdmm
