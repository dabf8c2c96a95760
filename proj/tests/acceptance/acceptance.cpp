#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "../unit/fixtures.hpp"
#include "../unit/merge_reference.hpp"
#include "gsdmm/cli.hpp"
#include "gsdmm/eval.hpp"
#include "gsdmm/io.hpp"
#include "gsdmm/merge.hpp"
#include "gsdmm/model.hpp"
#include "gsdmm/sampler.hpp"
#include "gsdmm/synth.hpp"

using namespace gsdmm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const auto n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Tracks count invariants across every sweep of every run below.
struct InvariantLog {
    std::size_t sweeps = 0;
    std::size_t violations = 0;
    std::size_t empty_active = 0;
    std::string first_error;

    SweepObserver observer(const Corpus& corpus, bool pruning) {
        return [this, &corpus, pruning](const ModelState& s, const SweepRecord&) {
            ++sweeps;
            try {
                s.check_invariants(corpus);
                if (s.assigned_docs() != corpus.size()) throw std::logic_error("sum_z m_z != D");
            } catch (const std::logic_error& e) {
                if (!violations++) first_error = e.what();
            }
            if (pruning) {
                for (const auto& c : s.clusters()) empty_active += c.n == 0;
            }
        };
    }
};

InvariantLog invariants;

Verdict oracle_equivalence() {
    const auto t0 = Clock::now();
    RandomStream rng(20240101, 0);
    const double betas[] = {1e-3, 0.01, 0.1, 1.0};
    std::size_t triples = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t d = 4 + rng.below(30);
        const std::size_t v = 3 + rng.below(40);
        const std::size_t k = 1 + rng.below(8);
        const auto corpus = fixtures::random_corpus(d, v, 20, rng);
        auto state = fixtures::random_state(corpus, k, 0.01 + 2.0 * rng.uniform(), rng);
        const auto doc = static_cast<DocIndex>(rng.below(d));
        state.remove_document(doc, corpus[doc]);

        WeightingScheme w;
        switch (trial % 6) {
            case 4: w = word_entropy(state, 1e-9, true); break;
            case 5: w = word_entropy(state, 1e-6, false); break;
            default: w = UniformBeta{betas[trial % 4]};
        }
        for (ClusterId z = 0; z < k; ++z) {
            const double got = std::exp(doc_cluster_log_score(corpus[doc], z, state, w));
            const double want = oracle_delta_ratio(corpus[doc], z, state, w);
            worst = std::max(worst, std::abs(got - want) / want);
            ++triples;
        }
    }
    const double secs = seconds_since(t0);
    return {triples >= 1000 && worst <= 1e-9 && secs < 10.0,
            fmt("%zu triples, max relative error %.3g, %.2f s", triples, worst, secs)};
}

Verdict enumeration_equivalence() {
    const auto t0 = Clock::now();
    RandomStream rng(777, 0);
    std::size_t fixtures_run = 0;
    double worst = 0.0;
    for (int f = 0; f < 30; ++f) {
        const std::size_t d = 2 + rng.below(7);
        const std::size_t v = 2 + rng.below(5);
        const std::size_t k = 1 + rng.below(3);
        const double alpha = 0.05 + rng.uniform();
        const auto corpus = fixtures::random_corpus(d, v, 6, rng);
        std::vector<ClusterId> z(d);
        for (auto& x : z) x = static_cast<ClusterId>(rng.below(k));
        WeightingScheme w = UniformBeta{0.01 + rng.uniform()};
        if (f % 3 == 2) w = word_entropy(ModelState::from_assignments(corpus, z, k, alpha), 1e-9, true);

        const auto table = oracle_enumerate_joint(corpus, k, alpha, w);
        for (DocIndex doc = 0; doc < d; ++doc) {
            auto state = ModelState::from_assignments(corpus, z, k, alpha);
            state.remove_document(doc, corpus[doc]);
            const auto got = conditional_distribution(corpus[doc], state, w);
            const auto want = table.conditional(doc, z);
            for (std::size_t c = 0; c < k; ++c) worst = std::max(worst, std::abs(got[c] - want[c]));
        }
        ++fixtures_run;
    }
    const double secs = seconds_since(t0);
    return {fixtures_run >= 20 && worst <= 1e-9 && secs < 30.0,
            fmt("%zu fixtures (D<=8, V<=6, K<=3), max abs difference %.3g, %.2f s", fixtures_run, worst, secs)};
}

GeneratedCorpus recovery_corpus() {
    GenSpec spec;
    spec.k = 8;
    spec.v = 2000;
    spec.d = 2000;
    spec.doc_len = 8;
    spec.beta_gen = 0.01;
    spec.seed = 2024;
    return generate_corpus(spec);
}

struct RecoveryRuns {
    std::vector<double> nmi_gsdmm, nmi_plus;
    std::vector<std::size_t> k_gsdmm, k_plus;
    double secs_gsdmm = 0.0, secs_plus = 0.0;
};

RecoveryRuns run_recovery(const GeneratedCorpus& g) {
    RecoveryRuns r;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto cfg = RunConfig::defaults(Algorithm::Gsdmm);
        cfg.k_max = 40;
        cfg.alpha = 0.1;
        cfg.beta = 0.1;
        cfg.iterations = 20;
        cfg.seed = seed;
        auto t0 = Clock::now();
        const auto a = run_gsdmm(g.corpus, cfg, invariants.observer(g.corpus, false));
        r.secs_gsdmm += seconds_since(t0);
        r.k_gsdmm.push_back(a.state.non_empty_clusters());
        r.nmi_gsdmm.push_back(nmi(a.assignments, g.labels));

        auto plus = RunConfig::defaults(Algorithm::GsdmmPlus);
        plus.k_max = 40;
        plus.alpha = 0.1;
        plus.beta = 0.01;
        plus.k_real = 8;
        plus.iterations = 20;
        plus.entropy_refreshes_per_sweep = 15;
        plus.seed = seed;
        t0 = Clock::now();
        const auto b = run_gsdmm_plus(g.corpus, plus, invariants.observer(g.corpus, true));
        r.secs_plus += seconds_since(t0);
        r.k_plus.push_back(b.state.non_empty_clusters());
        r.nmi_plus.push_back(nmi(b.assignments, g.labels));
    }
    return r;
}

std::string list(const std::vector<double>& x) {
    std::string s;
    for (double v : x) s += (s.empty() ? "" : " ") + fmt("%.3f", v);
    return s;
}

Verdict gsdmm_recovery(const RecoveryRuns& r) {
    std::vector<double> k(r.k_gsdmm.begin(), r.k_gsdmm.end());
    const double mk = median(k);
    const double mn = median(r.nmi_gsdmm);
    return {mk >= 8 && mk <= 12 && mn >= 0.85 && r.secs_gsdmm < 60.0,
            fmt("median K %.1f, median NMI %.4f, %.2f s; NMI per seed: ", mk, mn, r.secs_gsdmm) + list(r.nmi_gsdmm)};
}

Verdict gsdmm_plus_recovery(const RecoveryRuns& r) {
    std::vector<double> k(r.k_plus.begin(), r.k_plus.end());
    const double mk = median(k);
    const double mn = median(r.nmi_plus);
    int better = 0;
    for (std::size_t i = 0; i < r.nmi_plus.size(); ++i) better += r.nmi_plus[i] >= r.nmi_gsdmm[i];
    return {mk == 8 && mn >= 0.90 && better >= 7,
            fmt("median final K %.1f, median NMI %.4f, GSDMM+ >= GSDMM on %d/10 seeds, %.2f s; NMI per seed: ", mk, mn,
                better, r.secs_plus) +
                list(r.nmi_plus)};
}

Verdict count_invariants() {
    return {invariants.sweeps > 0 && invariants.violations == 0 && invariants.empty_active == 0,
            fmt("%zu sweeps checked, %zu violations, %zu empty active clusters under pruning", invariants.sweeps,
                invariants.violations, invariants.empty_active) +
                (invariants.first_error.empty() ? "" : "; first: " + invariants.first_error)};
}

Verdict accuracy_oracle() {
    RandomStream rng(99, 0);
    int equal = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 5 + rng.below(60);
        const std::size_t kp = 1 + rng.below(6);
        const std::size_t kg = 1 + rng.below(6);
        std::vector<std::uint32_t> p(n), g(n);
        for (auto& x : p) x = static_cast<std::uint32_t>(rng.below(kp));
        for (auto& x : g) x = static_cast<std::uint32_t>(rng.below(kg));
        equal += accuracy(p, g) == oracle_assignment_bruteforce(p, g);
    }
    return {equal == 100, fmt("%d/100 random instances (K <= 6) exactly equal", equal)};
}

ModelState state_from_counts(const std::vector<std::vector<std::uint32_t>>& table, Corpus& corpus) {
    Vocabulary vocab;
    for (std::size_t w = 0; w < table.front().size(); ++w) vocab.intern("t" + std::to_string(w));
    std::vector<Document> docs;
    std::vector<ClusterId> z;
    for (std::size_t c = 0; c < table.size(); ++c) {
        // Two documents per cluster so merged counts come from several rows.
        std::vector<WordCount> first, second;
        for (std::size_t w = 0; w < table[c].size(); ++w) {
            const auto n = table[c][w];
            if (n / 2) first.push_back({static_cast<WordId>(w), n / 2});
            if (n - n / 2) second.push_back({static_cast<WordId>(w), n - n / 2});
        }
        docs.push_back(Document::from_counts("c" + std::to_string(c) + "a", first));
        z.push_back(static_cast<ClusterId>(c));
        if (!second.empty()) {
            docs.push_back(Document::from_counts("c" + std::to_string(c) + "b", second));
            z.push_back(static_cast<ClusterId>(c));
        }
    }
    corpus = Corpus(std::move(docs), std::move(vocab));
    return ModelState::from_assignments(corpus, z, table.size(), 0.1);
}

Verdict merge_correctness() {
    RandomStream rng(4242, 0);
    int fixtures_run = 0, failures = 0;
    std::string first;
    for (int f = 0; f < 60; ++f) {
        const std::size_t k = 2 + rng.below(9);
        const std::size_t v = 4 + rng.below(12);
        std::vector<std::vector<std::uint32_t>> table(k, std::vector<std::uint32_t>(v, 0));
        for (auto& row : table) {
            // Each cluster leans on a few "topic" words plus noise.
            const auto base = rng.below(v);
            for (int t = 0; t < 12; ++t) {
                const auto w = rng.uniform() < 0.6 ? (base + rng.below(3)) % v : rng.below(v);
                row[w] += 1 + static_cast<std::uint32_t>(rng.below(3));
            }
        }
        if (f % 5 == 0 && k >= 3) table[k - 1] = table[0];  // an identical pair
        for (auto& row : table)
            if (std::accumulate(row.begin(), row.end(), 0u) == 0) row[0] = 1;

        Corpus corpus;
        auto state = state_from_counts(table, corpus);
        std::vector<std::uint64_t> per_word(v, 0);
        for (const auto& c : state.clusters())
            for (std::size_t w = 0; w < v; ++w) per_word[w] += c.word_counts[w];

        const std::size_t k_real = 1 + rng.below(k);
        const auto scan = reference::greedy_scan(state, k_real);
        const auto log = merge_to_k(state, k_real);
        ++fixtures_run;

        auto fail = [&](const std::string& why) {
            if (!failures++) first = fmt("fixture %d: ", f) + why;
        };
        if (log.size() != scan.size()) {
            fail("merge count differs");
            continue;
        }
        for (std::size_t i = 0; i < log.size(); ++i) {
            if (std::abs(log[i].similarity - scan[i].similarity) > 1e-12) fail(fmt("step %zu not the global maximum", i));
            const bool unique = scan[i].similarity - scan[i].best_other > 1e-12;
            if (unique && (log[i].a != scan[i].a || log[i].b != scan[i].b)) fail(fmt("step %zu merged another pair", i));
        }
        if (f % 5 == 0 && k >= 3 && k_real < k && (log.front().similarity < 1.0 - 1e-12))
            fail("identical pair did not merge first");
        if (state.active_clusters() != k_real) fail("did not reach k_real");
        try {
            state.check_invariants(corpus);
        } catch (const std::logic_error& e) {
            fail(e.what());
        }
        std::vector<std::uint64_t> after(v, 0);
        for (const auto& c : state.clusters())
            for (std::size_t w = 0; w < v; ++w) after[w] += c.word_counts[w];
        if (after != per_word || state.assigned_docs() != corpus.size()) fail("counts not conserved");
    }
    return {failures == 0, fmt("%d fixtures (K <= 10) against an exhaustive pair scan, %d failures", fixtures_run,
                               failures) +
                               (first.empty() ? "" : "; first: " + first)};
}

Verdict entropy_properties() {
    const double eps = 1e-9;
    bool in_range = true, uniform_exact = true, monotone = true, single_ok = true;
    RandomStream rng(5, 0);
    for (int t = 0; t < 50; ++t) {
        const auto corpus = fixtures::random_corpus(40, 25, 10, rng);
        const auto state = fixtures::random_state(corpus, 2 + rng.below(9), 0.1, rng);
        for (double h : word_entropy(state, eps, true).h) in_range &= h >= 0.0 && h <= 1.0;
    }

    // Word 0 spread over K clusters: uniform, then concentrating; word 1 pads every cluster.
    double worst_single = 0.0, worst_ratio = 0.0;
    for (std::size_t k : {2u, 3u, 5u, 10u, 40u}) {
        auto entropy_of = [&](const std::vector<std::uint32_t>& counts) {
            Vocabulary vocab;
            vocab.intern("w");
            vocab.intern("pad");
            std::vector<Document> docs;
            std::vector<ClusterId> z;
            for (std::size_t c = 0; c < k; ++c) {
                std::vector<WordCount> wc;
                if (counts[c]) wc.push_back({0, counts[c]});
                wc.push_back({1, 1});
                docs.push_back(Document::from_counts("d" + std::to_string(c), wc));
                z.push_back(static_cast<ClusterId>(c));
            }
            const Corpus corpus(std::move(docs), std::move(vocab));
            return word_entropy(ModelState::from_assignments(corpus, z, k, 0.1), eps, true).h[0];
        };
        for (std::uint32_t n : {1u, 3u, 17u}) uniform_exact &= entropy_of(std::vector<std::uint32_t>(k, n)) == 1.0;

        double prev = 2.0;
        for (std::size_t spread = k; spread >= 1; --spread) {
            std::vector<std::uint32_t> counts(k, 0);
            for (std::size_t c = 0; c < spread; ++c) counts[c] = 6;
            const double h = entropy_of(counts);
            monotone &= h < prev;
            prev = h;
        }

        // A word seen once, in one cluster: H = (K-1) (eps/N) (1 + ln(N/eps)) / ln K to first order.
        const double h = entropy_of([&] {
            std::vector<std::uint32_t> c(k, 0);
            c[0] = 1;
            return c;
        }());
        const double scale = (k - 1) * eps * (1.0 + std::log(1.0 / eps)) / std::log(static_cast<double>(k));
        single_ok &= h > 0.0 && h <= 10.0 * scale;
        worst_single = std::max(worst_single, h);
        worst_ratio = std::max(worst_ratio, h / scale);
    }
    return {in_range && uniform_exact && monotone && single_ok,
            fmt("range [0,1] %s, uniform words exactly 1.0 %s, monotone under concentration %s, single-cluster max %.3g "
                "(%.2fx its eps-scale, limit 10x)",
                in_range ? "ok" : "FAILED", uniform_exact ? "ok" : "FAILED", monotone ? "ok" : "FAILED", worst_single,
                worst_ratio)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism(const GeneratedCorpus& g) {
    const auto dir = fixtures::scratch_dir("acceptance_determinism");
    std::ostringstream sink;
    auto cli = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "gsdmm");
        return gsdmm::cli::run(args, sink, sink);
    };
    const auto data = (dir / "s.jsonl").string();
    const auto arch = (dir / "arch").string();
    if (cli({"synth", "--k", "8", "--v", "2000", "--d", "2000", "--doc-len", "8", "--beta-gen", "0.01", "--seed", "2024",
             "--out", data}) != 0 ||
        cli({"preprocess", "--input", data, "--out", arch}) != 0)
        return {false, "pipeline setup failed: " + sink.str()};

    int identical = 0, compared = 0;
    for (const char* algo : {"gsdmm", "gsdmm+"}) {
        for (const char* seed : {"1", "7"}) {
            std::string files[2];
            for (int rep = 0; rep < 2; ++rep) {
                const auto out = dir / fmt("%s_%s_%d", algo, seed, rep);
                if (cli({"cluster", "--corpus", arch, "--out", out.string(), "--algorithm", algo, "--kmax", "40",
                         "--kreal", "8", "--seed", seed, "--trace"}) != 0)
                    return {false, "cluster run failed: " + sink.str()};
                files[rep] = slurp(out / "assignments.csv");
            }
            ++compared;
            identical += !files[0].empty() && files[0] == files[1];
        }
    }

    // Library-level reruns of the recovery configuration, serialized the same way.
    for (int algo = 0; algo < 2; ++algo) {
        auto cfg = RunConfig::defaults(algo ? Algorithm::GsdmmPlus : Algorithm::Gsdmm);
        cfg.k_max = 40;
        if (algo) cfg.k_real = 8;
        cfg.seed = 3;
        std::string text[2];
        for (auto& t : text) {
            std::ostringstream os;
            write_assignments_csv(os, g.corpus, run(g.corpus, cfg, invariants.observer(g.corpus, algo == 1)).assignments);
            t = os.str();
        }
        ++compared;
        identical += text[0] == text[1];
    }
    return {identical == compared, fmt("%d/%d repeated runs produced byte-identical assignment files", identical, compared)};
}

double per_sweep_seconds(std::size_t d) {
    GenSpec spec;
    spec.k = 8;
    spec.v = 2000;
    spec.d = d;
    spec.doc_len = 8;
    spec.beta_gen = 0.01;
    spec.seed = 31;
    const auto g = generate_corpus(spec);
    auto cfg = RunConfig::defaults(Algorithm::Gsdmm);
    cfg.k_max = 40;
    RandomStream init(1, Stream::Init), sweep(1, Stream::Sweep);
    auto state = random_init(g.corpus, cfg, init);
    WeightingScheme w = UniformBeta{cfg.beta};
    gibbs_sweep(state, g.corpus, w, {}, sweep);
    std::vector<double> t;
    for (int i = 0; i < 9; ++i) {
        const auto t0 = Clock::now();
        gibbs_sweep(state, g.corpus, w, {}, sweep);
        t.push_back(seconds_since(t0));
    }
    if (state.active_clusters() != 40) throw std::logic_error("cluster count changed during timing");
    return median(t);
}

Verdict scaling() {
    const double small = per_sweep_seconds(5000);
    const double large = per_sweep_seconds(10000);
    const double ratio = large / small;
    return {ratio >= 1.6 && ratio <= 2.8,
            fmt("per-sweep median %.2f ms (D=5000) vs %.2f ms (D=10000), ratio %.2f, K=40 fixed, mean length 8",
                small * 1e3, large * 1e3, ratio)};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const char* names[] = {"",
                           "score equals the log-gamma ratio oracle",
                           "conditional equals exhaustive joint enumeration",
                           "GSDMM synthetic recovery",
                           "GSDMM+ synthetic recovery",
                           "count invariants after every sweep",
                           "ACC equals brute-force assignment",
                           "greedy merge picks the global best pair",
                           "word entropy properties",
                           "byte-identical reruns",
                           "per-sweep time scales linearly in D"};
    std::vector<Verdict> v(11);
    auto guarded = [](const std::function<Verdict()>& f) -> Verdict {
        try {
            return f();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };

    v[1] = guarded(oracle_equivalence);
    v[2] = guarded(enumeration_equivalence);
    const auto corpus = recovery_corpus();
    RecoveryRuns runs;
    const auto recovery = guarded([&] {
        runs = run_recovery(corpus);
        return Verdict{true, ""};
    });
    v[3] = recovery.pass ? gsdmm_recovery(runs) : recovery;
    v[4] = recovery.pass ? gsdmm_plus_recovery(runs) : recovery;
    v[6] = guarded(accuracy_oracle);
    v[7] = guarded(merge_correctness);
    v[8] = guarded(entropy_properties);
    v[9] = guarded([&] { return determinism(corpus); });
    v[10] = guarded(scaling);
    v[5] = count_invariants();

    int failed = 0;
    for (int i = 1; i <= 10; ++i) {
        std::cout << (v[i].pass ? "PASS" : "FAIL") << "  criterion " << i << ": " << names[i] << " | " << v[i].detail
                  << std::endl;
        failed += !v[i].pass;
    }
    std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
    return failed ? 1 : 0;
}
