#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "gsdmm/corpus.hpp"
#include "gsdmm/model.hpp"
#include "gsdmm/random.hpp"

namespace fixtures {

// Corpus from pre-tokenized documents; every word kept.
inline gsdmm::Corpus make_corpus(const std::vector<std::string>& texts,
                                 const std::vector<std::string>& labels = {}) {
    std::vector<gsdmm::RawDocument> raw;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        gsdmm::RawDocument r{"d" + std::to_string(i), texts[i], std::nullopt};
        if (!labels.empty()) r.label = labels[i];
        raw.push_back(std::move(r));
    }
    gsdmm::TokenRules rules;
    rules.min_df = 1;
    rules.min_word_len = 1;
    return gsdmm::build_corpus(raw, rules).corpus;
}

// Random corpus with D docs over V word ids, lengths in [1, max_len].
inline gsdmm::Corpus random_corpus(std::size_t d, std::size_t v, std::size_t max_len, gsdmm::RandomStream& rng) {
    gsdmm::Vocabulary vocab;
    for (std::size_t w = 0; w < v; ++w) vocab.intern("w" + std::to_string(w));
    std::vector<gsdmm::Document> docs;
    for (std::size_t i = 0; i < d; ++i) {
        const auto len = 1 + rng.below(max_len);
        std::vector<std::uint32_t> c(v, 0);
        for (std::size_t j = 0; j < len; ++j) ++c[rng.below(v)];
        std::vector<gsdmm::WordCount> counts;
        for (std::size_t w = 0; w < v; ++w)
            if (c[w]) counts.push_back({static_cast<gsdmm::WordId>(w), c[w]});
        docs.push_back(gsdmm::Document::from_counts("r" + std::to_string(i), std::move(counts)));
    }
    return gsdmm::Corpus(std::move(docs), std::move(vocab));
}

inline gsdmm::ModelState random_state(const gsdmm::Corpus& corpus, std::size_t k, double alpha,
                                      gsdmm::RandomStream& rng) {
    std::vector<gsdmm::ClusterId> z(corpus.size());
    for (auto& x : z) x = static_cast<gsdmm::ClusterId>(rng.below(k));
    return gsdmm::ModelState::from_assignments(corpus, z, k, alpha);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* base = std::getenv("GSDMM_TEST_TMP");
    auto dir = (base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "gsdmm_tests") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
