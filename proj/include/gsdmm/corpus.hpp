#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gsdmm {

using WordId = std::uint32_t;

struct TokenRules {
    bool lowercase = true;
    bool strip_non_latin = true;
    std::unordered_set<std::string> stopwords;
    bool stemming = false;
    std::size_t min_word_len = 2;
    std::size_t max_word_len = 15;
    std::size_t min_df = 2;

    // Throws Error(InvalidConfig) when the length bounds or min_df are out of range.
    void validate() const;
};

// Lightweight plural-folding stemmer ("cities" -> "city", "votes" -> "vote").
std::string light_stem(std::string_view word);

std::vector<std::string> tokenize(std::string_view text, const TokenRules& rules);

// Parses one word per line; blank lines and surrounding whitespace are ignored.
std::unordered_set<std::string> parse_stopwords(std::string_view text);
std::unordered_set<std::string> load_stopwords(const std::string& path);
// The English list bundled with the library.
const std::unordered_set<std::string>& default_stopwords();

class Vocabulary {
public:
    Vocabulary() = default;

    // Returns the id of `word`, appending it with doc_freq 0 if unseen.
    WordId intern(const std::string& word);
    void set_doc_freq(WordId id, std::size_t df) { doc_freq_.at(id) = df; }

    std::optional<WordId> find(std::string_view word) const;
    const std::string& word(WordId id) const { return id_to_word_.at(id); }
    std::size_t doc_freq(WordId id) const { return doc_freq_.at(id); }
    std::size_t size() const { return id_to_word_.size(); }

    const std::vector<std::string>& words() const { return id_to_word_; }

private:
    std::unordered_map<std::string, WordId> word_to_id_;
    std::vector<std::string> id_to_word_;
    std::vector<std::size_t> doc_freq_;
};

struct WordCount {
    WordId word;
    std::uint32_t count;

    bool operator==(const WordCount&) const = default;
};

struct Document {
    std::string doc_id;
    std::vector<WordCount> counts;  // sorted by word id, counts > 0
    std::uint32_t total_len = 0;
    std::optional<std::string> gold_label;

    static Document from_counts(std::string doc_id, std::vector<WordCount> counts,
                                std::optional<std::string> label = std::nullopt);
};

struct CorpusStats {
    std::size_t num_docs = 0;
    std::size_t vocab_size = 0;
    double mean_len = 0.0;
    std::size_t max_len = 0;
};

class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Document> docs, Vocabulary vocab);

    const std::vector<Document>& documents() const { return docs_; }
    const Document& operator[](std::size_t d) const { return docs_[d]; }
    const Vocabulary& vocabulary() const { return vocab_; }
    const CorpusStats& stats() const { return stats_; }

    std::size_t size() const { return docs_.size(); }
    std::size_t vocab_size() const { return vocab_.size(); }

    // True when every document carries a gold label.
    bool fully_labeled() const;

private:
    std::vector<Document> docs_;
    Vocabulary vocab_;
    CorpusStats stats_;
};

struct RawDocument {
    std::string doc_id;
    std::string text;
    std::optional<std::string> label;
};

struct BuildResult {
    Corpus corpus;
    std::vector<std::string> dropped_doc_ids;  // emptied by filtering
};

BuildResult build_corpus(const std::vector<RawDocument>& raw, const TokenRules& rules);

enum class DatasetFormat { Jsonl, Tsv };

std::vector<RawDocument> read_dataset(const std::string& path, DatasetFormat format);
std::vector<RawDocument> parse_dataset(std::string_view content, DatasetFormat format);

}  // namespace gsdmm
