#include "gsdmm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsdmm/error.hpp"

namespace gsdmm {

namespace detail {
extern const std::string_view kDefaultStopwords;
}

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

void TokenRules::validate() const {
    if (min_word_len < 1 || min_word_len > max_word_len)
        throw Error(Errc::InvalidConfig, "token rules require 1 <= min_word_len <= max_word_len");
    if (min_df < 1) throw Error(Errc::InvalidConfig, "token rules require min_df >= 1");
}

std::string light_stem(std::string_view word) {
    std::string w(word);
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies") && w.size() > 4) {
        w.resize(w.size() - 3);
        w += 'y';
    } else if (ends_with(w, "s") && w.size() > 3 && !ends_with(w, "ss") && !ends_with(w, "us") &&
               !ends_with(w, "is")) {
        w.pop_back();
    }
    return w;
}

std::vector<std::string> tokenize(std::string_view text, const TokenRules& rules) {
    std::vector<std::string> out;
    std::string current;

    auto flush = [&] {
        if (current.empty()) return;
        std::string token = std::move(current);
        current.clear();
        if (rules.stopwords.count(token)) return;
        if (rules.stemming) token = light_stem(token);
        const auto len = utf8_length(token);
        if (len < rules.min_word_len || len > rules.max_word_len) return;
        out.push_back(std::move(token));
    };

    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_ascii_alpha(c)) {
            current += rules.lowercase && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch;
        } else if (c >= 0x80 && !rules.strip_non_latin) {
            current += ch;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
    std::unordered_set<std::string> words;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto w = trim(text.substr(pos, nl - pos));
        if (!w.empty()) words.emplace(w);
        pos = nl + 1;
    }
    return words;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open stopword file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_stopwords(ss.str());
}

const std::unordered_set<std::string>& default_stopwords() {
    static const auto words = parse_stopwords(detail::kDefaultStopwords);
    return words;
}

WordId Vocabulary::intern(const std::string& word) {
    auto [it, inserted] = word_to_id_.try_emplace(word, static_cast<WordId>(id_to_word_.size()));
    if (inserted) {
        id_to_word_.push_back(word);
        doc_freq_.push_back(0);
    }
    return it->second;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
    auto it = word_to_id_.find(std::string(word));
    if (it == word_to_id_.end()) return std::nullopt;
    return it->second;
}

Document Document::from_counts(std::string doc_id, std::vector<WordCount> counts,
                               std::optional<std::string> label) {
    std::sort(counts.begin(), counts.end(), [](const WordCount& a, const WordCount& b) { return a.word < b.word; });
    Document doc{std::move(doc_id), {}, 0, std::move(label)};
    for (const auto& wc : counts) {
        if (wc.count == 0) continue;
        if (!doc.counts.empty() && doc.counts.back().word == wc.word) {
            doc.counts.back().count += wc.count;
        } else {
            doc.counts.push_back(wc);
        }
        doc.total_len += wc.count;
    }
    return doc;
}

Corpus::Corpus(std::vector<Document> docs, Vocabulary vocab) : docs_(std::move(docs)), vocab_(std::move(vocab)) {
    stats_.num_docs = docs_.size();
    stats_.vocab_size = vocab_.size();
    std::size_t total = 0;
    for (const auto& d : docs_) {
        total += d.total_len;
        stats_.max_len = std::max<std::size_t>(stats_.max_len, d.total_len);
    }
    stats_.mean_len = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

bool Corpus::fully_labeled() const {
    return !docs_.empty() &&
           std::all_of(docs_.begin(), docs_.end(), [](const Document& d) { return d.gold_label.has_value(); });
}

BuildResult build_corpus(const std::vector<RawDocument>& raw, const TokenRules& rules) {
    rules.validate();

    std::unordered_set<std::string> seen_ids;
    for (const auto& r : raw) {
        if (!seen_ids.insert(r.doc_id).second) throw Error(Errc::DuplicateDocId, "duplicate document id: " + r.doc_id);
    }

    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(raw.size());
    for (const auto& r : raw) tokens.push_back(tokenize(r.text, rules));

    std::unordered_map<std::string, std::size_t> df;
    for (const auto& toks : tokens) {
        std::unordered_set<std::string_view> uniq(toks.begin(), toks.end());
        for (auto w : uniq) ++df[std::string(w)];
    }

    Vocabulary vocab;
    for (const auto& toks : tokens) {
        for (const auto& t : toks) {
            const auto n = df.at(t);
            if (n >= rules.min_df) vocab.set_doc_freq(vocab.intern(t), n);
        }
    }

    BuildResult result;
    std::vector<Document> docs;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::map<WordId, std::uint32_t> counts;
        for (const auto& t : tokens[i]) {
            if (auto id = vocab.find(t)) ++counts[*id];
        }
        if (counts.empty()) {
            result.dropped_doc_ids.push_back(raw[i].doc_id);
            continue;
        }
        std::vector<WordCount> wc;
        wc.reserve(counts.size());
        for (auto [w, c] : counts) wc.push_back({w, c});
        docs.push_back(Document::from_counts(raw[i].doc_id, std::move(wc), raw[i].label));
    }
    if (docs.empty()) throw Error(Errc::AllDocumentsEmpty, "no document has any token left after filtering");

    result.corpus = Corpus(std::move(docs), std::move(vocab));
    return result;
}

namespace {

std::vector<RawDocument> parse_jsonl(std::string_view content) {
    std::vector<RawDocument> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        const auto line = trim(content.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        if (!obj.is_object()) throw MalformedRecordError(line_no, "expected a JSON object");

        RawDocument doc;
        auto id = obj.find("id");
        if (id == obj.end()) throw MalformedRecordError(line_no, "missing \"id\" field");
        if (id->is_string()) {
            doc.doc_id = id->get<std::string>();
        } else if (id->is_number_integer()) {
            doc.doc_id = id->dump();
        } else {
            throw MalformedRecordError(line_no, "\"id\" must be a string");
        }
        auto text = obj.find("text");
        if (text == obj.end() || !text->is_string())
            throw MalformedRecordError(line_no, "missing or non-string \"text\" field");
        doc.text = text->get<std::string>();
        if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
            if (label->is_string()) {
                doc.label = label->get<std::string>();
            } else if (label->is_number_integer()) {
                doc.label = label->dump();
            } else {
                throw MalformedRecordError(line_no, "\"label\" must be a string");
            }
        }
        out.push_back(std::move(doc));
    }
    return out;
}

std::vector<RawDocument> parse_tsv(std::string_view content) {
    std::vector<RawDocument> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        auto line = content.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        std::vector<std::string_view> cols;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (cols.size() != 2 && cols.size() != 3)
            throw MalformedRecordError(line_no, "expected 2 or 3 tab-separated columns, got " +
                                                    std::to_string(cols.size()));
        if (cols[0].empty()) throw MalformedRecordError(line_no, "empty document id");

        RawDocument doc;
        doc.doc_id = std::string(cols[0]);
        if (cols.size() == 3) {
            doc.label = std::string(cols[1]);
            doc.text = std::string(cols[2]);
        } else {
            doc.text = std::string(cols[1]);
        }
        out.push_back(std::move(doc));
    }
    return out;
}

}  // namespace

std::vector<RawDocument> parse_dataset(std::string_view content, DatasetFormat format) {
    return format == DatasetFormat::Jsonl ? parse_jsonl(content) : parse_tsv(content);
}

std::vector<RawDocument> read_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open dataset: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(Errc::IoError, "read failed: " + path);
    return parse_dataset(ss.str(), format);
}

}  // namespace gsdmm
