#include "gsdmm/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsdmm/error.hpp"

namespace gsdmm {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

template <typename T>
T parse_uint(std::string_view s, std::size_t line, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw MalformedRecordError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return value;
}

std::string fixed(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed << x;
    return os.str();
}

}  // namespace

void write_archive(const fs::path& dir, const Corpus& corpus, std::span<const std::string> dropped) {
    fs::create_directories(dir);
    const auto& vocab = corpus.vocabulary();
    {
        auto out = open_out(dir / "vocab.tsv");
        for (WordId w = 0; w < vocab.size(); ++w) out << w << '\t' << vocab.word(w) << '\t' << vocab.doc_freq(w) << '\n';
    }
    {
        auto out = open_out(dir / "documents.tsv");
        for (const auto& doc : corpus.documents()) {
            if (doc.doc_id.find_first_of("\t\n") != std::string::npos)
                throw Error(Errc::MalformedRecord, "document id contains a tab or newline: " + doc.doc_id);
            out << doc.doc_id << '\t' << doc.gold_label.value_or("") << '\t';
            for (std::size_t i = 0; i < doc.counts.size(); ++i)
                out << (i ? " " : "") << doc.counts[i].word << ':' << doc.counts[i].count;
            out << '\n';
        }
    }
    {
        const auto& s = corpus.stats();
        nlohmann::ordered_json j;
        j["D"] = s.num_docs;
        j["V"] = s.vocab_size;
        j["mean_len"] = s.mean_len;
        j["max_len"] = s.max_len;
        j["dropped"] = std::vector<std::string>(dropped.begin(), dropped.end());
        auto out = open_out(dir / "stats.json");
        out << j.dump(2) << '\n';
    }
}

CorpusArchive read_archive(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(Errc::IoError, "corpus archive not found: " + dir.string());

    Vocabulary vocab;
    const auto vocab_lines = read_lines(dir / "vocab.tsv");
    for (std::size_t i = 0; i < vocab_lines.size(); ++i) {
        if (vocab_lines[i].empty()) continue;
        const auto cols = split(vocab_lines[i], '\t');
        if (cols.size() != 3) throw MalformedRecordError(i + 1, "vocab.tsv needs 3 columns");
        const auto id = parse_uint<WordId>(cols[0], i + 1, "word id");
        if (id != vocab.size()) throw MalformedRecordError(i + 1, "word ids must be contiguous from 0");
        const auto assigned = vocab.intern(std::string(cols[1]));
        if (assigned != id) throw MalformedRecordError(i + 1, "duplicate word in vocab.tsv");
        vocab.set_doc_freq(id, parse_uint<std::size_t>(cols[2], i + 1, "doc_freq"));
    }

    std::vector<Document> docs;
    const auto doc_lines = read_lines(dir / "documents.tsv");
    for (std::size_t i = 0; i < doc_lines.size(); ++i) {
        if (doc_lines[i].empty()) continue;
        const auto cols = split(doc_lines[i], '\t');
        if (cols.size() != 3) throw MalformedRecordError(i + 1, "documents.tsv needs 3 columns");
        std::vector<WordCount> counts;
        for (auto item : split(cols[2], ' ')) {
            if (item.empty()) continue;
            const auto colon = item.find(':');
            if (colon == std::string_view::npos) throw MalformedRecordError(i + 1, "expected word_id:count");
            const auto w = parse_uint<WordId>(item.substr(0, colon), i + 1, "word id");
            const auto c = parse_uint<std::uint32_t>(item.substr(colon + 1), i + 1, "count");
            if (w >= vocab.size()) throw MalformedRecordError(i + 1, "word id out of range");
            if (c == 0) throw MalformedRecordError(i + 1, "zero count");
            counts.push_back({w, c});
        }
        if (counts.empty()) throw MalformedRecordError(i + 1, "document without words");
        std::optional<std::string> label;
        if (!cols[1].empty()) label = std::string(cols[1]);
        docs.push_back(Document::from_counts(std::string(cols[0]), std::move(counts), std::move(label)));
    }

    CorpusArchive archive;
    std::ifstream stats_in(dir / "stats.json");
    if (stats_in) {
        try {
            const auto j = nlohmann::json::parse(stats_in);
            if (j.contains("dropped")) archive.dropped_doc_ids = j["dropped"].get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::MalformedRecord, std::string("stats.json: ") + e.what());
        }
    }
    archive.corpus = Corpus(std::move(docs), std::move(vocab));
    return archive;
}

void write_assignments_csv(std::ostream& out, const Corpus& corpus, std::span<const ClusterId> assignments) {
    if (assignments.size() != corpus.size()) throw Error(Errc::LengthMismatch, "assignment count != corpus size");
    out << "doc_id,cluster\n";
    for (std::size_t d = 0; d < corpus.size(); ++d) out << corpus[d].doc_id << ',' << assignments[d] << '\n';
}

std::vector<std::pair<std::string, ClusterId>> read_assignments_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    std::vector<std::pair<std::string, ClusterId>> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || (i == 0 && lines[i] == "doc_id,cluster")) continue;
        const auto comma = lines[i].rfind(',');
        if (comma == std::string::npos) throw MalformedRecordError(i + 1, "expected doc_id,cluster");
        out.emplace_back(lines[i].substr(0, comma),
                         parse_uint<ClusterId>(std::string_view(lines[i]).substr(comma + 1), i + 1, "cluster"));
    }
    return out;
}

void write_trace_csv(std::ostream& out, const SweepTrace& trace) {
    out << "iteration,active_clusters,moved_docs,acc,nmi\n";
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.active_clusters << ',' << r.moved_docs << ','
            << (r.acc ? fixed(*r.acc) : "") << ',' << (r.nmi ? fixed(*r.nmi) : "") << '\n';
    }
}

void write_merge_log_csv(std::ostream& out, const MergeLog& log) {
    out << "step,cluster_a,cluster_b,similarity\n";
    for (std::size_t i = 0; i < log.size(); ++i)
        out << i + 1 << ',' << log[i].a << ',' << log[i].b << ',' << fixed(log[i].similarity) << '\n';
}

std::string eval_report_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["acc"] = report.acc;
    j["nmi"] = report.nmi;
    j["k_pred"] = report.k_pred;
    j["k_gold"] = report.k_gold;
    return j.dump();
}

}  // namespace gsdmm
