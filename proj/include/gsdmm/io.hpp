#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsdmm/corpus.hpp"
#include "gsdmm/eval.hpp"
#include "gsdmm/merge.hpp"
#include "gsdmm/sampler.hpp"

namespace gsdmm {

// On-disk corpus: a directory holding vocab.tsv (id, word, doc_freq),
// documents.tsv (doc_id, label, "word_id:count ...") and stats.json.
struct CorpusArchive {
    Corpus corpus;
    std::vector<std::string> dropped_doc_ids;
};

void write_archive(const std::filesystem::path& dir, const Corpus& corpus, std::span<const std::string> dropped);
CorpusArchive read_archive(const std::filesystem::path& dir);

void write_assignments_csv(std::ostream& out, const Corpus& corpus, std::span<const ClusterId> assignments);
std::vector<std::pair<std::string, ClusterId>> read_assignments_csv(const std::filesystem::path& path);

void write_trace_csv(std::ostream& out, const SweepTrace& trace);
void write_merge_log_csv(std::ostream& out, const MergeLog& log);

std::string eval_report_json(const EvalReport& report);

}  // namespace gsdmm
