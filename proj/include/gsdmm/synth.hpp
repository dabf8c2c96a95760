#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gsdmm/corpus.hpp"
#include "gsdmm/model.hpp"

namespace gsdmm {

struct GenSpec {
    std::size_t k = 8;
    std::size_t v = 2000;
    std::size_t d = 2000;
    std::size_t doc_len = 8;
    // When set, lengths are 1 + Poisson(mean_len - 1) instead of fixed.
    std::optional<double> mean_len;
    double alpha_gen = 1.0;
    double beta_gen = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GeneratedCorpus {
    Corpus corpus;
    std::vector<RawDocument> raw;
    std::vector<std::uint32_t> labels;          // true component per document
    std::vector<double> theta;                  // mixture weights
    std::vector<std::vector<double>> phi;       // k x v word distributions
    std::vector<std::size_t> source_word;       // corpus word id -> generator word index
};

// Alphabetic token for generator word `index`, safe for the default tokenizer.
std::string synthetic_word(std::size_t index, std::size_t v);

GeneratedCorpus generate_corpus(const GenSpec& spec);

// One JSON object per document with id, text and label.
void write_jsonl(std::ostream& out, const std::vector<RawDocument>& docs);

// Unnormalized conditional of `doc` joining z computed from Dirichlet
// normalizers via log-Gamma over the whole vocabulary.
double oracle_delta_ratio(const Document& doc, ClusterId z, const ModelState& state, const WeightingScheme& w);

// Exhaustive table of the collapsed joint p(docs, z) over all k^D assignments.
class JointEnumeration {
public:
    JointEnumeration(const Corpus& corpus, std::size_t k, double alpha, const WeightingScheme& w);

    std::size_t num_assignments() const { return log_joint_.size(); }
    double log_joint(std::span<const ClusterId> z) const;
    // Log of the sum of joints over every assignment.
    double log_normalizer() const;
    // p(z_d = . | z_{not d}); entry d of `z` is ignored.
    std::vector<double> conditional(std::size_t d, std::span<const ClusterId> z) const;

private:
    std::size_t index_of(std::span<const ClusterId> z) const;

    std::size_t num_docs_;
    std::size_t k_;
    std::vector<double> log_joint_;
};

JointEnumeration oracle_enumerate_joint(const Corpus& corpus, std::size_t k, double alpha, const WeightingScheme& w);

// Exact accuracy by trying every injective map of predicted clusters onto labels.
double oracle_assignment_bruteforce(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold);

}  // namespace gsdmm
