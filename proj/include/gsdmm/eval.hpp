#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gsdmm {

struct EvalReport {
    double acc = 0.0;
    double nmi = 0.0;
    std::size_t k_pred = 0;
    std::size_t k_gold = 0;
    std::vector<std::vector<std::size_t>> confusion;  // k_pred x k_gold
};

// Maps arbitrary labels to dense ids in first-appearance order.
std::vector<std::uint32_t> densify(std::span<const std::string> labels);
std::vector<std::uint32_t> densify(std::span<const std::uint32_t> labels);

// Throws LengthMismatch when the arrays differ in length or are empty.
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const std::uint32_t> pred,
                                                       std::span<const std::uint32_t> gold);

// Maximum total weight of a one-to-one row/column matching (Hungarian method).
// Rectangular inputs are zero-padded to square.
long long max_weight_matching(const std::vector<std::vector<long long>>& weights);

// Fraction of documents correctly labeled under the best one-to-one map of
// predicted clusters onto gold labels.
double accuracy(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold);

// I(pred; gold) / sqrt(H(pred) H(gold)), natural logs.
double nmi(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold);

EvalReport evaluate(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold);

}  // namespace gsdmm
