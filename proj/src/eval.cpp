#include "gsdmm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gsdmm/error.hpp"

namespace gsdmm {

namespace {

template <typename T>
std::vector<std::uint32_t> densify_impl(std::span<const T> labels) {
    std::unordered_map<T, std::uint32_t> ids;
    std::vector<std::uint32_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        auto [it, _] = ids.try_emplace(l, static_cast<std::uint32_t>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

double entropy_of(const std::vector<std::size_t>& sizes, double total) {
    double h = 0.0;
    for (auto s : sizes) {
        if (s == 0) continue;
        const double p = static_cast<double>(s) / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::vector<std::uint32_t> densify(std::span<const std::string> labels) { return densify_impl(labels); }
std::vector<std::uint32_t> densify(std::span<const std::uint32_t> labels) { return densify_impl(labels); }

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const std::uint32_t> pred,
                                                       std::span<const std::uint32_t> gold) {
    if (pred.size() != gold.size() || pred.empty())
        throw Error(Errc::LengthMismatch, "prediction and gold arrays must be non-empty and equal in length (" +
                                              std::to_string(pred.size()) + " vs " + std::to_string(gold.size()) + ")");
    const std::size_t kp = *std::max_element(pred.begin(), pred.end()) + 1;
    const std::size_t kg = *std::max_element(gold.begin(), gold.end()) + 1;
    std::vector<std::vector<std::size_t>> conf(kp, std::vector<std::size_t>(kg, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) ++conf[pred[i]][gold[i]];
    return conf;
}

long long max_weight_matching(const std::vector<std::vector<long long>>& weights) {
    const std::size_t rows = weights.size();
    std::size_t cols = 0;
    for (const auto& r : weights) cols = std::max(cols, r.size());
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return 0;

    long long top = 0;
    for (const auto& r : weights)
        for (auto w : r) top = std::max(top, w);
    auto cost = [&](std::size_t i, std::size_t j) {
        const long long w = (i < rows && j < weights[i].size()) ? weights[i][j] : 0;
        return top - w;
    };

    // Shortest augmenting path with potentials, 1-based with a virtual column 0.
    constexpr long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            long long delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    long long total = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j] - 1;
        if (i < rows && j - 1 < weights[i].size()) total += weights[i][j - 1];
    }
    return total;
}

double accuracy(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold) {
    const auto conf = confusion_matrix(pred, gold);
    std::vector<std::vector<long long>> w(conf.size());
    for (std::size_t i = 0; i < conf.size(); ++i) w[i].assign(conf[i].begin(), conf[i].end());
    return static_cast<double>(max_weight_matching(w)) / static_cast<double>(pred.size());
}

double nmi(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold) {
    const auto conf = confusion_matrix(pred, gold);
    const double total = static_cast<double>(pred.size());
    std::vector<std::size_t> rows(conf.size(), 0), cols(conf.front().size(), 0);
    for (std::size_t i = 0; i < conf.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            rows[i] += conf[i][j];
            cols[j] += conf[i][j];
        }
    }
    const double hp = entropy_of(rows, total);
    const double hg = entropy_of(cols, total);
    if (hp == 0.0 && hg == 0.0) return 1.0;
    if (hp == 0.0 || hg == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (conf[i][j] == 0) continue;
            const double nij = static_cast<double>(conf[i][j]);
            mi += nij / total * std::log(nij * total / (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
        }
    }
    return std::clamp(mi / std::sqrt(hp * hg), 0.0, 1.0);
}

EvalReport evaluate(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gold) {
    EvalReport r;
    r.confusion = confusion_matrix(pred, gold);
    r.acc = accuracy(pred, gold);
    r.nmi = nmi(pred, gold);
    r.k_pred = static_cast<std::size_t>(std::count_if(r.confusion.begin(), r.confusion.end(), [](const auto& row) {
        return std::any_of(row.begin(), row.end(), [](std::size_t x) { return x > 0; });
    }));
    std::size_t kg = 0;
    for (std::size_t j = 0; j < r.confusion.front().size(); ++j) {
        bool used = false;
        for (const auto& row : r.confusion) used = used || row[j] > 0;
        kg += used;
    }
    r.k_gold = kg;
    return r;
}

}  // namespace gsdmm
