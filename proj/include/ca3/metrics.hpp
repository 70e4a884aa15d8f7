#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ca3/core.hpp"
#include "ca3/patterns.hpp"

namespace ca3 {

// Overlap of binary supports. Two empty supports count as a perfect match.
inline double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    require(a.size() == b.size(), "jaccard: length mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0, y = b[i] != 0;
        inter += x && y;
        uni += x || y;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

// Cosine similarity; either vector all-zero gives 0.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "cosine: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Pearson correlation; nullopt when either side has zero variance. Callers exclude
// the undefined case from aggregation and count it instead.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "pearson: length mismatch");
    require(a.size() >= 2, "pearson: need at least two entries");
    const double n = double(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

// Top-`budget` units by rate; ties broken toward the lowest index.
inline std::vector<std::uint8_t> binarize_rates(std::span<const double> rates, int budget) {
    require(budget >= 0, "binarize_rates: budget must be >= 0");
    require(std::size_t(budget) <= rates.size(), "binarize_rates: budget exceeds unit count");
    std::vector<std::size_t> idx(rates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&rates](std::size_t i, std::size_t j) {
        if (rates[i] != rates[j]) return rates[i] > rates[j];
        return i < j;
    });
    std::vector<std::uint8_t> out(rates.size(), 0);
    for (int k = 0; k < budget; ++k) out[idx[std::size_t(k)]] = 1;
    return out;
}

// Mean of the stored patterns other than the target; the competing-memory baseline.
// A single stored pattern yields the zero vector.
inline std::vector<double> chance_prototype(const std::vector<Pattern>& stored,
                                            int target_index) {
    require(!stored.empty(), "chance_prototype: no stored patterns");
    require(target_index >= 0 && target_index < int(stored.size()),
            "chance_prototype: target index out of range");
    std::vector<double> proto(stored.front().size(), 0.0);
    int others = 0;
    for (int k = 0; k < int(stored.size()); ++k) {
        if (k == target_index) continue;
        const Pattern& p = stored[std::size_t(k)];
        require(p.size() == proto.size(), "chance_prototype: pattern length mismatch");
        for (std::size_t i = 0; i < proto.size(); ++i) proto[i] += p.bits[i];
        ++others;
    }
    if (others > 0)
        for (double& v : proto) v /= double(others);
    return proto;
}

inline double margin(double value_target, double value_chance) {
    return value_target - value_chance;
}

inline std::optional<double> margin(std::optional<double> value_target,
                                    std::optional<double> value_chance) {
    if (!value_target || !value_chance) return std::nullopt;
    return *value_target - *value_chance;
}

struct RecallMetrics {
    double jaccard_target = 0.0, jaccard_chance = 0.0, jaccard_margin = 0.0;
    double cosine_target = 0.0, cosine_chance = 0.0, cosine_margin = 0.0;
    std::optional<double> pearson_target, pearson_chance, pearson_margin;
};

// Score one recall: the binary comparison binarizes both the recall rates and the
// chance prototype at the target budget; cosine and Pearson run on raw rates
// against the 0/1 target and the real-valued prototype.
inline RecallMetrics score_recall(std::span<const double> rates, const Pattern& target,
                                  const std::vector<double>& chance_proto) {
    require(rates.size() == target.size(), "score_recall: rate/target length mismatch");
    require(chance_proto.size() == target.size(), "score_recall: prototype length mismatch");
    const int budget = target.active_count();
    const std::vector<std::uint8_t> recalled = binarize_rates(rates, budget);
    const std::vector<std::uint8_t> chance_bits = binarize_rates(chance_proto, budget);

    std::vector<double> target_real(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) target_real[i] = target.bits[i];

    RecallMetrics m;
    m.jaccard_target = jaccard(recalled, target.bits);
    m.jaccard_chance = jaccard(recalled, chance_bits);
    m.jaccard_margin = margin(m.jaccard_target, m.jaccard_chance);
    m.cosine_target = cosine(rates, target_real);
    m.cosine_chance = cosine(rates, chance_proto);
    m.cosine_margin = margin(m.cosine_target, m.cosine_chance);
    m.pearson_target = pearson(rates, target_real);
    m.pearson_chance = pearson(rates, chance_proto);
    m.pearson_margin = margin(m.pearson_target, m.pearson_chance);
    return m;
}

} // namespace ca3
