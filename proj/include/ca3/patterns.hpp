#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ca3/core.hpp"
#include "ca3/rng.hpp"

namespace ca3 {

struct Pattern {
    std::vector<std::uint8_t> bits;
    double sparsity = 0.0;

    std::size_t size() const { return bits.size(); }
    int active_count() const {
        int n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }
    std::vector<int> support() const {
        std::vector<int> s;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) s.push_back(int(i));
        return s;
    }
};

inline Pattern pattern_from_support(std::size_t n, const std::vector<int>& support) {
    Pattern p;
    p.bits.assign(n, 0);
    for (int i : support) p.bits[std::size_t(i)] = 1;
    p.sparsity = n ? double(p.active_count()) / double(n) : 0.0;
    return p;
}

enum class PatternKind { Auto, Paired, Sequence };

struct PatternSet {
    PatternKind kind = PatternKind::Auto;
    std::size_t n = 0;
    std::vector<Pattern> items;                        // auto patterns or sequence frames
    std::vector<std::pair<Pattern, Pattern>> pairs;    // paired kind only

    int count() const {
        return kind == PatternKind::Paired ? int(pairs.size()) : int(items.size());
    }
};

// Exact per-pattern active-bit budget ceil(a * n); the epsilon absorbs cases like
// 0.2 * 20 landing a hair above the integer.
inline int active_budget(std::size_t n, double a) {
    require(a > 0.0 && a <= 1.0, "sparsity a must lie in (0, 1]");
    const int budget = int(std::ceil(a * double(n) - 1e-9));
    require(budget >= 1, "degenerate sparsity: ceil(a * n) = 0");
    return budget;
}

namespace detail {

// Deal supports round-robin from successive shuffled copies of `pool`. Within one
// copy every index is dealt at most once, so K * budget <= pool size gives pairwise
// disjoint supports, and in general patterns overlap by at most (copies used - 1).
inline std::vector<std::vector<int>> deal_supports(const std::vector<int>& pool, int k,
                                                   int budget, Rng& rng) {
    require(budget <= int(pool.size()), "sparsity budget exceeds index pool");
    std::vector<std::vector<int>> sup(static_cast<std::size_t>(k));
    std::vector<std::set<int>> member(static_cast<std::size_t>(k));
    std::vector<int> deck;
    const auto refill = [&deck, &pool, &rng] {
        deck = pool;
        rng.shuffle(deck);
    };
    refill();
    int p = 0;
    int remaining = k * budget;
    while (remaining > 0) {
        auto& s = sup[std::size_t(p)];
        if (int(s.size()) == budget) {
            p = (p + 1) % k;
            continue;
        }
        bool dealt = false;
        for (std::size_t i = 0; i < deck.size(); ++i) {
            if (member[std::size_t(p)].count(deck[i])) continue;
            s.push_back(deck[i]);
            member[std::size_t(p)].insert(deck[i]);
            deck.erase(deck.begin() + std::ptrdiff_t(i));
            dealt = true;
            break;
        }
        if (!dealt) {
            refill();  // this copy cannot serve pattern p; deal from a fresh one
            continue;
        }
        --remaining;
        p = (p + 1) % k;
    }
    return sup;
}

} // namespace detail

// K sparse patterns with exactly ceil(a * n) active bits each; supports pairwise
// disjoint whenever K * ceil(a * n) <= n, otherwise dealt round-robin to keep the
// maximum pairwise overlap minimal.
inline PatternSet gen_orthogonal_sparse(std::size_t n, int k, double a, std::uint64_t seed) {
    require(n >= 1, "pattern length must be >= 1");
    require(k >= 1, "pattern count must be >= 1");
    const int budget = active_budget(n, a);
    std::vector<int> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = int(i);
    Rng rng(derive_seed(seed, "patterns:auto"));
    PatternSet set;
    set.kind = PatternKind::Auto;
    set.n = n;
    for (const auto& s : detail::deal_supports(pool, k, budget, rng))
        set.items.push_back(pattern_from_support(n, s));
    return set;
}

// Remove floor(mask_frac * active) active bits, chosen uniformly; never adds bits.
inline Pattern mask_cue(const Pattern& p, double mask_frac, std::uint64_t seed) {
    require(mask_frac >= 0.0 && mask_frac <= 1.0, "mask_frac must lie in [0, 1]");
    std::vector<int> support = p.support();
    const int drop = int(std::floor(mask_frac * double(support.size()) + 1e-9));
    Rng rng(derive_seed(seed, "mask-cue"));
    rng.shuffle(support);
    Pattern cue = p;
    for (int i = 0; i < drop; ++i) cue.bits[std::size_t(support[std::size_t(i)])] = 0;
    cue.sparsity = p.size() ? double(cue.active_count()) / double(p.size()) : 0.0;
    return cue;
}

struct InjectionMode {
    enum class Kind { Dc, Bernoulli };
    Kind kind = Kind::Dc;
    double amplitude = 1.5;
    double p_high = 1.0;  // per-tick emission probability on active bits
    double p_low = 0.0;   // and on inactive bits

    void validate() const {
        require(amplitude >= 0.0, "injection.amplitude must be >= 0");
        require(p_high >= 0.0 && p_high <= 1.0, "injection.p_high must lie in [0, 1]");
        require(p_low >= 0.0 && p_low <= 1.0, "injection.p_low must lie in [0, 1]");
    }
};

// Tick-by-tick current rows for one pattern presentation.
inline std::vector<std::vector<double>> to_currents(const Pattern& p, const InjectionMode& mode,
                                                    int t_ticks, std::uint64_t seed) {
    require(t_ticks >= 1, "to_currents: t_ticks must be >= 1");
    mode.validate();
    std::vector<std::vector<double>> rows(std::size_t(t_ticks),
                                          std::vector<double>(p.size(), 0.0));
    if (mode.kind == InjectionMode::Kind::Dc) {
        for (auto& row : rows)
            for (std::size_t i = 0; i < p.size(); ++i) row[i] = mode.amplitude * p.bits[i];
        return rows;
    }
    Rng rng(derive_seed(seed, "inject:bernoulli"));
    for (auto& row : rows)
        for (std::size_t i = 0; i < p.size(); ++i)
            if (rng.bernoulli(p.bits[i] ? mode.p_high : mode.p_low)) row[i] = mode.amplitude;
    return rows;
}

// Frame 0 is one sparse pattern; every later frame is the previous support
// circularly shifted by `shift` positions.
inline PatternSet gen_sequence(std::size_t n, int frames, double a, int shift,
                               std::uint64_t seed) {
    require(frames >= 1, "sequence frame count must be >= 1");
    PatternSet set = gen_orthogonal_sparse(n, 1, a, seed);
    set.kind = PatternKind::Sequence;
    const int s = int(((std::int64_t(shift) % std::int64_t(n)) + std::int64_t(n)) %
                      std::int64_t(n));
    for (int f = 1; f < frames; ++f) {
        const Pattern& prev = set.items.back();
        std::vector<int> moved;
        for (int i : prev.support()) moved.push_back((i + s) % int(n));
        set.items.push_back(pattern_from_support(n, moved));
    }
    return set;
}

// K pairs (A_i, B_i): A over the first half of the index space, B over the second,
// each with the full ceil(a * n) budget.
inline PatternSet gen_paired(std::size_t n, int k, double a, std::uint64_t seed) {
    require(n >= 2, "paired patterns need n >= 2");
    require(k >= 1, "pattern count must be >= 1");
    const int budget = active_budget(n, a);
    const std::size_t half = n / 2;
    require(budget <= int(half), "paired sparsity budget exceeds half the index space");
    std::vector<int> lo, hi;
    for (std::size_t i = 0; i < half; ++i) lo.push_back(int(i));
    for (std::size_t i = half; i < n; ++i) hi.push_back(int(i));
    Rng rng(derive_seed(seed, "patterns:paired"));
    const auto a_sup = detail::deal_supports(lo, k, budget, rng);
    const auto b_sup = detail::deal_supports(hi, k, budget, rng);
    PatternSet set;
    set.kind = PatternKind::Paired;
    set.n = n;
    for (int i = 0; i < k; ++i)
        set.pairs.emplace_back(pattern_from_support(n, a_sup[std::size_t(i)]),
                               pattern_from_support(n, b_sup[std::size_t(i)]));
    return set;
}

// Plain-text matrix format: one pattern per line, characters '0'/'1'. Paired sets
// interleave A_1, B_1, A_2, B_2, ...
inline std::string to_text(const PatternSet& set) {
    std::string out;
    const auto emit = [&out](const Pattern& p) {
        for (std::uint8_t b : p.bits) out += b ? '1' : '0';
        out += '\n';
    };
    if (set.kind == PatternKind::Paired) {
        for (const auto& [a, b] : set.pairs) {
            emit(a);
            emit(b);
        }
    } else {
        for (const Pattern& p : set.items) emit(p);
    }
    return out;
}

inline PatternSet parse_text(PatternKind kind, const std::string& text) {
    std::vector<Pattern> rows;
    std::string line;
    const auto flush = [&rows, &line] {
        if (line.empty()) return;
        Pattern p;
        for (char c : line) {
            require(c == '0' || c == '1', "pattern text: expected only '0'/'1' characters");
            p.bits.push_back(c == '1');
        }
        p.sparsity = double(p.active_count()) / double(p.bits.size());
        rows.push_back(std::move(p));
        line.clear();
    };
    for (char c : text) {
        if (c == '\n') flush();
        else if (c != '\r') line += c;
    }
    flush();
    require(!rows.empty(), "pattern text: no patterns found");
    for (const Pattern& p : rows)
        require(p.size() == rows.front().size(), "pattern text: unequal line lengths");
    PatternSet set;
    set.kind = kind;
    set.n = rows.front().size();
    if (kind == PatternKind::Paired) {
        require(rows.size() % 2 == 0, "pattern text: paired sets need an even line count");
        for (std::size_t i = 0; i + 1 < rows.size(); i += 2)
            set.pairs.emplace_back(rows[i], rows[i + 1]);
    } else {
        set.items = std::move(rows);
    }
    return set;
}

} // namespace ca3
