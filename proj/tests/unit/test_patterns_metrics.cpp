#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ca3/metrics.hpp"
#include "ca3/patterns.hpp"

using namespace ca3;
using Catch::Approx;

TEST_CASE("active budget is the ceiling of a times n") {
    REQUIRE(active_budget(16, 0.25) == 4);
    REQUIRE(active_budget(10, 0.25) == 3);
    REQUIRE(active_budget(64, 0.15) == 10);
    REQUIRE(active_budget(20, 0.2) == 4);  // 0.2 * 20 must not round up to 5
    REQUIRE(active_budget(3, 1.0) == 3);
    REQUIRE_THROWS_AS(active_budget(16, 0.0), ConfigError);
    REQUIRE_THROWS_AS(active_budget(16, 1.5), ConfigError);
}

TEST_CASE("sparse pattern sets have exact budgets and disjoint supports while room lasts") {
    const PatternSet set = gen_orthogonal_sparse(16, 3, 0.25, 42);
    REQUIRE(set.kind == PatternKind::Auto);
    REQUIRE(set.count() == 3);
    std::set<int> seen;
    for (const Pattern& p : set.items) {
        REQUIRE(p.size() == 16);
        REQUIRE(p.active_count() == 4);
        for (int i : p.support()) {
            REQUIRE(seen.count(i) == 0);  // 3 * 4 = 12 <= 16: no index reused yet
            seen.insert(i);
        }
    }
}

TEST_CASE("budgets hold even past the disjoint capacity") {
    const PatternSet set = gen_orthogonal_sparse(16, 7, 0.25, 9);
    for (const Pattern& p : set.items) REQUIRE(p.active_count() == 4);
}

TEST_CASE("pattern generation is deterministic in the seed") {
    const PatternSet a = gen_orthogonal_sparse(32, 4, 0.25, 11);
    const PatternSet b = gen_orthogonal_sparse(32, 4, 0.25, 11);
    const PatternSet c = gen_orthogonal_sparse(32, 4, 0.25, 12);
    for (int k = 0; k < 4; ++k) REQUIRE(a.items[std::size_t(k)].bits == b.items[std::size_t(k)].bits);
    bool any_diff = false;
    for (int k = 0; k < 4; ++k) any_diff |= a.items[std::size_t(k)].bits != c.items[std::size_t(k)].bits;
    REQUIRE(any_diff);
}

TEST_CASE("masked cues are subsets with the floor of the masked count dropped") {
    const PatternSet set = gen_orthogonal_sparse(16, 1, 0.25, 3);
    const Pattern& p = set.items[0];

    const Pattern half = mask_cue(p, 0.5, 77);
    REQUIRE(half.active_count() == 2);
    for (std::size_t i = 0; i < 16; ++i)
        if (half.bits[i]) REQUIRE(p.bits[i] == 1);

    const Pattern same = mask_cue(p, 0.0, 77);
    REQUIRE(same.bits == p.bits);
    const Pattern gone = mask_cue(p, 1.0, 77);
    REQUIRE(gone.active_count() == 0);

    const Pattern again = mask_cue(p, 0.5, 77);
    REQUIRE(again.bits == half.bits);
}

TEST_CASE("paired sets split the index space in half") {
    const PatternSet set = gen_paired(16, 3, 0.25, 5);
    REQUIRE(set.kind == PatternKind::Paired);
    REQUIRE(set.count() == 3);
    for (const auto& [a, b] : set.pairs) {
        REQUIRE(a.active_count() == 4);
        REQUIRE(b.active_count() == 4);
        for (int i : a.support()) REQUIRE(i < 8);
        for (int i : b.support()) REQUIRE(i >= 8);
    }
    REQUIRE_THROWS_AS(gen_paired(16, 1, 0.8, 5), ConfigError);  // budget 13 > half
}

TEST_CASE("sequence frames are circular shifts of the first frame") {
    const int shift = 3;
    const PatternSet set = gen_sequence(16, 4, 0.25, shift, 21);
    REQUIRE(set.kind == PatternKind::Sequence);
    REQUIRE(set.count() == 4);
    for (int f = 1; f < 4; ++f) {
        std::set<int> expect;
        for (int i : set.items[std::size_t(f - 1)].support()) expect.insert((i + shift) % 16);
        const std::vector<int> got = set.items[std::size_t(f)].support();
        REQUIRE(std::set<int>(got.begin(), got.end()) == expect);
    }

    const PatternSet still = gen_sequence(16, 4, 0.25, 0, 21);
    for (int f = 1; f < 4; ++f) REQUIRE(still.items[std::size_t(f)].bits == still.items[0].bits);
}

TEST_CASE("dc injection emits the amplitude on active bits every tick") {
    Pattern p = pattern_from_support(4, {1, 3});
    InjectionMode mode;
    mode.amplitude = 1.5;
    const auto rows = to_currents(p, mode, 3, 0);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        REQUIRE(row == std::vector<double>{0.0, 1.5, 0.0, 1.5});
    }
}

TEST_CASE("bernoulli injection respects its emission probabilities") {
    Pattern p = pattern_from_support(2, {0});
    InjectionMode mode;
    mode.kind = InjectionMode::Kind::Bernoulli;
    mode.amplitude = 2.0;
    mode.p_high = 1.0;
    mode.p_low = 0.0;
    const auto rows = to_currents(p, mode, 50, 4);
    for (const auto& row : rows) {
        REQUIRE(row[0] == 2.0);
        REQUIRE(row[1] == 0.0);
    }
    const auto again = to_currents(p, mode, 50, 4);
    REQUIRE(again == rows);
}

TEST_CASE("pattern text round-trips for every kind") {
    const PatternSet autos = gen_orthogonal_sparse(16, 3, 0.25, 1);
    const PatternSet back = parse_text(PatternKind::Auto, to_text(autos));
    REQUIRE(back.count() == 3);
    for (int k = 0; k < 3; ++k)
        REQUIRE(back.items[std::size_t(k)].bits == autos.items[std::size_t(k)].bits);

    const PatternSet pairs = gen_paired(16, 2, 0.25, 2);
    const PatternSet pback = parse_text(PatternKind::Paired, to_text(pairs));
    REQUIRE(pback.count() == 2);
    for (int k = 0; k < 2; ++k) {
        REQUIRE(pback.pairs[std::size_t(k)].first.bits == pairs.pairs[std::size_t(k)].first.bits);
        REQUIRE(pback.pairs[std::size_t(k)].second.bits == pairs.pairs[std::size_t(k)].second.bits);
    }

    const PatternSet seq = gen_sequence(16, 3, 0.25, 2, 3);
    const PatternSet sback = parse_text(PatternKind::Sequence, to_text(seq));
    for (int k = 0; k < 3; ++k)
        REQUIRE(sback.items[std::size_t(k)].bits == seq.items[std::size_t(k)].bits);
}

TEST_CASE("pattern text rejects malformed input") {
    REQUIRE_THROWS_AS(parse_text(PatternKind::Auto, "01x1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_text(PatternKind::Auto, "0101\n011\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_text(PatternKind::Auto, ""), ConfigError);
    REQUIRE_THROWS_AS(parse_text(PatternKind::Paired, "0101\n1010\n0011\n"), ConfigError);
    const PatternSet crlf = parse_text(PatternKind::Auto, "0101\r\n1010\r\n");
    REQUIRE(crlf.count() == 2);
}

TEST_CASE("jaccard counts support overlap") {
    const std::vector<std::uint8_t> a{1, 1, 0, 0}, b{1, 0, 1, 0}, z{0, 0, 0, 0};
    REQUIRE(jaccard(a, b) == Approx(1.0 / 3.0));
    REQUIRE(jaccard(a, a) == 1.0);
    REQUIRE(jaccard(a, z) == 0.0);
    REQUIRE(jaccard(z, z) == 1.0);
}

TEST_CASE("cosine handles zero vectors by convention") {
    const std::vector<double> a{1.0, 0.0}, b{1.0, 1.0}, z{0.0, 0.0};
    REQUIRE(cosine(a, a) == Approx(1.0));
    REQUIRE(cosine(a, b) == Approx(1.0 / std::sqrt(2.0)));
    REQUIRE(cosine(a, z) == 0.0);
}

TEST_CASE("pearson is undefined without variance on both sides") {
    const std::vector<double> a{1.0, 2.0, 3.0}, b{2.0, 4.0, 6.0}, flat{5.0, 5.0, 5.0};
    REQUIRE(pearson(a, b).value() == Approx(1.0));
    REQUIRE(pearson(a, std::vector<double>{3.0, 2.0, 1.0}).value() == Approx(-1.0));
    REQUIRE(!pearson(a, flat).has_value());
    REQUIRE(!pearson(flat, a).has_value());
    REQUIRE_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("rate binarization keeps the top budget and breaks ties low") {
    REQUIRE(binarize_rates(std::vector<double>{0.9, 0.1, 0.5}, 2) ==
            std::vector<std::uint8_t>{1, 0, 1});
    REQUIRE(binarize_rates(std::vector<double>{0.5, 0.5, 0.1}, 1) ==
            std::vector<std::uint8_t>{1, 0, 0});
    REQUIRE(binarize_rates(std::vector<double>{0.5, 0.5, 0.1}, 0) ==
            std::vector<std::uint8_t>{0, 0, 0});
    REQUIRE(binarize_rates(std::vector<double>{0.0, 0.0, 0.0}, 2) ==
            std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("chance prototype averages the non-target patterns") {
    std::vector<Pattern> stored{pattern_from_support(4, {0, 1}), pattern_from_support(4, {1, 2}),
                                pattern_from_support(4, {2, 3})};
    const std::vector<double> proto = chance_prototype(stored, 0);
    REQUIRE(proto == std::vector<double>{0.0, 0.5, 1.0, 0.5});

    const std::vector<double> lone = chance_prototype({pattern_from_support(4, {0, 1})}, 0);
    REQUIRE(lone == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("recall scoring reports target, chance, and margin per metric") {
    const Pattern target = pattern_from_support(4, {0, 1});
    const std::vector<Pattern> stored{target, pattern_from_support(4, {2, 3})};
    const std::vector<double> rates{0.9, 0.8, 0.1, 0.0};
    const RecallMetrics m = score_recall(rates, target, chance_prototype(stored, 0));

    REQUIRE(m.jaccard_target == 1.0);
    // Chance prototype {0,0,1,1} binarized at budget 2 keeps units 2 and 3.
    REQUIRE(m.jaccard_chance == 0.0);
    REQUIRE(m.jaccard_margin == 1.0);
    REQUIRE(m.cosine_margin == Approx(m.cosine_target - m.cosine_chance));
    REQUIRE(m.pearson_target.has_value());
    REQUIRE(m.pearson_margin.value() ==
            Approx(m.pearson_target.value() - m.pearson_chance.value()));
}

TEST_CASE("margins propagate missing correlations") {
    REQUIRE(!margin(std::optional<double>{}, std::optional<double>{0.5}).has_value());
    REQUIRE(!margin(std::optional<double>{0.5}, std::optional<double>{}).has_value());
    REQUIRE(margin(std::optional<double>{0.5}, std::optional<double>{0.2}).value() ==
            Approx(0.3));
}
