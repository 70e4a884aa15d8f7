#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ca3/stats.hpp"

using namespace ca3;
using Catch::Approx;

namespace {

// Five-seed recall margins reported for the reference auto-associative run,
// frozen here as the regression oracle for the aggregate pipeline.
const std::vector<double> kReferenceMargins{0.216, 0.101, 0.013, -0.008, 0.014};

// Control sample with mean -0.003 and sample standard deviation exactly 0.035:
// an affine image of {-2,-1,0,1,2}, whose sample sd is sqrt(2.5).
std::vector<double> synthetic_control() {
    std::vector<double> c;
    for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0})
        c.push_back(-0.003 + 0.035 * z / std::sqrt(2.5));
    return c;
}

// Survival function of Student's t by Simpson quadrature over the density,
// independent of the incomplete-beta path used by the library. Integrates the
// finite interval [0, t] and uses the density's symmetry, so there is no tail
// truncation to worry about.
double t_sf_by_quadrature(double t, double df) {
    const double log_norm =
        std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * 3.14159265358979312);
    const auto pdf = [&](double u) {
        return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(u * u / df));
    };
    const int n = 100000;
    const double h = t / n;
    double s = pdf(0.0) + pdf(t);
    for (int i = 1; i < n; ++i) s += pdf(i * h) * (i % 2 ? 4.0 : 2.0);
    return 0.5 - s * h / 3.0;
}

} // namespace

TEST_CASE("seed aggregation reproduces the reference mean and spread") {
    const SeedStats s = seed_stats(kReferenceMargins);
    REQUIRE(s.n == 5);
    REQUIRE(std::fabs(s.mean - 0.067) < 0.002);
    REQUIRE(s.stddev.has_value());
    REQUIRE(std::fabs(*s.stddev - 0.093) < 0.002);
    REQUIRE(s.mean == Approx(0.0672).margin(1e-12));
    REQUIRE(*s.stddev == Approx(0.09314880568209127).margin(1e-12));
}

TEST_CASE("seed aggregation handles degenerate sample sizes") {
    const SeedStats one = seed_stats(std::vector<double>{0.4});
    REQUIRE(one.n == 1);
    REQUIRE(one.mean == 0.4);
    REQUIRE(!one.stddev.has_value());
    REQUIRE_THROWS_AS(seed_stats(std::vector<double>{}), ConfigError);
}

TEST_CASE("welch test against the synthetic control lands at the frozen statistic") {
    const WelchResult r = welch_t(kReferenceMargins, synthetic_control());
    REQUIRE(r.t == Approx(1.5774922427247218).margin(1e-9));
    REQUIRE(r.df == Approx(5.10738857583067).margin(1e-9));
    REQUIRE(r.p_one_sided == Approx(0.08714447451825454).margin(1e-7));
    REQUIRE(r.t > 1.45);
    REQUIRE(r.t < 1.75);
}

TEST_CASE("welch test rejects undersized or variance-free samples") {
    REQUIRE_THROWS_AS(welch_t(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                      ConfigError);
    REQUIRE_THROWS_AS(
        welch_t(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 2.0}), ConfigError);
}

TEST_CASE("t survival function matches an independent quadrature") {
    for (const auto& [t, df] : std::vector<std::pair<double, double>>{
             {1.5774922427247218, 5.10738857583067}, {0.5, 3.0}, {2.0, 8.0}, {3.5, 2.0}}) {
        REQUIRE(student_t_sf(t, df) == Approx(t_sf_by_quadrature(t, df)).margin(1e-6));
    }
}

TEST_CASE("t survival function keeps its symmetries") {
    REQUIRE(student_t_sf(0.0, 7.0) == Approx(0.5).margin(1e-12));
    for (double t : {0.3, 1.1, 2.7})
        REQUIRE(student_t_sf(-t, 6.0) == Approx(1.0 - student_t_sf(t, 6.0)).margin(1e-10));
    // Heavy df approaches the normal tail.
    REQUIRE(student_t_sf(1.959963984540054, 1e7) == Approx(0.025).margin(1e-4));
}

TEST_CASE("effect sizes come in all three denominator conventions") {
    const CohensD d = cohens_d(kReferenceMargins, synthetic_control());
    REQUIRE(d.pooled == Approx(0.9976936956514603).margin(1e-9));
    REQUIRE(d.control_sd == Approx(2.0057142857142862).margin(1e-9));
    REQUIRE(d.treatment_sd == Approx(0.753632851070431).margin(1e-9));
}

TEST_CASE("bimodality report splits the reference margins two above three below") {
    const BimodalityReport r = bimodality_report(kReferenceMargins, 0.10);
    REQUIRE(r.n_above == 2);
    REQUIRE(r.n_below == 3);
    REQUIRE(r.threshold == 0.10);
    REQUIRE(r.sorted_values ==
            std::vector<double>{-0.008, 0.013, 0.014, 0.101, 0.216});
    const BimodalityReport at = bimodality_report(std::vector<double>{0.10, 0.09}, 0.10);
    REQUIRE(at.n_above == 1);  // the threshold itself counts as above
}

TEST_CASE("outcome classification follows the fixed precedence") {
    REQUIRE(classify_scenario(0.151, 0.5) == Scenario::A);
    REQUIRE(classify_scenario(0.151, 1e-9) == Scenario::A);
    REQUIRE(classify_scenario(-0.05, 0.01) == Scenario::C);
    REQUIRE(classify_scenario(0.02, 0.05) == Scenario::B);

    REQUIRE(classify_scenario(0.15, 0.01) == Scenario::Indeterminate);  // A needs strictly more
    REQUIRE(classify_scenario(-0.2, 0.3) == Scenario::B);   // below, but within seed noise
    REQUIRE(classify_scenario(-0.2, 0.1) == Scenario::C);
    REQUIRE(classify_scenario(0.12, 0.05) == Scenario::Indeterminate);
    REQUIRE(classify_scenario(0.0, 0.0) == Scenario::Indeterminate);

    REQUIRE(scenario_name(Scenario::A) == "A");
    REQUIRE(scenario_name(Scenario::B) == "B");
    REQUIRE(scenario_name(Scenario::C) == "C");
}

TEST_CASE("capacity estimate hits the frozen values and the expected band") {
    const double big = theoretical_capacity(256, 0.15);
    REQUIRE(big == Approx(899.6092394068207).margin(1e-9));
    REQUIRE(big > 850.0);
    REQUIRE(big < 950.0);
    REQUIRE(theoretical_capacity(16, 0.25) == Approx(46.16624130844683).margin(1e-9));
}

TEST_CASE("capacity estimate rejects out-of-domain arguments") {
    REQUIRE_THROWS_AS(theoretical_capacity(0.0, 0.25), ConfigError);
    REQUIRE_THROWS_AS(theoretical_capacity(16, 0.0), ConfigError);
    REQUIRE_THROWS_AS(theoretical_capacity(16, 1.0), ConfigError);
}
