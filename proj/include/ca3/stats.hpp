#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ca3/core.hpp"

namespace ca3 {

struct SeedStats {
    double mean = 0.0;
    std::optional<double> stddev;  // sample standard deviation (n - 1); absent when n < 2
    int n = 0;
};

inline SeedStats seed_stats(std::span<const double> values) {
    require(!values.empty(), "seed_stats: no values");
    SeedStats s;
    s.n = int(values.size());
    for (double v : values) s.mean += v;
    s.mean /= double(s.n);
    if (s.n >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / double(s.n - 1));
    }
    return s;
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace detail

// Upper-tail probability of Student's t.
inline double student_t_sf(double t, double df) {
    require(df > 0.0, "student_t_sf: df must be positive");
    const double tail2 = detail::ibeta(df / 2.0, 0.5, df / (df + t * t));  // P(|T| >= |t|)
    return t >= 0.0 ? tail2 / 2.0 : 1.0 - tail2 / 2.0;
}

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_one_sided = 0.0;  // P(T >= t): small when xs sits above ys
};

inline WelchResult welch_t(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() >= 2 && ys.size() >= 2, "welch_t: both samples need n >= 2");
    const SeedStats sx = seed_stats(xs), sy = seed_stats(ys);
    const double vx = *sx.stddev * *sx.stddev, vy = *sy.stddev * *sy.stddev;
    const double nx = double(sx.n), ny = double(sy.n);
    const double se2 = vx / nx + vy / ny;
    require(se2 > 0.0, "welch_t: zero variance in both samples");
    WelchResult r;
    r.t = (sx.mean - sy.mean) / std::sqrt(se2);
    r.df = se2 * se2 / (vx * vx / (nx * nx * (nx - 1.0)) + vy * vy / (ny * ny * (ny - 1.0)));
    r.p_one_sided = student_t_sf(r.t, r.df);
    return r;
}

// Effect size conventions differ across reports, so all three denominators are
// emitted: pooled, control-sd, treatment-sd. xs is treatment, ys control.
struct CohensD {
    double pooled = 0.0;
    double control_sd = 0.0;
    double treatment_sd = 0.0;
};

inline CohensD cohens_d(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() >= 2 && ys.size() >= 2, "cohens_d: both samples need n >= 2");
    const SeedStats sx = seed_stats(xs), sy = seed_stats(ys);
    const double vx = *sx.stddev * *sx.stddev, vy = *sy.stddev * *sy.stddev;
    const double nx = double(sx.n), ny = double(sy.n);
    const double sp = std::sqrt(((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0));
    const double diff = sx.mean - sy.mean;
    CohensD d;
    d.pooled = diff / sp;
    d.control_sd = diff / *sy.stddev;
    d.treatment_sd = diff / *sx.stddev;
    return d;
}

struct BimodalityReport {
    int n_above = 0;  // values >= threshold
    int n_below = 0;
    double threshold = 0.0;
    std::vector<double> sorted_values;
};

inline BimodalityReport bimodality_report(std::span<const double> values, double threshold) {
    BimodalityReport r;
    r.threshold = threshold;
    r.sorted_values.assign(values.begin(), values.end());
    std::sort(r.sorted_values.begin(), r.sorted_values.end());
    for (double v : values) (v >= threshold ? r.n_above : r.n_below)++;
    return r;
}

// Outcome classes for the full-vs-minimal comparison, tested in fixed precedence:
//  A: full clearly above minimal (diff > +0.15)
//  C: full below minimal by at least the seed noise
//  B: difference indistinguishable from seed noise
enum class Scenario { A, B, C, Indeterminate };

inline Scenario classify_scenario(double jaccard_diff, double sigma) {
    require(sigma >= 0.0, "classify_scenario: sigma must be >= 0");
    if (jaccard_diff > 0.15) return Scenario::A;
    if (jaccard_diff < 0.0 && -jaccard_diff >= sigma) return Scenario::C;
    if (std::fabs(jaccard_diff) < sigma) return Scenario::B;
    return Scenario::Indeterminate;
}

inline std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::A: return "A";
        case Scenario::B: return "B";
        case Scenario::C: return "C";
        default: return "indeterminate";
    }
}

// Hopfield-style sparse capacity estimate K_max = N / (a * ln(1 / a)).
inline double theoretical_capacity(double n, double a) {
    require(n > 0.0, "theoretical_capacity: n must be positive");
    require(a > 0.0 && a < 1.0, "theoretical_capacity: a must lie in (0, 1)");
    return n / (a * std::log(1.0 / a));
}

} // namespace ca3
