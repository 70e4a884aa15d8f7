// Release gate for the laboratory: one check per shipped guarantee, each printed
// as a single [PASS]/[FAIL] line with its wall time. Exits nonzero if any fail.
// argv[1] must be the path to the ca3lab binary (used by the reporting check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ca3/config_io.hpp"
#include "ca3/report.hpp"

using namespace ca3;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_details;

void detail_line(const std::string& s) { g_details.push_back(s); }

template <typename Fn>
void criterion(const char* name, Fn&& fn) {
    g_details.clear();
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        detail_line(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %-68s %8.2fs\n", ok ? "PASS" : "FAIL", name, secs);
    if (!ok) {
        ++g_failures;
        for (const std::string& s : g_details) std::printf("       %s\n", s.c_str());
    }
    std::fflush(stdout);
}

bool expect(bool cond, const std::string& what) {
    if (!cond) detail_line(what);
    return cond;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- kernel fixed points -------------------------------------------------

bool check_fixed_points() {
    bool ok = true;
    RuleParams p;

    // BCM threshold relaxes geometrically to the squared post rate.
    {
        const double post = 0.8;
        const double target = post * post;
        Mat w(1, 1, 0.5);
        std::vector<std::uint8_t> mask = {1};
        std::vector<double> theta = {p.theta_init};
        const std::vector<double> pre = {1.0}, post_r = {post};
        for (int i = 0; i < 44; ++i) bcm_update(w, mask, theta, pre, post_r, 1.0, p);
        ok &= expect(std::fabs(theta[0] - target) <= 0.01 * target,
                     "bcm threshold after 44 steps: " + num(theta[0]) + " vs " + num(target) +
                         " (1% band)");
    }

    // iLTD settles where depression balances recovery: w* = base - (eta_iltd/eta_rec)*ecb.
    {
        RuleParams q;
        q.eta_iltd = 1e-2;
        q.eta_rec = 1e-3;
        Mat w(1, 1, 1.0);
        Mat base(1, 1, 1.0);
        std::vector<std::uint8_t> mask = {1};
        const std::vector<double> ecb = {0.05};
        for (int i = 0; i < 20000; ++i) iltd_update(w, mask, ecb, base, 1.0, q);
        ok &= expect(std::fabs(w(0, 0) - 0.5) <= 1e-3,
                     "iltd fixed point: " + num(w(0, 0)) + " vs 0.5 (1e-3 band)");
    }

    // Quiet short-term dynamics recover to (U, 1).
    {
        double u = 0.9, x = 0.05;
        for (int i = 0; i < 200; ++i) stp_advance(u, x, false, p);
        ok &= expect(std::fabs(u - p.stp_u) <= 1e-6 && std::fabs(x - 1.0) <= 1e-6,
                     "stp quiet recovery: u=" + num(u) + " x=" + num(x));
    }
    return ok;
}

// ---- neuromodulatory gates ------------------------------------------------

bool check_gates() {
    bool ok = true;
    RuleParams p;
    ok &= expect(ach_gate_bipolar(0.5, p) == 0.0, "bipolar gate not exactly 0 at 0.5");
    ok &= expect(std::fabs(ach_gate_bipolar(1.0, p) + ach_gate_bipolar(0.0, p)) <= 1e-15,
                 "bipolar gate not odd-symmetric about 0.5");
    for (int i = 0; i <= 100; ++i) {
        const double ach = double(i) / 100.0;
        if (ach_gate_attenuation(ach, p) != std::max(ach, 0.2)) {
            ok &= expect(false, "attenuation gate deviates at ach=" + num(ach));
            break;
        }
    }
    return ok;
}

// ---- recall on the bare recurrence ----------------------------------------

json protocol_config(const std::string& variant) {
    return json{{"regime", "auto"}, {"variant", variant}, {"n_pyrs", 16},  {"k_list", {3}},
                {"a", 0.25},        {"mask_frac", 0.5},   {"exposures", 60}};
}

bool check_minimal_recall() {
    const SweepReport rep = run_experiment(config_from_json(protocol_config("minimal")));
    bool ok = expect(rep.cells.size() == 1, "expected one cell");
    if (!ok) return false;
    double pearson_sum = 0.0;
    int n = 0;
    for (const SeedRow& row : rep.cells[0].rows) {
        ok &= expect(row.pearson_margin.has_value(),
                     "seed " + std::to_string(row.seed) + ": pearson margin undefined");
        if (row.pearson_margin) {
            pearson_sum += *row.pearson_margin;
            ++n;
        }
        ok &= expect(row.control_jaccard_target.has_value() &&
                         row.jaccard_target > *row.control_jaccard_target,
                     "seed " + std::to_string(row.seed) + ": recall " + num(row.jaccard_target) +
                         " not above control " + num(row.control_jaccard_target.value_or(-1)));
    }
    const double mean = n > 0 ? pearson_sum / n : 0.0;
    ok &= expect(n > 0 && mean > 0.10,
                 "mean pearson margin " + num(mean) + " not above +0.10");
    return ok;
}

// ---- full circuit tracks the reduced one -----------------------------------

bool check_variant_agreement() {
    const SweepReport rep = run_experiment(config_from_json(protocol_config("both")));
    bool ok = expect(rep.variant_comparisons.size() == 1, "expected one variant comparison");
    if (!ok) return false;
    const double diff = rep.variant_comparisons[0].jaccard_diff_mean;
    ok &= expect(std::fabs(diff) < 0.1,
                 "full-minus-minimal jaccard margin " + num(diff) + " not within 0.1");
    for (const CellResult& cell : rep.cells) {
        double sum = 0.0;
        int n = 0;
        for (const SeedRow& row : cell.rows)
            if (row.pearson_margin) {
                sum += *row.pearson_margin;
                ++n;
            }
        ok &= expect(n > 0 && sum / n > 0.0,
                     cell.variant + " variant: mean pearson margin " +
                         num(n > 0 ? sum / n : 0.0) + " not positive");
    }
    return ok;
}

// ---- reference statistics ---------------------------------------------------

bool check_reference_stats() {
    bool ok = true;
    const std::vector<double> margins = {0.216, 0.101, 0.013, -0.008, 0.014};
    const SeedStats s = seed_stats(margins);
    ok &= expect(std::fabs(s.mean - 0.067) <= 0.002,
                 "margin mean " + num(s.mean) + " vs 0.067 (0.002 band)");
    ok &= expect(s.stddev && std::fabs(*s.stddev - 0.093) <= 0.002,
                 "margin std " + num(s.stddev.value_or(-1)) + " vs 0.093 (0.002 band)");

    std::vector<double> control;
    for (int z = -2; z <= 2; ++z)
        control.push_back(-0.003 + 0.035 * double(z) / std::sqrt(2.5));
    const WelchResult w = welch_t(margins, control);
    ok &= expect(w.t >= 1.45 && w.t <= 1.75, "welch t " + num(w.t) + " outside [1.45, 1.75]");

    const BimodalityReport b = bimodality_report(margins, 0.10);
    ok &= expect(b.n_above == 2 && b.n_below == 3,
                 "bimodality split " + std::to_string(b.n_above) + "/" +
                     std::to_string(b.n_below) + " vs 2/3 at threshold 0.10");
    return ok;
}

// ---- outcome classifier -------------------------------------------------------

bool check_classifier() {
    bool ok = true;
    ok &= expect(classify_scenario(0.151, 0.05) == Scenario::A,
                 "clear full advantage not classified A");
    ok &= expect(classify_scenario(-0.05, 0.01) == Scenario::C,
                 "reliable full deficit not classified C");
    ok &= expect(classify_scenario(0.02, 0.05) == Scenario::B,
                 "noise-level difference not classified B");
    return ok;
}

// ---- inhibitory scaling and the proportion sweep --------------------------------

bool check_inhibition_sweep() {
    bool ok = true;
    const CircuitConfig scaled = scale_inhibition(canonical_config(Variant::Full, 64), 0.25);
    const double p = inhibitory_proportion(scaled);
    ok &= expect(std::fabs(p - 0.25) <= 0.02,
                 "scaled proportion " + num(p) + " not within 0.02 of 0.25");

    const json j = {{"regime", "inhib_sweep"},
                    {"n_pyrs", 64},
                    {"k_list", {5, 10}},
                    {"seeds", {42, 43, 44}},
                    {"inhib_proportions", {0.57, 0.25}}};
    const SweepReport rep = run_experiment(config_from_json(j));
    ok &= expect(rep.cells.size() == 4, "expected 4 sweep cells, got " +
                                            std::to_string(rep.cells.size()));
    ok &= expect(rep.proportion_comparisons.size() == 2,
                 "expected 2 proportion comparisons, got " +
                     std::to_string(rep.proportion_comparisons.size()));
    double rate_low = -1.0, rate_high = -1.0;
    for (const CellResult& cell : rep.cells) {
        ok &= expect(cell.rows.size() == 3, "cell missing per-seed rows");
        double rate = 0.0;
        for (const SeedRow& row : cell.rows) rate += row.pyrs_rate / double(cell.rows.size());
        if (cell.k == 5 && cell.proportion) {
            if (*cell.proportion == 0.25) rate_low = rate;
            if (*cell.proportion == 0.57) rate_high = rate;
        }
    }
    ok &= expect(rate_low >= 0.0 && rate_high >= 0.0, "k=5 cells missing from the sweep");
    ok &= expect(rate_low >= rate_high, "pyramidal rate at proportion 0.25 (" + num(rate_low) +
                                            ") below rate at 0.57 (" + num(rate_high) + ")");
    return ok;
}

// ---- deterministic reporting through the command line -----------------------------

bool check_cli_reporting(const std::string& bin) {
    const fs::path tmp = fs::temp_directory_path() / "ca3-acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const json cfg = {{"regime", "auto"}, {"variant", "both"}, {"n_pyrs", 16}, {"k_list", {2}},
                      {"exposures", 5},   {"t_present", 4},    {"t_recall", 8}, {"seeds", {42, 43}}};
    const fs::path cfg_path = tmp / "config.json";
    std::ofstream(cfg_path) << cfg.dump(2) << '\n';

    for (const char* out : {"r1", "r2"}) {
        const std::string cmd = "\"" + bin + "\" run \"" + cfg_path.string() + "\" --out \"" +
                                (tmp / out).string() + "\" --quiet";
        if (!expect(std::system(cmd.c_str()) == 0, "run failed: " + cmd)) return false;
    }

    json r1, r2;
    std::ifstream(tmp / "r1" / "report.json") >> r1;
    std::ifstream(tmp / "r2" / "report.json") >> r2;
    bool ok = expect(r1.at("body").dump() == r2.at("body").dump(),
                     "report bodies differ between identical runs");
    const std::vector<std::string> issues = stats_check(r1);
    for (const std::string& s : issues) detail_line("stats discrepancy: " + s);
    ok &= expect(issues.empty(), "stats check found " + std::to_string(issues.size()) +
                                     " discrepancies");
    return ok;
}

// ---- weight bounds under randomized plasticity --------------------------------------

bool check_weight_bounds() {
    Rng master(991);
    int applications = 0;
    while (applications < 10000) {
        RuleParams p;
        p.eta_hebb = 0.8 * master.uniform();
        p.eta_bcm = 0.8 * master.uniform();
        p.eta_burst = 0.8 * master.uniform();
        p.eta_iltd = 0.8 * master.uniform();
        p.eta_rec = 0.8 * master.uniform();
        p.tau_bcm = 0.05 + 0.9 * master.uniform();

        const Variant v = master.bernoulli(0.5) ? Variant::Full : Variant::Minimal;
        const int n_pyrs = 5 + int(master.below(8));
        Circuit c = build_circuit(canonical_config(v, n_pyrs), master.below(1ull << 62), p);
        PlasticityState st = init_plasticity(c);

        RateMap rates;
        BurstMap bursts;
        for (std::size_t i = 0; i < c.n_populations(); ++i) {
            const PopulationRuntime& pop = c.population(int(i));
            rates[pop.spec.name].resize(std::size_t(pop.n_units));
            bursts[pop.spec.name].resize(std::size_t(pop.n_units));
        }

        for (int step = 0; step < 250 && applications < 10000; ++step, ++applications) {
            for (auto& [name, r] : rates)
                for (double& x : r) x = 1.5 * master.uniform();
            for (auto& [name, b] : bursts)
                for (std::uint8_t& x : b) x = master.bernoulli(0.3) ? 1 : 0;
            double ach = master.uniform();
            if (step % 50 == 1) ach = 0.5;
            apply_all(c, st, rates, bursts, ach);

            for (const ProjectionRuntime& pr : c.projections()) {
                const Mat& w = pr.syn.w;
                for (std::size_t idx = 0; idx < w.size(); ++idx) {
                    const double val = w.a[idx];
                    if (!std::isfinite(val) || val < 0.0 || val > p.w_max ||
                        (!pr.syn.mask[idx] && val != 0.0)) {
                        detail_line("projection " + pr.spec.source + "->" + pr.spec.target +
                                    " weight " + num(val) + " out of bounds at application " +
                                    std::to_string(applications));
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// ---- storage capacity at study scale ---------------------------------------------------

bool check_capacity_bound() {
    const double cap = theoretical_capacity(256.0, 0.15);
    return expect(cap >= 850.0 && cap <= 950.0,
                  "capacity " + num(cap) + " outside [850, 950]");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-ca3lab>\n", argv[0]);
        return 2;
    }
    const std::string bin = argv[1];

    criterion("plasticity kernels settle at their analytic fixed points", check_fixed_points);
    criterion("neuromodulatory gates match their closed forms", check_gates);
    criterion("masked cues recall stored patterns above untrained controls",
              check_minimal_recall);
    criterion("full and reduced circuits recall comparably", check_variant_agreement);
    criterion("seed statistics reproduce the reference values", check_reference_stats);
    criterion("outcome classifier resolves its probe points", check_classifier);
    criterion("inhibitory scaling hits its target and the sweep separates arms",
              check_inhibition_sweep);
    criterion("command line emits byte-identical reports for identical configs",
              [&] { return check_cli_reporting(bin); });
    criterion("weights stay inside bounds under randomized plasticity", check_weight_bounds);
    criterion("theoretical capacity at study scale lands in range", check_capacity_bound);

    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
