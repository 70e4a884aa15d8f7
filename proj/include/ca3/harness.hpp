#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ca3/circuit.hpp"
#include "ca3/core.hpp"
#include "ca3/metrics.hpp"
#include "ca3/patterns.hpp"
#include "ca3/plasticity.hpp"
#include "ca3/rng.hpp"
#include "ca3/schedule.hpp"
#include "ca3/stats.hpp"

namespace ca3 {

// A unit bursts when it fires at least twice within three ticks; only
// intrinsic-bursting populations are ever scanned for bursts.
inline constexpr std::size_t kBurstWindow = 3;
inline constexpr std::size_t kBurstMinSpikes = 2;

enum class Regime { Auto, Paired, Temporal, InhibSweep };
enum class VariantSel { Full, Minimal, Both };

inline std::string variant_label(Variant v) {
    return v == Variant::Full ? "full" : "minimal";
}

struct CircuitSettings {
    LIFParams lif_default;
    std::map<std::string, LIFParams> lif;  // per-population overrides
    int delay = 1;
    double init_std = 0.05;
    std::optional<double> init_std_inhibitory;  // overrides init_std on inhibitory sources
    int history_ticks = 4;
    std::map<std::string, double> coupling;
    std::map<std::string, int> counts;  // per-population count overrides
};

struct ExperimentConfig {
    Regime regime = Regime::Auto;
    VariantSel variant = VariantSel::Both;
    int n_pyrs = 16;
    std::vector<int> k_list = {3};
    double a = 0.25;  // sparsity: every pattern carries exactly ceil(a * n_pyrs) active bits
    double mask_frac = 0.5;
    int exposures = 60;
    int t_present = 10;
    int t_recall = 20;
    std::vector<std::uint64_t> seeds = {42, 43, 44};
    AChSchedule ach;
    double recall_ach = 1.0;
    RuleParams rules;
    CircuitSettings circuit;
    InjectionMode injection;
    std::vector<double> inhib_proportions = {0.57, 0.25};
    int frames = 4;  // temporal regime
    int shift = 2;
    bool shuffle_presentation = false;
    bool plastic_recall = false;   // keep weight updates running during recall trials
    bool control_recalls = true;   // auto regime: also recall from an untrained copy
    std::string out_dir = "out";
};

inline void validate_config(const ExperimentConfig& cfg) {
    require(cfg.n_pyrs >= 2, "n_pyrs must be >= 2");
    require(!cfg.k_list.empty(), "k_list must not be empty");
    for (int k : cfg.k_list) require(k >= 1, "k_list entries must be >= 1");
    require(cfg.a > 0.0 && cfg.a <= 1.0, "a must lie in (0, 1]");
    require(cfg.mask_frac >= 0.0 && cfg.mask_frac <= 1.0, "mask_frac must lie in [0, 1]");
    require(cfg.exposures >= 0, "exposures must be >= 0");
    require(cfg.t_present >= 1, "t_present must be >= 1");
    require(cfg.t_recall >= 1, "t_recall must be >= 1");
    require(!cfg.seeds.empty(), "seeds must not be empty");
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.seeds.size(); ++j)
            require(cfg.seeds[i] != cfg.seeds[j], "seeds must be distinct");
    cfg.ach.validate();
    require(cfg.recall_ach >= 0.0 && cfg.recall_ach <= 1.0, "recall_ach must lie in [0, 1]");
    cfg.rules.validate();
    cfg.injection.validate();
    cfg.circuit.lif_default.validate();
    for (const auto& [name, p] : cfg.circuit.lif) {
        (void)population_spec(name);
        p.validate();
    }
    require(cfg.circuit.delay >= 1, "circuit.delay must be >= 1");
    require(cfg.circuit.init_std >= 0.0, "circuit.init_std must be >= 0");
    if (cfg.circuit.init_std_inhibitory)
        require(*cfg.circuit.init_std_inhibitory >= 0.0,
                "circuit.init_std_inhibitory must be >= 0");
    require(cfg.circuit.history_ticks >= int(kBurstWindow),
            "circuit.history_ticks must cover the burst window");
    require(cfg.frames >= 1, "frames must be >= 1");
    if (cfg.regime == Regime::InhibSweep) {
        require(!cfg.inhib_proportions.empty(), "inhib_proportions must not be empty");
        for (double p : cfg.inhib_proportions)
            require(p > 0.0 && p < 1.0, "inhib_proportions entries must lie in (0, 1)");
    }
}

inline Circuit make_experiment_circuit(const ExperimentConfig& cfg, Variant v,
                                       std::optional<double> proportion, std::uint64_t seed) {
    CircuitConfig cc = canonical_config(v, cfg.n_pyrs);
    cc.lif_default = cfg.circuit.lif_default;
    cc.lif = cfg.circuit.lif;
    cc.delay = cfg.circuit.delay;
    cc.init_std = cfg.circuit.init_std;
    cc.history_ticks = cfg.circuit.history_ticks;
    cc.coupling = cfg.circuit.coupling;
    cc.w_max = cfg.rules.w_max;
    for (const auto& [name, n] : cfg.circuit.counts)
        if (cc.counts.count(name)) cc.counts[name] = n;
    if (cfg.circuit.init_std_inhibitory)
        for (ProjectionSpec& p : cc.projections)
            if (p.sign < 0) p.init_std = *cfg.circuit.init_std_inhibitory;
    if (proportion) cc = scale_inhibition(cc, *proportion);
    return build_circuit(cc, derive_seed(seed, "circuit"), cfg.rules);
}

struct WindowStats {
    RateMap rates;
    BurstMap bursts;
    std::map<std::string, std::vector<double>> counts;  // raw per-unit spike counts
};

// Drive `n_ticks` ticks with the given current rows (nullptr = free-running) and
// collect window rates plus accumulated burst flags for intrinsic-bursting classes.
inline WindowStats run_ticks(Circuit& c, const std::vector<std::vector<double>>* currents,
                             std::size_t offset, int n_ticks, double ach) {
    WindowStats ws;
    for (std::size_t i = 0; i < c.n_populations(); ++i) {
        const PopulationRuntime& p = c.population(int(i));
        ws.counts[p.spec.name].assign(std::size_t(p.n_units), 0.0);
        ws.bursts[p.spec.name].assign(std::size_t(p.n_units), 0);
    }
    const std::vector<double> quiet(std::size_t(c.population("PyrS").n_units), 0.0);
    for (int t = 0; t < n_ticks; ++t) {
        const std::vector<double>& row = currents ? (*currents)[offset + std::size_t(t)] : quiet;
        const SpikeRecord rec = c.tick(row, ach);
        for (const auto& [name, spikes] : rec) {
            std::vector<double>& acc = ws.counts[name];
            for (std::size_t u = 0; u < spikes.size(); ++u) acc[u] += spikes[u];
        }
        for (std::size_t i = 0; i < c.n_populations(); ++i) {
            const PopulationRuntime& p = c.population(int(i));
            if (p.spec.firing != Firing::IntrinsicBursting) continue;
            const std::vector<std::uint8_t> f =
                detect_bursts(c.soma_history(p.spec.name), kBurstWindow, kBurstMinSpikes);
            std::vector<std::uint8_t>& acc = ws.bursts[p.spec.name];
            for (std::size_t u = 0; u < f.size(); ++u) acc[u] |= f[u];
        }
    }
    for (auto& [name, counts] : ws.counts) {
        std::vector<double> r = counts;
        for (double& v : r) v /= double(n_ticks);
        ws.rates[name] = std::move(r);
    }
    return ws;
}

inline WindowStats run_window(Circuit& c, const Pattern* item, int n_ticks, double ach,
                              const InjectionMode& inj, std::uint64_t inject_seed) {
    if (!item) return run_ticks(c, nullptr, 0, n_ticks, ach);
    const std::vector<std::vector<double>> currents = to_currents(*item, inj, n_ticks, inject_seed);
    return run_ticks(c, &currents, 0, n_ticks, ach);
}

namespace detail {

// Ticks left before the schedule is back in an encode phase (0 when already there).
inline std::int64_t ticks_until_encode(const AChSchedule& s, std::int64_t tick) {
    if (s.mode != AChSchedule::Mode::Bimodal) return 0;
    if (ach_phase_at(s, tick) == AChSchedule::Phase::Encode) return 0;
    const std::int64_t period = s.t_encode + s.t_consolidate;
    const std::int64_t pos = tick % period;
    return s.start_phase == AChSchedule::Phase::Encode ? period - pos : s.t_consolidate - pos;
}

} // namespace detail

// Present every pattern `exposures` times, round-robin, one plasticity application
// per window. Presentations are episodic: membrane state is cleared at the start
// of each presentation so window rates reflect only the presented pattern.
// Consolidation phases of a bimodal schedule free-run with zero current on the
// carried-over state (and their own plasticity application) without consuming a
// presentation.
inline void run_store_phase(Circuit& c, PlasticityState& st, const std::vector<Pattern>& items,
                            const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.exposures <= 0 || items.empty()) return;
    for (int round = 0; round < cfg.exposures; ++round) {
        std::vector<int> order(items.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
        if (cfg.shuffle_presentation) {
            Rng rng(derive_seed(seed, "present-order", {std::uint64_t(round)}));
            rng.shuffle(order);
        }
        for (int idx : order) {
            for (;;) {
                const std::int64_t rest = detail::ticks_until_encode(cfg.ach, c.ticks());
                if (rest == 0) break;
                const double level = ach_at(cfg.ach, c.ticks());
                const WindowStats ws = run_window(c, nullptr, int(rest), level, cfg.injection, 0);
                apply_all(c, st, ws.rates, ws.bursts, level);
            }
            const double level = ach_at(cfg.ach, c.ticks());
            c.reset_episode();
            const WindowStats ws =
                run_window(c, &items[std::size_t(idx)], cfg.t_present, level, cfg.injection,
                           derive_seed(seed, "inject", {std::uint64_t(c.ticks())}));
            apply_all(c, st, ws.rates, ws.bursts, level);
        }
    }
}

struct RecallResult {
    std::vector<double> rates;  // PyrS unit rates over the whole recall window
    std::vector<std::uint8_t> recalled;
    RecallMetrics metrics;
    double pyrs_rate = 0.0;
};

// One recall trial on a copy of the trained circuit: dynamics reset, cue injected
// for t_recall ticks. Weight updates stay off unless cfg.plastic_recall, so the
// trial cannot perturb the stored memory.
inline RecallResult run_recall_trial(const Circuit& trained, const PlasticityState& st_in,
                                     const Pattern& cue, const Pattern& target,
                                     const std::vector<double>& chance_proto,
                                     const ExperimentConfig& cfg, std::uint64_t inject_seed) {
    Circuit c = trained;
    c.reset_dynamics();
    PlasticityState st = st_in;
    const std::size_t n = std::size_t(c.population("PyrS").n_units);
    const std::vector<std::vector<double>> currents =
        to_currents(cue, cfg.injection, cfg.t_recall, inject_seed);
    std::vector<double> counts(n, 0.0);
    int done = 0;
    while (done < cfg.t_recall) {
        const int len = std::min(cfg.t_present, cfg.t_recall - done);
        const WindowStats ws = run_ticks(c, &currents, std::size_t(done), len, cfg.recall_ach);
        const std::vector<double>& pyrs = ws.counts.at("PyrS");
        for (std::size_t u = 0; u < n; ++u) counts[u] += pyrs[u];
        if (cfg.plastic_recall) apply_all(c, st, ws.rates, ws.bursts, cfg.recall_ach);
        done += len;
    }
    RecallResult r;
    r.rates.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) r.rates[u] = counts[u] / double(cfg.t_recall);
    r.recalled = binarize_rates(r.rates, target.active_count());
    r.metrics = score_recall(r.rates, target, chance_proto);
    for (double v : r.rates) r.pyrs_rate += v;
    r.pyrs_rate /= double(n);
    return r;
}

// Sequence recall: the masked first frame drives the first window, then the circuit
// free-runs one window per remaining frame. Returns PyrS rates per window.
inline std::vector<std::vector<double>> run_sequence_recall(const Circuit& trained,
                                                            const PlasticityState& st_in,
                                                            const Pattern& cue, int windows,
                                                            const ExperimentConfig& cfg,
                                                            std::uint64_t inject_seed) {
    Circuit c = trained;
    c.reset_dynamics();
    PlasticityState st = st_in;
    std::vector<std::vector<double>> out;
    const std::vector<std::vector<double>> currents =
        to_currents(cue, cfg.injection, cfg.t_present, inject_seed);
    for (int w = 0; w < windows; ++w) {
        const WindowStats ws = w == 0 ? run_ticks(c, &currents, 0, cfg.t_present, cfg.recall_ach)
                                      : run_ticks(c, nullptr, 0, cfg.t_present, cfg.recall_ach);
        out.push_back(ws.rates.at("PyrS"));
        if (cfg.plastic_recall) apply_all(c, st, ws.rates, ws.bursts, cfg.recall_ach);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep data model. Aggregates are recomputed from these rows at serialization
// time so the written report is consistent by construction.

struct TrialRow {
    std::string variant;
    std::optional<double> proportion;
    int k = 0;
    std::uint64_t seed = 0;
    int trial = 0;
    int frame = -1;  // temporal regime: recall window index
    RecallMetrics m;
    double pyrs_rate = 0.0;
    std::optional<double> control_jaccard_target;
    std::optional<double> jac_a, jac_b;
};

struct SeedRow {
    std::uint64_t seed = 0;
    double jaccard_margin = 0.0;
    double cosine_margin = 0.0;
    std::optional<double> pearson_margin;  // mean over defined trials
    int n_undefined_pearson = 0;
    double jaccard_target = 0.0;
    double pyrs_rate = 0.0;
    std::optional<double> control_jaccard_target;
    std::optional<double> jac_a, jac_b, echo_diff;  // paired regime
    std::vector<double> frame_jaccard_margins;      // temporal regime
    std::vector<double> frame_cosine_margins;
    std::vector<std::optional<double>> frame_pearson_margins;
    std::optional<double> m_t2_jaccard, m_traj_jaccard;
    std::optional<double> m_t2_cosine, m_traj_cosine;
    std::optional<double> m_t2_pearson, m_traj_pearson;
};

struct CellResult {
    std::string variant;
    std::optional<double> proportion;
    int k = 0;
    std::vector<SeedRow> rows;       // one per seed, in config order
    std::vector<TrialRow> trials;    // canonical order: seed, trial, frame
};

struct VariantComparison {
    int k = 0;
    double jaccard_diff_mean = 0.0;  // full minus minimal, averaged over seeds
    double sigma = 0.0;              // sample std of the per-seed differences
    double cosine_diff_mean = 0.0;
    std::optional<double> pearson_diff_mean;
    Scenario scenario = Scenario::Indeterminate;
};

struct ProportionComparison {
    int k = 0;
    double x_proportion = 0.0;  // tested arm
    double y_proportion = 0.0;  // baseline arm (first listed)
    WelchResult welch;          // one-sided: x above y
    CohensD d;
};

struct SweepReport {
    ExperimentConfig cfg;
    std::vector<CellResult> cells;
    std::vector<VariantComparison> variant_comparisons;
    std::vector<ProportionComparison> proportion_comparisons;
    std::vector<std::string> warnings;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

struct TrialAccum {
    std::vector<double> jaccard_margin, cosine_margin, pearson_margin;
    std::vector<double> jaccard_target, pyrs_rate, control_jac, jac_a, jac_b;
    int n_undefined_pearson = 0;

    void add(const TrialRow& t) {
        jaccard_margin.push_back(t.m.jaccard_margin);
        cosine_margin.push_back(t.m.cosine_margin);
        if (t.m.pearson_margin) pearson_margin.push_back(*t.m.pearson_margin);
        else ++n_undefined_pearson;
        jaccard_target.push_back(t.m.jaccard_target);
        pyrs_rate.push_back(t.pyrs_rate);
        if (t.control_jaccard_target) control_jac.push_back(*t.control_jaccard_target);
        if (t.jac_a) jac_a.push_back(*t.jac_a);
        if (t.jac_b) jac_b.push_back(*t.jac_b);
    }

    void finalize(SeedRow& row) const {
        row.jaccard_margin = mean_of(jaccard_margin);
        row.cosine_margin = mean_of(cosine_margin);
        if (!pearson_margin.empty()) row.pearson_margin = mean_of(pearson_margin);
        row.n_undefined_pearson = n_undefined_pearson;
        row.jaccard_target = mean_of(jaccard_target);
        row.pyrs_rate = mean_of(pyrs_rate);
        if (!control_jac.empty()) row.control_jaccard_target = mean_of(control_jac);
        if (!jac_a.empty()) row.jac_a = mean_of(jac_a);
        if (!jac_b.empty()) row.jac_b = mean_of(jac_b);
        if (row.jac_a && row.jac_b) row.echo_diff = *row.jac_b - *row.jac_a;
    }
};

} // namespace detail

// One (variant, K, seed) cell of the auto-associative or inhibition-sweep regime.
inline std::pair<SeedRow, std::vector<TrialRow>> run_auto_cell_seed(
    const ExperimentConfig& cfg, Variant v, std::optional<double> proportion, int k,
    std::uint64_t seed, bool with_control) {
    const PatternSet set = gen_orthogonal_sparse(std::size_t(cfg.n_pyrs), k, cfg.a,
                                                 derive_seed(seed, "patterns", {std::uint64_t(k)}));
    Circuit c = make_experiment_circuit(cfg, v, proportion, seed);
    PlasticityState st = init_plasticity(c);
    std::optional<Circuit> control;
    if (with_control) control = c;  // pre-storage copy = untrained control
    const PlasticityState st0 = st;
    run_store_phase(c, st, set.items, cfg, seed);

    std::vector<TrialRow> trials;
    detail::TrialAccum acc;
    for (int t = 0; t < k; ++t) {
        const Pattern cue = mask_cue(set.items[std::size_t(t)], cfg.mask_frac,
                                     derive_seed(seed, "cue", {std::uint64_t(k), std::uint64_t(t)}));
        const std::vector<double> proto = chance_prototype(set.items, t);
        const std::uint64_t iseed =
            derive_seed(seed, "recall-inject", {std::uint64_t(k), std::uint64_t(t)});
        const RecallResult r =
            run_recall_trial(c, st, cue, set.items[std::size_t(t)], proto, cfg, iseed);
        TrialRow tr;
        tr.variant = variant_label(v);
        tr.proportion = proportion;
        tr.k = k;
        tr.seed = seed;
        tr.trial = t;
        tr.m = r.metrics;
        tr.pyrs_rate = r.pyrs_rate;
        if (control)
            tr.control_jaccard_target =
                run_recall_trial(*control, st0, cue, set.items[std::size_t(t)], proto, cfg, iseed)
                    .metrics.jaccard_target;
        acc.add(tr);
        trials.push_back(std::move(tr));
    }
    SeedRow row;
    row.seed = seed;
    acc.finalize(row);
    return {row, trials};
}

// One (variant, K, seed) cell of the paired-associative regime: A and B stored
// co-active, recall cued with masked A and scored against B.
inline std::pair<SeedRow, std::vector<TrialRow>> run_paired_cell_seed(const ExperimentConfig& cfg,
                                                                      Variant v, int k,
                                                                      std::uint64_t seed) {
    const PatternSet set =
        gen_paired(std::size_t(cfg.n_pyrs), k, cfg.a, derive_seed(seed, "patterns", {std::uint64_t(k)}));
    std::vector<Pattern> combined, bs;
    for (const auto& [a, b] : set.pairs) {
        Pattern both = a;
        for (std::size_t i = 0; i < both.bits.size(); ++i) both.bits[i] |= b.bits[i];
        both.sparsity = double(both.active_count()) / double(both.size());
        combined.push_back(std::move(both));
        bs.push_back(b);
    }
    Circuit c = make_experiment_circuit(cfg, v, std::nullopt, seed);
    PlasticityState st = init_plasticity(c);
    run_store_phase(c, st, combined, cfg, seed);

    std::vector<TrialRow> trials;
    detail::TrialAccum acc;
    for (int t = 0; t < k; ++t) {
        const auto& [a_pat, b_pat] = set.pairs[std::size_t(t)];
        const Pattern cue = mask_cue(a_pat, cfg.mask_frac,
                                     derive_seed(seed, "cue", {std::uint64_t(k), std::uint64_t(t)}));
        const std::vector<double> proto = chance_prototype(bs, t);
        const RecallResult r =
            run_recall_trial(c, st, cue, b_pat, proto, cfg,
                             derive_seed(seed, "recall-inject", {std::uint64_t(k), std::uint64_t(t)}));
        TrialRow tr;
        tr.variant = variant_label(v);
        tr.k = k;
        tr.seed = seed;
        tr.trial = t;
        tr.m = r.metrics;
        tr.pyrs_rate = r.pyrs_rate;
        tr.jac_b = r.metrics.jaccard_target;
        tr.jac_a = jaccard(r.recalled, a_pat.bits);
        acc.add(tr);
        trials.push_back(std::move(tr));
    }
    SeedRow row;
    row.seed = seed;
    acc.finalize(row);
    return {row, trials};
}

// One (variant, seed) cell of the temporal regime. Window w is scored against
// frame w; the single-step metric M_{t=2} is window 1 (the first free-running
// window) and M_traj averages windows 1 .. frames-1.
inline std::pair<SeedRow, std::vector<TrialRow>> run_temporal_cell_seed(
    const ExperimentConfig& cfg, Variant v, std::uint64_t seed) {
    const PatternSet set = gen_sequence(std::size_t(cfg.n_pyrs), cfg.frames, cfg.a, cfg.shift,
                                        derive_seed(seed, "patterns", {std::uint64_t(cfg.frames)}));
    Circuit c = make_experiment_circuit(cfg, v, std::nullopt, seed);
    PlasticityState st = init_plasticity(c);
    run_store_phase(c, st, set.items, cfg, seed);

    const Pattern cue = mask_cue(set.items[0], cfg.mask_frac, derive_seed(seed, "cue", {0}));
    const std::vector<std::vector<double>> window_rates =
        run_sequence_recall(c, st, cue, cfg.frames, cfg, derive_seed(seed, "recall-inject", {0}));

    std::vector<TrialRow> trials;
    SeedRow row;
    row.seed = seed;
    std::vector<double> traj_j, traj_c, traj_p, all_rates;
    int undefined = 0;
    for (int w = 0; w < cfg.frames; ++w) {
        const std::vector<double>& rates = window_rates[std::size_t(w)];
        const RecallMetrics m =
            score_recall(rates, set.items[std::size_t(w)], chance_prototype(set.items, w));
        TrialRow tr;
        tr.variant = variant_label(v);
        tr.k = cfg.frames;
        tr.seed = seed;
        tr.trial = 0;
        tr.frame = w;
        tr.m = m;
        for (double r : rates) tr.pyrs_rate += r;
        tr.pyrs_rate /= double(rates.size());
        all_rates.push_back(tr.pyrs_rate);
        trials.push_back(tr);

        row.frame_jaccard_margins.push_back(m.jaccard_margin);
        row.frame_cosine_margins.push_back(m.cosine_margin);
        row.frame_pearson_margins.push_back(m.pearson_margin);
        if (!m.pearson_margin) ++undefined;
        if (w >= 1) {
            traj_j.push_back(m.jaccard_margin);
            traj_c.push_back(m.cosine_margin);
            if (m.pearson_margin) traj_p.push_back(*m.pearson_margin);
        }
    }
    row.jaccard_margin = detail::mean_of(traj_j);
    row.cosine_margin = detail::mean_of(traj_c);
    if (!traj_p.empty()) row.pearson_margin = detail::mean_of(traj_p);
    row.n_undefined_pearson = undefined;
    row.pyrs_rate = detail::mean_of(all_rates);
    if (cfg.frames >= 2) {
        row.m_t2_jaccard = row.frame_jaccard_margins[1];
        row.m_t2_cosine = row.frame_cosine_margins[1];
        row.m_t2_pearson = row.frame_pearson_margins[1];
        row.m_traj_jaccard = row.jaccard_margin;
        row.m_traj_cosine = row.cosine_margin;
        if (!traj_p.empty()) row.m_traj_pearson = row.pearson_margin;
    }
    return {row, trials};
}

namespace detail {

inline void run_jobs(std::vector<std::function<void()>>& jobs, int n_threads) {
    if (n_threads <= 1) {
        for (auto& j : jobs) j();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr first_error;
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                jobs[i]();
            } catch (...) {
                const std::lock_guard<std::mutex> g(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<Variant> selected_variants(VariantSel sel) {
    switch (sel) {
        case VariantSel::Full: return {Variant::Full};
        case VariantSel::Minimal: return {Variant::Minimal};
        default: return {Variant::Full, Variant::Minimal};
    }
}

} // namespace detail

// Run the configured sweep. Each (cell, seed) job is independent and derives every
// random stream from its own seed, so the report is byte-identical for any job
// count and any seed-list permutation only reorders rows.
inline SweepReport run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
    validate_config(cfg);
    SweepReport rep;
    rep.cfg = cfg;

    if (cfg.regime == Regime::Auto || cfg.regime == Regime::InhibSweep) {
        const double cap = theoretical_capacity(double(cfg.n_pyrs), std::min(cfg.a, 0.999999));
        for (int k : cfg.k_list)
            if (double(k) > cap)
                rep.warnings.push_back("K=" + std::to_string(k) +
                                       " exceeds the theoretical capacity bound (" +
                                       std::to_string(cap) + "); running anyway");
    }

    struct Pending {
        Variant variant = Variant::Full;
        std::optional<double> proportion;
        int k = 0;
    };
    std::vector<Pending> pending;
    switch (cfg.regime) {
        case Regime::Auto:
            for (Variant v : detail::selected_variants(cfg.variant))
                for (int k : cfg.k_list) pending.push_back({v, std::nullopt, k});
            break;
        case Regime::Paired:
            for (Variant v : detail::selected_variants(cfg.variant))
                for (int k : cfg.k_list) pending.push_back({v, std::nullopt, k});
            break;
        case Regime::Temporal:
            for (Variant v : detail::selected_variants(cfg.variant))
                pending.push_back({v, std::nullopt, cfg.frames});
            break;
        case Regime::InhibSweep:
            // Interneuron behavior is the point here; always the full variant.
            for (double p : cfg.inhib_proportions)
                for (int k : cfg.k_list) pending.push_back({Variant::Full, p, k});
            break;
    }

    rep.cells.resize(pending.size());
    std::vector<std::vector<std::vector<TrialRow>>> trial_slots(pending.size());
    for (std::size_t ci = 0; ci < pending.size(); ++ci) {
        rep.cells[ci].variant = variant_label(pending[ci].variant);
        rep.cells[ci].proportion = pending[ci].proportion;
        rep.cells[ci].k = pending[ci].k;
        rep.cells[ci].rows.resize(cfg.seeds.size());
        trial_slots[ci].resize(cfg.seeds.size());
    }

    std::vector<std::function<void()>> work;
    for (std::size_t ci = 0; ci < pending.size(); ++ci) {
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            work.push_back([&cfg, &rep, &trial_slots, &pending, ci, si] {
                const Pending& p = pending[ci];
                const std::uint64_t seed = cfg.seeds[si];
                std::pair<SeedRow, std::vector<TrialRow>> out;
                switch (cfg.regime) {
                    case Regime::Auto:
                        out = run_auto_cell_seed(cfg, p.variant, std::nullopt, p.k, seed,
                                                 cfg.control_recalls);
                        break;
                    case Regime::Paired:
                        out = run_paired_cell_seed(cfg, p.variant, p.k, seed);
                        break;
                    case Regime::Temporal:
                        out = run_temporal_cell_seed(cfg, p.variant, seed);
                        break;
                    case Regime::InhibSweep:
                        out = run_auto_cell_seed(cfg, p.variant, p.proportion, p.k, seed, false);
                        break;
                }
                rep.cells[ci].rows[si] = std::move(out.first);
                trial_slots[ci][si] = std::move(out.second);
            });
        }
    }
    detail::run_jobs(work, jobs);
    for (std::size_t ci = 0; ci < pending.size(); ++ci)
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si)
            for (TrialRow& t : trial_slots[ci][si]) rep.cells[ci].trials.push_back(std::move(t));

    // Full-vs-minimal comparison per K, matched by seed.
    if (cfg.regime == Regime::Auto && cfg.variant == VariantSel::Both) {
        for (int k : cfg.k_list) {
            const CellResult* full = nullptr;
            const CellResult* minimal = nullptr;
            for (const CellResult& c : rep.cells) {
                if (c.k != k) continue;
                if (c.variant == "full") full = &c;
                if (c.variant == "minimal") minimal = &c;
            }
            if (!full || !minimal) continue;
            VariantComparison vc;
            vc.k = k;
            std::vector<double> dj, dc, dp;
            for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
                const SeedRow& f = full->rows[si];
                const SeedRow& m = minimal->rows[si];
                dj.push_back(f.jaccard_margin - m.jaccard_margin);
                dc.push_back(f.cosine_margin - m.cosine_margin);
                if (f.pearson_margin && m.pearson_margin)
                    dp.push_back(*f.pearson_margin - *m.pearson_margin);
            }
            const SeedStats sj = seed_stats(dj);
            vc.jaccard_diff_mean = sj.mean;
            vc.sigma = sj.stddev.value_or(0.0);
            vc.cosine_diff_mean = detail::mean_of(dc);
            if (!dp.empty()) vc.pearson_diff_mean = detail::mean_of(dp);
            vc.scenario = classify_scenario(vc.jaccard_diff_mean, vc.sigma);
            rep.variant_comparisons.push_back(vc);
        }
    }

    // Every later proportion arm against the first-listed baseline, per K.
    if (cfg.regime == Regime::InhibSweep && cfg.inhib_proportions.size() >= 2 &&
        cfg.seeds.size() >= 2) {
        const auto arm_margins = [&rep](double prop, int k) {
            std::vector<double> v;
            for (const CellResult& c : rep.cells)
                if (c.proportion && *c.proportion == prop && c.k == k)
                    for (const SeedRow& r : c.rows) v.push_back(r.jaccard_margin);
            return v;
        };
        for (std::size_t pi = 1; pi < cfg.inhib_proportions.size(); ++pi) {
            for (int k : cfg.k_list) {
                ProportionComparison pc;
                pc.k = k;
                pc.x_proportion = cfg.inhib_proportions[pi];
                pc.y_proportion = cfg.inhib_proportions[0];
                const std::vector<double> xs = arm_margins(pc.x_proportion, k);
                const std::vector<double> ys = arm_margins(pc.y_proportion, k);
                pc.welch = welch_t(xs, ys);
                pc.d = cohens_d(xs, ys);
                rep.proportion_comparisons.push_back(pc);
            }
        }
    }
    return rep;
}

} // namespace ca3
