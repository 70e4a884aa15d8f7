#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ca3/config_io.hpp"
#include "ca3/harness.hpp"
#include "ca3/stats.hpp"

namespace ca3 {

inline constexpr double kBimodalityThreshold = 0.10;
inline constexpr int kReportFormatVersion = 1;

namespace detail {

inline nlohmann::ordered_json json_opt(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

inline nlohmann::ordered_json json_stats(const SeedStats& s) {
    nlohmann::ordered_json j;
    j["mean"] = s.mean;
    j["std"] = s.stddev ? nlohmann::ordered_json(*s.stddev) : nlohmann::ordered_json(nullptr);
    j["n"] = s.n;
    return j;
}

// Per-seed fields an aggregate row can be built from. A field missing on every
// row is not aggregated at all.
struct SeedField {
    const char* key;
    std::function<std::optional<double>(const SeedRow&)> get;
};

inline const std::vector<SeedField>& seed_fields() {
    static const std::vector<SeedField> fields = {
        {"jaccard_margin", [](const SeedRow& r) { return std::optional<double>(r.jaccard_margin); }},
        {"cosine_margin", [](const SeedRow& r) { return std::optional<double>(r.cosine_margin); }},
        {"pearson_margin", [](const SeedRow& r) { return r.pearson_margin; }},
        {"jaccard_target", [](const SeedRow& r) { return std::optional<double>(r.jaccard_target); }},
        {"pyrs_rate", [](const SeedRow& r) { return std::optional<double>(r.pyrs_rate); }},
        {"control_jaccard_target", [](const SeedRow& r) { return r.control_jaccard_target; }},
        {"jac_a", [](const SeedRow& r) { return r.jac_a; }},
        {"jac_b", [](const SeedRow& r) { return r.jac_b; }},
        {"echo_diff", [](const SeedRow& r) { return r.echo_diff; }},
        {"m_t2_jaccard", [](const SeedRow& r) { return r.m_t2_jaccard; }},
        {"m_traj_jaccard", [](const SeedRow& r) { return r.m_traj_jaccard; }},
        {"m_t2_cosine", [](const SeedRow& r) { return r.m_t2_cosine; }},
        {"m_traj_cosine", [](const SeedRow& r) { return r.m_traj_cosine; }},
        {"m_t2_pearson", [](const SeedRow& r) { return r.m_t2_pearson; }},
        {"m_traj_pearson", [](const SeedRow& r) { return r.m_traj_pearson; }},
    };
    return fields;
}

} // namespace detail

inline nlohmann::ordered_json seed_row_to_json(const SeedRow& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["jaccard_margin"] = r.jaccard_margin;
    j["cosine_margin"] = r.cosine_margin;
    j["pearson_margin"] = detail::json_opt(r.pearson_margin);
    j["n_undefined_pearson"] = r.n_undefined_pearson;
    j["jaccard_target"] = r.jaccard_target;
    j["pyrs_rate"] = r.pyrs_rate;
    if (r.control_jaccard_target) j["control_jaccard_target"] = *r.control_jaccard_target;
    if (r.jac_a) j["jac_a"] = *r.jac_a;
    if (r.jac_b) j["jac_b"] = *r.jac_b;
    if (r.echo_diff) j["echo_diff"] = *r.echo_diff;
    if (!r.frame_jaccard_margins.empty()) {
        j["frame_jaccard_margins"] = r.frame_jaccard_margins;
        j["frame_cosine_margins"] = r.frame_cosine_margins;
        nlohmann::ordered_json fp = nlohmann::ordered_json::array();
        for (const auto& v : r.frame_pearson_margins) fp.push_back(detail::json_opt(v));
        j["frame_pearson_margins"] = fp;
        j["m_t2_jaccard"] = detail::json_opt(r.m_t2_jaccard);
        j["m_traj_jaccard"] = detail::json_opt(r.m_traj_jaccard);
        j["m_t2_cosine"] = detail::json_opt(r.m_t2_cosine);
        j["m_traj_cosine"] = detail::json_opt(r.m_traj_cosine);
        j["m_t2_pearson"] = detail::json_opt(r.m_t2_pearson);
        j["m_traj_pearson"] = detail::json_opt(r.m_traj_pearson);
    }
    return j;
}

inline nlohmann::ordered_json cell_to_json(const CellResult& cell) {
    nlohmann::ordered_json j;
    j["variant"] = cell.variant;
    if (cell.proportion) j["proportion"] = *cell.proportion;
    j["k"] = cell.k;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const SeedRow& r : cell.rows) rows.push_back(seed_row_to_json(r));
    j["seeds"] = rows;

    nlohmann::ordered_json agg;
    for (const detail::SeedField& f : detail::seed_fields()) {
        std::vector<double> vals;
        for (const SeedRow& r : cell.rows)
            if (const std::optional<double> v = f.get(r)) vals.push_back(*v);
        if (!vals.empty()) agg[f.key] = detail::json_stats(seed_stats(vals));
    }
    j["aggregates"] = agg;

    std::vector<double> margins;
    for (const SeedRow& r : cell.rows) margins.push_back(r.jaccard_margin);
    const BimodalityReport bi = bimodality_report(margins, kBimodalityThreshold);
    nlohmann::ordered_json bj;
    bj["threshold"] = bi.threshold;
    bj["n_above"] = bi.n_above;
    bj["n_below"] = bi.n_below;
    bj["values"] = bi.sorted_values;
    j["bimodality"] = bj;

    int undefined = 0;
    for (const SeedRow& r : cell.rows) undefined += r.n_undefined_pearson;
    j["undefined_pearson_trials"] = undefined;
    return j;
}

inline nlohmann::ordered_json report_to_json(const SweepReport& rep, double runtime_seconds) {
    nlohmann::ordered_json body;
    body["regime"] = regime_label(rep.cfg.regime);
    // The body identifies the experiment; where its files land does not belong.
    nlohmann::ordered_json cfg_echo = config_to_json(rep.cfg);
    cfg_echo.erase("out_dir");
    body["config"] = cfg_echo;
    if (rep.cfg.a < 1.0)
        body["theoretical_capacity"] = theoretical_capacity(double(rep.cfg.n_pyrs), rep.cfg.a);
    body["warnings"] = rep.warnings;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const CellResult& c : rep.cells) cells.push_back(cell_to_json(c));
    body["cells"] = cells;

    nlohmann::ordered_json vcs = nlohmann::ordered_json::array();
    for (const VariantComparison& vc : rep.variant_comparisons) {
        nlohmann::ordered_json j;
        j["k"] = vc.k;
        j["jaccard_diff_mean"] = vc.jaccard_diff_mean;
        j["sigma"] = vc.sigma;
        j["cosine_diff_mean"] = vc.cosine_diff_mean;
        j["pearson_diff_mean"] = detail::json_opt(vc.pearson_diff_mean);
        j["scenario"] = scenario_name(vc.scenario);
        vcs.push_back(j);
    }
    body["variant_comparisons"] = vcs;

    nlohmann::ordered_json pcs = nlohmann::ordered_json::array();
    for (const ProportionComparison& pc : rep.proportion_comparisons) {
        nlohmann::ordered_json j;
        j["k"] = pc.k;
        j["x_proportion"] = pc.x_proportion;
        j["y_proportion"] = pc.y_proportion;
        nlohmann::ordered_json w;
        w["t"] = pc.welch.t;
        w["df"] = pc.welch.df;
        w["p_one_sided"] = pc.welch.p_one_sided;
        j["welch"] = w;
        nlohmann::ordered_json d;
        d["pooled"] = pc.d.pooled;
        d["control_sd"] = pc.d.control_sd;
        d["treatment_sd"] = pc.d.treatment_sd;
        j["cohens_d"] = d;
        pcs.push_back(j);
    }
    body["proportion_comparisons"] = pcs;

    nlohmann::ordered_json rep_json;
    rep_json["format_version"] = kReportFormatVersion;
    nlohmann::ordered_json meta;
    meta["runtime_seconds"] = runtime_seconds;
    rep_json["meta"] = meta;
    rep_json["body"] = body;
    return rep_json;
}

// The comparable portion of a report: everything except meta. Two runs of the
// same config must agree on these bytes exactly.
inline std::string report_body_string(const nlohmann::json& report) {
    return report.at("body").dump(2);
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_opt(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

} // namespace detail

inline std::string trials_csv(const SweepReport& rep) {
    std::string out =
        "regime,variant,proportion,k,seed,trial,frame,"
        "jaccard_target,jaccard_chance,jaccard_margin,"
        "cosine_target,cosine_chance,cosine_margin,"
        "pearson_target,pearson_chance,pearson_margin,"
        "pyrs_rate,control_jaccard_target,jac_a,jac_b\n";
    const std::string regime = regime_label(rep.cfg.regime);
    for (const CellResult& cell : rep.cells) {
        for (const TrialRow& t : cell.trials) {
            out += regime + ',' + t.variant + ',' + detail::csv_opt(t.proportion) + ',' +
                   std::to_string(t.k) + ',' + std::to_string(t.seed) + ',' +
                   std::to_string(t.trial) + ',' +
                   (t.frame >= 0 ? std::to_string(t.frame) : std::string()) + ',' +
                   detail::fmt_double(t.m.jaccard_target) + ',' +
                   detail::fmt_double(t.m.jaccard_chance) + ',' +
                   detail::fmt_double(t.m.jaccard_margin) + ',' +
                   detail::fmt_double(t.m.cosine_target) + ',' +
                   detail::fmt_double(t.m.cosine_chance) + ',' +
                   detail::fmt_double(t.m.cosine_margin) + ',' +
                   detail::csv_opt(t.m.pearson_target) + ',' +
                   detail::csv_opt(t.m.pearson_chance) + ',' +
                   detail::csv_opt(t.m.pearson_margin) + ',' + detail::fmt_double(t.pyrs_rate) +
                   ',' + detail::csv_opt(t.control_jaccard_target) + ',' +
                   detail::csv_opt(t.jac_a) + ',' + detail::csv_opt(t.jac_b) + '\n';
        }
    }
    return out;
}

struct ReportPaths {
    std::string report_json;
    std::string trials;
};

inline ReportPaths write_report_files(const SweepReport& rep, const nlohmann::ordered_json& j,
                                      const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ReportPaths paths;
    paths.report_json = (std::filesystem::path(out_dir) / "report.json").string();
    paths.trials = (std::filesystem::path(out_dir) / "trials.csv").string();
    {
        std::ofstream f(paths.report_json, std::ios::binary);
        require(bool(f), "cannot write " + paths.report_json);
        f << j.dump(2) << '\n';
    }
    {
        std::ofstream f(paths.trials, std::ios::binary);
        require(bool(f), "cannot write " + paths.trials);
        f << trials_csv(rep);
    }
    return paths;
}

// ---------------------------------------------------------------------------
// Verification of an emitted report: every aggregate, bimodality block, and
// comparison row is recomputed from the stored per-seed rows and compared for
// exact equality. Returns one message per discrepancy.

namespace detail {

inline std::optional<double> json_opt_double(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

inline bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

} // namespace detail

inline std::vector<std::string> stats_check(const nlohmann::json& report) {
    std::vector<std::string> issues;
    if (!report.contains("body")) return {"report has no body"};
    const nlohmann::json& body = report.at("body");

    const auto cell_label = [](const nlohmann::json& cell) {
        std::string s = "cell variant=" + cell.at("variant").get<std::string>() +
                        " k=" + std::to_string(cell.at("k").get<int>());
        if (cell.contains("proportion"))
            s += " proportion=" + detail::fmt_double(cell.at("proportion").get<double>());
        return s;
    };

    for (const nlohmann::json& cell : body.at("cells")) {
        const std::string label = cell_label(cell);
        const nlohmann::json& rows = cell.at("seeds");
        for (auto it = cell.at("aggregates").begin(); it != cell.at("aggregates").end(); ++it) {
            std::vector<double> vals;
            for (const nlohmann::json& row : rows)
                if (const auto v = detail::json_opt_double(row, it.key())) vals.push_back(*v);
            if (vals.empty()) {
                issues.push_back(label + ": aggregate '" + it.key() +
                                 "' has no backing values in the seed rows");
                continue;
            }
            const SeedStats s = seed_stats(vals);
            const nlohmann::json& a = it.value();
            if (a.at("mean").get<double>() != s.mean)
                issues.push_back(label + ": aggregate '" + it.key() + "' mean mismatch");
            if (!detail::same_opt(detail::json_opt_double(a, "std"), s.stddev))
                issues.push_back(label + ": aggregate '" + it.key() + "' std mismatch");
            if (a.at("n").get<int>() != s.n)
                issues.push_back(label + ": aggregate '" + it.key() + "' n mismatch");
        }
        std::vector<double> margins;
        for (const nlohmann::json& row : rows)
            margins.push_back(row.at("jaccard_margin").get<double>());
        const nlohmann::json& bj = cell.at("bimodality");
        const BimodalityReport bi = bimodality_report(margins, bj.at("threshold").get<double>());
        if (bj.at("n_above").get<int>() != bi.n_above ||
            bj.at("n_below").get<int>() != bi.n_below)
            issues.push_back(label + ": bimodality counts mismatch");
        if (bj.at("values").get<std::vector<double>>() != bi.sorted_values)
            issues.push_back(label + ": bimodality values mismatch");
    }

    const auto find_cell = [&body](const std::string& variant, int k,
                                   std::optional<double> proportion) -> const nlohmann::json* {
        for (const nlohmann::json& cell : body.at("cells")) {
            if (cell.at("variant").get<std::string>() != variant) continue;
            if (cell.at("k").get<int>() != k) continue;
            const bool has_prop = cell.contains("proportion");
            if (has_prop != proportion.has_value()) continue;
            if (has_prop && cell.at("proportion").get<double>() != *proportion) continue;
            return &cell;
        }
        return nullptr;
    };
    const auto row_values = [](const nlohmann::json& cell, const std::string& key) {
        std::vector<double> v;
        for (const nlohmann::json& row : cell.at("seeds"))
            if (const auto x = detail::json_opt_double(row, key)) v.push_back(*x);
        return v;
    };

    for (const nlohmann::json& vc : body.at("variant_comparisons")) {
        const int k = vc.at("k").get<int>();
        const std::string label = "variant comparison k=" + std::to_string(k);
        const nlohmann::json* full = find_cell("full", k, std::nullopt);
        const nlohmann::json* minimal = find_cell("minimal", k, std::nullopt);
        if (!full || !minimal) {
            issues.push_back(label + ": missing full or minimal cell");
            continue;
        }
        const auto diff = [&](const std::string& key) {
            std::vector<double> d;
            const nlohmann::json& fr = full->at("seeds");
            const nlohmann::json& mr = minimal->at("seeds");
            for (std::size_t i = 0; i < fr.size() && i < mr.size(); ++i) {
                const auto a = detail::json_opt_double(fr[i], key);
                const auto b = detail::json_opt_double(mr[i], key);
                if (a && b) d.push_back(*a - *b);
            }
            return d;
        };
        const std::vector<double> dj = diff("jaccard_margin");
        if (dj.empty()) {
            issues.push_back(label + ": no per-seed jaccard margins to compare");
            continue;
        }
        const SeedStats sj = seed_stats(dj);
        const double sigma = sj.stddev.value_or(0.0);
        if (vc.at("jaccard_diff_mean").get<double>() != sj.mean)
            issues.push_back(label + ": jaccard_diff_mean mismatch");
        if (vc.at("sigma").get<double>() != sigma)
            issues.push_back(label + ": sigma mismatch");
        const std::vector<double> dc = diff("cosine_margin");
        if (!dc.empty() && vc.at("cosine_diff_mean").get<double>() != seed_stats(dc).mean)
            issues.push_back(label + ": cosine_diff_mean mismatch");
        const std::vector<double> dp = diff("pearson_margin");
        std::optional<double> pd;
        if (!dp.empty()) pd = seed_stats(dp).mean;
        if (!detail::same_opt(detail::json_opt_double(vc, "pearson_diff_mean"), pd))
            issues.push_back(label + ": pearson_diff_mean mismatch");
        if (vc.at("scenario").get<std::string>() !=
            scenario_name(classify_scenario(sj.mean, sigma)))
            issues.push_back(label + ": scenario mismatch");
    }

    for (const nlohmann::json& pc : body.at("proportion_comparisons")) {
        const int k = pc.at("k").get<int>();
        const double xp = pc.at("x_proportion").get<double>();
        const double yp = pc.at("y_proportion").get<double>();
        const std::string label = "proportion comparison k=" + std::to_string(k) + " x=" +
                                  detail::fmt_double(xp) + " y=" + detail::fmt_double(yp);
        const nlohmann::json* xc = find_cell("full", k, xp);
        const nlohmann::json* yc = find_cell("full", k, yp);
        if (!xc || !yc) {
            issues.push_back(label + ": missing arm cell");
            continue;
        }
        const std::vector<double> xs = row_values(*xc, "jaccard_margin");
        const std::vector<double> ys = row_values(*yc, "jaccard_margin");
        if (xs.size() < 2 || ys.size() < 2) {
            issues.push_back(label + ": arms have fewer than two seeds");
            continue;
        }
        const WelchResult w = welch_t(xs, ys);
        const nlohmann::json& wj = pc.at("welch");
        if (wj.at("t").get<double>() != w.t || wj.at("df").get<double>() != w.df ||
            wj.at("p_one_sided").get<double>() != w.p_one_sided)
            issues.push_back(label + ": welch mismatch");
        const CohensD d = cohens_d(xs, ys);
        const nlohmann::json& dj = pc.at("cohens_d");
        if (dj.at("pooled").get<double>() != d.pooled ||
            dj.at("control_sd").get<double>() != d.control_sd ||
            dj.at("treatment_sd").get<double>() != d.treatment_sd)
            issues.push_back(label + ": cohens_d mismatch");
    }
    return issues;
}

} // namespace ca3
