#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ca3/config_io.hpp"
#include "ca3/harness.hpp"
#include "ca3/patterns.hpp"
#include "ca3/report.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void print_summary(const ca3::SweepReport& rep, const nlohmann::ordered_json& report) {
    std::cout << "regime " << ca3::regime_label(rep.cfg.regime) << "  cells " << rep.cells.size()
              << "  seeds " << rep.cfg.seeds.size() << '\n';
    for (const std::string& w : rep.warnings) std::cout << "warning: " << w << '\n';
    for (const auto& cell : report.at("body").at("cells")) {
        const auto& agg = cell.at("aggregates");
        std::string line = "cell " + cell.at("variant").get<std::string>();
        if (cell.contains("proportion")) line += " p=" + fmt(cell.at("proportion").get<double>());
        line += " k=" + std::to_string(cell.at("k").get<int>());
        line += ": jaccard margin " + fmt(agg.at("jaccard_margin").at("mean").get<double>());
        if (!agg.at("jaccard_margin").at("std").is_null())
            line += " +/- " + fmt(agg.at("jaccard_margin").at("std").get<double>());
        if (agg.contains("pearson_margin"))
            line += ", pearson margin " + fmt(agg.at("pearson_margin").at("mean").get<double>());
        line += ", pyrs rate " + fmt(agg.at("pyrs_rate").at("mean").get<double>());
        std::cout << line << '\n';
    }
    for (const ca3::VariantComparison& vc : rep.variant_comparisons)
        std::cout << "variant comparison k=" << vc.k << ": full-minus-minimal "
                  << fmt(vc.jaccard_diff_mean) << " sigma " << fmt(vc.sigma) << " scenario "
                  << ca3::scenario_name(vc.scenario) << '\n';
    for (const ca3::ProportionComparison& pc : rep.proportion_comparisons)
        std::cout << "proportion comparison k=" << pc.k << ": p=" << fmt(pc.x_proportion)
                  << " vs p=" << fmt(pc.y_proportion) << "  t " << fmt(pc.welch.t) << "  df "
                  << fmt(pc.welch.df) << "  p " << fmt(pc.welch.p_one_sided) << "  d "
                  << fmt(pc.d.pooled) << '\n';
}

int cmd_run(const std::string& cfg_path, const std::string& out_override,
            std::uint64_t seed_offset, int jobs, bool quiet) {
    ca3::ExperimentConfig cfg = ca3::load_config_file(cfg_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_offset != 0) {
        for (std::uint64_t& s : cfg.seeds) s += seed_offset;
        ca3::validate_config(cfg);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ca3::SweepReport rep = ca3::run_experiment(cfg, jobs);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const nlohmann::ordered_json report = ca3::report_to_json(rep, secs);
    const ca3::ReportPaths paths = ca3::write_report_files(rep, report, cfg.out_dir);
    if (!quiet) {
        print_summary(rep, report);
        std::cout << "wrote " << paths.report_json << '\n';
        std::cout << "wrote " << paths.trials << '\n';
        std::cout << "runtime " << fmt(secs) << " s\n";
    }
    return 0;
}

int cmd_validate(const std::string& cfg_path) {
    const ca3::ExperimentConfig cfg = ca3::load_config_file(cfg_path);
    std::cout << "config ok: regime " << ca3::regime_label(cfg.regime) << ", n_pyrs "
              << cfg.n_pyrs << ", " << cfg.seeds.size() << " seeds\n";
    return 0;
}

int cmd_stats(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw ca3::ConfigError("cannot open report file '" + report_path + "'");
    nlohmann::json report;
    try {
        in >> report;
    } catch (const nlohmann::json::exception& e) {
        throw ca3::ConfigError("report file '" + report_path + "' is not valid JSON: " +
                               std::string(e.what()));
    }
    if (report.contains("body") && report.at("body").contains("cells")) {
        std::cout << "cell  metric  mean  std  n\n";
        for (const nlohmann::json& cell : report.at("body").at("cells")) {
            std::string name = cell.at("variant").get<std::string>();
            if (cell.contains("proportion"))
                name += " p=" + fmt(cell.at("proportion").get<double>());
            name += " k=" + std::to_string(cell.at("k").get<int>());
            for (auto it = cell.at("aggregates").begin(); it != cell.at("aggregates").end();
                 ++it) {
                const nlohmann::json& a = it.value();
                std::cout << name << "  " << it.key() << "  " << fmt(a.at("mean").get<double>())
                          << "  "
                          << (a.at("std").is_null() ? std::string("-")
                                                    : fmt(a.at("std").get<double>()))
                          << "  " << a.at("n").get<int>() << '\n';
            }
        }
    }
    const std::vector<std::string> issues = ca3::stats_check(report);
    if (issues.empty()) {
        std::cout << "stats check passed: aggregates and comparisons reproduce exactly, 0 "
                     "discrepancies\n";
        return 0;
    }
    for (const std::string& s : issues) std::cerr << "discrepancy: " << s << '\n';
    std::cerr << issues.size() << " discrepancies\n";
    return 2;
}

int cmd_patterns(int n, int k, double a, std::uint64_t seed, const std::string& kind, int frames,
                 int shift, const std::string& out_path) {
    ca3::PatternSet set;
    if (kind == "auto") {
        set = ca3::gen_orthogonal_sparse(std::size_t(n), k, a, seed);
    } else if (kind == "paired") {
        set = ca3::gen_paired(std::size_t(n), k, a, seed);
    } else if (kind == "sequence") {
        set = ca3::gen_sequence(std::size_t(n), frames, a, shift, seed);
    } else {
        throw ca3::ConfigError("kind must be one of auto, paired, sequence (got '" + kind + "')");
    }
    const std::string text = ca3::to_text(set);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ca3::ConfigError("cannot write '" + out_path + "'");
        f << text;
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spiking attractor-memory laboratory"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "run a sweep described by a JSON config");
    std::string run_cfg;
    std::string run_out;
    std::uint64_t seed_offset = 0;
    int jobs = 1;
    bool quiet = false;
    run->add_option("config", run_cfg, "path to the JSON config")->required();
    run->add_option("--out", run_out, "output directory (overrides config out_dir)");
    run->add_option("--seed-offset", seed_offset, "added to every seed in the config");
    run->add_option("--jobs", jobs, "worker threads for (cell, seed) jobs")
        ->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "suppress the summary");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a JSON config");
    std::string val_cfg;
    validate->add_option("config", val_cfg, "path to the JSON config")->required();

    CLI::App* stats = app.add_subcommand("stats", "recompute aggregates of an emitted report");
    std::string report_path;
    stats->add_option("report", report_path, "path to report.json")->required();

    CLI::App* patterns = app.add_subcommand("patterns", "generate a pattern set as text");
    int pn = 16, pk = 3, pframes = 4, pshift = 2;
    double pa = 0.25;
    std::uint64_t pseed = 42;
    std::string pkind = "auto";
    std::string pout;
    patterns->add_option("--n", pn, "number of units")->required();
    patterns->add_option("--k", pk, "number of patterns (auto, paired)");
    patterns->add_option("--a", pa, "sparsity");
    patterns->add_option("--seed", pseed, "seed");
    patterns->add_option("--kind", pkind, "auto, paired, or sequence");
    patterns->add_option("--frames", pframes, "sequence length (sequence kind)");
    patterns->add_option("--shift", pshift, "circular shift per frame (sequence kind)");
    patterns->add_option("--out", pout, "write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_cfg, run_out, seed_offset, jobs, quiet);
        if (validate->parsed()) return cmd_validate(val_cfg);
        if (stats->parsed()) return cmd_stats(report_path);
        if (patterns->parsed())
            return cmd_patterns(pn, pk, pa, pseed, pkind, pframes, pshift, pout);
    } catch (const ca3::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
