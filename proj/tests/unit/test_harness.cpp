#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "ca3/config_io.hpp"
#include "ca3/report.hpp"

using namespace ca3;
using nlohmann::json;
using Catch::Approx;

namespace {

ExperimentConfig from(const json& j) { return config_from_json(j); }

std::string body_of(const SweepReport& rep) {
    return report_body_string(json::parse(report_to_json(rep, 0.0).dump()));
}

} // namespace

TEST_CASE("zero exposures leave the circuit weights untouched") {
    const ExperimentConfig cfg = from(json{{"variant", "minimal"}, {"exposures", 0}});
    const PatternSet set = gen_orthogonal_sparse(16, 3, 0.25, 1);
    Circuit c = make_experiment_circuit(cfg, Variant::Minimal, std::nullopt, 42);
    PlasticityState st = init_plasticity(c);
    const std::uint64_t before = weight_checksum(c);
    run_store_phase(c, st, set.items, cfg, 42);
    REQUIRE(weight_checksum(c) == before);
}

TEST_CASE("storage strengthens within-pattern recurrence above cross-pattern") {
    const ExperimentConfig cfg =
        from(json{{"variant", "minimal"}, {"exposures", 20}, {"seeds", {42}}});
    const PatternSet set = gen_orthogonal_sparse(16, 2, 0.25, derive_seed(42, "patterns", {2}));
    Circuit c = make_experiment_circuit(cfg, Variant::Minimal, std::nullopt, 42);
    PlasticityState st = init_plasticity(c);
    run_store_phase(c, st, set.items, cfg, 42);

    const Mat& w = c.projections()[0].syn.w;
    double within = 0.0, cross = 0.0;
    int n_within = 0, n_cross = 0;
    for (int p = 0; p < 2; ++p)
        for (int i : set.items[std::size_t(p)].support())
            for (int q = 0; q < 2; ++q)
                for (int k : set.items[std::size_t(q)].support()) {
                    if (i == k) continue;
                    if (p == q) {
                        within += w(std::size_t(i), std::size_t(k));
                        ++n_within;
                    } else {
                        cross += w(std::size_t(i), std::size_t(k));
                        ++n_cross;
                    }
                }
    REQUIRE(within / n_within > cross / n_cross);
}

TEST_CASE("recall trials cannot perturb the trained circuit") {
    const ExperimentConfig cfg =
        from(json{{"variant", "minimal"}, {"exposures", 10}, {"seeds", {42}}});
    const PatternSet set = gen_orthogonal_sparse(16, 2, 0.25, 7);
    Circuit c = make_experiment_circuit(cfg, Variant::Minimal, std::nullopt, 42);
    PlasticityState st = init_plasticity(c);
    run_store_phase(c, st, set.items, cfg, 42);
    const std::uint64_t trained = weight_checksum(c);
    const std::int64_t ticks = c.ticks();

    const Pattern cue = mask_cue(set.items[0], 0.5, 3);
    for (int rep = 0; rep < 3; ++rep)
        run_recall_trial(c, st, cue, set.items[0], chance_prototype(set.items, 0), cfg, 9);
    REQUIRE(weight_checksum(c) == trained);
    REQUIRE(c.ticks() == ticks);
}

TEST_CASE("experiments are reproducible run to run") {
    const json j = {{"regime", "auto"}, {"variant", "both"},   {"n_pyrs", 16}, {"k_list", {2}},
                    {"exposures", 8},   {"seeds", {42, 43}}};
    REQUIRE(body_of(run_experiment(from(j))) == body_of(run_experiment(from(j))));
}

TEST_CASE("per-seed results do not depend on the seed list order") {
    const json base = {{"regime", "auto"}, {"variant", "minimal"}, {"n_pyrs", 16},
                       {"k_list", {2}},    {"exposures", 8}};
    json ab = base, ba = base;
    ab["seeds"] = {42, 43};
    ba["seeds"] = {43, 42};
    const SweepReport rab = run_experiment(from(ab));
    const SweepReport rba = run_experiment(from(ba));
    const auto row_for = [](const SweepReport& r, std::uint64_t seed) {
        for (const SeedRow& row : r.cells[0].rows)
            if (row.seed == seed) return row;
        throw Error("seed row not found");
    };
    for (std::uint64_t seed : {42ULL, 43ULL}) {
        const SeedRow a = row_for(rab, seed);
        const SeedRow b = row_for(rba, seed);
        REQUIRE(a.jaccard_margin == b.jaccard_margin);
        REQUIRE(a.cosine_margin == b.cosine_margin);
        REQUIRE(a.jaccard_target == b.jaccard_target);
        REQUIRE(a.pyrs_rate == b.pyrs_rate);
    }
}

TEST_CASE("parallel execution produces the identical report") {
    const json j = {{"regime", "auto"}, {"variant", "both"}, {"n_pyrs", 16}, {"k_list", {1, 2}},
                    {"exposures", 6},   {"seeds", {42, 43}}};
    REQUIRE(body_of(run_experiment(from(j), 1)) == body_of(run_experiment(from(j), 4)));
}

TEST_CASE("an unmasked cue recalls at least as well as the untrained control") {
    const json j = {{"regime", "auto"}, {"variant", "minimal"}, {"n_pyrs", 16}, {"k_list", {1}},
                    {"mask_frac", 0.0}, {"exposures", 20},      {"seeds", {42, 43, 44}}};
    const SweepReport rep = run_experiment(from(j));
    for (const SeedRow& row : rep.cells[0].rows) {
        REQUIRE(row.control_jaccard_target.has_value());
        REQUIRE(row.jaccard_target >= *row.control_jaccard_target);
    }
}

TEST_CASE("paired recall through the bare recurrence echoes the cue side") {
    const json j = {{"regime", "paired"}, {"variant", "minimal"}, {"n_pyrs", 16},
                    {"k_list", {2}},      {"exposures", 10},      {"seeds", {42, 43, 44}}};
    const SweepReport rep = run_experiment(from(j));
    REQUIRE(rep.cells.size() == 1);
    for (const SeedRow& row : rep.cells[0].rows) {
        REQUIRE(row.jac_a.has_value());
        REQUIRE(row.jac_b.has_value());
        REQUIRE(row.echo_diff.value() == Approx(*row.jac_b - *row.jac_a).margin(1e-15));
        // Cued with masked A, the plain recurrence reproduces A, not its partner.
        REQUIRE(*row.echo_diff <= 0.0);
    }
}

TEST_CASE("a shift-free sequence scores zero margins on every window") {
    const json j = {{"regime", "temporal"}, {"variant", "minimal"}, {"n_pyrs", 16},
                    {"frames", 4},          {"shift", 0},           {"exposures", 6},
                    {"seeds", {42}}};
    const SweepReport rep = run_experiment(from(j));
    const SeedRow& row = rep.cells[0].rows[0];
    REQUIRE(row.frame_jaccard_margins.size() == 4);
    REQUIRE(row.frame_cosine_margins.size() == 4);
    REQUIRE(row.frame_pearson_margins.size() == 4);
    for (double m : row.frame_jaccard_margins) REQUIRE(m == 0.0);
    for (double m : row.frame_cosine_margins) REQUIRE(m == 0.0);
    REQUIRE(row.m_t2_jaccard.value() == 0.0);
    REQUIRE(row.m_traj_jaccard.value() == 0.0);
}

TEST_CASE("two-frame sequences make the single-step and trajectory scores coincide") {
    const json j = {{"regime", "temporal"}, {"variant", "minimal"}, {"n_pyrs", 16},
                    {"frames", 2},          {"shift", 3},           {"exposures", 6},
                    {"seeds", {42}}};
    const SweepReport rep = run_experiment(from(j));
    const SeedRow& row = rep.cells[0].rows[0];
    REQUIRE(row.m_t2_jaccard.value() == row.m_traj_jaccard.value());
    REQUIRE(row.m_t2_cosine.value() == row.m_traj_cosine.value());
}

TEST_CASE("inhibition sweeps run the full variant on every arm") {
    const json j = {{"regime", "inhib_sweep"}, {"n_pyrs", 16},     {"k_list", {2}},
                    {"exposures", 4},          {"seeds", {42, 43}}, {"inhib_proportions", {0.57, 0.3}}};
    const SweepReport rep = run_experiment(from(j));
    REQUIRE(rep.cells.size() == 2);
    for (const CellResult& cell : rep.cells) {
        REQUIRE(cell.variant == "full");
        REQUIRE(cell.proportion.has_value());
        for (const SeedRow& row : cell.rows)
            REQUIRE(!row.control_jaccard_target.has_value());
    }
    REQUIRE(rep.proportion_comparisons.size() == 1);
    REQUIRE(rep.proportion_comparisons[0].x_proportion == 0.3);
    REQUIRE(rep.proportion_comparisons[0].y_proportion == 0.57);
}

TEST_CASE("pattern loads beyond the capacity bound run with a warning") {
    const json j = {{"regime", "auto"}, {"variant", "minimal"}, {"n_pyrs", 16}, {"k_list", {47}},
                    {"exposures", 0},   {"seeds", {42}}};
    const SweepReport rep = run_experiment(from(j));
    REQUIRE(rep.warnings.size() == 1);
    REQUIRE(rep.warnings[0].find("exceeds the theoretical capacity bound") != std::string::npos);

    const json ok = {{"regime", "auto"}, {"variant", "minimal"}, {"n_pyrs", 16}, {"k_list", {3}},
                     {"exposures", 0},   {"seeds", {42}}};
    REQUIRE(run_experiment(from(ok)).warnings.empty());
}
