#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ca3/core.hpp"
#include "ca3/harness.hpp"

namespace ca3 {

inline std::string regime_label(Regime r) {
    switch (r) {
        case Regime::Auto: return "auto";
        case Regime::Paired: return "paired";
        case Regime::Temporal: return "temporal";
        default: return "inhib_sweep";
    }
}

inline Regime parse_regime(const std::string& s) {
    if (s == "auto") return Regime::Auto;
    if (s == "paired") return Regime::Paired;
    if (s == "temporal") return Regime::Temporal;
    if (s == "inhib_sweep") return Regime::InhibSweep;
    throw ConfigError("regime must be one of auto, paired, temporal, inhib_sweep (got '" + s +
                      "')");
}

inline std::string variant_sel_label(VariantSel v) {
    switch (v) {
        case VariantSel::Full: return "full";
        case VariantSel::Minimal: return "minimal";
        default: return "both";
    }
}

inline VariantSel parse_variant_sel(const std::string& s) {
    if (s == "full") return VariantSel::Full;
    if (s == "minimal") return VariantSel::Minimal;
    if (s == "both") return VariantSel::Both;
    throw ConfigError("variant must be one of full, minimal, both (got '" + s + "')");
}

namespace detail {

// Typed accessor over one JSON object level; finish() rejects unconsumed keys
// so misspelled options fail loudly instead of silently reverting to defaults.
class StrictObject {
  public:
    StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(label() + " must be a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const nlohmann::json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double num(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_number()) throw ConfigError(key_path(key) + " must be a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(key_path(key) + " must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(key_path(key) + " must be a boolean");
        return v.get<bool>();
    }

    std::string str(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_string()) throw ConfigError(key_path(key) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_array()) throw ConfigError(key_path(key) + " must be an array of integers");
        std::vector<int> out;
        for (const auto& e : v) {
            if (!e.is_number_integer())
                throw ConfigError(key_path(key) + " must contain only integers");
            out.push_back(e.get<int>());
        }
        return out;
    }

    std::vector<double> num_list(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_array()) throw ConfigError(key_path(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(key_path(key) + " must contain only numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::uint64_t> seed_list(const std::string& key,
                                         std::vector<std::uint64_t> fallback) {
        if (!has(key)) return fallback;
        const nlohmann::json& v = raw(key);
        if (!v.is_array())
            throw ConfigError(key_path(key) + " must be an array of non-negative integers");
        std::vector<std::uint64_t> out;
        for (const auto& e : v) {
            if (!e.is_number_integer() || (e.is_number_integer() && !e.is_number_unsigned() &&
                                           e.get<std::int64_t>() < 0))
                throw ConfigError(key_path(key) + " must contain only non-negative integers");
            out.push_back(e.get<std::uint64_t>());
        }
        return out;
    }

    std::string key_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("unknown config key '" + key_path(it.key()) + "'");
    }

  private:
    std::string label() const { return path_.empty() ? "config root" : path_; }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline const std::set<std::string>& known_roles() {
    static const std::set<std::string> roles{"soma", "AIS", "proximal-dendrite",
                                             "distal-dendrite", "dendrite"};
    return roles;
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    detail::StrictObject o(j, "");

    cfg.regime = parse_regime(o.str("regime", regime_label(cfg.regime)));
    cfg.variant = parse_variant_sel(o.str("variant", variant_sel_label(cfg.variant)));
    cfg.n_pyrs = o.integer("n_pyrs", cfg.n_pyrs);
    cfg.k_list = o.int_list("k_list", cfg.k_list);
    // Sparsity defaults to the small-network value below 64 units, else 0.15.
    cfg.a = o.num("a", cfg.n_pyrs >= 64 ? 0.15 : 0.25);
    cfg.mask_frac = o.num("mask_frac", cfg.mask_frac);
    cfg.exposures = o.integer("exposures", cfg.exposures);
    cfg.t_present = o.integer("t_present", cfg.t_present);
    cfg.t_recall = o.integer("t_recall", cfg.t_recall);
    cfg.seeds = o.seed_list("seeds", cfg.seeds);
    cfg.recall_ach = o.num("recall_ach", cfg.recall_ach);
    cfg.inhib_proportions = o.num_list("inhib_proportions", cfg.inhib_proportions);
    cfg.frames = o.integer("frames", cfg.frames);
    cfg.shift = o.integer("shift", cfg.shift);
    cfg.shuffle_presentation = o.boolean("shuffle_presentation", cfg.shuffle_presentation);
    cfg.plastic_recall = o.boolean("plastic_recall", cfg.plastic_recall);
    cfg.control_recalls = o.boolean("control_recalls", cfg.control_recalls);
    cfg.out_dir = o.str("out_dir", cfg.out_dir);

    if (o.has("ach")) {
        detail::StrictObject s(o.raw("ach"), "ach");
        const std::string mode = s.str("mode", "constant");
        if (mode == "constant") {
            cfg.ach.mode = AChSchedule::Mode::Constant;
        } else if (mode == "bimodal") {
            cfg.ach.mode = AChSchedule::Mode::Bimodal;
        } else {
            throw ConfigError("ach.mode must be constant or bimodal (got '" + mode + "')");
        }
        cfg.ach.level = s.num("level", cfg.ach.level);
        cfg.ach.encode_level = s.num("encode_level", cfg.ach.encode_level);
        cfg.ach.consolidate_level = s.num("consolidate_level", cfg.ach.consolidate_level);
        cfg.ach.t_encode = s.integer("t_encode", int(cfg.ach.t_encode));
        cfg.ach.t_consolidate = s.integer("t_consolidate", int(cfg.ach.t_consolidate));
        const std::string phase =
            s.str("start_phase",
                  cfg.ach.start_phase == AChSchedule::Phase::Encode ? "encode" : "consolidate");
        if (phase == "encode") cfg.ach.start_phase = AChSchedule::Phase::Encode;
        else if (phase == "consolidate") cfg.ach.start_phase = AChSchedule::Phase::Consolidate;
        else throw ConfigError("ach.start_phase must be encode or consolidate");
        s.finish();
    }

    if (o.has("rules")) {
        detail::StrictObject s(o.raw("rules"), "rules");
        RuleParams& r = cfg.rules;
        r.eta_hebb = s.num("eta_hebb", r.eta_hebb);
        r.eta_bcm = s.num("eta_bcm", r.eta_bcm);
        r.tau_bcm = s.num("tau_bcm", r.tau_bcm);
        r.theta_init = s.num("theta_init", r.theta_init);
        r.stp_u = s.num("stp_u", r.stp_u);
        r.tau_f = s.num("tau_f", r.tau_f);
        r.tau_d = s.num("tau_d", r.tau_d);
        r.eta_iltd = s.num("eta_iltd", r.eta_iltd);
        r.eta_rec = s.num("eta_rec", r.eta_rec);
        r.eta_burst = s.num("eta_burst", r.eta_burst);
        r.ecb_decay = s.num("ecb_decay", r.ecb_decay);
        r.ecb_gain = s.num("ecb_gain", r.ecb_gain);
        r.ecb_r_thresh = s.num("ecb_r_thresh", r.ecb_r_thresh);
        r.ach_gate_center = s.num("ach_gate_center", r.ach_gate_center);
        r.ach_gate_width = s.num("ach_gate_width", r.ach_gate_width);
        r.ach_floor = s.num("ach_floor", r.ach_floor);
        r.w_max = s.num("w_max", r.w_max);
        s.finish();
    }

    if (o.has("circuit")) {
        detail::StrictObject s(o.raw("circuit"), "circuit");
        CircuitSettings& c = cfg.circuit;
        c.lif_default.beta = s.num("beta", c.lif_default.beta);
        c.lif_default.v_thr = s.num("v_thr", c.lif_default.v_thr);
        c.lif_default.v_init = s.num("v_init", c.lif_default.v_init);
        c.delay = s.integer("delay", c.delay);
        c.init_std = s.num("init_std", c.init_std);
        if (s.has("init_std_inhibitory"))
            c.init_std_inhibitory = s.num("init_std_inhibitory", 0.0);
        c.history_ticks = s.integer("history_ticks", c.history_ticks);
        if (s.has("lif")) {
            const nlohmann::json& lifs = s.raw("lif");
            if (!lifs.is_object()) throw ConfigError("circuit.lif must be an object");
            for (auto it = lifs.begin(); it != lifs.end(); ++it) {
                (void)population_spec(it.key());  // rejects unknown population names
                detail::StrictObject ps(it.value(), "circuit.lif." + it.key());
                LIFParams p = c.lif_default;
                p.beta = ps.num("beta", p.beta);
                p.v_thr = ps.num("v_thr", p.v_thr);
                p.v_init = ps.num("v_init", p.v_init);
                ps.finish();
                c.lif[it.key()] = p;
            }
        }
        if (s.has("coupling")) {
            const nlohmann::json& cp = s.raw("coupling");
            if (!cp.is_object()) throw ConfigError("circuit.coupling must be an object");
            for (auto it = cp.begin(); it != cp.end(); ++it) {
                if (!detail::known_roles().count(it.key()))
                    throw ConfigError("circuit.coupling: unknown compartment role '" + it.key() +
                                      "'");
                if (!it.value().is_number())
                    throw ConfigError("circuit.coupling." + it.key() + " must be a number");
                c.coupling[it.key()] = it.value().get<double>();
            }
        }
        if (s.has("counts")) {
            const nlohmann::json& ct = s.raw("counts");
            if (!ct.is_object()) throw ConfigError("circuit.counts must be an object");
            for (auto it = ct.begin(); it != ct.end(); ++it) {
                (void)population_spec(it.key());
                if (!it.value().is_number_integer() || it.value().get<int>() < 1)
                    throw ConfigError("circuit.counts." + it.key() +
                                      " must be a positive integer");
                c.counts[it.key()] = it.value().get<int>();
            }
        }
        s.finish();
    }

    if (o.has("injection")) {
        detail::StrictObject s(o.raw("injection"), "injection");
        const std::string mode = s.str("mode", "dc");
        if (mode == "dc") cfg.injection.kind = InjectionMode::Kind::Dc;
        else if (mode == "bernoulli") cfg.injection.kind = InjectionMode::Kind::Bernoulli;
        else throw ConfigError("injection.mode must be dc or bernoulli (got '" + mode + "')");
        cfg.injection.amplitude = s.num("amplitude", cfg.injection.amplitude);
        cfg.injection.p_high = s.num("p_high", cfg.injection.p_high);
        cfg.injection.p_low = s.num("p_low", cfg.injection.p_low);
        s.finish();
    }

    o.finish();
    validate_config(cfg);
    return cfg;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["regime"] = regime_label(cfg.regime);
    j["variant"] = variant_sel_label(cfg.variant);
    j["n_pyrs"] = cfg.n_pyrs;
    j["k_list"] = cfg.k_list;
    j["a"] = cfg.a;
    j["mask_frac"] = cfg.mask_frac;
    j["exposures"] = cfg.exposures;
    j["t_present"] = cfg.t_present;
    j["t_recall"] = cfg.t_recall;
    j["seeds"] = cfg.seeds;
    nlohmann::ordered_json ach;
    ach["mode"] = cfg.ach.mode == AChSchedule::Mode::Constant ? "constant" : "bimodal";
    ach["level"] = cfg.ach.level;
    ach["encode_level"] = cfg.ach.encode_level;
    ach["consolidate_level"] = cfg.ach.consolidate_level;
    ach["t_encode"] = cfg.ach.t_encode;
    ach["t_consolidate"] = cfg.ach.t_consolidate;
    ach["start_phase"] =
        cfg.ach.start_phase == AChSchedule::Phase::Encode ? "encode" : "consolidate";
    j["ach"] = ach;
    j["recall_ach"] = cfg.recall_ach;
    nlohmann::ordered_json rules;
    rules["eta_hebb"] = cfg.rules.eta_hebb;
    rules["eta_bcm"] = cfg.rules.eta_bcm;
    rules["tau_bcm"] = cfg.rules.tau_bcm;
    rules["theta_init"] = cfg.rules.theta_init;
    rules["stp_u"] = cfg.rules.stp_u;
    rules["tau_f"] = cfg.rules.tau_f;
    rules["tau_d"] = cfg.rules.tau_d;
    rules["eta_iltd"] = cfg.rules.eta_iltd;
    rules["eta_rec"] = cfg.rules.eta_rec;
    rules["eta_burst"] = cfg.rules.eta_burst;
    rules["ecb_decay"] = cfg.rules.ecb_decay;
    rules["ecb_gain"] = cfg.rules.ecb_gain;
    rules["ecb_r_thresh"] = cfg.rules.ecb_r_thresh;
    rules["ach_gate_center"] = cfg.rules.ach_gate_center;
    rules["ach_gate_width"] = cfg.rules.ach_gate_width;
    rules["ach_floor"] = cfg.rules.ach_floor;
    rules["w_max"] = cfg.rules.w_max;
    j["rules"] = rules;
    nlohmann::ordered_json circuit;
    circuit["beta"] = cfg.circuit.lif_default.beta;
    circuit["v_thr"] = cfg.circuit.lif_default.v_thr;
    circuit["v_init"] = cfg.circuit.lif_default.v_init;
    circuit["delay"] = cfg.circuit.delay;
    circuit["init_std"] = cfg.circuit.init_std;
    if (cfg.circuit.init_std_inhibitory)
        circuit["init_std_inhibitory"] = *cfg.circuit.init_std_inhibitory;
    circuit["history_ticks"] = cfg.circuit.history_ticks;
    if (!cfg.circuit.lif.empty()) {
        nlohmann::ordered_json lifs;
        for (const auto& [name, p] : cfg.circuit.lif) {
            nlohmann::ordered_json e;
            e["beta"] = p.beta;
            e["v_thr"] = p.v_thr;
            e["v_init"] = p.v_init;
            lifs[name] = e;
        }
        circuit["lif"] = lifs;
    }
    if (!cfg.circuit.coupling.empty()) {
        nlohmann::ordered_json cp;
        for (const auto& [role, v] : cfg.circuit.coupling) cp[role] = v;
        circuit["coupling"] = cp;
    }
    if (!cfg.circuit.counts.empty()) {
        nlohmann::ordered_json ct;
        for (const auto& [name, n] : cfg.circuit.counts) ct[name] = n;
        circuit["counts"] = ct;
    }
    j["circuit"] = circuit;
    nlohmann::ordered_json inj;
    inj["mode"] = cfg.injection.kind == InjectionMode::Kind::Dc ? "dc" : "bernoulli";
    inj["amplitude"] = cfg.injection.amplitude;
    inj["p_high"] = cfg.injection.p_high;
    inj["p_low"] = cfg.injection.p_low;
    j["injection"] = inj;
    j["inhib_proportions"] = cfg.inhib_proportions;
    j["frames"] = cfg.frames;
    j["shift"] = cfg.shift;
    j["shuffle_presentation"] = cfg.shuffle_presentation;
    j["plastic_recall"] = cfg.plastic_recall;
    j["control_recalls"] = cfg.control_recalls;
    j["out_dir"] = cfg.out_dir;
    return j;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace ca3
