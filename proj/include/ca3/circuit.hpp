#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ca3/core.hpp"
#include "ca3/lif.hpp"
#include "ca3/rng.hpp"
#include "ca3/rules.hpp"

namespace ca3 {

enum class Polarity { Excitatory, Inhibitory };
enum class Firing { RegularSpiking, IntrinsicBursting };
enum class RuleKind { Hebb, Bcm, BurstHebb, Iltd };

// Source name of external pattern current when it is carried by a projection
// (the mossy-fiber path and the feedforward interneuron drive).
inline const std::string kExternalSource = "EXT";

struct PopulationSpec {
    std::string name;
    Polarity polarity = Polarity::Excitatory;
    Firing firing = Firing::RegularSpiking;
    std::vector<std::string> roles;  // one entry per compartment; roles[0] is "soma"

    int n_compartments() const { return int(roles.size()); }
};

namespace detail {

inline std::vector<std::string> pyramidal_roles() {
    return {"soma",            "AIS",             "proximal-dendrite", "proximal-dendrite",
            "proximal-dendrite", "distal-dendrite", "distal-dendrite",   "distal-dendrite"};
}

inline std::vector<std::string> interneuron_roles(int n_compartments) {
    std::vector<std::string> r{"soma"};
    for (int i = 1; i < n_compartments; ++i) r.push_back("dendrite");
    return r;
}

} // namespace detail

// The ten population classes. Compartment counts per unit sum to 47.
inline const std::vector<PopulationSpec>& population_table() {
    static const std::vector<PopulationSpec> table = {
        {"PyrS", Polarity::Excitatory, Firing::RegularSpiking, detail::pyramidal_roles()},
        {"PyrD", Polarity::Excitatory, Firing::IntrinsicBursting, detail::pyramidal_roles()},
        {"BC-PV+", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(5)},
        {"CC", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(4)},
        {"O-LM", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(3)},
        {"BSC", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(3)},
        {"SL-INT", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(4)},
        {"R/L-M", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(3)},
        {"CCK+", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(5)},
        {"VIP+", Polarity::Inhibitory, Firing::RegularSpiking, detail::interneuron_roles(4)},
    };
    return table;
}

inline const PopulationSpec& population_spec(const std::string& name) {
    for (const PopulationSpec& s : population_table())
        if (s.name == name) return s;
    throw ConfigError("unknown population name: " + name);
}

// Interneuron class sizes relative to n_pyrs. Chosen so the canonical circuit's
// computed inhibitory proportion lands at 0.57 (+/- 0.01) across n_pyrs = 16..256.
inline const std::map<std::string, double>& interneuron_fractions() {
    static const std::map<std::string, double> f = {
        {"BC-PV+", 0.50}, {"CC", 0.30},     {"O-LM", 0.30}, {"BSC", 0.30},
        {"SL-INT", 0.30}, {"R/L-M", 0.25},  {"CCK+", 0.40}, {"VIP+", 0.30},
    };
    return f;
}

struct Connectivity {
    bool dense = true;
    double p = 1.0;  // keep probability when sparse
};

struct ProjectionSpec {
    std::string source;  // population name or kExternalSource
    std::string target;
    std::string target_role;
    int sign = +1;  // must match source polarity (+1 excitatory, -1 inhibitory)
    Connectivity connectivity;
    double init_mean = 0.0;
    std::optional<double> init_std;  // nullopt = inherit CircuitConfig::init_std
    std::vector<RuleKind> rules;
    bool mossy_fiber = false;   // short-term-plasticity tagged
    bool exclude_self = false;  // no autapses (square projections only)
};

struct SynapseMatrix {
    Mat w;                           // non-negative magnitudes, <= w_max
    std::vector<std::uint8_t> mask;  // 1 = synapse exists; masked entries stay exactly 0
    std::string target_role;
};

enum class Variant { Full, Minimal };

struct CircuitConfig {
    Variant variant = Variant::Full;
    int n_pyrs = 16;
    std::map<std::string, int> counts;  // units per population present in the circuit
    LIFParams lif_default;
    std::map<std::string, LIFParams> lif;  // per-population overrides
    int delay = 1;                         // synaptic delay in ticks
    double w_max = 5.0;
    double init_std = 0.05;  // weight init: magnitude = |N(init_mean, init_std)|
    int history_ticks = 4;
    std::map<std::string, double> coupling;  // role -> passive coefficient (default 1.0)
    std::vector<ProjectionSpec> projections;
};

inline std::vector<ProjectionSpec> default_projections(Variant variant) {
    std::vector<ProjectionSpec> p;
    const auto add = [&p](const std::string& src, const std::string& tgt, const std::string& role,
                          int sign, std::vector<RuleKind> rules = {}) -> ProjectionSpec& {
        ProjectionSpec s;
        s.source = src;
        s.target = tgt;
        s.target_role = role;
        s.sign = sign;
        s.rules = std::move(rules);
        p.push_back(std::move(s));
        return p.back();
    };

    // Recurrent autoassociative core.
    add("PyrS", "PyrS", "proximal-dendrite", +1,
        variant == Variant::Minimal ? std::vector<RuleKind>{RuleKind::Hebb}
                                    : std::vector<RuleKind>{RuleKind::Hebb, RuleKind::Bcm})
        .exclude_self = true;
    if (variant == Variant::Minimal) return p;

    // Output pathway: burst-gated association onto the output-geared pyramidal class.
    add("PyrS", "PyrD", "proximal-dendrite", +1, {RuleKind::BurstHebb});

    // External pattern current also reaches PyrD through depressing mossy-style synapses,
    // and drives the two feedforward interneuron classes.
    add(kExternalSource, "PyrD", "proximal-dendrite", +1).mossy_fiber = true;
    add(kExternalSource, "SL-INT", "dendrite", +1);
    add(kExternalSource, "R/L-M", "dendrite", +1);

    // Feedback drive: every interneuron class except the two feedforward ones.
    for (const char* tgt : {"BC-PV+", "CC", "O-LM", "BSC", "CCK+", "VIP+"})
        add("PyrS", tgt, "dendrite", +1);

    // Inhibitory targeting by role.
    for (const char* tgt : {"PyrS", "PyrD"}) {
        add("BC-PV+", tgt, "soma", -1);
        add("CC", tgt, "AIS", -1);
        add("O-LM", tgt, "distal-dendrite", -1);
        add("BSC", tgt, "proximal-dendrite", -1);
        add("CCK+", tgt, "soma", -1, {RuleKind::Iltd});
    }
    add("SL-INT", "PyrS", "proximal-dendrite", -1);
    add("R/L-M", "PyrS", "proximal-dendrite", -1);

    // Disinhibitory control.
    add("VIP+", "O-LM", "dendrite", -1);
    add("VIP+", "CCK+", "dendrite", -1);
    return p;
}

inline std::map<std::string, int> default_counts(Variant variant, int n_pyrs) {
    std::map<std::string, int> c;
    c["PyrS"] = n_pyrs;
    if (variant == Variant::Minimal) return c;
    c["PyrD"] = n_pyrs;
    for (const auto& [name, frac] : interneuron_fractions())
        c[name] = std::max(1, int(std::llround(frac * n_pyrs)));
    return c;
}

inline CircuitConfig canonical_config(Variant variant, int n_pyrs) {
    require(n_pyrs >= 1, "n_pyrs must be >= 1");
    CircuitConfig cfg;
    cfg.variant = variant;
    cfg.n_pyrs = n_pyrs;
    cfg.counts = default_counts(variant, n_pyrs);
    cfg.projections = default_projections(variant);
    return cfg;
}

inline double inhibitory_proportion(const CircuitConfig& cfg) {
    long total = 0, inhib = 0;
    for (const auto& [name, n] : cfg.counts) {
        total += n;
        if (population_spec(name).polarity == Polarity::Inhibitory) inhib += n;
    }
    require(total > 0, "inhibitory_proportion: circuit has no units");
    return double(inhib) / double(total);
}

// Rescale the inhibitory class counts by a common factor (rounded, min 1 per class)
// so the computed inhibitory proportion lands within 0.02 of `target`. Pyramidal
// counts are never touched. A config already within tolerance is returned unchanged,
// which also makes the operation idempotent at its own achieved proportion.
inline CircuitConfig scale_inhibition(const CircuitConfig& cfg, double target) {
    require(target > 0.0 && target < 1.0, "scale_inhibition: target must lie in (0, 1)");
    constexpr double tol = 0.02;

    long exc = 0;
    std::vector<std::pair<std::string, int>> inh;
    for (const auto& [name, n] : cfg.counts) {
        if (population_spec(name).polarity == Polarity::Inhibitory) inh.emplace_back(name, n);
        else exc += n;
    }
    require(!inh.empty(), "scale_inhibition: no inhibitory populations to scale");
    require(exc > 0, "scale_inhibition: no excitatory units");

    long inh_now = 0;
    for (const auto& [name, n] : inh) inh_now += n;
    const auto proportion = [exc](long inh_total) {
        return double(inh_total) / double(exc + inh_total);
    };
    if (std::fabs(proportion(inh_now) - target) <= tol) return cfg;

    const auto total_at = [&inh](double f) {
        long t = 0;
        for (const auto& [name, n] : inh) t += std::max<long>(1, std::llround(f * n));
        return t;
    };

    // The needed factor up to rounding; scan a band around it for the best rounding.
    const double f0 = target / (1.0 - target) * double(exc) / double(inh_now);
    double best_f = f0;
    double best_err = std::fabs(proportion(total_at(f0)) - target);
    for (int i = 0; i <= 10000; ++i) {
        const double f = f0 * (0.5 + 1.0 * i / 10000.0);
        const double err = std::fabs(proportion(total_at(f)) - target);
        if (err < best_err) {
            best_err = err;
            best_f = f;
        }
    }
    if (best_err > tol) {
        const double p_min = proportion(long(inh.size()));
        throw ConfigError("scale_inhibition: target " + std::to_string(target) +
                          " unreachable under rounding; achievable proportions lie in [" +
                          std::to_string(p_min) + ", 1) and the closest found was off by " +
                          std::to_string(best_err));
    }
    CircuitConfig out = cfg;
    for (const auto& [name, n] : inh)
        out.counts[name] = int(std::max<long>(1, std::llround(best_f * n)));
    return out;
}

// Delete every population not in `keep` (plus the projections touching them).
// Rule bindings on surviving projections are preserved.
inline CircuitConfig restricted(const CircuitConfig& cfg, const std::set<std::string>& keep) {
    CircuitConfig out = cfg;
    out.counts.clear();
    for (const auto& [name, n] : cfg.counts)
        if (keep.count(name)) out.counts[name] = n;
    out.lif.clear();
    for (const auto& [name, p] : cfg.lif)
        if (keep.count(name)) out.lif[name] = p;
    out.projections.clear();
    for (const ProjectionSpec& p : cfg.projections) {
        const bool src_ok = p.source == kExternalSource || keep.count(p.source) > 0;
        if (src_ok && keep.count(p.target)) out.projections.push_back(p);
    }
    return out;
}

using SpikeRecord = std::map<std::string, std::vector<std::uint8_t>>;

struct StpState {
    std::vector<double> u, x;
};

struct PopulationRuntime {
    PopulationSpec spec;
    int n_units = 0;
    LIFParams lif;
    std::vector<double> coupling;  // per compartment; soma entry unused
    int soma = 0;
    std::vector<CompartmentState> comps;
    std::deque<std::vector<double>> out;         // delayed soma spikes, length == delay
    std::vector<std::vector<double>> current;    // per-compartment input scratch
};

struct ProjectionRuntime {
    ProjectionSpec spec;
    SynapseMatrix syn;
    int src = -1;  // population index; -1 = external
    int tgt = 0;
    int tgt_comp = 0;
    StpState stp;  // mossy-fiber projections only
};

class Circuit;
inline Circuit build_circuit(const CircuitConfig& cfg, std::uint64_t seed,
                             const RuleParams& rules = {});

class Circuit {
public:
    Circuit() = default;

    const CircuitConfig& config() const { return cfg_; }
    const RuleParams& rules() const { return rules_; }
    std::uint64_t seed() const { return seed_; }
    std::int64_t ticks() const { return tick_; }

    std::size_t n_populations() const { return pops_.size(); }
    bool has_population(const std::string& name) const { return index_.count(name) > 0; }
    int population_index(const std::string& name) const {
        auto it = index_.find(name);
        require(it != index_.end(), "unknown population: " + name);
        return it->second;
    }
    PopulationRuntime& population(int i) { return pops_[std::size_t(i)]; }
    const PopulationRuntime& population(int i) const { return pops_[std::size_t(i)]; }
    PopulationRuntime& population(const std::string& name) {
        return pops_[std::size_t(population_index(name))];
    }
    const PopulationRuntime& population(const std::string& name) const {
        return pops_[std::size_t(population_index(name))];
    }
    std::vector<ProjectionRuntime>& projections() { return projs_; }
    const std::vector<ProjectionRuntime>& projections() const { return projs_; }

    const SpikeHistory& soma_history(const std::string& name) const {
        const PopulationRuntime& p = population(name);
        return p.comps[std::size_t(p.soma)].history;
    }

    // Advance one tick. `ext` is the external pattern current (length n_pyrs); it is
    // injected directly into the PyrS proximal dendrite this tick and feeds the
    // external projections after the synaptic delay. `ach` only reaches the
    // attenuation gate on mossy-fiber transmission here; rule updates happen in
    // apply_all at window cadence.
    SpikeRecord tick(const std::vector<double>& ext, double ach) {
        require(int(ext.size()) == n_ext_, "tick: external current length != n_pyrs");

        for (PopulationRuntime& p : pops_)
            for (auto& c : p.current) std::fill(c.begin(), c.end(), 0.0);

        // Direct pattern current onto the PyrS proximal dendrite, no delay.
        if (inject_pop_ >= 0) {
            std::vector<double>& dst = pops_[std::size_t(inject_pop_)].current[std::size_t(inject_comp_)];
            for (std::size_t i = 0; i < ext.size(); ++i) dst[i] += ext[i];
        }

        // Synaptic transmission from activity `delay` ticks back.
        for (ProjectionRuntime& pr : projs_) {
            const std::vector<double>& act =
                pr.src < 0 ? ext_queue_.front() : pops_[std::size_t(pr.src)].out.front();
            std::vector<double>& dst = pops_[std::size_t(pr.tgt)].current[std::size_t(pr.tgt_comp)];
            const Mat& w = pr.syn.w;
            if (pr.spec.mossy_fiber) {
                const double att = ach_gate_attenuation(ach, rules_);
                for (std::size_t i = 0; i < w.rows; ++i) {
                    const bool spiked = act[i] > 0.0;
                    stp_advance(pr.stp.u[i], pr.stp.x[i], spiked, rules_);
                    if (!spiked) continue;
                    const double gain = att * act[i] * rules_.stp_u * pr.stp.u[i] * pr.stp.x[i];
                    const double* row = w.row(i);
                    for (std::size_t j = 0; j < w.cols; ++j) dst[j] += gain * row[j];
                }
            } else {
                const double sign = pr.spec.sign;
                for (std::size_t i = 0; i < w.rows; ++i) {
                    if (act[i] == 0.0) continue;
                    const double gain = sign * act[i];
                    const double* row = w.row(i);
                    for (std::size_t j = 0; j < w.cols; ++j) dst[j] += gain * row[j];
                }
            }
        }

        // Step compartments; non-soma input couples passively into the soma.
        SpikeRecord rec;
        for (PopulationRuntime& p : pops_) {
            std::vector<double> soma_in = p.current[std::size_t(p.soma)];
            for (int c = 0; c < p.spec.n_compartments(); ++c) {
                if (c == p.soma) continue;
                const double k = p.coupling[std::size_t(c)];
                const std::vector<double>& ic = p.current[std::size_t(c)];
                for (std::size_t i = 0; i < soma_in.size(); ++i) soma_in[i] += k * ic[i];
            }
            std::vector<std::uint8_t> soma_spikes;
            for (int c = 0; c < p.spec.n_compartments(); ++c) {
                std::vector<std::uint8_t> s = step_compartment(
                    p.comps[std::size_t(c)], c == p.soma ? soma_in : p.current[std::size_t(c)],
                    p.lif);
                if (c == p.soma) soma_spikes = std::move(s);
            }
            std::vector<double> out(soma_spikes.size());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = soma_spikes[i];
            p.out.push_back(std::move(out));
            p.out.pop_front();
            rec[p.spec.name] = std::move(soma_spikes);
        }

        ext_queue_.push_back(ext);
        ext_queue_.pop_front();
        ++tick_;
        return rec;
    }

    // Forget all dynamical state (potentials, spike histories, delay lines, STP)
    // while keeping learned weights. Recall trials start from here.
    void reset_dynamics() {
        reset_episode();
        tick_ = 0;
    }

    // Same forgetting, but the tick counter keeps running so schedule phase is
    // unaffected. Marks the start of a new presentation episode during storage.
    void reset_episode() {
        for (PopulationRuntime& p : pops_) {
            for (CompartmentState& c : p.comps) {
                std::fill(c.v.begin(), c.v.end(), p.lif.v_init);
                std::fill(c.last_spikes.begin(), c.last_spikes.end(), 0);
                c.history.clear();
            }
            for (auto& o : p.out) std::fill(o.begin(), o.end(), 0.0);
        }
        for (auto& e : ext_queue_) std::fill(e.begin(), e.end(), 0.0);
        for (ProjectionRuntime& pr : projs_) {
            std::fill(pr.stp.u.begin(), pr.stp.u.end(), rules_.stp_u);
            std::fill(pr.stp.x.begin(), pr.stp.x.end(), 1.0);
        }
    }

    friend Circuit build_circuit(const CircuitConfig&, std::uint64_t, const RuleParams&);

private:
    CircuitConfig cfg_;
    RuleParams rules_;
    std::uint64_t seed_ = 0;
    std::vector<PopulationRuntime> pops_;
    std::map<std::string, int> index_;
    std::vector<ProjectionRuntime> projs_;
    std::deque<std::vector<double>> ext_queue_;
    std::int64_t tick_ = 0;
    int n_ext_ = 0;
    int inject_pop_ = -1;
    int inject_comp_ = 0;
};

namespace detail {

inline int role_compartment(const PopulationSpec& spec, const std::string& role,
                            const std::string& what) {
    for (int c = 0; c < spec.n_compartments(); ++c)
        if (spec.roles[std::size_t(c)] == role) return c;
    throw ConfigError(what + ": population " + spec.name + " has no compartment with role '" +
                      role + "'");
}

} // namespace detail

inline Circuit build_circuit(const CircuitConfig& cfg, std::uint64_t seed,
                             const RuleParams& rules) {
    require(cfg.delay >= 1, "circuit.delay must be >= 1");
    require(cfg.init_std >= 0.0, "circuit.init_std must be >= 0");
    require(cfg.w_max > 0.0, "circuit.w_max must be positive");
    require(cfg.history_ticks >= 1, "circuit.history_ticks must be >= 1");
    require(cfg.counts.count("PyrS") > 0, "circuit.counts must include PyrS");
    rules.validate();
    cfg.lif_default.validate();
    for (const auto& [name, p] : cfg.lif) p.validate();

    Circuit c;
    c.cfg_ = cfg;
    c.rules_ = rules;
    c.seed_ = seed;

    // Populations in canonical table order.
    for (const PopulationSpec& spec : population_table()) {
        auto it = cfg.counts.find(spec.name);
        if (it == cfg.counts.end()) continue;
        require(it->second >= 1, "circuit.counts[" + spec.name + "] must be >= 1");
        PopulationRuntime p;
        p.spec = spec;
        p.n_units = it->second;
        p.lif = cfg.lif.count(spec.name) ? cfg.lif.at(spec.name) : cfg.lif_default;
        p.soma = 0;
        const std::size_t hist = std::max<std::size_t>(4, std::size_t(cfg.history_ticks));
        for (int comp = 0; comp < spec.n_compartments(); ++comp) {
            p.comps.emplace_back(std::size_t(p.n_units), p.lif, hist);
            const std::string& role = spec.roles[std::size_t(comp)];
            const auto cit = cfg.coupling.find(role);
            p.coupling.push_back(cit == cfg.coupling.end() ? 1.0 : cit->second);
            p.current.emplace_back(std::size_t(p.n_units), 0.0);
        }
        for (int d = 0; d < cfg.delay; ++d) p.out.emplace_back(std::size_t(p.n_units), 0.0);
        c.index_[spec.name] = int(c.pops_.size());
        c.pops_.push_back(std::move(p));
    }
    for (const auto& [name, n] : cfg.counts) (void)population_spec(name);  // reject unknown names

    c.n_ext_ = c.population("PyrS").n_units;
    c.inject_pop_ = c.population_index("PyrS");
    c.inject_comp_ = detail::role_compartment(c.population("PyrS").spec, "proximal-dendrite",
                                              "external injection");
    for (int d = 0; d < cfg.delay; ++d) c.ext_queue_.emplace_back(std::size_t(c.n_ext_), 0.0);

    for (const ProjectionSpec& ps : cfg.projections) {
        ProjectionRuntime pr;
        pr.spec = ps;
        const std::string tag = ps.source + "->" + ps.target + "@" + ps.target_role;

        int n_src = 0;
        if (ps.source == kExternalSource) {
            pr.src = -1;
            n_src = c.n_ext_;
            require(ps.sign == +1, "projection " + tag + ": external source must be excitatory");
        } else {
            pr.src = c.population_index(ps.source);
            n_src = c.population(pr.src).n_units;
            const Polarity pol = c.population(pr.src).spec.polarity;
            const int want = pol == Polarity::Excitatory ? +1 : -1;
            require(ps.sign == want, "projection " + tag + ": sign does not match source polarity");
        }
        pr.tgt = c.population_index(ps.target);
        const PopulationRuntime& tp = c.population(pr.tgt);
        pr.tgt_comp = detail::role_compartment(tp.spec, ps.target_role, "projection " + tag);
        const int n_tgt = tp.n_units;

        require(ps.connectivity.dense || (ps.connectivity.p > 0.0 && ps.connectivity.p <= 1.0),
                "projection " + tag + ": sparse keep probability must lie in (0, 1]");
        if (ps.exclude_self)
            require(n_src == n_tgt, "projection " + tag + ": exclude_self needs a square matrix");

        pr.syn.target_role = ps.target_role;
        pr.syn.mask.assign(std::size_t(n_src) * std::size_t(n_tgt), 1);
        if (!ps.connectivity.dense) {
            Rng mrng(derive_seed(seed, "mask:" + tag));
            for (auto& m : pr.syn.mask) m = mrng.bernoulli(ps.connectivity.p) ? 1 : 0;
        }
        if (ps.exclude_self)
            for (int i = 0; i < n_src; ++i)
                pr.syn.mask[std::size_t(i) * std::size_t(n_tgt) + std::size_t(i)] = 0;

        const double init_std = ps.init_std.value_or(cfg.init_std);
        require(init_std >= 0.0, "projection " + tag + ": init_std must be >= 0");
        Rng wrng(derive_seed(seed, "init:" + tag));
        pr.syn.w = Mat(std::size_t(n_src), std::size_t(n_tgt));
        for (std::size_t k = 0; k < pr.syn.w.size(); ++k) {
            const double draw = std::min(wrng.half_normal(ps.init_mean, init_std), cfg.w_max);
            pr.syn.w.a[k] = pr.syn.mask[k] ? draw : 0.0;
        }

        if (ps.mossy_fiber) {
            pr.stp.u.assign(std::size_t(n_src), rules.stp_u);
            pr.stp.x.assign(std::size_t(n_src), 1.0);
        }
        c.projs_.push_back(std::move(pr));
    }
    return c;
}

// FNV-1a over the weight bytes of every projection, in build order.
inline std::uint64_t weight_checksum(const Circuit& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const ProjectionRuntime& pr : c.projections())
        for (double v : pr.syn.w.a) {
            std::uint64_t bits;
            static_assert(sizeof bits == sizeof v);
            __builtin_memcpy(&bits, &v, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        }
    return h;
}

} // namespace ca3
