#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ca3/circuit.hpp"
#include "ca3/core.hpp"
#include "ca3/rules.hpp"

namespace ca3 {

// Window-cadence learning traces. Short-term (u, x) state lives on the circuit's
// mossy-fiber projections because the circuit advances it every tick.
struct PlasticityState {
    std::map<std::string, std::vector<double>> theta;  // BCM threshold, per postsynaptic unit
    std::map<std::string, std::vector<double>> ecb;    // eCB trace, per pyramidal unit
    std::map<std::size_t, Mat> iltd_base;              // per-projection baseline for recovery
};

inline PlasticityState init_plasticity(const Circuit& c) {
    PlasticityState st;
    const RuleParams& p = c.rules();
    for (std::size_t i = 0; i < c.n_populations(); ++i) {
        const PopulationRuntime& pop = c.population(int(i));
        if (pop.spec.polarity == Polarity::Excitatory)
            st.ecb[pop.spec.name].assign(std::size_t(pop.n_units), 0.0);
    }
    for (std::size_t i = 0; i < c.projections().size(); ++i) {
        const ProjectionRuntime& pr = c.projections()[i];
        for (RuleKind r : pr.spec.rules) {
            require(pr.src >= 0, "projection " + pr.spec.source + "->" + pr.spec.target +
                                     ": rate rules need a population source");
            if (r == RuleKind::Bcm) {
                auto& th = st.theta[pr.spec.target];
                th.assign(std::size_t(c.population(pr.tgt).n_units), p.theta_init);
            }
            if (r == RuleKind::Iltd) {
                require(st.ecb.count(pr.spec.target) > 0,
                        "projection " + pr.spec.source + "->" + pr.spec.target +
                            ": iLTD target has no eCB trace");
                st.iltd_base.emplace(i, pr.syn.w);
            }
        }
    }
    return st;
}

using RateMap = std::map<std::string, std::vector<double>>;
using BurstMap = std::map<std::string, std::vector<std::uint8_t>>;

namespace detail {

inline const std::vector<double>& rates_for(const RateMap& rates, const std::string& name,
                                            std::size_t n, const char* rule) {
    auto it = rates.find(name);
    require(it != rates.end(), std::string(rule) + ": no window rates for population " + name);
    require(it->second.size() == n, std::string(rule) + ": rate length mismatch for " + name);
    return it->second;
}

} // namespace detail

// Apply every bound rule once for the just-finished presentation window.
// Projections run in build order; within a projection the order is fixed:
// Hebb, BCM, BurstHebb, iLTD. The eCB trace advances from this window's rates
// first so depression reflects the activity that just happened.
inline void apply_all(Circuit& c, PlasticityState& st, const RateMap& rates,
                      const BurstMap& bursts, double ach) {
    const RuleParams& p = c.rules();

    for (auto& [name, trace] : st.ecb)
        ecb_trace_update(trace, detail::rates_for(rates, name, trace.size(), "ecb trace"), p);

    for (std::size_t i = 0; i < c.projections().size(); ++i) {
        ProjectionRuntime& pr = c.projections()[i];
        if (pr.spec.rules.empty()) continue;
        const auto bound = [&pr](RuleKind k) {
            for (RuleKind r : pr.spec.rules)
                if (r == k) return true;
            return false;
        };
        const std::size_t n_src = pr.syn.w.rows;
        const std::size_t n_tgt = pr.syn.w.cols;

        if (bound(RuleKind::Hebb)) {
            hebb_update(pr.syn.w, pr.syn.mask,
                        detail::rates_for(rates, pr.spec.source, n_src, "hebb"),
                        detail::rates_for(rates, pr.spec.target, n_tgt, "hebb"), ach, p);
        }
        if (bound(RuleKind::Bcm)) {
            bcm_update(pr.syn.w, pr.syn.mask, st.theta.at(pr.spec.target),
                       detail::rates_for(rates, pr.spec.source, n_src, "bcm"),
                       detail::rates_for(rates, pr.spec.target, n_tgt, "bcm"), ach, p);
        }
        if (bound(RuleKind::BurstHebb)) {
            auto it = bursts.find(pr.spec.target);
            require(it != bursts.end(),
                    "burst_hebb: no burst flags for population " + pr.spec.target);
            burst_hebb_update(pr.syn.w, pr.syn.mask,
                              detail::rates_for(rates, pr.spec.source, n_src, "burst_hebb"),
                              detail::rates_for(rates, pr.spec.target, n_tgt, "burst_hebb"),
                              it->second, ach, p);
        }
        if (bound(RuleKind::Iltd)) {
            iltd_update(pr.syn.w, pr.syn.mask, st.ecb.at(pr.spec.target), st.iltd_base.at(i),
                        ach, p);
        }
    }
}

} // namespace ca3
