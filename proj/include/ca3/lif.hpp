#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "ca3/core.hpp"

namespace ca3 {

struct LIFParams {
    double beta = 0.9;   // per-tick membrane decay, [0, 1)
    double v_thr = 1.0;  // spike threshold, > 0
    double v_init = 0.0;

    void validate() const {
        require(beta >= 0.0 && beta < 1.0, "lif.beta must lie in [0, 1)");
        require(v_thr > 0.0, "lif.v_thr must be positive");
    }
};

// Ring buffer of the last H spike vectors, oldest first.
class SpikeHistory {
public:
    explicit SpikeHistory(std::size_t capacity = 4) : cap_(capacity) {}

    void push(const std::vector<std::uint8_t>& spikes) {
        if (ticks_.size() == cap_) ticks_.pop_front();
        ticks_.push_back(spikes);
    }

    std::size_t capacity() const { return cap_; }
    std::size_t size() const { return ticks_.size(); }
    bool empty() const { return ticks_.empty(); }
    // i = 0 is the oldest stored tick
    const std::vector<std::uint8_t>& tick(std::size_t i) const { return ticks_[i]; }
    void clear() { ticks_.clear(); }

private:
    std::size_t cap_;
    std::deque<std::vector<std::uint8_t>> ticks_;
};

struct CompartmentState {
    std::vector<double> v;
    std::vector<std::uint8_t> last_spikes;
    SpikeHistory history;

    CompartmentState() = default;
    CompartmentState(std::size_t n_units, const LIFParams& p, std::size_t history_ticks = 4)
        : v(n_units, p.v_init), last_spikes(n_units, 0), history(history_ticks) {}
};

// One discrete step of the soft-subtraction LIF map:
//   S(t) = 1[V(t) >= v_thr],  V(t+1) = beta * V(t) + I(t) - S(t) * v_thr.
// No clamp and no floor: the potential may go negative under inhibition.
inline std::vector<std::uint8_t> step_compartment(CompartmentState& st,
                                                  std::span<const double> input,
                                                  const LIFParams& p) {
    require(input.size() == st.v.size(), "step_compartment: input length != unit count");
    const std::size_t n = st.v.size();
    std::vector<std::uint8_t> spikes(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool s = st.v[i] >= p.v_thr;
        spikes[i] = s ? 1 : 0;
        st.v[i] = p.beta * st.v[i] + input[i] - (s ? p.v_thr : 0.0);
    }
    st.last_spikes = spikes;
    st.history.push(spikes);
    return spikes;
}

// Burst flag per unit: >= min_spikes spikes within the last `window` stored ticks.
// Ticks not yet recorded count as silence, so flags only ever accrete as spikes land.
inline std::vector<std::uint8_t> detect_bursts(const SpikeHistory& h, std::size_t window,
                                               std::size_t min_spikes) {
    require(window >= 1, "detect_bursts: window must be >= 1");
    require(window <= h.capacity(), "detect_bursts: window exceeds history capacity");
    const std::size_t have = h.size();
    const std::size_t use = window < have ? window : have;
    if (use == 0) return {};
    const std::size_t n = h.tick(0).size();
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t t = have - use; t < have; ++t) count += h.tick(t)[i];
        flags[i] = count >= min_spikes ? 1 : 0;
    }
    return flags;
}

// Per-unit firing rate over the last `window` stored ticks (spikes per tick).
inline std::vector<double> unit_rates(const SpikeHistory& h, std::size_t window) {
    require(window >= 1, "unit_rates: window must be >= 1");
    if (h.empty()) throw Error("unit_rates: rate undefined on empty spike history");
    const std::size_t have = h.size();
    const std::size_t use = window < have ? window : have;
    const std::size_t n = h.tick(0).size();
    std::vector<double> rates(n, 0.0);
    for (std::size_t t = have - use; t < have; ++t)
        for (std::size_t i = 0; i < n; ++i) rates[i] += h.tick(t)[i];
    for (double& r : rates) r /= double(use);
    return rates;
}

// Population mean rate over the last `window` stored ticks.
inline double population_rate(const SpikeHistory& h, std::size_t window) {
    const std::vector<double> r = unit_rates(h, window);
    if (r.empty()) throw Error("population_rate: rate undefined on zero-unit history");
    double sum = 0.0;
    for (double v : r) sum += v;
    return sum / double(r.size());
}

} // namespace ca3
