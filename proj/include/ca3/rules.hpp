#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ca3/core.hpp"

namespace ca3 {

struct RuleParams {
    // Fast associative rules run at 1e-3; the homeostatic/modulatory rules (BCM,
    // eCB-driven iLTD) run one order slower, which keeps the full circuit's
    // small-scale recall statistics in line with the minimal circuit's.
    double eta_hebb = 1e-3;
    double eta_bcm = 1e-4;
    double tau_bcm = 0.1;       // sliding-threshold update rate, (0, 1)
    double theta_init = 0.01;   // initial BCM threshold = (target rate 0.1)^2

    double stp_u = 0.5;         // baseline release fraction U, (0, 1]
    double tau_f = 0.9;         // facilitation relaxation factor per quiet tick
    double tau_d = 0.9;         // depression recovery factor per quiet tick

    double eta_iltd = 1e-4;
    double eta_rec = 1e-5;      // iltd fixed point keeps w* = w_base - 10*ecb
    double eta_burst = 1e-3;

    double ecb_decay = 0.9;
    double ecb_gain = 1.0;
    double ecb_r_thresh = 0.5;

    double ach_gate_center = 0.5;
    double ach_gate_width = 0.2;
    double ach_floor = 0.2;

    double w_max = 5.0;

    void validate() const {
        require(eta_hebb >= 0 && eta_bcm >= 0 && eta_iltd >= 0 && eta_rec >= 0 && eta_burst >= 0,
                "rules: learning rates must be >= 0");
        require(tau_bcm > 0.0 && tau_bcm < 1.0, "rules.tau_bcm must lie in (0, 1)");
        require(theta_init >= 0.0, "rules.theta_init must be >= 0");
        require(stp_u > 0.0 && stp_u <= 1.0, "rules.stp_u must lie in (0, 1]");
        require(tau_f > 0.0 && tau_f < 1.0, "rules.tau_f must lie in (0, 1)");
        require(tau_d > 0.0 && tau_d < 1.0, "rules.tau_d must lie in (0, 1)");
        require(ecb_decay >= 0.0 && ecb_decay < 1.0, "rules.ecb_decay must lie in [0, 1)");
        require(ecb_gain >= 0.0, "rules.ecb_gain must be >= 0");
        require(ecb_r_thresh >= 0.0, "rules.ecb_r_thresh must be >= 0");
        require(ach_gate_width > 0.0, "rules.ach_gate_width must be positive");
        require(ach_floor >= 0.0 && ach_floor <= 1.0, "rules.ach_floor must lie in [0, 1]");
        require(w_max > 0.0, "rules.w_max must be positive");
    }
};

// Bipolar cholinergic gate: positive (LTP) at high ACh, negative (anti-Hebbian)
// at low ACh, zero at the center. Gates the Hebbian and burst-Hebbian rules.
inline double ach_gate_bipolar(double ach, const RuleParams& p = {}) {
    return std::tanh((ach - p.ach_gate_center) / p.ach_gate_width);
}

// Attenuation gate: scales BCM / STP / iLTD, never below the floor.
inline double ach_gate_attenuation(double ach, const RuleParams& p = {}) {
    return std::max(ach, p.ach_floor);
}

namespace detail {

inline void check_rule_shapes(const Mat& w, std::span<const std::uint8_t> mask,
                              std::size_t n_pre, std::size_t n_post, const char* rule) {
    require(mask.size() == w.size(), std::string(rule) + ": mask shape != weight shape");
    require(n_pre == w.rows, std::string(rule) + ": r_pre length != weight rows");
    require(n_post == w.cols, std::string(rule) + ": r_post length != weight cols");
}

inline double clip_weight(double w, double w_max) {
    return std::min(std::max(w, 0.0), w_max);
}

} // namespace detail

// Rate Hebb, bipolar-gated:  dw_ij = eta_hebb * r_i * r_j * g(ACh).
inline void hebb_update(Mat& w, std::span<const std::uint8_t> mask,
                        std::span<const double> r_pre, std::span<const double> r_post,
                        double ach, const RuleParams& p) {
    detail::check_rule_shapes(w, mask, r_pre.size(), r_post.size(), "hebb_update");
    const double g = ach_gate_bipolar(ach, p);
    if (g == 0.0) return;
    for (std::size_t i = 0; i < w.rows; ++i) {
        if (r_pre[i] == 0.0) continue;
        const double scale = p.eta_hebb * r_pre[i] * g;
        double* row = w.row(i);
        const std::uint8_t* m = mask.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            if (!m[j]) continue;
            row[j] = detail::clip_weight(row[j] + scale * r_post[j], p.w_max);
        }
    }
}

// BCM with sliding threshold. Weight step uses the pre-update theta; theta then
// relaxes toward r_post^2:  theta' = (1 - tau) * theta + tau * r_post^2.
inline void bcm_update(Mat& w, std::span<const std::uint8_t> mask, std::vector<double>& theta,
                       std::span<const double> r_pre, std::span<const double> r_post,
                       double ach, const RuleParams& p) {
    detail::check_rule_shapes(w, mask, r_pre.size(), r_post.size(), "bcm_update");
    require(theta.size() == w.cols, "bcm_update: theta length != weight cols");
    const double att = ach_gate_attenuation(ach, p);
    for (std::size_t i = 0; i < w.rows; ++i) {
        if (r_pre[i] == 0.0) continue;
        const double scale = p.eta_bcm * r_pre[i] * att;
        double* row = w.row(i);
        const std::uint8_t* m = mask.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            if (!m[j]) continue;
            row[j] = detail::clip_weight(row[j] + scale * r_post[j] * (r_post[j] - theta[j]),
                                         p.w_max);
        }
    }
    for (std::size_t j = 0; j < w.cols; ++j)
        theta[j] = (1.0 - p.tau_bcm) * theta[j] + p.tau_bcm * r_post[j] * r_post[j];
}

// Short-term presynaptic dynamics (facilitation u, depression x), one tick:
// spike:  u' = u + U * (1 - u), then x' = x - u' * x
// quiet:  u relaxes to U with factor tau_f, x recovers to 1 with factor tau_d.
inline void stp_advance(double& u, double& x, bool spiked, const RuleParams& p) {
    if (spiked) {
        u = u + p.stp_u * (1.0 - u);
        x = x - u * x;
    } else {
        u = p.stp_u + (u - p.stp_u) * p.tau_f;
        x = 1.0 - (1.0 - x) * p.tau_d;
    }
}

// Effective mossy-fiber weight: exact product U * u * x * w_base.
inline double stp_effective_weight(double u, double x, const RuleParams& p, double w_base) {
    return p.stp_u * u * x * w_base;
}

// Endocannabinoid trace: leaky integrator of post-synaptic rate above threshold.
inline void ecb_trace_update(std::vector<double>& ecb, std::span<const double> r_post,
                             const RuleParams& p) {
    require(ecb.size() == r_post.size(), "ecb_trace_update: trace length != rate length");
    for (std::size_t j = 0; j < ecb.size(); ++j)
        ecb[j] = p.ecb_decay * ecb[j] + p.ecb_gain * std::max(r_post[j] - p.ecb_r_thresh, 0.0);
}

// eCB-driven depression of inhibitory synapses with recovery toward baseline:
//   dw_ij = (-eta_iltd * [ecb_j]+ + eta_rec * [w_base_ij - w_ij]+) * max(ACh, floor).
inline void iltd_update(Mat& w, std::span<const std::uint8_t> mask, std::span<const double> ecb,
                        const Mat& w_base, double ach, const RuleParams& p) {
    require(w_base.rows == w.rows && w_base.cols == w.cols,
            "iltd_update: baseline shape != weight shape");
    require(mask.size() == w.size(), "iltd_update: mask shape != weight shape");
    require(ecb.size() == w.cols, "iltd_update: ecb length != weight cols");
    const double att = ach_gate_attenuation(ach, p);
    for (std::size_t i = 0; i < w.rows; ++i) {
        double* row = w.row(i);
        const double* base = w_base.row(i);
        const std::uint8_t* m = mask.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            if (!m[j]) continue;
            const double depress = -p.eta_iltd * std::max(ecb[j], 0.0);
            const double recover = p.eta_rec * std::max(base[j] - row[j], 0.0);
            row[j] = detail::clip_weight(row[j] + (depress + recover) * att, p.w_max);
        }
    }
}

// Burst-conditioned Hebb:  dw_ij = eta_burst * r_i * r_j * 1[burst_j] * g(ACh).
inline void burst_hebb_update(Mat& w, std::span<const std::uint8_t> mask,
                              std::span<const double> r_pre, std::span<const double> r_post,
                              std::span<const std::uint8_t> burst_post, double ach,
                              const RuleParams& p) {
    detail::check_rule_shapes(w, mask, r_pre.size(), r_post.size(), "burst_hebb_update");
    require(burst_post.size() == w.cols, "burst_hebb_update: burst flag length != weight cols");
    const double g = ach_gate_bipolar(ach, p);
    if (g == 0.0) return;
    for (std::size_t i = 0; i < w.rows; ++i) {
        if (r_pre[i] == 0.0) continue;
        const double scale = p.eta_burst * r_pre[i] * g;
        double* row = w.row(i);
        const std::uint8_t* m = mask.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) {
            if (!m[j] || !burst_post[j]) continue;
            row[j] = detail::clip_weight(row[j] + scale * r_post[j], p.w_max);
        }
    }
}

} // namespace ca3
