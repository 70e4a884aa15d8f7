#pragma once

#include <cstdint>

#include "ca3/core.hpp"

namespace ca3 {

// Acetylcholine level per tick. Constant, or a bimodal square wave alternating
// encode (high, Hebbian LTP) and consolidate (low, anti-Hebbian) phases.
struct AChSchedule {
    enum class Mode { Constant, Bimodal };
    enum class Phase { Encode, Consolidate };

    Mode mode = Mode::Constant;
    double level = 1.0;  // constant mode

    double encode_level = 1.0;
    double consolidate_level = 0.0;
    std::int64_t t_encode = 10;
    std::int64_t t_consolidate = 10;
    Phase start_phase = Phase::Encode;

    void validate() const {
        require(level >= 0.0 && level <= 1.0, "ach.level must lie in [0, 1]");
        require(encode_level >= 0.0 && encode_level <= 1.0, "ach.encode_level must lie in [0, 1]");
        require(consolidate_level >= 0.0 && consolidate_level <= 1.0,
                "ach.consolidate_level must lie in [0, 1]");
        if (mode == Mode::Bimodal) {
            require(t_encode >= 1, "ach.t_encode must be >= 1");
            require(t_consolidate >= 1, "ach.t_consolidate must be >= 1");
        }
    }
};

inline AChSchedule::Phase ach_phase_at(const AChSchedule& s, std::int64_t tick) {
    if (s.mode == AChSchedule::Mode::Constant) return AChSchedule::Phase::Encode;
    require(tick >= 0, "ach_phase_at: tick must be >= 0");
    const std::int64_t period = s.t_encode + s.t_consolidate;
    const std::int64_t phase = tick % period;
    const std::int64_t first = s.start_phase == AChSchedule::Phase::Encode ? s.t_encode
                                                                           : s.t_consolidate;
    const bool in_first = phase < first;
    if (s.start_phase == AChSchedule::Phase::Encode)
        return in_first ? AChSchedule::Phase::Encode : AChSchedule::Phase::Consolidate;
    return in_first ? AChSchedule::Phase::Consolidate : AChSchedule::Phase::Encode;
}

inline double ach_at(const AChSchedule& s, std::int64_t tick) {
    if (s.mode == AChSchedule::Mode::Constant) return s.level;
    return ach_phase_at(s, tick) == AChSchedule::Phase::Encode ? s.encode_level
                                                               : s.consolidate_level;
}

} // namespace ca3
