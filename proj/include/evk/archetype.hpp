#pragma once

#include <string>
#include <vector>

#include "evk/error.hpp"

namespace evk {

enum class Archetype { Slow, Medium, Fast, Mixed };

[[nodiscard]] inline std::string to_string(Archetype a) {
    switch (a) {
    case Archetype::Slow: return "slow";
    case Archetype::Medium: return "medium";
    case Archetype::Fast: return "fast";
    case Archetype::Mixed: return "mixed";
    }
    return "unknown";
}

[[nodiscard]] inline Archetype parse_archetype(const std::string& name) {
    if (name == "slow") return Archetype::Slow;
    if (name == "medium") return Archetype::Medium;
    if (name == "fast") return Archetype::Fast;
    if (name == "mixed") return Archetype::Mixed;
    throw Error("unknown archetype '" + name + "'");
}

struct Range {
    double lo;
    double hi;
    friend bool operator==(const Range&, const Range&) = default;
};

struct CountRange {
    int lo;
    int hi;
    friend bool operator==(const CountRange&, const CountRange&) = default;
};

/// Scene dynamics for one family of sequences. Speeds in px/s, rotation rates in rad/s,
/// scale rates as multiplicative factors per second.
struct ArchetypeConfig {
    Archetype archetype = Archetype::Slow;
    CountRange object_count{0, 5};
    Range speed{2.0, 20.0};
    Range rotation_rate{-1.0, 1.0};
    Range scale_rate{0.9, 1.1};

    /// Object counts: slow 0-5, medium 5-10, fast 5-20, mixed 10-30.
    static ArchetypeConfig preset(Archetype a) {
        switch (a) {
        case Archetype::Slow: return {a, {0, 5}, {2.0, 20.0}, {-1.0, 1.0}, {0.9, 1.1}};
        case Archetype::Medium: return {a, {5, 10}, {20.0, 80.0}, {-1.0, 1.0}, {0.9, 1.1}};
        case Archetype::Fast: return {a, {5, 20}, {80.0, 300.0}, {-1.0, 1.0}, {0.9, 1.1}};
        case Archetype::Mixed: return {a, {10, 30}, {2.0, 300.0}, {-1.0, 1.0}, {0.9, 1.1}};
        }
        return {};
    }

    static std::vector<ArchetypeConfig> all_presets() {
        return {preset(Archetype::Slow), preset(Archetype::Medium), preset(Archetype::Fast),
                preset(Archetype::Mixed)};
    }

    void validate() const {
        require(object_count.lo >= 0 && object_count.hi <= 30 && object_count.lo <= object_count.hi,
                "archetype object count range must lie within [0, 30]");
        require(speed.lo <= speed.hi && speed.lo >= 0.0, "archetype speed range is empty");
        require(rotation_rate.lo <= rotation_rate.hi, "archetype rotation range is empty");
        require(scale_rate.lo <= scale_rate.hi && scale_rate.lo > 0.0, "archetype scale-rate range is empty");
    }

    friend bool operator==(const ArchetypeConfig&, const ArchetypeConfig&) = default;
};

} // namespace evk
