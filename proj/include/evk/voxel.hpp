#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evk/error.hpp"
#include "evk/event.hpp"

namespace evk {

/// B x H x W tensor of temporally interpolated event polarities.
struct VoxelGrid {
    int bins = 0;
    Geometry geometry;
    std::vector<float> values; // bin-major, then row-major
    TimeWindow window{0.0, 1.0};

    VoxelGrid(int bins_, Geometry geometry_, TimeWindow window_)
        : bins(bins_), geometry(geometry_),
          values(static_cast<std::size_t>(bins_) * geometry_.pixels(), 0.0f), window(window_) {}

    [[nodiscard]] std::size_t index(int bin, int x, int y) const {
        return static_cast<std::size_t>(bin) * geometry.pixels() + geometry.index(x, y);
    }
    float& at(int bin, int x, int y) { return values[index(bin, x, y)]; }
    [[nodiscard]] float at(int bin, int x, int y) const { return values[index(bin, x, y)]; }

    [[nodiscard]] double sum() const {
        double s = 0.0;
        for (float v : values) s += v;
        return s;
    }
    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;
};

namespace detail {
// Interpolation weights are snapped to multiples of 2^-20 so that the two shares of
// every event sum to exactly 1 and per-cell sums stay exact after narrowing to float
// (for |cell| < 16).
inline constexpr double kWeightQuantum = 0x1.0p-20;
} // namespace detail

/// Temporal bilinear voxelization of events inside `window`:
///   t* = (t - t0) / (tN - t0) * (B - 1),  V_k += p * max(0, 1 - |t* - k|).
/// With B = 1 every event lands in bin 0 with weight 1.
[[nodiscard]] inline VoxelGrid voxelize(std::span<const Event> events, Geometry geometry, const TimeWindow& window,
                                        int bins) {
    require(bins >= 1, "voxel grid needs at least one bin");
    require(window.duration() > 0.0, "voxel window has zero duration");
    VoxelGrid grid(bins, geometry, window);
    std::vector<double> acc(grid.values.size(), 0.0);
    const double scale = (bins - 1) / window.duration();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        require(window.contains(e.t),
                "event " + std::to_string(i) + " lies outside the voxel window");
        require(geometry.contains(e.x, e.y), "event " + std::to_string(i) + " lies outside the sensor");
        const double p = sign(e.polarity);
        if (bins == 1) {
            acc[grid.index(0, e.x, e.y)] += p;
            continue;
        }
        const double ts = std::clamp((e.t - window.t0()) * scale, 0.0, static_cast<double>(bins - 1));
        int k = static_cast<int>(std::floor(ts));
        double frac = std::round((ts - k) / detail::kWeightQuantum) * detail::kWeightQuantum;
        if (frac >= 1.0) {
            ++k;
            frac = 0.0;
        }
        if (k >= bins - 1) {
            acc[grid.index(bins - 1, e.x, e.y)] += p;
            continue;
        }
        acc[grid.index(k, e.x, e.y)] += p * (1.0 - frac);
        acc[grid.index(k + 1, e.x, e.y)] += p * frac;
    }
    for (std::size_t i = 0; i < acc.size(); ++i) grid.values[i] = static_cast<float>(acc[i]);
    return grid;
}

[[nodiscard]] inline VoxelGrid voxelize(const EventStream& stream, const TimeWindow& window, int bins) {
    return voxelize(stream.events, stream.geometry, window, bins);
}

struct FixedRate {
    double dt; // seconds per slice
};
struct FixedCount {
    std::size_t n; // events per slice
};
struct BetweenFrames {
    std::vector<double> frame_times;
};
using SliceStrategy = std::variant<FixedRate, FixedCount, BetweenFrames>;

/// View into a parent stream; valid while the parent lives.
struct Slice {
    std::span<const Event> events;
    TimeWindow window;
};

/// Added to the last timestamp of a fixed-count run so the window stays non-degenerate.
inline constexpr double kTieEpsilon = 1e-9;

inline void validate_strategy(const SliceStrategy& strategy) {
    if (const auto* r = std::get_if<FixedRate>(&strategy)) {
        require(r->dt > 0.0 && std::isfinite(r->dt), "fixed-rate slice width must be > 0");
    } else if (const auto* c = std::get_if<FixedCount>(&strategy)) {
        require(c->n >= 1, "fixed-count slices need n >= 1");
    } else {
        const auto& times = std::get<BetweenFrames>(strategy).frame_times;
        for (std::size_t i = 1; i < times.size(); ++i) {
            require(times[i] > times[i - 1], "frame timestamps must be strictly increasing");
        }
    }
}

/// Splits a sorted stream according to the strategy.
[[nodiscard]] inline std::vector<Slice> slice(const EventStream& stream, const SliceStrategy& strategy) {
    validate_strategy(strategy);
    const std::span<const Event> all(stream.events);
    std::vector<Slice> out;
    if (const auto* rate = std::get_if<FixedRate>(&strategy)) {
        if (all.empty()) return out;
        const double origin = all.front().t;
        const double last = all.back().t;
        for (std::size_t k = 0;; ++k) {
            const double t0 = origin + static_cast<double>(k) * rate->dt;
            if (t0 > last) break;
            const TimeWindow window(t0, origin + static_cast<double>(k + 1) * rate->dt);
            out.push_back({events_in(all, window), window});
        }
    } else if (const auto* count = std::get_if<FixedCount>(&strategy)) {
        for (std::size_t begin = 0; begin + count->n <= all.size(); begin += count->n) {
            const auto run = all.subspan(begin, count->n);
            out.push_back({run, TimeWindow(run.front().t, run.back().t + kTieEpsilon)});
        }
    } else {
        const auto& times = std::get<BetweenFrames>(strategy).frame_times;
        for (std::size_t k = 1; k < times.size(); ++k) {
            const TimeWindow window(times[k - 1], times[k]);
            out.push_back({events_in(all, window), window});
        }
    }
    return out;
}

/// Mean events per voxel cell over a set of slices: N_total / (slices * B * H * W).
[[nodiscard]] inline double events_per_voxel(std::span<const Slice> slices, int bins, Geometry geometry) {
    if (slices.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& s : slices) total += s.events.size();
    return static_cast<double>(total) /
           (static_cast<double>(slices.size()) * bins * static_cast<double>(geometry.pixels()));
}

} // namespace evk
