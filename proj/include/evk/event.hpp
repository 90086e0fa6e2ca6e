#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evk/error.hpp"

namespace evk {

/// Sensor size in pixels.
struct Geometry {
    int width = 0;
    int height = 0;

    [[nodiscard]] std::size_t pixels() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    [[nodiscard]] bool contains(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    [[nodiscard]] std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    friend bool operator==(const Geometry&, const Geometry&) = default;
};

enum class Polarity : std::int8_t { Negative = -1, Positive = 1 };

[[nodiscard]] constexpr int sign(Polarity p) { return static_cast<int>(p); }
[[nodiscard]] constexpr Polarity flipped(Polarity p) {
    return p == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
}

struct Event {
    double t = 0.0; // seconds
    int x = 0;
    int y = 0;
    Polarity polarity = Polarity::Positive;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Total order used everywhere events are merged: time, then row, column, positive first.
[[nodiscard]] inline bool event_order(const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return sign(a.polarity) > sign(b.polarity);
}

struct EventStream {
    Geometry geometry;
    std::vector<Event> events;

    [[nodiscard]] std::size_t size() const { return events.size(); }
    [[nodiscard]] bool empty() const { return events.empty(); }
    friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Half-open interval [t0, tN) in seconds.
class TimeWindow {
public:
    TimeWindow(double t0, double tN) : t0_(t0), tN_(tN) {
        require(std::isfinite(t0) && !std::isnan(tN), "time window bounds must be numbers");
        require(t0 < tN, "time window requires t0 < tN");
    }

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double tN() const { return tN_; }
    [[nodiscard]] double duration() const { return tN_ - t0_; }
    [[nodiscard]] bool contains(double t) const { return t >= t0_ && t < tN_; }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;

private:
    double t0_;
    double tN_;
};

/// Per-pixel contrast thresholds in log-intensity units plus the refractory period.
class ThresholdMap {
public:
    ThresholdMap(Geometry geometry, std::vector<double> cp, std::vector<double> cn, double refractory)
        : geometry_(geometry), cp_(std::move(cp)), cn_(std::move(cn)), refractory_(refractory) {
        require(geometry.width > 0 && geometry.height > 0, "threshold map needs a non-empty geometry");
        require(cp_.size() == geometry.pixels() && cn_.size() == geometry.pixels(),
                "threshold planes must match the sensor geometry");
        auto valid = [](double c) { return std::isfinite(c) && c > 0.0; };
        require(std::all_of(cp_.begin(), cp_.end(), valid), "positive thresholds must be finite and > 0");
        require(std::all_of(cn_.begin(), cn_.end(), valid), "negative thresholds must be finite and > 0");
        require(std::isfinite(refractory) && refractory >= 0.0, "refractory period must be >= 0");
    }

    static ThresholdMap uniform(Geometry geometry, double cp, double cn, double refractory) {
        return {geometry, std::vector<double>(geometry.pixels(), cp),
                std::vector<double>(geometry.pixels(), cn), refractory};
    }

    [[nodiscard]] const Geometry& geometry() const { return geometry_; }
    [[nodiscard]] double cp(std::size_t pixel) const { return cp_[pixel]; }
    [[nodiscard]] double cn(std::size_t pixel) const { return cn_[pixel]; }
    [[nodiscard]] std::span<const double> cp() const { return cp_; }
    [[nodiscard]] std::span<const double> cn() const { return cn_; }
    [[nodiscard]] double refractory() const { return refractory_; }

    [[nodiscard]] ThresholdMap scaled(double factor) const {
        auto cp = cp_;
        auto cn = cn_;
        for (auto& c : cp) c *= factor;
        for (auto& c : cn) c *= factor;
        return {geometry_, std::move(cp), std::move(cn), refractory_};
    }

private:
    Geometry geometry_;
    std::vector<double> cp_;
    std::vector<double> cn_;
    double refractory_;
};

struct Violation {
    enum class Kind { Unsorted, OutOfBounds, InvalidTime };
    Kind kind;
    std::size_t index;

    [[nodiscard]] std::string message() const {
        switch (kind) {
        case Kind::Unsorted: return "unsorted at index " + std::to_string(index);
        case Kind::OutOfBounds: return "out of bounds at index " + std::to_string(index);
        case Kind::InvalidTime: return "invalid timestamp at index " + std::to_string(index);
        }
        return {};
    }
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks the stream invariants. Reports at most one violation per kind, at the first offending index.
[[nodiscard]] inline std::vector<Violation> validate(const EventStream& stream) {
    std::vector<Violation> out;
    bool unsorted = false;
    bool bounds = false;
    bool time = false;
    const auto& ev = stream.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (!time && !(std::isfinite(ev[i].t) && ev[i].t >= 0.0)) {
            out.push_back({Violation::Kind::InvalidTime, i});
            time = true;
        }
        if (!bounds && !stream.geometry.contains(ev[i].x, ev[i].y)) {
            out.push_back({Violation::Kind::OutOfBounds, i});
            bounds = true;
        }
        if (!unsorted && i > 0 && ev[i].t < ev[i - 1].t) {
            out.push_back({Violation::Kind::Unsorted, i});
            unsorted = true;
        }
    }
    return out;
}

inline void require_valid(const EventStream& stream) {
    const auto violations = validate(stream);
    if (!violations.empty()) {
        throw Error("invalid event stream: " + violations.front().message());
    }
}

/// Index range [first, last) of events with t in the window. Requires a sorted span.
[[nodiscard]] inline std::pair<std::size_t, std::size_t> window_range(std::span<const Event> events,
                                                                      const TimeWindow& window) {
    auto by_time = [](const Event& e, double t) { return e.t < t; };
    auto lo = std::lower_bound(events.begin(), events.end(), window.t0(), by_time);
    auto hi = std::lower_bound(lo, events.end(), window.tN(), by_time);
    return {static_cast<std::size_t>(lo - events.begin()), static_cast<std::size_t>(hi - events.begin())};
}

[[nodiscard]] inline std::span<const Event> events_in(std::span<const Event> events, const TimeWindow& window) {
    const auto [lo, hi] = window_range(events, window);
    return events.subspan(lo, hi - lo);
}

[[nodiscard]] inline EventStream slice_by_window(const EventStream& stream, const TimeWindow& window) {
    const auto part = events_in(stream.events, window);
    return {stream.geometry, {part.begin(), part.end()}};
}

} // namespace evk
