#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "evk/error.hpp"
#include "evk/event.hpp"
#include "evk/plane.hpp"

namespace evk {

struct WarpedEvent {
    double x;
    double y;
    Polarity polarity;
};

/// Transports each event to t_ref along the flow at its origin pixel:
///   x' = x + (t_ref - t) u(x, y),  y' = y + (t_ref - t) v(x, y).
[[nodiscard]] inline std::vector<WarpedEvent> warp_events(std::span<const Event> events, const FlowField& flow,
                                                          double t_ref) {
    const Geometry g = flow.geometry();
    std::vector<WarpedEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        require(g.contains(e.x, e.y), "event outside the flow field");
        const double dt = t_ref - e.t;
        out.push_back({e.x + dt * flow.u(e.x, e.y), e.y + dt * flow.v(e.x, e.y), e.polarity});
    }
    return out;
}

/// Image of warped events.
struct Iwe {
    Plane<double> image;
    double t_ref = 0.0;
    std::size_t in_bounds = 0;
};

/// Unsigned bilinear splatting. An event contributes only if all of its mass lands on
/// the sensor, i.e. 0 <= x' <= W-1 and 0 <= y' <= H-1; others are dropped whole.
[[nodiscard]] inline Iwe build_iwe(std::span<const WarpedEvent> warped, Geometry geometry, double t_ref) {
    Iwe iwe{Plane<double>(geometry), t_ref, 0};
    auto& img = iwe.image;
    const double max_x = geometry.width - 1;
    const double max_y = geometry.height - 1;
    for (const auto& w : warped) {
        if (!(w.x >= 0.0 && w.x <= max_x && w.y >= 0.0 && w.y <= max_y)) continue;
        const int x0 = static_cast<int>(w.x);
        const int y0 = static_cast<int>(w.y);
        const double fx = w.x - x0;
        const double fy = w.y - y0;
        const int x1 = std::min(x0 + 1, geometry.width - 1);
        const int y1 = std::min(y0 + 1, geometry.height - 1);
        img(x0, y0) += (1.0 - fx) * (1.0 - fy);
        img(x1, y0) += fx * (1.0 - fy);
        img(x0, y1) += (1.0 - fx) * fy;
        img(x1, y1) += fx * fy;
        ++iwe.in_bounds;
    }
    return iwe;
}

/// Population variance over all pixels.
[[nodiscard]] inline double variance(const Plane<double>& img) {
    if (img.size() == 0) return 0.0;
    double mean = 0.0;
    for (double v : img.data()) mean += v;
    mean /= static_cast<double>(img.size());
    double var = 0.0;
    for (double v : img.data()) var += (v - mean) * (v - mean);
    return var / static_cast<double>(img.size());
}

/// Flow warp loss: sharpness of the motion-compensated image relative to the raw one,
///   FWL = var(I(E, flow)) / var(I(E, 0)).
/// Exactly 1 for zero flow; below 1 means worse than predicting no motion.
[[nodiscard]] inline double fwl(std::span<const Event> events, const FlowField& flow, double t_ref) {
    require(!events.empty(), "flow warp loss needs at least one event");
    const Geometry g = flow.geometry();
    const FlowField zero(g);
    const auto base = build_iwe(warp_events(events, zero, t_ref), g, t_ref);
    const double base_var = variance(base.image);
    require(base_var > 0.0, "degenerate input: unwarped event image has zero variance");
    const auto sharp = build_iwe(warp_events(events, flow, t_ref), g, t_ref);
    return variance(sharp.image) / base_var;
}

struct AeeResult {
    double aee = 0.0;         // pixels
    double outlier_pct = 0.0; // percent
    std::size_t pixels = 0;
};

/// Average endpoint error over masked pixels. Outliers have endpoint error above 3 px
/// and above 5% of the reference flow magnitude.
[[nodiscard]] inline AeeResult aee(const FlowField& pred, const FlowField& gt, const Plane<std::uint8_t>& mask) {
    require(pred.geometry() == gt.geometry(), "flow fields differ in size");
    require(mask.geometry() == gt.geometry(), "mask differs in size from the flow fields");
    AeeResult r;
    double total = 0.0;
    std::size_t outliers = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const double du = static_cast<double>(pred.u[i]) - gt.u[i];
        const double dv = static_cast<double>(pred.v[i]) - gt.v[i];
        const double epe = std::sqrt(du * du + dv * dv);
        const double mag = std::sqrt(static_cast<double>(gt.u[i]) * gt.u[i] + static_cast<double>(gt.v[i]) * gt.v[i]);
        total += epe;
        if (epe > 3.0 && epe > 0.05 * mag) ++outliers;
        ++r.pixels;
    }
    require(r.pixels > 0, "AEE mask selects no pixels");
    r.aee = total / static_cast<double>(r.pixels);
    r.outlier_pct = 100.0 * static_cast<double>(outliers) / static_cast<double>(r.pixels);
    return r;
}

/// Pixels with at least one event.
[[nodiscard]] inline Plane<std::uint8_t> event_mask(std::span<const Event> events, Geometry geometry) {
    Plane<std::uint8_t> mask(geometry, 0);
    for (const auto& e : events) {
        if (geometry.contains(e.x, e.y)) mask(e.x, e.y) = 1;
    }
    return mask;
}

/// Events per pixel per second.
[[nodiscard]] inline double eppps(std::size_t count, Geometry geometry, double duration) {
    require(duration > 0.0, "eppps needs a positive duration");
    require(geometry.pixels() > 0, "eppps needs a non-empty geometry");
    return static_cast<double>(count) / (static_cast<double>(geometry.pixels()) * duration);
}

[[nodiscard]] inline double eppps(const EventStream& stream, const TimeWindow& window) {
    return eppps(events_in(stream.events, window).size(), stream.geometry, window.duration());
}

} // namespace evk
