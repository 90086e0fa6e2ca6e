#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "evk/error.hpp"
#include "evk/metrics.hpp"
#include "evk/plane.hpp"
#include "evk/simulator.hpp"

namespace evk {

struct CtInterval {
    double lo;
    double hi;
};

struct CalibrationOptions {
    double eppps_rel_tolerance = 1e-3; // stop once |eppps - target| <= tol * target
    double ct_tolerance = 1e-4;        // or once the bracket is this narrow
    int max_iterations = 60;
    double refractory = 0.0;
    double log_eps = 1e-3;
    int threads = 1;
};

struct CalibrationResult {
    double ct = 0.0;
    double eppps = 0.0;  // simulated rate at ct
    bool saturated = false; // target outside the achievable range; ct is an endpoint
    int iterations = 0;
};

/// Bisection for the contrast threshold whose simulated event rate matches `target`.
/// The rate must be non-increasing in CT; this is checked at five evenly spaced CTs
/// before searching and a violation is raised as an error.
template <typename EpppsAt>
    requires std::invocable<EpppsAt&, double>
[[nodiscard]] CalibrationResult calibrate_ct(EpppsAt&& eppps_at, double target, CtInterval interval,
                                             const CalibrationOptions& opts = {}) {
    require(target > 0.0 && std::isfinite(target), "target eppps must be > 0");
    require(interval.lo > 0.0 && interval.lo < interval.hi && std::isfinite(interval.hi),
            "CT search interval must satisfy 0 < lo < hi");

    constexpr int kProbes = 5;
    std::vector<double> cts(kProbes);
    std::vector<double> rates(kProbes);
    for (int i = 0; i < kProbes; ++i) {
        cts[i] = interval.lo + (interval.hi - interval.lo) * i / (kProbes - 1);
        rates[i] = eppps_at(cts[i]);
        if (i > 0 && rates[i] > rates[i - 1]) {
            throw Error("eppps is not monotone in CT: eppps(" + std::to_string(cts[i - 1]) +
                        ")=" + std::to_string(rates[i - 1]) + " < eppps(" + std::to_string(cts[i]) +
                        ")=" + std::to_string(rates[i]));
        }
    }

    const double tol = opts.eppps_rel_tolerance * target;
    if (std::abs(rates.front() - target) <= tol) return {cts.front(), rates.front(), false, 0};
    if (std::abs(rates.back() - target) <= tol) return {cts.back(), rates.back(), false, 0};
    if (target > rates.front()) return {cts.front(), rates.front(), true, 0};
    if (target < rates.back()) return {cts.back(), rates.back(), true, 0};

    // Tighten the bracket with the probes before bisecting.
    double lo = cts.front();
    double hi = cts.back();
    for (int i = 0; i < kProbes; ++i) {
        if (rates[i] > target) lo = cts[i];
        if (rates[i] < target && cts[i] < hi) hi = cts[i];
    }

    CalibrationResult result;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rate = eppps_at(mid);
        result = {mid, rate, false, it};
        if (std::abs(rate - target) <= tol) break;
        if (rate > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < opts.ct_tolerance) break;
    }
    return result;
}

/// Calibrates against a frame sequence: events are simulated with balanced thresholds
/// Cp = Cn = CT and the rate is measured over the span of the frames.
[[nodiscard]] inline CalibrationResult calibrate_ct(std::span<const Frame> frames, double target, CtInterval interval,
                                                    const CalibrationOptions& opts = {}) {
    require(frames.size() >= 2, "calibration needs at least two frames");
    const Geometry g = frames.front().image.geometry();
    const auto log_frames = to_log_frames(frames, opts.log_eps);
    const double duration = frames.back().t - frames.front().t;
    auto rate_at = [&](double ct) {
        const auto thresholds = ThresholdMap::uniform(g, ct, ct, opts.refractory);
        return eppps(generate_events_from_log(log_frames, thresholds, opts.threads).size(), g, duration);
    };
    return calibrate_ct(rate_at, target, interval, opts);
}

} // namespace evk
