#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "evk/error.hpp"
#include "evk/event.hpp"
#include "evk/plane.hpp"
#include "evk/random.hpp"
#include "evk/render.hpp"

namespace evk {

struct SimulatorConfig {
    double ct_negative_mean = 0.18; // per-pixel sampling mean when no CT is imposed
    double ct_sigma = 0.03;
    double ct_ratio_sigma = 0.1; // spread of the global Cp/Cn ratio
    double refractory = 1e-3;    // seconds
    double frame_rate = 100.0;   // rendered frames per second
    std::uint64_t seed = 0;
    double log_eps = 1e-3;
    int threads = 1; // never changes results, only wall time

    void validate() const {
        require(ct_negative_mean > 0.0, "ct_negative_mean must be > 0");
        require(ct_sigma >= 0.0 && ct_ratio_sigma >= 0.0, "threshold sigmas must be >= 0");
        require(refractory >= 0.0 && std::isfinite(refractory), "refractory must be >= 0");
        require(frame_rate > 0.0 && std::isfinite(frame_rate), "frame_rate must be > 0");
        require(log_eps > 0.0, "log_eps must be > 0");
        require(threads >= 1, "threads must be >= 1");
    }
};

/// Balanced-with-jitter thresholds: Cn fixed at `cn_value`, Cp = Cn * x with one global
/// x ~ N(1, ct_ratio_sigma) per sequence, clamped to >= 0.01.
[[nodiscard]] inline ThresholdMap sample_thresholds(Geometry geometry, const SimulatorConfig& config, double cn_value,
                                                    std::uint64_t sequence_index = 0) {
    require(cn_value > 0.0 && std::isfinite(cn_value), "cn_value must be > 0");
    const CounterRng rng(config.seed, RngRole::Thresholds, {sequence_index});
    const double ratio = std::max(0.01, 1.0 + config.ct_ratio_sigma * rng.normal_at(0));
    return ThresholdMap::uniform(geometry, cn_value * ratio, cn_value, config.refractory);
}

/// Per-pixel thresholds drawn independently from N(ct_negative_mean, ct_sigma), clamped to >= 0.01.
[[nodiscard]] inline ThresholdMap sample_pixel_thresholds(Geometry geometry, const SimulatorConfig& config,
                                                          std::uint64_t sequence_index = 0) {
    const CounterRng rng(config.seed, RngRole::Thresholds, {sequence_index, 1});
    std::vector<double> cp(geometry.pixels());
    std::vector<double> cn(geometry.pixels());
    for (std::size_t i = 0; i < geometry.pixels(); ++i) {
        cn[i] = std::max(0.01, config.ct_negative_mean + config.ct_sigma * rng.normal_at(2 * i));
        cp[i] = std::max(0.01, config.ct_negative_mean + config.ct_sigma * rng.normal_at(2 * i + 1));
    }
    return {geometry, std::move(cp), std::move(cn), config.refractory};
}

namespace detail {

inline void check_frames(std::span<const Frame> frames, Geometry geometry) {
    require(frames.size() >= 2, "event generation needs at least two frames");
    for (std::size_t k = 0; k < frames.size(); ++k) {
        require(frames[k].image.geometry() == geometry,
                "frame " + std::to_string(k) + " dimensions differ from the threshold map");
        require(std::isfinite(frames[k].t), "frame timestamps must be finite");
        if (k > 0) {
            require(frames[k].t > frames[k - 1].t, "frame timestamps must be strictly increasing");
        }
    }
}

/// Level-crossing state machine for one pixel. The log signal is linear between samples.
/// A crossing inside the refractory window is held back: it fires at the first instant
/// the pixel is ready again, provided the signal is still beyond the threshold then.
struct PixelIntegrator {
    double reference;
    double cp;
    double cn;
    double refractory;
    double last_t = 0.0;
    bool fired = false;

    template <typename Emit>
    void segment(double ta, double la, double tb, double lb, Emit&& emit) {
        const double span = tb - ta;
        auto level_at = [&](double t) {
            if (t <= ta) return la;
            if (t >= tb) return lb;
            return la + (lb - la) * ((t - ta) / span);
        };
        double cursor = ta;
        for (;;) {
            const double ready = fired ? std::max(cursor, ready_time()) : cursor;
            if (ready > tb) return;
            const double now = level_at(ready);
            const double up = reference + cp;
            const double down = reference - cn;
            if (now >= up) {
                fire(Polarity::Positive, ready, emit);
            } else if (now <= down) {
                fire(Polarity::Negative, ready, emit);
            } else if (lb > now && lb >= up) {
                const double tc = ta + (up - la) / (lb - la) * span;
                fire(Polarity::Positive, std::clamp(tc, ready, tb), emit);
            } else if (lb < now && lb <= down) {
                const double tc = ta + (down - la) / (lb - la) * span;
                fire(Polarity::Negative, std::clamp(tc, ready, tb), emit);
            } else {
                return;
            }
            cursor = last_t;
        }
    }

    /// Earliest instant after the last event that keeps the gap >= refractory in floating point.
    [[nodiscard]] double ready_time() const {
        double t = last_t + refractory;
        while (t - last_t < refractory) t = std::nextafter(t, std::numeric_limits<double>::infinity());
        return t;
    }

    template <typename Emit>
    void fire(Polarity p, double t, Emit& emit) {
        reference += p == Polarity::Positive ? cp : -cn;
        last_t = t;
        fired = true;
        emit(t, p);
    }
};

} // namespace detail

/// Incremental event generator: frames are pushed in time order and each new frame
/// closes one linear segment per pixel. Pixels are independent, so rows are split across
/// `threads` workers; the merged output is sorted by the global event order and is
/// therefore identical for every thread count.
class EventGenerator {
public:
    EventGenerator(ThresholdMap thresholds, int threads = 1)
        : thresholds_(std::move(thresholds)),
          threads_(std::clamp(threads, 1, std::max(1, thresholds_.geometry().height))) {}

    /// Pushes a log-intensity frame. The first frame only initialises the reference levels.
    void push_log(const Frame& log_frame) {
        const Geometry g = thresholds_.geometry();
        require(log_frame.image.geometry() == g,
                "frame " + std::to_string(frames_) + " dimensions differ from the threshold map");
        require(std::isfinite(log_frame.t), "frame timestamps must be finite");
        if (frames_ == 0) {
            pixels_.clear();
            pixels_.reserve(g.pixels());
            for (std::size_t px = 0; px < g.pixels(); ++px) {
                pixels_.push_back({log_frame.image[px], thresholds_.cp(px), thresholds_.cn(px),
                                   thresholds_.refractory()});
            }
        } else {
            require(log_frame.t > previous_.t, "frame timestamps must be strictly increasing");
            advance(log_frame);
        }
        previous_ = log_frame;
        ++frames_;
    }

    void push(const Frame& frame, double log_eps) {
        Frame lf{frame.t, Image(frame.image.geometry())};
        for (std::size_t i = 0; i < frame.image.size(); ++i) lf.image[i] = std::log(frame.image[i] + log_eps);
        push_log(lf);
    }

    [[nodiscard]] std::size_t frames() const { return frames_; }

    [[nodiscard]] EventStream finish() {
        require(frames_ >= 2, "event generation needs at least two frames");
        EventStream stream{thresholds_.geometry(), std::move(events_)};
        std::sort(stream.events.begin(), stream.events.end(), event_order);
        events_.clear();
        return stream;
    }

private:
    void advance(const Frame& next) {
        const Geometry g = thresholds_.geometry();
        auto run_rows = [&](int row_begin, int row_end, std::vector<Event>& out) {
            for (int y = row_begin; y < row_end; ++y) {
                for (int x = 0; x < g.width; ++x) {
                    const std::size_t px = g.index(x, y);
                    auto emit = [&](double t, Polarity p) { out.push_back({t, x, y, p}); };
                    pixels_[px].segment(previous_.t, previous_.image[px], next.t, next.image[px], emit);
                }
            }
        };
        if (threads_ == 1) {
            run_rows(0, g.height, events_);
            return;
        }
        std::vector<std::vector<Event>> parts(static_cast<std::size_t>(threads_));
        std::vector<std::thread> workers;
        for (int w = 0; w < threads_; ++w) {
            workers.emplace_back(run_rows, g.height * w / threads_, g.height * (w + 1) / threads_,
                                 std::ref(parts[static_cast<std::size_t>(w)]));
        }
        for (auto& worker : workers) worker.join();
        for (const auto& part : parts) events_.insert(events_.end(), part.begin(), part.end());
    }

    ThresholdMap thresholds_;
    int threads_;
    std::vector<detail::PixelIntegrator> pixels_;
    Frame previous_;
    std::size_t frames_ = 0;
    std::vector<Event> events_;
};

/// Converts log-intensity frames into events (see EventGenerator).
[[nodiscard]] inline EventStream generate_events_from_log(std::span<const Frame> log_frames,
                                                          const ThresholdMap& thresholds, int threads = 1) {
    detail::check_frames(log_frames, thresholds.geometry());
    EventGenerator generator(thresholds, threads);
    for (const auto& f : log_frames) generator.push_log(f);
    return generator.finish();
}

[[nodiscard]] inline std::vector<Frame> to_log_frames(std::span<const Frame> frames, double log_eps) {
    require(log_eps > 0.0, "log_eps must be > 0");
    std::vector<Frame> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        Frame lf{f.t, Image(f.image.geometry())};
        for (std::size_t i = 0; i < f.image.size(); ++i) lf.image[i] = std::log(f.image[i] + log_eps);
        out.push_back(std::move(lf));
    }
    return out;
}

/// Events from intensity frames via L = ln(I + log_eps).
[[nodiscard]] inline EventStream generate_events(std::span<const Frame> frames, const ThresholdMap& thresholds,
                                                 double log_eps, int threads = 1) {
    detail::check_frames(frames, thresholds.geometry());
    const auto log_frames = to_log_frames(frames, log_eps);
    return generate_events_from_log(log_frames, thresholds, threads);
}

/// Frame instants k / frame_rate covering [0, duration].
[[nodiscard]] inline std::vector<double> frame_times(double duration, double frame_rate) {
    const auto last = static_cast<std::int64_t>(std::floor(duration * frame_rate + 1e-9));
    require(last >= 1, "duration must span at least one frame interval");
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(last) + 1);
    for (std::int64_t k = 0; k <= last; ++k) times.push_back(static_cast<double>(k) / frame_rate);
    return times;
}

struct SimulationResult {
    EventStream events;
    std::vector<Frame> frames;
    std::vector<FlowField> flows; // one per frame, pixels per second
    ThresholdMap thresholds;
};

/// Renders the scene at config.frame_rate, feeding each frame and its analytic flow to
/// `on_frame(const Frame&, const FlowField&)` as it is produced, and returns the events.
template <typename OnFrame>
[[nodiscard]] EventStream simulate_streaming(const Scene& scene, const SimulatorConfig& config,
                                             const ThresholdMap& thresholds, OnFrame&& on_frame) {
    validate_scene(scene);
    config.validate();
    require(thresholds.geometry() == scene.geometry, "threshold map does not match the scene geometry");
    EventGenerator generator(thresholds, config.threads);
    for (double t : frame_times(scene.duration, config.frame_rate)) {
        const Frame frame{t, render_frame(scene, t)};
        generator.push(frame, config.log_eps);
        on_frame(frame, analytic_flow(scene, t));
    }
    return generator.finish();
}

[[nodiscard]] inline SimulationResult simulate_sequence(const Scene& scene, const SimulatorConfig& config,
                                                        const ThresholdMap& thresholds) {
    std::vector<Frame> frames;
    std::vector<FlowField> flows;
    auto events = simulate_streaming(scene, config, thresholds, [&](const Frame& f, FlowField flow) {
        frames.push_back(f);
        flows.push_back(std::move(flow));
    });
    return {std::move(events), std::move(frames), std::move(flows), thresholds};
}

[[nodiscard]] inline SimulationResult simulate_sequence(const Scene& scene, const SimulatorConfig& config,
                                                        double cn_value, std::uint64_t sequence_index = 0) {
    return simulate_sequence(scene, config, sample_thresholds(scene.geometry, config, cn_value, sequence_index));
}

} // namespace evk
