#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evk/archetype.hpp"
#include "evk/error.hpp"
#include "evk/io.hpp"
#include "evk/metrics.hpp"
#include "evk/random.hpp"
#include "evk/render.hpp"
#include "evk/simulator.hpp"

namespace evk {

/// Random multi-object scene for one archetype. Objects are opaque rectangles cut from
/// the asset pool; the background is a pool image resampled to the sensor.
[[nodiscard]] inline Scene make_scene(const ArchetypeConfig& archetype, std::span<const Image> assets,
                                          Geometry geometry, double duration, CounterRng rng) {
    archetype.validate();
    require(!assets.empty(), "asset pool is empty");
    require(duration > 0.0, "scene duration must be > 0");
    auto pick = [&]() -> const Image& { return assets[static_cast<std::size_t>(rng.below(assets.size()))]; };

    Scene scene;
    scene.geometry = geometry;
    scene.duration = duration;
    scene.background = resample(pick(), geometry.width, geometry.height);

    const int n_objects = static_cast<int>(rng.integer(archetype.object_count.lo, archetype.object_count.hi));
    const int min_dim = std::min(geometry.width, geometry.height);
    const int side_lo = std::max(4, static_cast<int>(0.1 * min_dim));
    const int side_hi = std::max(side_lo, static_cast<int>(0.45 * min_dim));
    for (int i = 0; i < n_objects; ++i) {
        const Image& asset = pick();
        const int w = static_cast<int>(rng.integer(side_lo, side_hi));
        const int h = static_cast<int>(rng.integer(side_lo, side_hi));
        Texture texture = Texture::opaque(resample(asset, w, h));

        Pose start{rng.uniform(0.0, geometry.width), rng.uniform(0.0, geometry.height),
                   rng.uniform(-std::numbers::pi, std::numbers::pi), rng.uniform(0.8, 1.2)};
        const double speed = rng.uniform(archetype.speed.lo, archetype.speed.hi);
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double spin = rng.uniform(archetype.rotation_rate.lo, archetype.rotation_rate.hi);
        const double growth = rng.uniform(archetype.scale_rate.lo, archetype.scale_rate.hi);
        Pose end{start.tx + speed * std::cos(heading) * duration, start.ty + speed * std::sin(heading) * duration,
                 start.rotation + spin * duration, start.scale * std::pow(growth, duration)};
        scene.objects.push_back({std::move(texture), Trajectory{start, end, duration}});
    }
    return scene;
}

struct DatasetOptions {
    Geometry geometry{240, 180};
    std::size_t count = 280;
    double duration = 10.0;
    std::vector<double> ct_schedule; // Cn values, assigned in ascending order
    std::vector<ArchetypeConfig> archetypes = ArchetypeConfig::all_presets();
    bool write_frames = true;
    bool write_flow = true;
    // Called with (sequence index, events) after each sequence is generated.
    std::function<void(std::size_t, const EventStream&)> on_sequence;
};

/// Cn for sequence i: the schedule is sorted ascending and spread evenly over the sequences.
[[nodiscard]] inline double scheduled_cn(std::span<const double> sorted_schedule, std::size_t index,
                                         std::size_t count) {
    return sorted_schedule[index * sorted_schedule.size() / count];
}

/// Evenly spaced CT schedule over [lo, hi].
[[nodiscard]] inline std::vector<double> linear_schedule(double lo, double hi, std::size_t steps) {
    require(steps >= 1, "schedule needs at least one step");
    std::vector<double> out;
    for (std::size_t i = 0; i < steps; ++i) {
        out.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
    }
    return out;
}

/// Generates `count` sequences cycling through the archetypes and writes them under
/// `out_dir` with a manifest. Output depends only on the seed, never on thread count.
inline io::DatasetManifest build_dataset(const DatasetOptions& options, std::span<const Image> asset_pool,
                                         const SimulatorConfig& config, const std::filesystem::path& out_dir) {
    require(!asset_pool.empty(), "asset pool is empty");
    require(!options.ct_schedule.empty(), "ct_schedule is empty");
    require(!options.archetypes.empty(), "no archetypes configured");
    require(options.count >= 1, "dataset count must be >= 1");
    config.validate();
    for (const auto& a : options.archetypes) a.validate();
    for (double c : options.ct_schedule) require(c > 0.0, "ct_schedule values must be > 0");

    auto schedule = options.ct_schedule;
    std::sort(schedule.begin(), schedule.end());

    io::DatasetManifest manifest;
    manifest.seed = config.seed;
    manifest.geometry = options.geometry;
    manifest.archetypes = options.archetypes;

    for (std::size_t i = 0; i < options.count; ++i) {
        const auto& archetype = options.archetypes[i % options.archetypes.size()];
        const double cn = scheduled_cn(schedule, i, options.count);
        const Scene scene = make_scene(archetype, asset_pool, options.geometry, options.duration,
                                           CounterRng(config.seed, RngRole::Scene, {i}));
        const ThresholdMap thresholds = sample_thresholds(options.geometry, config, cn, i);

        io::SequenceEntry entry;
        entry.id = io::indexed_name("seq", i, "");
        entry.archetype = to_string(archetype.archetype);
        entry.cn = cn;
        entry.cp = thresholds.cp(0);
        entry.duration = options.duration;
        entry.object_count = scene.objects.size();

        const auto seq_dir = out_dir / entry.id;
        std::vector<double> times;
        std::size_t frame_index = 0;
        auto on_frame = [&](const Frame& frame, const FlowField& flow) {
            times.push_back(frame.t);
            if (options.write_frames) {
                io::write_pgm(seq_dir / "frames" / io::indexed_name("frame", frame_index, ".pgm"), frame.image);
            }
            if (options.write_flow) {
                io::write_flow(seq_dir / "flow" / io::indexed_name("flow", frame_index, ".evkf"), flow);
            }
            ++frame_index;
        };
        const EventStream events = simulate_streaming(scene, config, thresholds, on_frame);
        if (options.on_sequence) options.on_sequence(i, events);

        std::filesystem::create_directories(seq_dir);
        io::write_events_binary(seq_dir / "events.evk", events);
        entry.events = entry.id + "/events.evk";
        if (options.write_frames) {
            io::write_timestamps(seq_dir / "frames" / "timestamps.txt", times);
            entry.frames = entry.id + "/frames";
        }
        if (options.write_flow) {
            io::write_timestamps(seq_dir / "flow" / "timestamps.txt", times);
            entry.flow = entry.id + "/flow";
        }
        entry.event_count = events.size();
        entry.eppps = eppps(events.size(), options.geometry, options.duration);
        manifest.sequences.push_back(std::move(entry));
    }
    io::write_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

} // namespace evk
