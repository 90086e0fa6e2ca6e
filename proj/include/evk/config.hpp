#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evk/archetype.hpp"
#include "evk/dataset.hpp"
#include "evk/error.hpp"
#include "evk/io.hpp"
#include "evk/pipeline.hpp"
#include "evk/simulator.hpp"
#include "evk/textures.hpp"

/// JSON configuration shared by the CLI and library callers. See docs/config.md.
namespace evk::config {

using nlohmann::json;

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    require(j.is_object(), where + " must be a JSON object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        require(names.contains(key), "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

[[nodiscard]] inline json parse_file(const std::filesystem::path& path) {
    try {
        return json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw Error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

/// Seed precedence: explicit flag, then the EVK_SEED environment variable, then config.
[[nodiscard]] inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const json& root) {
    if (flag) return *flag;
    if (const char* env = std::getenv("EVK_SEED"); env != nullptr && *env != '\0') {
        std::uint64_t v = 0;
        require(io::detail::parse_int(std::string_view(env), v), "EVK_SEED is not an unsigned integer");
        return v;
    }
    return root.is_object() ? root.value("seed", std::uint64_t{0}) : 0;
}

[[nodiscard]] inline Geometry geometry_from(const json& root, Geometry fallback = {240, 180}) {
    if (!root.contains("geometry")) return fallback;
    const auto& g = root["geometry"];
    detail::check_keys(g, "geometry", {"width", "height"});
    Geometry out{g.at("width").get<int>(), g.at("height").get<int>()};
    require(out.width > 0 && out.height > 0, "geometry must be positive");
    return out;
}

[[nodiscard]] inline SimulatorConfig simulator_from(const json& root) {
    SimulatorConfig cfg;
    if (root.contains("simulator")) {
        const auto& s = root["simulator"];
        detail::check_keys(s, "simulator",
                           {"ct_negative_mean", "ct_sigma", "ct_ratio_sigma", "refractory_s", "frame_rate", "log_eps"});
        detail::read(s, "ct_negative_mean", cfg.ct_negative_mean);
        detail::read(s, "ct_sigma", cfg.ct_sigma);
        detail::read(s, "ct_ratio_sigma", cfg.ct_ratio_sigma);
        detail::read(s, "refractory_s", cfg.refractory);
        detail::read(s, "frame_rate", cfg.frame_rate);
        detail::read(s, "log_eps", cfg.log_eps);
    }
    detail::read(root, "threads", cfg.threads);
    cfg.validate();
    return cfg;
}

[[nodiscard]] inline std::vector<double> schedule_from(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    detail::check_keys(j, "dataset.ct_schedule", {"min", "max", "steps"});
    return linear_schedule(j.at("min").get<double>(), j.at("max").get<double>(), j.at("steps").get<std::size_t>());
}

struct DatasetJob {
    DatasetOptions options;
    std::vector<Image> assets;
};

/// Reads the "dataset" section. Asset paths resolve relative to `base_dir`.
[[nodiscard]] inline DatasetJob dataset_from(const json& root, std::uint64_t seed,
                                             const std::filesystem::path& base_dir) {
    DatasetJob job;
    job.options.geometry = geometry_from(root);
    job.options.ct_schedule = linear_schedule(0.1, 1.5, 15);
    std::vector<std::string> asset_paths;
    std::size_t procedural = 16;
    int procedural_size = 128;
    if (root.contains("dataset")) {
        const auto& d = root["dataset"];
        detail::check_keys(d, "dataset",
                           {"count", "duration_s", "ct_schedule", "archetypes", "write_frames", "write_flow", "assets"});
        detail::read(d, "count", job.options.count);
        detail::read(d, "duration_s", job.options.duration);
        detail::read(d, "write_frames", job.options.write_frames);
        detail::read(d, "write_flow", job.options.write_flow);
        if (d.contains("ct_schedule")) job.options.ct_schedule = schedule_from(d["ct_schedule"]);
        if (d.contains("archetypes")) {
            job.options.archetypes.clear();
            for (const auto& a : d["archetypes"]) {
                job.options.archetypes.push_back(a.is_string()
                                                     ? ArchetypeConfig::preset(parse_archetype(a.get<std::string>()))
                                                     : io::archetype_from_json(a));
            }
        }
        if (d.contains("assets")) {
            const auto& a = d["assets"];
            detail::check_keys(a, "dataset.assets", {"paths", "procedural", "procedural_size"});
            detail::read(a, "paths", asset_paths);
            procedural = asset_paths.empty() ? 16 : 0;
            detail::read(a, "procedural", procedural);
            detail::read(a, "procedural_size", procedural_size);
        }
    }
    for (const auto& p : asset_paths) {
        const std::filesystem::path path(p);
        job.assets.push_back(io::read_pgm(path.is_absolute() ? path : base_dir / path));
    }
    auto generated = procedural_assets(procedural, procedural_size, seed);
    job.assets.insert(job.assets.end(), generated.begin(), generated.end());
    return job;
}

[[nodiscard]] inline AugmentConfig augment_from(const json& root, std::uint64_t seed) {
    AugmentConfig cfg;
    cfg.noise.seed = seed;
    cfg.pause_params.seed = seed;
    if (root.contains("augment")) {
        const auto& a = root["augment"];
        detail::check_keys(a, "augment",
                           {"gaussian_noise", "gaussian_sigma", "hot_pixels", "hot_pixel_fraction_max",
                            "hot_value_sigma", "pause", "p_pause_given_run", "p_pause_given_pause"});
        detail::read(a, "gaussian_noise", cfg.gaussian_noise);
        detail::read(a, "gaussian_sigma", cfg.noise.gaussian_sigma);
        detail::read(a, "hot_pixels", cfg.hot_pixels);
        detail::read(a, "hot_pixel_fraction_max", cfg.noise.hot_pixel_fraction_max);
        detail::read(a, "hot_value_sigma", cfg.noise.hot_value_sigma);
        detail::read(a, "pause", cfg.pause);
        detail::read(a, "p_pause_given_run", cfg.pause_params.p_pause_given_run);
        detail::read(a, "p_pause_given_pause", cfg.pause_params.p_pause_given_pause);
    }
    cfg.noise.validate();
    cfg.pause_params.validate();
    return cfg;
}

} // namespace evk::config
