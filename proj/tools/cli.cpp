#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evk/evk.hpp"

namespace evk::cli {
namespace {

namespace fs = std::filesystem;

void put(std::ostream& out, const std::string& key, double value) {
    out << key << '=' << io::format_number(value) << '\n';
}
void put(std::ostream& out, const std::string& key, std::size_t value) { out << key << '=' << value << '\n'; }

std::optional<Geometry> geometry_option(int width, int height) {
    if (width <= 0 && height <= 0) return std::nullopt;
    if (width <= 0 || height <= 0) throw CLI::ValidationError("--width and --height must be given together");
    return Geometry{width, height};
}

/// Options shared by commands that slice a stream.
struct StrategyArgs {
    std::string strategy;
    double dt = 0.0;
    std::size_t count = 0;
    std::string frames;
    int bins = kDefaultBins;

    void add(CLI::App& cmd, bool required) {
        auto* opt = cmd.add_option("--strategy", strategy, "fixed-rate | fixed-count | between-frames")
                        ->check(CLI::IsMember({"fixed-rate", "fixed-count", "between-frames"}));
        if (required) opt->required();
        cmd.add_option("--bins", bins, "temporal bins per voxel grid")->check(CLI::PositiveNumber);
        cmd.add_option("--dt", dt, "slice width in seconds (fixed-rate)");
        cmd.add_option("--count", count, "events per slice (fixed-count)");
        cmd.add_option("--frames", frames, "directory with timestamps.txt (between-frames)");
    }

    [[nodiscard]] SliceStrategy build() const {
        if (strategy == "fixed-rate") {
            if (dt <= 0.0) throw CLI::ValidationError("fixed-rate needs --dt > 0");
            return FixedRate{dt};
        }
        if (strategy == "fixed-count") {
            if (count == 0) throw CLI::ValidationError("fixed-count needs --count >= 1");
            return FixedCount{count};
        }
        if (frames.empty()) throw CLI::ValidationError("between-frames needs --frames <dir>");
        return BetweenFrames{io::read_timestamps(fs::path(frames) / "timestamps.txt")};
    }
};

/// Slices [t_i, t_{i+1}) between consecutive flow timestamps.
std::vector<TimeWindow> flow_windows(const std::vector<io::TimedFlow>& flows) {
    std::vector<TimeWindow> windows;
    for (std::size_t i = 1; i < flows.size(); ++i) windows.emplace_back(flows[i - 1].t, flows[i].t);
    return windows;
}

void write_csv(const std::string& path, const std::vector<io::MetricRecord>& records) {
    if (!path.empty()) io::write_file_atomic(path, io::encode_metric_csv(records));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"evk: event-camera data synthesis, voxelization, augmentation and evaluation"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::optional<std::uint64_t> seed_flag;
    std::uint64_t seed_value = 0;
    int threads = 0;
    int width = 0;
    int height = 0;

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic training dataset");
    std::string sim_config;
    std::string sim_out;
    simulate->add_option("--config", sim_config, "JSON config")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim_out, "output directory")->required();
    auto* sim_seed = simulate->add_option("--seed", seed_value, "overrides EVK_SEED and the config seed");
    simulate->add_option("--threads", threads, "worker threads (results do not depend on it)");

    // voxelize
    auto* vox = app.add_subcommand("voxelize", "slice an event stream into voxel grids");
    std::string vox_events;
    std::string vox_out;
    StrategyArgs vox_strategy;
    vox->add_option("--events", vox_events, "event file (text or binary)")->required()->check(CLI::ExistingFile);
    vox_strategy.add(*vox, true);
    vox->add_option("--out", vox_out, "output directory for voxel_%06d.evkv + windows.txt");
    vox->add_option("--width", width);
    vox->add_option("--height", height);

    // augment
    auto* aug = app.add_subcommand("augment", "apply noise, hot-pixel and pause augmentation to voxel grids");
    std::string aug_in;
    std::string aug_config;
    std::string aug_out;
    std::uint64_t aug_sequence = 0;
    aug->add_option("--in", aug_in, "voxel directory")->required()->check(CLI::ExistingDirectory);
    aug->add_option("--config", aug_config, "JSON config with an \"augment\" section")
        ->required()
        ->check(CLI::ExistingFile);
    aug->add_option("--out", aug_out, "output directory (default: <in>/augmented)");
    auto* aug_seed = aug->add_option("--seed", seed_value, "overrides EVK_SEED and the config seed");
    aug->add_option("--sequence-index", aug_sequence, "sequence index mixed into the random streams");

    // stats
    auto* stats = app.add_subcommand("stats", "event-rate statistics");
    std::string stats_events;
    std::vector<double> stats_window;
    StrategyArgs stats_strategy;
    stats->add_option("--events", stats_events)->required()->check(CLI::ExistingFile);
    stats->add_option("--window", stats_window, "t0 tN in seconds")->expected(2);
    stats_strategy.add(*stats, false);
    stats->add_option("--width", width);
    stats->add_option("--height", height);

    // fwl
    auto* fwl_cmd = app.add_subcommand("fwl", "flow warp loss of a flow sequence against events");
    std::string fwl_events;
    std::string fwl_flow;
    std::string fwl_tref = "start";
    std::string fwl_csv;
    std::string fwl_sequence = "sequence";
    fwl_cmd->add_option("--events", fwl_events)->required()->check(CLI::ExistingFile);
    fwl_cmd->add_option("--flow", fwl_flow, "flow directory")->required()->check(CLI::ExistingDirectory);
    fwl_cmd->add_option("--tref", fwl_tref, "reference time: slice start or end")
        ->check(CLI::IsMember({"start", "end"}));
    fwl_cmd->add_option("--csv", fwl_csv, "write per-slice records");
    fwl_cmd->add_option("--sequence", fwl_sequence, "sequence name used in records");

    // aee
    auto* aee_cmd = app.add_subcommand("aee", "average endpoint error between two flow sequences");
    std::string aee_pred;
    std::string aee_gt;
    std::string aee_mask = "events";
    std::string aee_events;
    std::string aee_csv;
    std::string aee_sequence = "sequence";
    aee_cmd->add_option("--pred", aee_pred)->required()->check(CLI::ExistingDirectory);
    aee_cmd->add_option("--gt", aee_gt)->required()->check(CLI::ExistingDirectory);
    aee_cmd->add_option("--mask", aee_mask, "events: pixels with events in the slice; all: every pixel")
        ->check(CLI::IsMember({"events", "all"}));
    aee_cmd->add_option("--events", aee_events, "event file (required for --mask events)");
    aee_cmd->add_option("--csv", aee_csv, "write per-slice records");
    aee_cmd->add_option("--sequence", aee_sequence, "sequence name used in records");

    // calibrate-ct
    auto* cal = app.add_subcommand("calibrate-ct", "find the CT whose simulated event rate matches a target");
    std::string cal_frames;
    double cal_target = 0.0;
    double cal_lo = 0.0;
    double cal_hi = 0.0;
    CalibrationOptions cal_opts;
    cal->add_option("--frames", cal_frames)->required()->check(CLI::ExistingDirectory);
    cal->add_option("--target-eppps", cal_target)->required();
    cal->add_option("--lo", cal_lo)->required();
    cal->add_option("--hi", cal_hi)->required();
    cal->add_option("--tolerance", cal_opts.eppps_rel_tolerance, "relative eppps tolerance");
    cal->add_option("--refractory", cal_opts.refractory, "refractory period in seconds");
    cal->add_option("--log-eps", cal_opts.log_eps);
    cal->add_option("--threads", threads);

    // cut
    auto* cut = app.add_subcommand("cut", "keep the events in [start, end)");
    std::string cut_events;
    std::string cut_out;
    double cut_start = 0.0;
    double cut_end = 0.0;
    cut->add_option("--events", cut_events)->required()->check(CLI::ExistingFile);
    cut->add_option("--start", cut_start)->required();
    cut->add_option("--end", cut_end)->required();
    cut->add_option("--out", cut_out, "output event file (.txt for text); default: text on stdout");
    cut->add_option("--width", width);
    cut->add_option("--height", height);

    std::vector<std::string> argv_storage{"evk"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (sim_seed->count() > 0 || aug_seed->count() > 0) seed_flag = seed_value;

        if (*simulate) {
            const auto root = config::parse_file(sim_config);
            const auto seed = config::resolve_seed(seed_flag, root);
            auto sim = config::simulator_from(root);
            sim.seed = seed;
            if (threads > 0) sim.threads = threads;
            const auto job = config::dataset_from(root, seed, fs::path(sim_config).parent_path());
            const auto manifest = build_dataset(job.options, job.assets, sim, sim_out);
            std::size_t total = 0;
            double rate = 0.0;
            for (const auto& s : manifest.sequences) {
                total += s.event_count;
                rate += s.eppps;
            }
            put(out, "sequences", manifest.sequences.size());
            put(out, "events", total);
            put(out, "eppps_mean", rate / static_cast<double>(manifest.sequences.size()));
            out << "seed=" << seed << '\n';
        } else if (*vox) {
            const auto stream = io::read_events(vox_events, geometry_option(width, height));
            const auto strategy = vox_strategy.build();
            const auto slices = slice(stream, strategy);
            std::vector<VoxelGrid> grids;
            for (const auto& s : slices) grids.push_back(voxelize(s.events, stream.geometry, s.window, vox_strategy.bins));
            if (!vox_out.empty()) io::write_voxel_dir(vox_out, grids);
            put(out, "slices", grids.size());
            put(out, "bins", static_cast<std::size_t>(vox_strategy.bins));
            put(out, "events_per_voxel", events_per_voxel(slices, vox_strategy.bins, stream.geometry));
        } else if (*aug) {
            const auto root = config::parse_file(aug_config);
            const auto seed = config::resolve_seed(seed_flag, root);
            const auto cfg = config::augment_from(root, seed);
            auto grids = io::read_voxel_dir(aug_in);
            const auto result = augment_sequence(std::move(grids), cfg, aug_sequence);
            const fs::path dest = aug_out.empty() ? fs::path(aug_in) / "augmented" : fs::path(aug_out);
            io::write_voxel_dir(dest, result.grids);
            std::string mask;
            std::size_t paused = 0;
            for (std::size_t i = 0; i < result.pause_mask.size(); ++i) {
                mask += std::to_string(i) + (result.pause_mask[i] ? " 1\n" : " 0\n");
                paused += result.pause_mask[i] ? 1 : 0;
            }
            io::write_file_atomic(dest / "pause_mask.txt", mask);
            put(out, "grids", result.grids.size());
            put(out, "paused", paused);
            if (!result.grids.empty() && cfg.hot_pixels) {
                put(out, "hot_pixels", sample_hot_pixels(result.grids.front().geometry, cfg.noise, aug_sequence).size());
            }
            out << "seed=" << seed << '\n';
        } else if (*stats) {
            const auto stream = io::read_events(stats_events, geometry_option(width, height));
            std::optional<TimeWindow> window;
            if (stats_window.size() == 2) {
                window = TimeWindow(stats_window[0], stats_window[1]);
            } else if (stream.size() >= 2 && stream.events.back().t > stream.events.front().t) {
                window = TimeWindow(stream.events.front().t, stream.events.back().t);
            }
            const auto part = window ? events_in(stream.events, *window) : std::span<const Event>(stream.events);
            std::size_t positive = 0;
            for (const auto& e : part) positive += e.polarity == Polarity::Positive ? 1 : 0;
            put(out, "events", part.size());
            put(out, "positive", positive);
            put(out, "negative", part.size() - positive);
            out << "width=" << stream.geometry.width << "\nheight=" << stream.geometry.height << '\n';
            if (window) {
                put(out, "duration_s", window->duration());
                put(out, "eppps", eppps(part.size(), stream.geometry, window->duration()));
            } else if (part.empty()) {
                put(out, "duration_s", 0.0);
                put(out, "eppps", 0.0);
            } else {
                throw Error("cannot compute eppps: events span zero duration; pass --window");
            }
            if (!stats_strategy.strategy.empty()) {
                const auto slices = slice(stream, stats_strategy.build());
                put(out, "slices", slices.size());
                put(out, "events_per_voxel", events_per_voxel(slices, stats_strategy.bins, stream.geometry));
            }
        } else if (*fwl_cmd) {
            const auto stream = io::read_events(fwl_events);
            const auto flows = io::read_flow_dir(fwl_flow);
            require(flows.size() >= 2, "flow directory needs at least two timestamps");
            require(flows.front().flow.geometry() == stream.geometry, "flow and event geometries differ");
            std::vector<io::MetricRecord> records;
            double sum = 0.0;
            std::size_t evaluated = 0;
            std::size_t skipped = 0;
            const auto windows = flow_windows(flows);
            for (std::size_t i = 0; i < windows.size(); ++i) {
                const auto part = events_in(stream.events, windows[i]);
                const bool at_end = fwl_tref == "end";
                const auto& flow = flows[at_end ? i + 1 : i].flow;
                const double t_ref = at_end ? windows[i].tN() : windows[i].t0();
                if (part.empty()) {
                    ++skipped;
                    continue;
                }
                double value = 0.0;
                try {
                    value = fwl(part, flow, t_ref);
                } catch (const Error&) {
                    ++skipped;
                    continue;
                }
                records.push_back({fwl_sequence, i, "fwl", value});
                sum += value;
                ++evaluated;
            }
            write_csv(fwl_csv, records);
            put(out, "slices", evaluated);
            put(out, "skipped", skipped);
            require(evaluated > 0, "no slice had events to evaluate");
            put(out, "fwl", sum / static_cast<double>(evaluated));
        } else if (*aee_cmd) {
            const auto pred = io::read_flow_dir(aee_pred);
            const auto gt = io::read_flow_dir(aee_gt);
            require(pred.size() == gt.size(), "prediction and ground truth differ in frame count");
            require(gt.size() >= 2, "flow directories need at least two timestamps");
            std::optional<EventStream> stream;
            if (aee_mask == "events") {
                if (aee_events.empty()) throw CLI::ValidationError("--mask events needs --events <file>");
                stream = io::read_events(aee_events);
            }
            std::vector<io::MetricRecord> records;
            double sum_aee = 0.0;
            double sum_out = 0.0;
            std::size_t evaluated = 0;
            const auto windows = flow_windows(gt);
            for (std::size_t i = 0; i < windows.size(); ++i) {
                const Geometry g = gt[i].flow.geometry();
                Plane<std::uint8_t> mask(g, 1);
                if (stream) {
                    const auto part = events_in(stream->events, windows[i]);
                    if (part.empty()) continue;
                    mask = event_mask(part, g);
                }
                const auto r = aee(pred[i].flow, gt[i].flow, mask);
                records.push_back({aee_sequence, i, "aee", r.aee});
                records.push_back({aee_sequence, i, "outlier_pct", r.outlier_pct});
                sum_aee += r.aee;
                sum_out += r.outlier_pct;
                ++evaluated;
            }
            write_csv(aee_csv, records);
            put(out, "slices", evaluated);
            require(evaluated > 0, "no slice could be evaluated");
            put(out, "aee", sum_aee / static_cast<double>(evaluated));
            put(out, "outlier_pct", sum_out / static_cast<double>(evaluated));
        } else if (*cal) {
            if (threads > 0) cal_opts.threads = threads;
            const auto frames = io::read_frames(cal_frames);
            const auto r = calibrate_ct(frames, cal_target, {cal_lo, cal_hi}, cal_opts);
            put(out, "ct", r.ct);
            put(out, "eppps", r.eppps);
            out << "saturated=" << (r.saturated ? 1 : 0) << '\n';
            out << "iterations=" << r.iterations << '\n';
        } else if (*cut) {
            const auto stream = io::read_events(cut_events, geometry_option(width, height));
            const auto part = slice_by_window(stream, TimeWindow(cut_start, cut_end));
            if (cut_out.empty()) {
                out << io::encode_events_text(part);
            } else {
                io::write_events(cut_out, part);
                put(out, "events", part.size());
            }
        }
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
}

} // namespace evk::cli
