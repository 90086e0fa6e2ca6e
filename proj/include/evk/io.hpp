#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evk/archetype.hpp"
#include "evk/error.hpp"
#include "evk/event.hpp"
#include "evk/plane.hpp"
#include "evk/voxel.hpp"

namespace evk::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Time and number formatting

[[nodiscard]] inline std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }
[[nodiscard]] inline double from_ns(std::int64_t ns) { return static_cast<double>(ns) / 1e9; }

/// Non-negative nanoseconds as seconds with exactly nine fractional digits.
[[nodiscard]] inline std::string format_ns(std::int64_t ns) {
    require(ns >= 0, "negative timestamps cannot be written");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%09lld", static_cast<long long>(ns / 1000000000),
                  static_cast<long long>(ns % 1000000000));
    return buf;
}

[[nodiscard]] inline std::string format_seconds(double t) { return format_ns(to_ns(t)); }

/// Parses `S[.F]` with at most nine fractional digits into nanoseconds, exactly.
[[nodiscard]] inline std::optional<std::int64_t> parse_ns(std::string_view text) {
    const auto dot = text.find('.');
    const auto whole = text.substr(0, dot);
    if (whole.empty()) return std::nullopt;
    std::int64_t sec = 0;
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), sec);
    if (ec != std::errc{} || p != whole.data() + whole.size() || sec < 0) return std::nullopt;
    std::int64_t frac = 0;
    if (dot != std::string_view::npos) {
        const auto digits = text.substr(dot + 1);
        if (digits.empty() || digits.size() > 9) return std::nullopt;
        for (char c : digits) {
            if (c < '0' || c > '9') return std::nullopt;
            frac = frac * 10 + (c - '0');
        }
        for (std::size_t i = digits.size(); i < 9; ++i) frac *= 10;
    }
    return sec * 1000000000 + frac;
}

/// Locale-independent rendering with the given number of significant digits.
[[nodiscard]] inline std::string format_number(double value, int significant = 6) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general,
                                   significant);
    if (ec != std::errc{}) return "nan";
    std::string s(buf.data(), end);
    // Keep the trailing zeros so every value shows `significant` digits.
    if (!std::isfinite(value)) return s;
    const auto exp_pos = s.find_first_of("eE");
    std::string mantissa = s.substr(0, exp_pos);
    const std::string exponent = exp_pos == std::string::npos ? "" : s.substr(exp_pos);
    int digits = 0;
    bool leading = true;
    for (char c : mantissa) {
        if (c < '0' || c > '9') continue;
        if (leading && c == '0') continue;
        leading = false;
        ++digits;
    }
    if (leading) digits = 1; // value is zero
    if (digits < significant) {
        if (mantissa.find('.') == std::string::npos) mantissa += '.';
        mantissa.append(static_cast<std::size_t>(significant - digits), '0');
    }
    return mantissa + exponent;
}

// ---------------------------------------------------------------------------
// Files

[[nodiscard]] inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a sibling temporary file and rename, so readers never see partial output.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace detail {

inline void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>(v >> 8));
}
inline void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_i64(std::string& s, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
}
inline void put_f32(std::string& s, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u32(s, bits);
}

inline std::uint64_t get_le(std::string_view s, std::size_t pos, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
    return v;
}
inline float get_f32(std::string_view s, std::size_t pos) {
    const auto bits = static_cast<std::uint32_t>(get_le(s, pos, 4));
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        fn(text.substr(pos, end - pos), line_no);
        pos = end + 1;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Events, text: `t x y p` per line, p in {0, 1} with 0 meaning negative.

[[nodiscard]] inline std::string encode_events_text(const EventStream& stream) {
    require_valid(stream);
    std::string out;
    out.reserve(stream.size() * 24);
    for (const auto& e : stream.events) {
        out += format_seconds(e.t);
        out += ' ';
        out += std::to_string(e.x);
        out += ' ';
        out += std::to_string(e.y);
        out += e.polarity == Polarity::Positive ? " 1\n" : " 0\n";
    }
    return out;
}

/// Without an explicit geometry the sensor is taken as the bounding box of the events.
[[nodiscard]] inline EventStream decode_events_text(std::string_view text, std::optional<Geometry> geometry = {}) {
    EventStream stream;
    std::int64_t prev_ns = -1;
    int max_x = -1;
    int max_y = -1;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const auto fields = detail::split_ws(line);
        if (fields.empty()) return;
        const std::string where = " at line " + std::to_string(line_no);
        if (fields.size() != 4) throw Error("malformed event" + where + ": expected `t x y p`");
        const auto ns = parse_ns(fields[0]);
        if (!ns) throw Error("malformed timestamp" + where);
        int x = 0;
        int y = 0;
        int p = 0;
        if (!detail::parse_int(fields[1], x) || x < 0) throw Error("malformed x coordinate" + where);
        if (!detail::parse_int(fields[2], y) || y < 0) throw Error("malformed y coordinate" + where);
        if (!detail::parse_int(fields[3], p) || (p != 0 && p != 1)) throw Error("polarity not in {0,1}" + where);
        if (*ns < prev_ns) throw Error("unsorted timestamps" + where);
        prev_ns = *ns;
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
        stream.events.push_back({from_ns(*ns), x, y, p == 1 ? Polarity::Positive : Polarity::Negative});
    });
    stream.geometry = geometry ? *geometry : Geometry{max_x + 1, max_y + 1};
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (!stream.geometry.contains(stream.events[i].x, stream.events[i].y)) {
            throw Error("event outside the sensor geometry at line " + std::to_string(i + 1));
        }
    }
    return stream;
}

inline void write_events_text(const fs::path& path, const EventStream& stream) {
    write_file_atomic(path, encode_events_text(stream));
}

[[nodiscard]] inline EventStream read_events_text(const fs::path& path, std::optional<Geometry> geometry = {}) {
    return decode_events_text(read_file(path), geometry);
}

// ---------------------------------------------------------------------------
// Events, binary: 16-byte header `EVK1` w:u16 h:u16 + 8 zero bytes, then 16-byte
// records t_ns:i64 x:u16 y:u16 p:i8 + 3 zero bytes, all little-endian.

inline constexpr std::size_t kEventHeaderBytes = 16;
inline constexpr std::size_t kEventRecordBytes = 16;

[[nodiscard]] inline std::string encode_events_binary(const EventStream& stream) {
    require_valid(stream);
    require(stream.geometry.width >= 0 && stream.geometry.width <= 65535 && stream.geometry.height >= 0 &&
                stream.geometry.height <= 65535,
            "geometry does not fit the binary event header");
    std::string out;
    out.reserve(kEventHeaderBytes + kEventRecordBytes * stream.size());
    out += "EVK1";
    detail::put_u16(out, static_cast<std::uint16_t>(stream.geometry.width));
    detail::put_u16(out, static_cast<std::uint16_t>(stream.geometry.height));
    out.append(8, '\0');
    for (const auto& e : stream.events) {
        detail::put_i64(out, to_ns(e.t));
        detail::put_u16(out, static_cast<std::uint16_t>(e.x));
        detail::put_u16(out, static_cast<std::uint16_t>(e.y));
        out.push_back(static_cast<char>(static_cast<std::int8_t>(e.polarity)));
        out.append(3, '\0');
    }
    return out;
}

[[nodiscard]] inline EventStream decode_events_binary(std::string_view bytes) {
    require(bytes.size() >= kEventHeaderBytes && bytes.substr(0, 4) == "EVK1", "bad magic: not an EVK1 event file");
    require((bytes.size() - kEventHeaderBytes) % kEventRecordBytes == 0, "truncated event record");
    EventStream stream;
    stream.geometry = {static_cast<int>(detail::get_le(bytes, 4, 2)), static_cast<int>(detail::get_le(bytes, 6, 2))};
    const std::size_t n = (bytes.size() - kEventHeaderBytes) / kEventRecordBytes;
    stream.events.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = kEventHeaderBytes + i * kEventRecordBytes;
        const auto ns = static_cast<std::int64_t>(detail::get_le(bytes, at, 8));
        const auto p = static_cast<std::int8_t>(bytes[at + 12]);
        require(p == 1 || p == -1, "polarity not in {-1,1} in record " + std::to_string(i));
        require(ns >= 0, "negative timestamp in record " + std::to_string(i));
        stream.events.push_back({from_ns(ns), static_cast<int>(detail::get_le(bytes, at + 8, 2)),
                                 static_cast<int>(detail::get_le(bytes, at + 10, 2)), static_cast<Polarity>(p)});
    }
    require_valid(stream);
    return stream;
}

inline void write_events_binary(const fs::path& path, const EventStream& stream) {
    write_file_atomic(path, encode_events_binary(stream));
}

[[nodiscard]] inline EventStream read_events_binary(const fs::path& path) {
    return decode_events_binary(read_file(path));
}

/// Binary when the file starts with the EVK1 magic, text otherwise.
[[nodiscard]] inline EventStream read_events(const fs::path& path, std::optional<Geometry> geometry = {}) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == "EVK1") {
        auto stream = decode_events_binary(bytes);
        if (geometry) {
            require(*geometry == stream.geometry, "requested geometry differs from the event file header");
        }
        return stream;
    }
    return decode_events_text(bytes, geometry);
}

/// Text for `.txt` paths, binary otherwise.
inline void write_events(const fs::path& path, const EventStream& stream) {
    if (path.extension() == ".txt") {
        write_events_text(path, stream);
    } else {
        write_events_binary(path, stream);
    }
}

// ---------------------------------------------------------------------------
// Frames: binary 8-bit graymaps `frame_%06d.pgm` plus `timestamps.txt`.

[[nodiscard]] inline std::string indexed_name(std::string_view stem, std::size_t index, std::string_view ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*s_%06zu%.*s", static_cast<int>(stem.size()), stem.data(), index,
                  static_cast<int>(ext.size()), ext.data());
    return buf;
}

[[nodiscard]] inline std::string encode_pgm(const Image& img) {
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    out.reserve(out.size() + img.size());
    for (double v : img.data()) {
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    }
    return out;
}

[[nodiscard]] inline Image decode_pgm(std::string_view bytes) {
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(start, pos - start);
    };
    require(next_token() == "P5", "not a binary graymap (P5)");
    int w = 0;
    int h = 0;
    int maxval = 0;
    require(detail::parse_int(next_token(), w) && detail::parse_int(next_token(), h) &&
                detail::parse_int(next_token(), maxval),
            "malformed graymap header");
    require(w > 0 && h > 0 && maxval == 255, "graymap must be 8-bit with positive size");
    ++pos; // single whitespace before the raster
    require(bytes.size() >= pos + static_cast<std::size_t>(w) * h, "truncated graymap raster");
    Image img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
    return img;
}

inline void write_pgm(const fs::path& path, const Image& img) { write_file_atomic(path, encode_pgm(img)); }
[[nodiscard]] inline Image read_pgm(const fs::path& path) { return decode_pgm(read_file(path)); }

inline void write_timestamps(const fs::path& path, std::span<const double> times) {
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) require(times[i] > times[i - 1], "timestamps must be strictly increasing");
        out += std::to_string(i) + " " + format_seconds(times[i]) + "\n";
    }
    write_file_atomic(path, out);
}

[[nodiscard]] inline std::vector<double> read_timestamps(const fs::path& path) {
    std::vector<double> times;
    std::int64_t prev = -1;
    detail::for_each_line(read_file(path), [&](std::string_view line, std::size_t line_no) {
        const auto f = detail::split_ws(line);
        if (f.empty()) return;
        std::size_t index = 0;
        const std::string where = " in " + path.filename().string() + " at line " + std::to_string(line_no);
        require(f.size() == 2 && detail::parse_int(f[0], index), "malformed timestamp entry" + where);
        require(index == times.size(), "timestamp indices must count up from 0" + where);
        const auto ns = parse_ns(f[1]);
        require(ns.has_value(), "malformed timestamp" + where);
        require(*ns > prev, "timestamps must be strictly increasing" + where);
        prev = *ns;
        times.push_back(from_ns(*ns));
    });
    return times;
}

inline void write_frames(const fs::path& dir, std::span<const Frame> frames) {
    fs::create_directories(dir);
    std::vector<double> times;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0) {
            require(frames[i].image.geometry() == frames[0].image.geometry(), "frame dimensions differ");
        }
        write_pgm(dir / indexed_name("frame", i, ".pgm"), frames[i].image);
        times.push_back(frames[i].t);
    }
    write_timestamps(dir / "timestamps.txt", times);
}

[[nodiscard]] inline std::vector<Frame> read_frames(const fs::path& dir) {
    const auto times = read_timestamps(dir / "timestamps.txt");
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto path = dir / indexed_name("frame", i, ".pgm");
        require(fs::exists(path), "missing image " + path.filename().string() + " for timestamp " + std::to_string(i));
        frames.push_back({times[i], read_pgm(path)});
        require(frames.back().image.geometry() == frames.front().image.geometry(),
                "dimension mismatch in " + path.filename().string());
    }
    const auto extra = dir / indexed_name("frame", times.size(), ".pgm");
    require(!fs::exists(extra), "missing timestamp for image " + extra.filename().string());
    return frames;
}

// ---------------------------------------------------------------------------
// Tensors: 24-byte header (4-byte magic, three u32 dims, 8 reserved zero bytes)
// followed by little-endian float32 data.

namespace detail {

inline std::string tensor_header(std::string_view magic, std::uint32_t d0, std::uint32_t d1, std::uint32_t d2) {
    std::string out(magic);
    put_u32(out, d0);
    put_u32(out, d1);
    put_u32(out, d2);
    out.append(8, '\0');
    return out;
}

inline std::array<std::uint32_t, 3> parse_tensor_header(std::string_view bytes, std::string_view magic) {
    require(bytes.size() >= 24 && bytes.substr(0, 4) == magic, "bad magic: expected " + std::string(magic));
    std::array<std::uint32_t, 3> dims{};
    for (int i = 0; i < 3; ++i) dims[i] = static_cast<std::uint32_t>(get_le(bytes, 4 + 4 * i, 4));
    const std::uint64_t count = static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
    require(bytes.size() == 24 + 4 * count, "tensor size does not match its header dims");
    return dims;
}

} // namespace detail

[[nodiscard]] inline std::string encode_flow(const FlowField& flow) {
    const Geometry g = flow.geometry();
    std::string out = detail::tensor_header("EVKF", 2, static_cast<std::uint32_t>(g.height),
                                            static_cast<std::uint32_t>(g.width));
    out.reserve(24 + 8 * g.pixels());
    for (float v : flow.u.data()) detail::put_f32(out, v);
    for (float v : flow.v.data()) detail::put_f32(out, v);
    return out;
}

[[nodiscard]] inline FlowField decode_flow(std::string_view bytes) {
    const auto dims = detail::parse_tensor_header(bytes, "EVKF");
    require(dims[0] == 2, "flow tensor must have two planes");
    FlowField flow(Geometry{static_cast<int>(dims[2]), static_cast<int>(dims[1])});
    const std::size_t n = flow.u.size();
    for (std::size_t i = 0; i < n; ++i) flow.u[i] = detail::get_f32(bytes, 24 + 4 * i);
    for (std::size_t i = 0; i < n; ++i) flow.v[i] = detail::get_f32(bytes, 24 + 4 * (n + i));
    return flow;
}

inline void write_flow(const fs::path& path, const FlowField& flow) { write_file_atomic(path, encode_flow(flow)); }
[[nodiscard]] inline FlowField read_flow(const fs::path& path) { return decode_flow(read_file(path)); }

[[nodiscard]] inline std::string encode_voxel(const VoxelGrid& grid) {
    std::string out = detail::tensor_header("EVKV", static_cast<std::uint32_t>(grid.bins),
                                            static_cast<std::uint32_t>(grid.geometry.height),
                                            static_cast<std::uint32_t>(grid.geometry.width));
    out.reserve(24 + 4 * grid.values.size());
    for (float v : grid.values) detail::put_f32(out, v);
    return out;
}

/// The tensor file does not carry the time window; callers supply it (see voxel directories).
[[nodiscard]] inline VoxelGrid decode_voxel(std::string_view bytes, TimeWindow window = {0.0, 1.0}) {
    const auto dims = detail::parse_tensor_header(bytes, "EVKV");
    require(dims[0] >= 1, "voxel tensor needs at least one bin");
    VoxelGrid grid(static_cast<int>(dims[0]), Geometry{static_cast<int>(dims[2]), static_cast<int>(dims[1])}, window);
    for (std::size_t i = 0; i < grid.values.size(); ++i) grid.values[i] = detail::get_f32(bytes, 24 + 4 * i);
    return grid;
}

inline void write_voxel(const fs::path& path, const VoxelGrid& grid) { write_file_atomic(path, encode_voxel(grid)); }
[[nodiscard]] inline VoxelGrid read_voxel(const fs::path& path, TimeWindow window = {0.0, 1.0}) {
    return decode_voxel(read_file(path), window);
}

struct TimedFlow {
    double t;
    FlowField flow;
};

/// `flow_%06d.evkf` plus `timestamps.txt`.
inline void write_flow_dir(const fs::path& dir, std::span<const TimedFlow> flows) {
    fs::create_directories(dir);
    std::vector<double> times;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        write_flow(dir / indexed_name("flow", i, ".evkf"), flows[i].flow);
        times.push_back(flows[i].t);
    }
    write_timestamps(dir / "timestamps.txt", times);
}

[[nodiscard]] inline std::vector<TimedFlow> read_flow_dir(const fs::path& dir) {
    const auto times = read_timestamps(dir / "timestamps.txt");
    std::vector<TimedFlow> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto path = dir / indexed_name("flow", i, ".evkf");
        require(fs::exists(path), "missing flow file " + path.filename().string());
        out.push_back({times[i], read_flow(path)});
        require(out.back().flow.geometry() == out.front().flow.geometry(),
                "dimension mismatch in " + path.filename().string());
    }
    return out;
}

/// `voxel_%06d.evkv` plus `windows.txt` lines `index t0 tN`.
inline void write_voxel_dir(const fs::path& dir, std::span<const VoxelGrid> grids) {
    fs::create_directories(dir);
    std::string windows;
    for (std::size_t i = 0; i < grids.size(); ++i) {
        write_voxel(dir / indexed_name("voxel", i, ".evkv"), grids[i]);
        windows += std::to_string(i) + " " + format_seconds(grids[i].window.t0()) + " " +
                   format_seconds(grids[i].window.tN()) + "\n";
    }
    write_file_atomic(dir / "windows.txt", windows);
}

[[nodiscard]] inline std::vector<VoxelGrid> read_voxel_dir(const fs::path& dir) {
    std::vector<VoxelGrid> grids;
    detail::for_each_line(read_file(dir / "windows.txt"), [&](std::string_view line, std::size_t line_no) {
        const auto f = detail::split_ws(line);
        if (f.empty()) return;
        const std::string where = " in windows.txt at line " + std::to_string(line_no);
        std::size_t index = 0;
        require(f.size() == 3 && detail::parse_int(f[0], index) && index == grids.size(),
                "malformed window entry" + where);
        const auto t0 = parse_ns(f[1]);
        const auto tN = parse_ns(f[2]);
        require(t0 && tN && *t0 < *tN, "malformed window bounds" + where);
        grids.push_back(read_voxel(dir / indexed_name("voxel", index, ".evkv"), {from_ns(*t0), from_ns(*tN)}));
    });
    return grids;
}

// ---------------------------------------------------------------------------
// Dataset manifest

struct SequenceEntry {
    std::string id;
    std::string archetype;
    double cn = 0.0;
    double cp = 0.0;
    double duration = 0.0;
    std::string events; // paths relative to the manifest directory
    std::string frames;
    std::string flow;
    std::optional<TimeWindow> cut;
    std::size_t event_count = 0;
    double eppps = 0.0;
    std::size_t object_count = 0;
};

struct DatasetManifest {
    int format_version = 1;
    std::uint64_t seed = 0;
    Geometry geometry;
    std::vector<ArchetypeConfig> archetypes;
    std::vector<SequenceEntry> sequences;
};

[[nodiscard]] inline nlohmann::json to_json(const ArchetypeConfig& a) {
    return {{"archetype", to_string(a.archetype)},
            {"object_count", {a.object_count.lo, a.object_count.hi}},
            {"speed_px_per_s", {a.speed.lo, a.speed.hi}},
            {"rotation_rate_rad_per_s", {a.rotation_rate.lo, a.rotation_rate.hi}},
            {"scale_rate_per_s", {a.scale_rate.lo, a.scale_rate.hi}}};
}

[[nodiscard]] inline ArchetypeConfig archetype_from_json(const nlohmann::json& j) {
    ArchetypeConfig a = ArchetypeConfig::preset(parse_archetype(j.at("archetype").get<std::string>()));
    if (j.contains("object_count")) a.object_count = {j["object_count"][0].get<int>(), j["object_count"][1].get<int>()};
    if (j.contains("speed_px_per_s")) a.speed = {j["speed_px_per_s"][0], j["speed_px_per_s"][1]};
    if (j.contains("rotation_rate_rad_per_s")) {
        a.rotation_rate = {j["rotation_rate_rad_per_s"][0], j["rotation_rate_rad_per_s"][1]};
    }
    if (j.contains("scale_rate_per_s")) a.scale_rate = {j["scale_rate_per_s"][0], j["scale_rate_per_s"][1]};
    a.validate();
    return a;
}

[[nodiscard]] inline nlohmann::json to_json(const DatasetManifest& m) {
    nlohmann::json seqs = nlohmann::json::array();
    for (const auto& s : m.sequences) {
        nlohmann::json e = {{"id", s.id},
                            {"archetype", s.archetype},
                            {"cn", s.cn},
                            {"cp", s.cp},
                            {"duration_s", s.duration},
                            {"events", s.events},
                            {"frames", s.frames},
                            {"flow", s.flow},
                            {"event_count", s.event_count},
                            {"eppps", s.eppps},
                            {"object_count", s.object_count}};
        e["cut"] = s.cut ? nlohmann::json{{"start", s.cut->t0()}, {"end", s.cut->tN()}} : nlohmann::json(nullptr);
        seqs.push_back(std::move(e));
    }
    nlohmann::json archetypes = nlohmann::json::array();
    for (const auto& a : m.archetypes) archetypes.push_back(to_json(a));
    return {{"format_version", m.format_version},
            {"seed", m.seed},
            {"geometry", {{"width", m.geometry.width}, {"height", m.geometry.height}}},
            {"archetypes", archetypes},
            {"sequences", seqs}};
}

[[nodiscard]] inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    require(m.format_version == 1, "unsupported manifest format_version " + std::to_string(m.format_version));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.geometry = {j.at("geometry").at("width").get<int>(), j.at("geometry").at("height").get<int>()};
    for (const auto& a : j.value("archetypes", nlohmann::json::array())) m.archetypes.push_back(archetype_from_json(a));
    for (const auto& e : j.at("sequences")) {
        SequenceEntry s;
        s.id = e.at("id").get<std::string>();
        s.archetype = e.value("archetype", "");
        s.cn = e.value("cn", 0.0);
        s.cp = e.value("cp", 0.0);
        s.duration = e.at("duration_s").get<double>();
        s.events = e.at("events").get<std::string>();
        s.frames = e.value("frames", "");
        s.flow = e.value("flow", "");
        s.event_count = e.value("event_count", std::size_t{0});
        s.eppps = e.value("eppps", 0.0);
        s.object_count = e.value("object_count", std::size_t{0});
        if (e.contains("cut") && !e["cut"].is_null()) {
            s.cut = TimeWindow(e["cut"].at("start").get<double>(), e["cut"].at("end").get<double>());
        }
        for (const auto& other : m.sequences) require(other.id != s.id, "duplicate sequence id '" + s.id + "'");
        m.sequences.push_back(std::move(s));
    }
    return m;
}

inline void write_manifest(const fs::path& path, const DatasetManifest& m) {
    write_file_atomic(path, to_json(m).dump(2) + "\n");
}

[[nodiscard]] inline DatasetManifest read_manifest(const fs::path& path) {
    try {
        return manifest_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid manifest " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Metric records: CSV `sequence,slice_index,metric,value`.

struct MetricRecord {
    std::string sequence;
    std::size_t slice_index;
    std::string metric;
    double value;
};

[[nodiscard]] inline std::string encode_metric_csv(std::span<const MetricRecord> records) {
    std::string out = "sequence,slice_index,metric,value\n";
    for (const auto& r : records) {
        out += r.sequence + "," + std::to_string(r.slice_index) + "," + r.metric + "," + format_number(r.value, 9) +
               "\n";
    }
    return out;
}

} // namespace evk::io
