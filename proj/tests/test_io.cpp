#include <gtest/gtest.h>

#include <random>

#include "evk/io.hpp"
#include "evk/textures.hpp"
#include "test_util.hpp"

using namespace evk;
using evk::testing::TempDir;

namespace {

EventStream random_stream(std::mt19937_64& gen, Geometry g, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> ns(0, 5'000'000'000);
    std::uniform_int_distribution<int> x(0, g.width - 1);
    std::uniform_int_distribution<int> y(0, g.height - 1);
    std::bernoulli_distribution pos(0.5);
    EventStream s{g, {}};
    for (std::size_t i = 0; i < n; ++i) {
        s.events.push_back({io::from_ns(ns(gen)), x(gen), y(gen), pos(gen) ? Polarity::Positive : Polarity::Negative});
    }
    std::sort(s.events.begin(), s.events.end(), event_order);
    return s;
}

} // namespace

TEST(Format, NanosecondText) {
    EXPECT_EQ(io::format_ns(0), "0.000000000");
    EXPECT_EQ(io::format_ns(1'500'000'001), "1.500000001");
    EXPECT_EQ(io::parse_ns("0.5"), 500'000'000);
    EXPECT_EQ(io::parse_ns("12"), 12'000'000'000);
    EXPECT_FALSE(io::parse_ns("0.1234567891").has_value());
    EXPECT_FALSE(io::parse_ns("-1.0").has_value());
    EXPECT_FALSE(io::parse_ns("1.2e3").has_value());
    EXPECT_THROW((void)io::format_ns(-1), Error);
}

TEST(Format, SignificantDigits) {
    EXPECT_EQ(io::format_number(1.0), "1.00000");
    EXPECT_EQ(io::format_number(0.0), "0.00000");
    EXPECT_EQ(io::format_number(3.14159265), "3.14159");
    EXPECT_EQ(io::format_number(123456789.0), "1.23457e+08");
    EXPECT_EQ(io::format_number(-0.25), "-0.250000");
    EXPECT_EQ(io::format_number(42.0), "42.0000");
}

TEST(EventsText, ParsesLineFormat) {
    const auto s = io::decode_events_text("0.000000000 10 20 1\n0.000000002 3 4 0\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.events[0], (Event{0.0, 10, 20, Polarity::Positive}));
    EXPECT_EQ(s.events[1].polarity, Polarity::Negative);
    EXPECT_EQ(s.geometry, (Geometry{11, 21}));
    EXPECT_EQ(io::decode_events_text("", Geometry{4, 4}).geometry, (Geometry{4, 4}));
}

TEST(EventsText, ReportsErrorsWithLineNumbers) {
    auto message = [](std::string_view text) {
        try {
            (void)io::decode_events_text(text);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_EQ(message("0.5 3 4 2\n"), "polarity not in {0,1} at line 1");
    EXPECT_EQ(message("0.5 3 4 1\n0.4 3 4 1\n"), "unsorted timestamps at line 2");
    EXPECT_NE(message("0.5 3 4\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("0.5 3 4 1\nabc 3 4 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("0.5 -3 4 1\n").find("x coordinate"), std::string::npos);
    EXPECT_THROW((void)io::decode_events_text("0.5 9 0 1\n", Geometry{4, 4}), Error);
}

TEST(EventsText, RoundTripIsByteExact) {
    std::mt19937_64 gen(1);
    TempDir dir;
    const auto s = random_stream(gen, {64, 48}, 2000);
    io::write_events_text(dir / "a.txt", s);
    const auto bytes = io::read_file(dir / "a.txt");
    const auto back = io::read_events_text(dir / "a.txt", s.geometry);
    EXPECT_EQ(back, s);
    io::write_events_text(dir / "b.txt", back);
    EXPECT_EQ(io::read_file(dir / "b.txt"), bytes);
}

TEST(EventsBinary, LayoutAndRoundTrip) {
    std::mt19937_64 gen(2);
    TempDir dir;
    const EventStream empty{{240, 180}, {}};
    io::write_events_binary(dir / "e.evk", empty);
    EXPECT_EQ(std::filesystem::file_size(dir / "e.evk"), 16u);
    EXPECT_EQ(io::read_events(dir / "e.evk"), empty);

    const auto s = random_stream(gen, {300, 200}, 777);
    const auto bytes = io::encode_events_binary(s);
    EXPECT_EQ(bytes.size(), 16u + 16u * 777u);
    EXPECT_EQ(bytes.substr(0, 4), "EVK1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]) | static_cast<unsigned char>(bytes[5]) << 8, 300);
    const auto back = io::decode_events_binary(bytes);
    EXPECT_EQ(back, s);
    EXPECT_EQ(io::encode_events_binary(back), bytes);
    const auto rec = bytes.substr(16, 16);
    EXPECT_EQ(rec.substr(13), std::string(3, '\0'));
    EXPECT_TRUE(rec[12] == 1 || rec[12] == -1);
}

TEST(EventsBinary, CrossFormatConversionIsExact) {
    std::mt19937_64 gen(3);
    TempDir dir;
    const auto s = random_stream(gen, {32, 32}, 500);
    io::write_events(dir / "s.evk", s);
    io::write_events(dir / "s.txt", io::read_events(dir / "s.evk"));
    io::write_events(dir / "t.evk", io::read_events(dir / "s.txt", s.geometry));
    EXPECT_EQ(io::read_file(dir / "s.evk"), io::read_file(dir / "t.evk"));
}

TEST(EventsBinary, Errors) {
    EXPECT_THROW((void)io::decode_events_binary("EVK2" + std::string(12, '\0')), Error);
    std::string truncated = io::encode_events_binary({{4, 4}, {{0.0, 1, 1, Polarity::Positive}}});
    truncated.pop_back();
    try {
        (void)io::decode_events_binary(truncated);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "truncated event record");
    }
    std::string bad_pol = io::encode_events_binary({{4, 4}, {{0.0, 1, 1, Polarity::Positive}}});
    bad_pol[16 + 12] = 3;
    EXPECT_THROW((void)io::decode_events_binary(bad_pol), Error);
    EXPECT_THROW((void)io::encode_events_binary({{4, 4}, {{0.0, 5, 1, Polarity::Positive}}}), Error);
}

TEST(Frames, RoundTripAndErrors) {
    TempDir dir;
    const Geometry g{13, 7};
    std::vector<Frame> frames;
    for (int k = 0; k < 4; ++k) {
        Image img = value_noise(g.width, g.height, CounterRng(k));
        for (auto& v : img.data()) v = std::round(v * 255.0) / 255.0;
        frames.push_back({0.01 * k, img});
    }
    frames[0].image = Image(g, 0.0);
    io::write_frames(dir / "f", frames);
    const auto back = io::read_frames(dir / "f");
    ASSERT_EQ(back.size(), 4u);
    for (const auto& v : back[0].image.data()) EXPECT_EQ(v, 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_DOUBLE_EQ(back[k].t, frames[k].t);
        for (std::size_t i = 0; i < g.pixels(); ++i) EXPECT_DOUBLE_EQ(back[k].image[i], frames[k].image[i]);
    }
    io::write_frames(dir / "g", back);
    EXPECT_EQ(evk::testing::hash_tree(dir / "f"), evk::testing::hash_tree(dir / "g"));

    io::write_pgm(dir / "f" / io::indexed_name("frame", 4, ".pgm"), Image(g));
    EXPECT_THROW((void)io::read_frames(dir / "f"), Error);
    std::filesystem::remove(dir / "f" / io::indexed_name("frame", 4, ".pgm"));
    io::write_pgm(dir / "f" / io::indexed_name("frame", 2, ".pgm"), Image(5, 5));
    EXPECT_THROW((void)io::read_frames(dir / "f"), Error);

    const std::vector<double> backwards{0.2, 0.1};
    EXPECT_THROW(io::write_timestamps(dir / "ts.txt", backwards), Error);
    io::write_file_atomic(dir / "ts.txt", "0 0.2\n1 0.1\n");
    EXPECT_THROW((void)io::read_timestamps(dir / "ts.txt"), Error);
}

TEST(Pgm, HeaderAndComments) {
    const Image img = io::decode_pgm(std::string("P5\n# comment\n2 1\n255\n") + '\xff' + '\x00');
    EXPECT_EQ(img(0, 0), 1.0);
    EXPECT_EQ(img(1, 0), 0.0);
    EXPECT_THROW((void)io::decode_pgm("P2\n2 1\n255\n"), Error);
    EXPECT_THROW((void)io::decode_pgm("P5\n2 2\n255\nab"), Error);
}

TEST(Tensors, FlowLayoutAndRoundTrip) {
    std::mt19937_64 gen(4);
    std::normal_distribution<float> n;
    FlowField f({9, 5});
    EXPECT_EQ(io::encode_flow(f).size(), 24u + 8u * 45u);
    for (auto& v : f.u.data()) v = n(gen);
    for (auto& v : f.v.data()) v = n(gen);
    const auto bytes = io::encode_flow(f);
    EXPECT_EQ(bytes.substr(0, 4), "EVKF");
    EXPECT_EQ(io::decode_flow(bytes), f);
    EXPECT_EQ(io::encode_flow(io::decode_flow(bytes)), bytes);
    EXPECT_THROW((void)io::decode_flow(bytes.substr(0, bytes.size() - 4)), Error);
    EXPECT_THROW((void)io::decode_voxel(bytes), Error);
}

TEST(Tensors, VoxelLayoutAndDirectories) {
    TempDir dir;
    std::vector<VoxelGrid> grids;
    for (int i = 0; i < 3; ++i) {
        VoxelGrid v(5, {6, 4}, {0.1 * i, 0.1 * (i + 1)});
        for (std::size_t k = 0; k < v.values.size(); ++k) v.values[k] = static_cast<float>(k) * 0.5f - i;
        grids.push_back(v);
    }
    const auto bytes = io::encode_voxel(grids[0]);
    EXPECT_EQ(bytes.size(), 24u + 4u * 120u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5); // bins
    io::write_voxel_dir(dir / "v", grids);
    const auto back = io::read_voxel_dir(dir / "v");
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back[i].values, grids[i].values);
        EXPECT_DOUBLE_EQ(back[i].window.t0(), grids[i].window.t0());
        EXPECT_DOUBLE_EQ(back[i].window.tN(), grids[i].window.tN());
    }
    io::write_voxel_dir(dir / "w", back);
    EXPECT_EQ(evk::testing::hash_tree(dir / "v"), evk::testing::hash_tree(dir / "w"));
}

TEST(Tensors, FlowDirectoryRoundTrip) {
    TempDir dir;
    std::vector<io::TimedFlow> flows;
    for (int i = 0; i < 3; ++i) {
        FlowField f({4, 3});
        f.u(1, 1) = static_cast<float>(i);
        flows.push_back({0.5 * i, f});
    }
    io::write_flow_dir(dir / "flow", flows);
    const auto back = io::read_flow_dir(dir / "flow");
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[2].flow, flows[2].flow);
    EXPECT_EQ(back[2].t, 1.0);
}

TEST(Manifest, RoundTripAndDuplicateIds) {
    TempDir dir;
    io::DatasetManifest m;
    m.seed = 99;
    m.geometry = {240, 180};
    m.archetypes = ArchetypeConfig::all_presets();
    io::SequenceEntry e;
    e.id = "seq_000000";
    e.archetype = "slow";
    e.cn = 0.3;
    e.cp = 0.31;
    e.duration = 10.0;
    e.events = "seq_000000/events.evk";
    e.cut = TimeWindow(1.0, 2.5);
    m.sequences.push_back(e);
    io::write_manifest(dir / "m.json", m);
    const auto back = io::read_manifest(dir / "m.json");
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.archetypes, m.archetypes);
    ASSERT_TRUE(back.sequences[0].cut.has_value());
    EXPECT_EQ(*back.sequences[0].cut, TimeWindow(1.0, 2.5));
    io::write_manifest(dir / "n.json", back);
    EXPECT_EQ(io::read_file(dir / "m.json"), io::read_file(dir / "n.json"));

    m.sequences.push_back(e);
    io::write_manifest(dir / "dup.json", m);
    EXPECT_THROW((void)io::read_manifest(dir / "dup.json"), Error);
    io::write_file_atomic(dir / "bad.json", "{\"format_version\": 1");
    EXPECT_THROW((void)io::read_manifest(dir / "bad.json"), Error);
}

TEST(MetricCsv, Layout) {
    const std::vector<io::MetricRecord> r{{"seq_a", 0, "fwl", 1.25}, {"seq_a", 1, "fwl", 1.0}};
    EXPECT_EQ(io::encode_metric_csv(r), "sequence,slice_index,metric,value\nseq_a,0,fwl,1.25000000\nseq_a,1,fwl,1.00000000\n");
}

TEST(Files, AtomicWriteLeavesNoTemporaries) {
    TempDir dir;
    io::write_file_atomic(dir / "sub" / "x.bin", "abc");
    io::write_file_atomic(dir / "sub" / "x.bin", "defg");
    EXPECT_EQ(io::read_file(dir / "sub" / "x.bin"), "defg");
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir / "sub")) ++n;
    EXPECT_EQ(n, 1u);
    EXPECT_THROW((void)io::read_file(dir / "missing"), Error);
}
