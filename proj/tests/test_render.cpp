#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "evk/render.hpp"
#include "evk/textures.hpp"
#include "oracles.hpp"

using namespace evk;

namespace {

Scene black_scene(Geometry g, double duration = 2.0) {
    return {g, Image(g, 0.0), {}, duration};
}

SceneObject white_block(int w, int h, Pose start, Pose end, double duration) {
    return {Texture::opaque(Image(w, h, 1.0)), Trajectory{start, end, duration}};
}

} // namespace

TEST(RenderFrame, NoObjectsGivesBackground) {
    const Geometry g{12, 9};
    Scene scene{g, value_noise(12, 9, CounterRng(1)), {}, 1.0};
    EXPECT_EQ(render_frame(scene, 0.0), scene.background);
    EXPECT_EQ(render_frame(scene, 0.7), scene.background);
}

TEST(RenderFrame, LargerBackgroundIsCroppedTopLeft) {
    const Image bg = value_noise(20, 20, CounterRng(2));
    const Scene scene{{8, 6}, bg, {}, 1.0};
    const auto img = render_frame(scene, 0.5);
    ASSERT_EQ(img.geometry(), (Geometry{8, 6}));
    EXPECT_EQ(img(7, 5), bg(7, 5));
}

TEST(RenderFrame, ConstantTrajectoryIsTimeInvariant) {
    const Geometry g{16, 16};
    auto scene = black_scene(g);
    const Pose p{7.3, 8.1, 0.4, 1.3};
    scene.objects.push_back({Texture::opaque(value_noise(5, 4, CounterRng(3))), Trajectory{p, p, 2.0}});
    const auto first = render_frame(scene, 0.0);
    for (double t : {0.25, 1.0, 2.0}) EXPECT_EQ(render_frame(scene, t), first);
}

TEST(RenderFrame, TranslatingBlockShiftsCoverage) {
    const Geometry g{8, 8};
    auto scene = black_scene(g);
    scene.objects.push_back(white_block(2, 2, {3.0, 4.0, 0.0, 1.0}, {5.0, 4.0, 0.0, 1.0}, 2.0));
    for (double t : {0.0, 1.0, 2.0}) {
        const auto img = render_frame(scene, t);
        const auto expected = oracle::block_coverage(g, 3.0 + t, 4.0, 2, 2);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) EXPECT_EQ(img(x, y), expected(x, y) ? 1.0 : 0.0) << x << "," << y << " t=" << t;
        }
    }
    const auto a = render_frame(scene, 0.0);
    const auto b = render_frame(scene, 1.0);
    for (int y = 0; y < 8; ++y) {
        for (int x = 1; x < 8; ++x) EXPECT_EQ(b(x, y), a(x - 1, y));
    }
}

TEST(RenderFrame, BackToFrontCompositingWithAlpha) {
    const Geometry g{6, 6};
    auto scene = black_scene(g);
    const Pose centre{2.5, 2.5, 0.0, 1.0};
    scene.objects.push_back(white_block(6, 6, centre, centre, 1.0));
    Texture half{Image(6, 6, 0.0), Image(6, 6, 0.25)};
    scene.objects.push_back({half, Trajectory{centre, centre, 1.0}});
    const auto img = render_frame(scene, 0.5);
    for (double v : img.data()) EXPECT_DOUBLE_EQ(v, 0.75);
}

TEST(RenderFrame, RejectsTimeOutsideDuration) {
    const auto scene = black_scene({4, 4}, 1.0);
    EXPECT_THROW((void)render_frame(scene, -0.1), Error);
    EXPECT_THROW((void)render_frame(scene, 1.1), Error);
}

TEST(ValidateScene, CatchesBadInputs) {
    auto scene = black_scene({4, 4});
    scene.background = Image(3, 4, 0.0);
    EXPECT_THROW(validate_scene(scene), Error);
    scene = black_scene({4, 4});
    scene.background(0, 0) = 1.5;
    EXPECT_THROW(validate_scene(scene), Error);
    scene = black_scene({4, 4});
    scene.objects.push_back(white_block(2, 2, {1, 1, 0, 0.0}, {1, 1, 0, 1}, 1.0));
    EXPECT_THROW(validate_scene(scene), Error);
}

TEST(AnalyticFlow, PureTranslationIsConstantOnObject) {
    const Geometry g{32, 24};
    auto scene = black_scene(g, 1.0);
    scene.objects.push_back(white_block(10, 8, {10.0, 10.0, 0.0, 1.0}, {22.0, 7.0, 0.0, 1.0}, 1.0));
    const auto flow = analytic_flow(scene, 0.5);
    const auto img = render_frame(scene, 0.5);
    int covered = 0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            if (img(x, y) > 0.0) {
                ++covered;
                EXPECT_FLOAT_EQ(flow.u(x, y), 12.0f);
                EXPECT_FLOAT_EQ(flow.v(x, y), -3.0f);
            } else {
                EXPECT_EQ(flow.u(x, y), 0.0f);
                EXPECT_EQ(flow.v(x, y), 0.0f);
            }
        }
    }
    EXPECT_EQ(covered, 80);
}

TEST(AnalyticFlow, RotationAboutCentreIsZeroAtCentre) {
    const Geometry g{21, 21};
    auto scene = black_scene(g, 1.0);
    scene.objects.push_back(white_block(15, 15, {10.0, 10.0, 0.0, 1.0}, {10.0, 10.0, 0.8, 1.0}, 1.0));
    const auto flow = analytic_flow(scene, 0.3);
    EXPECT_EQ(flow.u(10, 10), 0.0f);
    EXPECT_EQ(flow.v(10, 10), 0.0f);
    // Rigid rotation: flow = omega * (-dy, dx).
    EXPECT_NEAR(flow.u(13, 10), 0.0, 1e-6);
    EXPECT_NEAR(flow.v(13, 10), 0.8 * 3.0, 1e-5);
}

TEST(AnalyticFlow, MatchesFiniteDifferenceOfMappedPoint) {
    // A texel's sensor position moves with the flow reported at that position.
    const Trajectory traj{{12.0, 9.0, 0.3, 0.9}, {15.0, 11.0, -0.5, 1.4}, 2.0};
    const Geometry g{40, 30};
    auto scene = black_scene(g, 2.0);
    scene.objects.push_back({Texture::opaque(Image(30, 30, 1.0)), traj});
    const double t = 0.8;
    const double h = 1e-6;
    const int px = 14;
    const int py = 10;
    const Pose p0 = traj.at(t);
    // Texture-space point currently under (px, py).
    const double dx = px - p0.tx;
    const double dy = py - p0.ty;
    const double c = std::cos(p0.rotation);
    const double s = std::sin(p0.rotation);
    const double qx = (c * dx + s * dy) / p0.scale;
    const double qy = (-s * dx + c * dy) / p0.scale;
    auto forward = [&](double time) {
        const Pose p = traj.at(time);
        const double cc = std::cos(p.rotation);
        const double ss = std::sin(p.rotation);
        return std::pair{p.tx + p.scale * (cc * qx - ss * qy), p.ty + p.scale * (ss * qx + cc * qy)};
    };
    const auto [x1, y1] = forward(t + h);
    const auto [x0, y0] = forward(t - h);
    const auto flow = analytic_flow(scene, t);
    EXPECT_NEAR(flow.u(px, py), (x1 - x0) / (2 * h), 1e-3);
    EXPECT_NEAR(flow.v(px, py), (y1 - y0) / (2 * h), 1e-3);
}

TEST(AnalyticFlow, TopmostObjectWins) {
    const Geometry g{16, 16};
    auto scene = black_scene(g, 1.0);
    scene.objects.push_back(white_block(8, 8, {8.0, 8.0, 0.0, 1.0}, {9.0, 8.0, 0.0, 1.0}, 1.0));
    scene.objects.push_back(white_block(4, 4, {8.0, 8.0, 0.0, 1.0}, {8.0, 6.0, 0.0, 1.0}, 1.0));
    const auto flow = analytic_flow(scene, 0.0);
    EXPECT_FLOAT_EQ(flow.v(8, 8), -2.0f);
    EXPECT_FLOAT_EQ(flow.u(8, 8), 0.0f);
    EXPECT_FLOAT_EQ(flow.u(5, 5), 1.0f);
}
