#include <catch2/catch_amalgamated.hpp>

#include "parcor/rng.hpp"
#include "parcor/scene.hpp"
#include "parcor/surface.hpp"

using namespace parcor;

namespace {
ParabolicCylinder unit_window(int n) {
    return ParabolicCylinder{SpaceTimePoint{Vec(n), 0}, 1.0};
}
}  // namespace

TEST_CASE("delta on the half-space boundary", "[surface]") {
    Surface s = surface_zoo("hyperplane", 2, unit_window(2), 0.02);
    CHECK(s.delta({Vec{1, 0}, 0}).value == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(s.delta({Vec{0.5, 0}, 0}).value == Catch::Approx(0.5).epsilon(1e-6));
    auto on = s.delta({Vec{0, 0.3}, 0.1});
    CHECK(on.on_boundary);
    CHECK(on.value <= s.boundary_tolerance());
}

TEST_CASE("delta on a plane point cloud matches the exhaustive oracle", "[surface]") {
    // cloud on {x0=0} with spacing h: delta((1,0),0) = 1 +- h
    const double h = 0.05;
    PointSet ps;
    ps.n = 2;
    for (double u = -1; u <= 1; u += h)
        for (double t = -1; t <= 1; t += h * h) {
            SpaceTimePoint p{Vec{0, u}, t};
            ps.push(p, h * h * h);
        }
    Surface s = Surface::point_cloud(std::move(ps), unit_window(2), h);
    SpaceTimePoint q{Vec{1, 0}, 0};
    double exhaustive = std::numeric_limits<double>::infinity();
    const auto& pts = s.samples();
    for (std::size_t i = 0; i < pts.size(); ++i)
        exhaustive = std::min(exhaustive, pts.gauge_to(i, q));
    auto d = s.delta(q);
    CHECK(d.value == Catch::Approx(exhaustive));
    CHECK(d.value == Catch::Approx(1.0).margin(h));
}

TEST_CASE("delta vs parabolic distance sandwich", "[surface]") {
    Surface s = surface_zoo("smooth-graph", 2, unit_window(2), 0.02, {.b = 0.2, .freq = 2.0});
    Rng rng(5, 0);
    for (int rep = 0; rep < 50; ++rep) {
        SpaceTimePoint p{Vec{0, 0}, 0};
        p.x[0] = 0.3 + rng.next_double();
        p.x[1] = (rng.next_double() - 0.5);
        p.t = (rng.next_double() - 0.5);
        double delta = s.delta(p).value;
        double dist = s.par_distance(p);
        CHECK(delta <= dist * (1 + 1e-9));
        CHECK(dist <= 2 * delta * (1 + 1e-9));
    }
}

TEST_CASE("touch point sits on the lateral boundary for TSADR graphs", "[surface]") {
    Surface s = surface_zoo("hyperplane", 2, unit_window(2), 0.02);
    Rng rng(11, 0);
    for (int rep = 0; rep < 25; ++rep) {
        SpaceTimePoint p{Vec{0.2 + rng.next_double(), rng.next_double() - 0.5},
                         0.5 * (rng.next_double() - 0.5)};
        auto d = s.delta(p);
        // |X - Y| = delta (the touching point is not on a time face)
        CHECK((p.x - d.touch.x).norm() == Catch::Approx(d.value).epsilon(1e-6));
    }
}

TEST_CASE("bucket index nearest matches brute force on a random cloud", "[surface]") {
    Rng rng(99, 0);
    PointSet ps;
    ps.n = 2;
    for (int i = 0; i < 4000; ++i) {
        SpaceTimePoint p{Vec{rng.next_double() * 2 - 1, rng.next_double() * 2 - 1},
                         rng.next_double() * 2 - 1};
        ps.push(p, 1.0 / 4000);
    }
    Surface s = Surface::point_cloud(std::move(ps), unit_window(2), 0.03);
    const auto& pts = s.samples();
    for (int rep = 0; rep < 60; ++rep) {
        SpaceTimePoint q{Vec{3 * (rng.next_double() - 0.5), 3 * (rng.next_double() - 0.5)},
                         3 * (rng.next_double() - 0.5)};
        double bg = std::numeric_limits<double>::infinity(), bp = bg;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bg = std::min(bg, pts.gauge_to(i, q));
            bp = std::min(bp, pts.par_to(i, q));
        }
        CHECK(s.index().nearest_gauge(q).second == Catch::Approx(bg));
        CHECK(s.index().nearest_par(q).second == Catch::Approx(bp));
    }
}

TEST_CASE("visit_ball finds exactly the samples in the cylinder", "[surface]") {
    Rng rng(17, 0);
    PointSet ps;
    ps.n = 1;
    for (int i = 0; i < 3000; ++i) {
        SpaceTimePoint p{Vec{2 * rng.next_double() - 1}, 2 * rng.next_double() - 1};
        ps.push(p, 1.0);
    }
    Surface s = Surface::point_cloud(std::move(ps), unit_window(1), 0.02);
    const auto& pts = s.samples();
    for (int rep = 0; rep < 40; ++rep) {
        SpaceTimePoint q{Vec{2 * rng.next_double() - 1}, 2 * rng.next_double() - 1};
        double r = 0.05 + 0.4 * rng.next_double();
        std::size_t expect = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts.gauge_to(i, q) < r) ++expect;
        std::size_t got = 0;
        s.index().visit_ball(q, r, [&](uint32_t) { ++got; });
        CHECK(got == expect);
    }
}

TEST_CASE("box-to-surface distance agrees with point scans", "[surface]") {
    Surface s = surface_zoo("hyperplane", 2, unit_window(2), 0.02);
    ParBox box;
    box.n = 2;
    box.lo[0] = 0.5;
    box.hi[0] = 0.7;
    box.lo[1] = -0.1;
    box.hi[1] = 0.1;
    box.tlo = -0.04;
    box.thi = 0.0;
    // closest graph point is directly below the box floor
    CHECK(s.par_distance_box(box) == Catch::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("analytic sample weights discretize the patch measure", "[surface]") {
    Surface s = surface_zoo("hyperplane", 2, unit_window(2), 0.05);
    // patch shadow = [-1,1] x [-1,1], Lebesgue mass 4
    CHECK(s.total_mass() == Catch::Approx(4.0).epsilon(1e-12));
    // equal weights
    const auto& w = s.samples().weight;
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] == w[0]);
}
