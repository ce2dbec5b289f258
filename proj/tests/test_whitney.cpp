#include <catch2/catch_amalgamated.hpp>

#include "parcor/scene.hpp"
#include "parcor/whitney.hpp"

using namespace parcor;

namespace {
Surface plane2(double res = 1.0 / 16) {
    return surface_zoo("hyperplane", 2, ParabolicCylinder{SpaceTimePoint{Vec{0, 0}, 0}, 1.0}, res);
}
}  // namespace

TEST_CASE("whitney boxes obey the 4/40 sandwich and cover the window", "[whitney]") {
    Surface s = plane2();
    ParabolicCylinder window{SpaceTimePoint{Vec{2, 0}, 0}, 1.5};
    auto W = WhitneyDecomposition::build(s, window, 0.01);
    REQUIRE(!W.boxes().empty());
    for (const auto& w : W.boxes()) {
        double diam = w.diam();
        CHECK(4 * diam <= w.dist_4I * (1 + 1e-9));
        CHECK(w.dist_4I <= w.dist_sigma * (1 + 1e-9));
        CHECK(w.dist_sigma <= 40 * diam);
    }
    // covering: off-shell lattice points of the window are inside some box
    int covered = 0, total = 0;
    for (double x0 = 0.55; x0 < 2.8; x0 += 0.23)
        for (double x1 = -0.8; x1 < 0.8; x1 += 0.31)
            for (double t = -1.5; t < 1.5; t += 0.7) {
                SpaceTimePoint p{Vec{x0, x1}, t};
                if (gauge_dist(p, window.center) >= window.radius * 0.95) continue;
                ++total;
                if (W.find(p)) ++covered;
            }
    REQUIRE(total > 50);
    CHECK(covered == total);
}

TEST_CASE("whitney boxes have disjoint interiors", "[whitney]") {
    Surface s = plane2();
    ParabolicCylinder window{SpaceTimePoint{Vec{1.2, 0}, 0}, 0.8};
    auto W = WhitneyDecomposition::build(s, window, 0.05);
    const auto& B = W.boxes();
    for (std::size_t i = 0; i < B.size(); ++i)
        for (std::size_t j = i + 1; j < B.size(); ++j) {
            const ParBox &a = B[i].box, &b = B[j].box;
            double overlap = std::min(a.thi, b.thi) - std::max(a.tlo, b.tlo);
            for (int d = 0; d < a.n; ++d)
                overlap = std::min(overlap, std::min(a.hi[d], b.hi[d]) - std::max(a.lo[d], b.lo[d]));
            CHECK(overlap <= 1e-12);
        }
}

TEST_CASE("box containing a far point has the right diameter band", "[whitney]") {
    // dist ~ 100 forces diam in [2.5, 25]
    Surface s = plane2();
    SpaceTimePoint far{Vec{100, 0}, 0};
    ParabolicCylinder window{far, 5.0};
    auto W = WhitneyDecomposition::build(s, window, 0.01);
    const WhitneyBox* w = W.find(far);
    REQUIRE(w != nullptr);
    CHECK(w->diam() >= 2.5);
    CHECK(w->diam() <= 25.0);
}

TEST_CASE("window inside the sampling shell is an error", "[whitney]") {
    Surface cloud = surface_zoo("cantor-parabolic", 1,
                                ParabolicCylinder{SpaceTimePoint{Vec{0.5}, 0.5}, 0.75}, 0, {.depth = 4});
    SpaceTimePoint on = cloud.samples().point(0);
    CHECK_THROWS_AS(WhitneyDecomposition::build(cloud, ParabolicCylinder{on, 1e-9}),
                    std::runtime_error);
}

TEST_CASE("whitney region: single component above a hyperplane cube", "[whitney]") {
    Surface s = plane2(1.0 / 32);
    CubeTree T = CubeTree::build(s, 3);
    int32_t id = -1;
    for (int32_t c : T.generation(2))
        if (std::abs(T.cube(c).center.x[1]) < 0.3 && std::abs(T.cube(c).center.t) < 0.3) {
            id = c;
            break;
        }
    REQUIRE(id >= 0);
    WhitneyRegion U = whitney_region(T, id, 4.0, 1.0 / 16);
    CHECK(!U.boxes.empty());
    CHECK(U.components == 1);  // half-space: one side only
    double lq = T.cube(id).ell;
    for (const auto& w : U.boxes) {
        CHECK(w.side >= lq / 4 * (1 - 1e-12));
        CHECK(w.side <= lq * 4 * (1 + 1e-12));
        CHECK(cube_box_distance(T, id, w.box) <= 4 * lq * (1 + 1e-12));
    }
    // eq (3.10)-type bound: dist(U_Q, Q) <~ c'_n K0 l(Q), c'_n = 3 + 2 sqrt(n)
    CHECK(U.max_dist_to_cube <= 3 + 2 * std::sqrt(2.0) + 1);
    // tau = 0 reproduces the unfattened union
    WhitneyRegion U0 = whitney_region(T, id, 4.0, 0.0);
    for (const auto& w : U0.boxes) {
        SpaceTimePoint c = w.box.center();
        CHECK(U0.contains(c));
    }
}

TEST_CASE("whitney region fails loudly when K0 is too small", "[whitney]") {
    Surface s = plane2(1.0 / 32);
    CubeTree T = CubeTree::build(s, 3);
    CHECK_THROWS_AS(whitney_region(T, T.generation(3)[0], 1.0, 1.0 / 16), std::runtime_error);
}

TEST_CASE("chain region: single-step closure, emptiness, slab reach, monotonicity", "[whitney]") {
    Surface s = plane2(1.0 / 32);
    CubeTree T = CubeTree::build(s, 3);
    int32_t id = -1;
    for (int32_t c : T.generation(2))
        if (std::abs(T.cube(c).center.x[1]) < 0.3 && std::abs(T.cube(c).center.t) < 0.3) {
            id = c;
            break;
        }
    REQUIRE(id >= 0);
    WhitneyRegion U = whitney_region(T, id, 4.0, 1.0 / 16);
    double lq = T.cube(id).ell;

    CHECK_THROWS_AS(chain_region(T, U, 1.5), std::invalid_argument);

    // eps^-1 = 1: only depth-1 cylinders (single-step closure)
    ChainRegion C1 = chain_region(T, U, 0.95, 4096);
    for (const auto& c : C1.cylinders) CHECK(c.depth == 1);

    // every emitted cylinder misses Sigma (radius delta/2 < delta)
    ChainRegion C = chain_region(T, U, 0.2, 4096);
    REQUIRE(!C.cylinders.empty());
    for (const auto& c : C.cylinders) {
        CHECK(c.delta >= 0.2 * 0.2 * 0.2 * lq * (1 - 1e-12));
        CHECK(c.delta <= lq / (0.2 * 0.2 * 0.2) * (1 + 1e-12));
        CHECK_FALSE(s.index().any_within_gauge(c.center, c.delta / 2 * (1 - 1e-9)));
    }

    // slab above the cube center is reached (heights l/4 .. 4l)
    SpaceTimePoint above = T.cube(id).center;
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        SpaceTimePoint p = above;
        p.x[0] = f * lq;
        CHECK(C.contains(p));
    }

    // monotone in eps^-1: cylinders of the eps=0.25 region persist at eps=0.2
    ChainRegion Csmall = chain_region(T, U, 0.25, 4096);
    std::size_t found = 0;
    for (const auto& c : Csmall.cylinders)
        for (const auto& d : C.cylinders)
            if (c.center == d.center && c.delta == d.delta) {
                ++found;
                break;
            }
    CHECK(found == Csmall.cylinders.size());
}
