#include <catch2/catch_amalgamated.hpp>

#include "parcor/scene.hpp"

using namespace parcor;

TEST_CASE("unknown zoo name lists the zoo", "[scene]") {
    ParabolicCylinder w{SpaceTimePoint{Vec{0, 0}, 0}, 1.0};
    try {
        surface_zoo("moebius", 2, w, 0.1);
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("hyperplane") != std::string::npos);
        CHECK(msg.find("cantor-parabolic") != std::string::npos);
    }
}

TEST_CASE("crease is Lip(1,1/2) with constant b and no t-dependence", "[scene]") {
    ParabolicCylinder w{SpaceTimePoint{Vec{0, 0}, 0}, 1.0};
    Surface s = surface_zoo("crease", 2, w, 0.05, {.b = 0.3});
    // |psi(y) - psi(z)| = 0.3 * ||y| - |z||
    Vec y{0.4}, z{-0.25};
    CHECK(std::abs(s.psi(y, 0.3) - s.psi(z, -0.2)) ==
          Catch::Approx(0.3 * std::abs(std::abs(y[0]) - std::abs(z[0]))));
    CHECK(s.psi(y, 0.9) == s.psi(y, -0.9));
}

TEST_CASE("cantor-parabolic counts and separations", "[scene]") {
    Surface s = surface_zoo("cantor-parabolic", 1, ParabolicCylinder{SpaceTimePoint{Vec{0.5}, 0.5}, 0.75},
                            0.0, {.depth = 4});
    const auto& pts = s.samples();
    REQUIRE(pts.size() == 256);  // 4^4
    // per-scale separation halves parabolically: nearest-neighbor gauge
    // distance at depth d is 2^-d (time-quarter stagger)
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            min_gap = std::min(min_gap, pts.gauge_to(j, pts.point(i)));
    CHECK(min_gap == Catch::Approx(std::sqrt(3.0) / 2 * std::pow(0.5, 4)).epsilon(0.35));
    CHECK(min_gap >= 0.5 * std::pow(0.5, 4));
    // weights sum to the declared mass 1
    CHECK(s.total_mass() == Catch::Approx(1.0));
}

TEST_CASE("config parser handles nesting, arrays and comments", "[scene]") {
    const char* text = R"(
# a scene
scene {
  surface = smooth-graph
  n = 2
  resolution = 0.05
  window { center = [0.25, -0.5] time = 1.5 radius = 2 }
  params { b = 0.3 freq = 2 }
}
analysis { generations = 4 epsilon = 0.1 }
mc { paths = 1000 seed = 99 }
output { dir = /tmp/parcor-test }
threads = 2
)";
    SceneConfig sc = scene_config_from(parse_config(text));
    CHECK(sc.surface_name == "smooth-graph");
    CHECK(sc.n == 2);
    CHECK(sc.window.center.x[0] == 0.25);
    CHECK(sc.window.center.x[1] == -0.5);
    CHECK(sc.window.center.t == 1.5);
    CHECK(sc.window.radius == 2.0);
    CHECK(sc.zoo.b == 0.3);
    CHECK(sc.analysis.generations == 4);
    CHECK(sc.analysis.epsilon == 0.1);
    CHECK(sc.mc.paths == 1000);
    CHECK(sc.mc.seed == 99);
    CHECK(sc.threads == 2);
    CHECK(sc.out_dir == "/tmp/parcor-test");
}

TEST_CASE("seed is mandatory", "[scene]") {
    CHECK_THROWS(scene_config_from(parse_config("mc { paths = 10 }")));
}

TEST_CASE("invalid parameter ranges are rejected", "[scene]") {
    CHECK_THROWS(scene_config_from(parse_config("analysis { epsilon = 2 } mc { seed = 1 }")));
    CHECK_THROWS(scene_config_from(parse_config("scene { n = 9 } mc { seed = 1 }")));
    CHECK_THROWS(scene_config_from(parse_config("scene { resolution = -1 } mc { seed = 1 }")));
}
