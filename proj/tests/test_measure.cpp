#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "treelab/measure.hpp"

using namespace treelab;
using namespace testutil;

TEST_CASE("cantor depth 1 is the first mid-third level") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 1);
    REQUIRE(mu.size() == 2);
    CHECK(mu.point(0)[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mu.point(1)[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(mu.weight(0) == 0.5);
    CHECK(mu.weight(1) == 0.5);
    CHECK(mu.declared_dimension().value() ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("cantor product depth 2 in the plane") {
    DiscreteMeasure mu = gen_cantor_measure(2, 2, 1.0 / 3.0, 2);
    REQUIRE(mu.size() == 16);
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(mu.weight(i) == 1.0 / 16.0);
    CHECK(mu.declared_dimension().value() ==
          doctest::Approx(2.0 * std::log(2.0) / std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("cantor declared dimension matches the closed form") {
    DiscreteMeasure mu = gen_cantor_measure(2, 2, 0.28, 5);
    CHECK(mu.size() == 1024);
    double s_expected = 2.0 * std::log(2.0) / std::log(1.0 / 0.28);
    CHECK(mu.declared_dimension().value() == doctest::Approx(s_expected).epsilon(1e-12));
    CHECK(s_expected == doctest::Approx(1.089).epsilon(1e-3));
}

TEST_CASE("cantor point count is m^(depth*d)") {
    CHECK(gen_cantor_measure(1, 3, 0.2, 3).size() == 27);
    CHECK(gen_cantor_measure(2, 2, 0.3, 3).size() == 64);
    CHECK(gen_cantor_measure(1, 2, 0.4, 6, 99).size() == 64);
}

TEST_CASE("cantor rejects bad parameters") {
    CHECK_THROWS_AS(gen_cantor_measure(1, 2, 0.6, 2), std::invalid_argument);  // m r > 1
    CHECK_THROWS_AS(gen_cantor_measure(1, 1, 0.3, 2), std::invalid_argument);
    CHECK_THROWS_AS(gen_cantor_measure(1, 2, 0.3, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_cantor_measure(2, 2, 0.3, 12, {}, 1000), std::invalid_argument);
}

TEST_CASE("jittered cantor is deterministic for a given seed and stays in cells") {
    DiscreteMeasure a = gen_cantor_measure(1, 2, 0.3, 4, 42);
    DiscreteMeasure b = gen_cantor_measure(1, 2, 0.3, 4, 42);
    DiscreteMeasure c = gen_cantor_measure(1, 2, 0.3, 4, 43);
    CHECK(a.points() == b.points());
    CHECK(a.points() != c.points());
    for (double x : a.points()) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("measure invariants are enforced") {
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, 1.0}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, 1.0}, {-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, std::nan("")}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(0, {}, {}), std::invalid_argument);
}

TEST_CASE("duplicate points are merged by summing weights") {
    DiscreteMeasure mu(1, {0.0, 1.0, 0.0}, {0.25, 0.5, 0.25});
    REQUIRE(mu.size() == 2);
    CHECK(mu.weight(0) == 0.5);
    CHECK(mu.weight(1) == 0.5);
}

TEST_CASE("resolution scale is the smallest nearest-neighbor distance") {
    DiscreteMeasure mu(1, {0.0, 0.5, 0.6}, {0.4, 0.3, 0.3});
    CHECK(mu.resolution_scale() == doctest::Approx(0.1).epsilon(1e-12));
    DiscreteMeasure single(1, {0.3}, {1.0});
    CHECK(single.resolution_scale() == 0.0);
}

TEST_CASE("restrict keeps, renormalizes and composes") {
    DiscreteMeasure mu(1, {0.0, 0.3, 0.6, 0.9}, {0.25, 0.25, 0.25, 0.25});

    std::vector<std::size_t> all{0, 1, 2, 3};
    DiscreteMeasure same = restrict_measure(mu, all, true);
    CHECK(same.size() == 4);
    CHECK(same.weights() == mu.weights());

    std::vector<std::size_t> two{1, 3};
    DiscreteMeasure half = restrict_measure(mu, two, true);
    REQUIRE(half.size() == 2);
    CHECK(half.weight(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.weight(1) == doctest::Approx(0.5).epsilon(1e-14));

    DiscreteMeasure sub = restrict_measure(mu, two, false);
    CHECK(sub.total_mass() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sub.meta().at("removed_mass") == format_g17(0.5));

    // restricting twice equals restricting once with the intersection
    Rng rng(11);
    DiscreteMeasure big = random_measure(rng, 20, 2);
    std::vector<std::size_t> first{0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
    std::vector<std::size_t> second_rel{0, 1, 2, 3, 4};  // first five of the kept
    DiscreteMeasure once = restrict_measure(restrict_measure(big, first, true),
                                            second_rel, true);
    std::vector<std::size_t> inter{0, 2, 4, 6, 8};
    DiscreteMeasure direct = restrict_measure(big, inter, true);
    REQUIRE(once.size() == direct.size());
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(std::abs(once.weight(i) - direct.weight(i)) <= 1e-12);
}

TEST_CASE("restrict error paths") {
    DiscreteMeasure mu(1, {0.0, 1.0}, {0.5, 0.5});
    CHECK_THROWS_AS(restrict_measure(mu, {}, true), std::invalid_argument);
    std::vector<std::size_t> oob{5};
    CHECK_THROWS_AS(restrict_measure(mu, oob, true), std::invalid_argument);
}

TEST_CASE("riesz energy closed forms") {
    CHECK(riesz_energy(two_point_measure(), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(riesz_energy(equilateral_measure(), 2.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("riesz energy stabilizes across cantor depths below the dimension") {
    double s = 0.5;  // below log2/log3
    double e3 = riesz_energy(gen_cantor_measure(1, 2, 1.0 / 3.0, 3), s);
    double e4 = riesz_energy(gen_cantor_measure(1, 2, 1.0 / 3.0, 4), s);
    double e5 = riesz_energy(gen_cantor_measure(1, 2, 1.0 / 3.0, 5), s);
    // depth-to-depth increments shrink geometrically (ratio ~ 3^s / 2)
    CHECK(std::abs(e3 - e4) / e4 == doctest::Approx(0.20101).epsilon(1e-3));
    CHECK(e5 - e4 < e4 - e3);
    CHECK((e5 - e4) / (e4 - e3) ==
          doctest::Approx(std::pow(3.0, s) / 2.0).epsilon(0.02));
}

TEST_CASE("riesz energy decreases when the point set is dilated") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        DiscreteMeasure mu = random_measure(rng, 12, 2);
        std::vector<double> scaled = mu.points();
        for (double& c : scaled) c *= 1.7;
        DiscreteMeasure big(2, std::move(scaled), mu.weights());
        double s = 0.3 + rng.uniform01();
        CHECK(riesz_energy(big, s) < riesz_energy(mu, s));
    }
}

TEST_CASE("frostman constant of a probability measure at s = 0 is at most 1") {
    std::vector<double> radii{1.0, 2.0};
    FrostmanReport rep = frostman_constant(two_point_measure(), 0.0, radii);
    CHECK(rep.constant == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.samples == 4);

    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        DiscreteMeasure mu = random_measure(rng, 15, 2);
        std::vector<double> r{2.0 * mu.resolution_scale() + 0.5, 3.0};
        CHECK(frostman_constant(mu, 0.0, r).constant <= 1.0 + 1e-12);
    }
}

TEST_CASE("frostman constant of the mid-third cantor set sits in [1, 2]") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 4);
    double s = std::log(2.0) / std::log(3.0);
    std::vector<double> radii{1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0};
    FrostmanReport rep = frostman_constant(mu, s, radii);
    CHECK(rep.constant >= 1.0 - 1e-12);
    CHECK(rep.constant <= 2.0 + 1e-12);

    // exact-count oracle: at a construction point, the level-k ball holds the
    // 2^(4-k) points of its cell
    auto ball_mass = [&](std::size_t center, double r) {
        double mass = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j)
            if (std::abs(mu.point(j)[0] - mu.point(center)[0]) <= r)
                mass += mu.weight(j);
        return mass;
    };
    CHECK(ball_mass(0, 1.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ball_mass(0, 1.0 / 9.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ball_mass(0, 1.0 / 27.0) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("frostman constant grows when s exceeds the dimension") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 4);
    double s_true = std::log(2.0) / std::log(3.0);
    double s = 0.9;
    std::vector<double> r1{1.0 / 3.0};
    std::vector<double> r3{1.0 / 27.0};
    double c1 = frostman_constant(mu, s, r1).constant;
    double c3 = frostman_constant(mu, s, r3).constant;
    // expected growth ratio ~ 3^{2 (s - s_true)} between k = 1 and k = 3
    double expected = std::pow(3.0, 2.0 * (s - s_true));
    CHECK(c3 / c1 == doctest::Approx(expected).epsilon(0.25));
    CHECK(c3 > c1);
}

TEST_CASE("frostman error paths name the resolution floor") {
    DiscreteMeasure mu = two_point_measure();  // resolution scale 1
    std::vector<double> below{0.5};
    try {
        frostman_constant(mu, 0.5, below);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("resolution scale") != std::string::npos);
    }
    CHECK_THROWS_AS(frostman_constant(mu, 0.5, {}), std::invalid_argument);
}
