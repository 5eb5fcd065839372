#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "treelab/operators.hpp"

using namespace treelab;
using namespace testutil;

TEST_CASE("apply_UK examples") {
    DiscreteMeasure mu = two_point_measure();
    KernelMatrix ones = constant_kernel(2);
    std::vector<double> f{1.0, 1.0};
    auto out = apply_UK(ones, mu, f);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-15));

    std::vector<double> zero{0.0, 0.0};
    auto z = apply_UK(ones, mu, zero);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);

    DiscreteMeasure sq = unit_square_measure();
    KernelMatrix k = assemble_kernel_matrix(
        make_kernel_spec(PhiSpec::euclidean(2), 1.0, 0.2, Mollifier::box), sq);
    std::vector<double> one4(4, 1.0);
    auto u = apply_UK(k, sq, one4);
    for (double v : u) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    std::vector<double> bad(3, 1.0);
    CHECK_THROWS_AS(apply_UK(k, sq, bad), std::invalid_argument);
}

TEST_CASE("lower_constant examples") {
    DiscreteMeasure mu = two_point_measure();
    CHECK(lower_constant(constant_kernel(2), mu) == doctest::Approx(0.5).epsilon(1e-15));

    DiscreteMeasure sq = unit_square_measure();
    KernelMatrix k = assemble_kernel_matrix(
        make_kernel_spec(PhiSpec::euclidean(2), 1.0, 0.2, Mollifier::box), sq);
    CHECK(lower_constant(k, sq) == doctest::Approx(2.5).epsilon(1e-14));

    KernelMatrix zero(2, {0, 0, 0, 0}, "zero");
    CHECK(lower_constant(zero, mu) == 0.0);
}

TEST_CASE("operator norm closed forms") {
    // K = 1 off-diagonal on M uniform points: norm (M-1)/M
    for (std::size_t m : {2u, 5u, 9u}) {
        std::vector<double> pts(m), w(m, 1.0 / static_cast<double>(m));
        for (std::size_t i = 0; i < m; ++i) pts[i] = static_cast<double>(i);
        DiscreteMeasure mu(1, std::move(pts), std::move(w));
        AssumptionReport rep = operator_norm(constant_kernel(m), mu, 1e-12, 1000);
        CHECK(rep.c_norm ==
              doctest::Approx((m - 1.0) / static_cast<double>(m)).epsilon(1e-10));
        CHECK(rep.c_lower <= rep.c_norm + 1e-15);
    }

    // single symmetric pair entry k at weights 1/2: norm k/2, and the dense
    // 2x2 eigendecomposition oracle agrees
    DiscreteMeasure mu = two_point_measure();
    double kval = 3.7;
    KernelMatrix pair(2, {0, kval, kval, 0}, "pair");
    AssumptionReport rep = operator_norm(pair, mu, 1e-12, 1000);
    double s01 = std::sqrt(0.5) * kval * std::sqrt(0.5);  // S = [[0, s01], [s01, 0]]
    double oracle = std::abs(s01);                        // eigenvalues +/- s01
    CHECK(rep.c_norm == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(rep.c_norm == doctest::Approx(kval / 2.0).epsilon(1e-12));

    KernelMatrix zero(2, {0, 0, 0, 0}, "zero");
    AssumptionReport zrep = operator_norm(zero, mu);
    CHECK(zrep.c_norm == 0.0);
    CHECK(zrep.norm_residual == 0.0);
}

TEST_CASE("operator norm converges on bipartite supports with uneven weights") {
    // +/- sigma eigenvalue tie; the squared-operator stepping must still exit
    DiscreteMeasure mu(1, {0.0, 1.0}, {0.3, 0.7});
    KernelMatrix pair(2, {0, 2.0, 2.0, 0}, "pair");
    AssumptionReport rep = operator_norm(pair, mu, 1e-11, 2000);
    CHECK(rep.c_norm == doctest::Approx(2.0 * std::sqrt(0.3 * 0.7)).epsilon(1e-10));
}

TEST_CASE("operator norm certificate properties on random instances") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = 3 + rng.uniform_index(20);
        DiscreteMeasure mu = random_measure(rng, m, 2);
        KernelMatrix k = random_kernel(rng, m);
        AssumptionReport rep = operator_norm(k, mu, 1e-10, 5000);

        CHECK(rep.c_lower <= rep.c_norm + 1e-12);

        // norm certificate on random f
        for (int f_trial = 0; f_trial < 5; ++f_trial) {
            std::vector<double> f(m);
            for (double& x : f) x = rng.uniform(-1.0, 1.0);
            auto uf = apply_UK(k, mu, f);
            double nf = 0.0, nuf = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                nf += mu.weight(i) * f[i] * f[i];
                nuf += mu.weight(i) * uf[i] * uf[i];
            }
            CHECK(std::sqrt(nuf) <= rep.c_norm * std::sqrt(nf) * (1.0 + 1e-8) + 1e-12);
        }

        // self-adjointness in L2(mu)
        std::vector<double> f(m), g(m);
        for (double& x : f) x = rng.uniform(-1.0, 1.0);
        for (double& x : g) x = rng.uniform(-1.0, 1.0);
        auto uf = apply_UK(k, mu, f);
        auto ug = apply_UK(k, mu, g);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lhs += mu.weight(i) * uf[i] * g[i];
            rhs += mu.weight(i) * f[i] * ug[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("chebyshev mass bound holds for every lambda") {
    Rng rng(113);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t m = 4 + rng.uniform_index(16);
        DiscreteMeasure mu = random_measure(rng, m, 1);
        KernelMatrix k = random_kernel(rng, m, 0.7);
        AssumptionReport rep = operator_norm(k, mu, 1e-10, 5000);
        std::vector<double> ones(m, 1.0);
        auto u1 = apply_UK(k, mu, ones);
        for (int l_trial = 0; l_trial < 10; ++l_trial) {
            double lambda = 0.05 + 2.0 * rng.uniform01();
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                if (u1[i] > lambda) mass += mu.weight(i);
            double bound = (rep.c_norm / lambda) * (rep.c_norm / lambda);
            CHECK(mass <= bound + 1e-12);
        }
    }
}

TEST_CASE("refine_measure keeps everything when U_K1 is flat") {
    std::vector<double> pts{0, 1, 2, 3, 4};
    DiscreteMeasure mu(1, std::move(pts), std::vector<double>(5, 0.2));
    auto [refined, rep] = refine_measure(constant_kernel(5), mu);
    CHECK(rep.kept_indices.size() == 5);
    CHECK(rep.removed_mass == 0.0);
    CHECK(refined.size() == 5);
    CHECK(rep.c_lower_after == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("refine_measure removes a hub point carrying huge U_K1") {
    // 10-point star-distance instance: the hub sits at unit distance from nine
    // tightly clustered satellites whose mutual distances stay far from 1
    std::vector<double> pts{0.0, 0.0};
    for (int a = 0; a < 9; ++a) {
        double angle = 0.05 * a;
        pts.push_back(std::cos(angle));
        pts.push_back(std::sin(angle));
    }
    DiscreteMeasure mu(2, std::move(pts), std::vector<double>(10, 0.1));
    KernelMatrix k = assemble_kernel_matrix(
        make_kernel_spec(PhiSpec::euclidean(2), 1.0, 0.1, Mollifier::box), mu);

    // direct computation: U1(hub) = 9, U1(satellite) = 1
    std::vector<double> ones(10, 1.0);
    auto u1 = apply_UK(k, mu, ones);
    CHECK(u1[0] == doctest::Approx(9.0).epsilon(1e-12));
    for (std::size_t i = 1; i < 10; ++i)
        CHECK(u1[i] == doctest::Approx(1.0).epsilon(1e-12));

    auto [refined, rep] = refine_measure(k, mu);
    CHECK(rep.kept_indices.size() == 9);
    CHECK(rep.removed_mass == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(rep.removed_mass <= 1.0 / (rep.n_param * rep.n_param) + 1e-12);
    CHECK(refined.size() == 9);
    // max kept U_K1 under the pigeonhole level
    for (std::size_t i : rep.kept_indices) CHECK(u1[i] <= rep.lambda);
}

TEST_CASE("overriding N upward removes no more points") {
    Rng rng(131);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t m = 6 + rng.uniform_index(10);
        DiscreteMeasure mu = random_measure(rng, m, 2);
        KernelMatrix k = random_kernel(rng, m);
        auto [r2, rep2] = refine_measure(k, mu, 2.0);
        auto [r10, rep10] = refine_measure(k, mu, 10.0);
        CHECK(rep10.kept_indices.size() >= rep2.kept_indices.size());
        CHECK(rep10.lambda > rep2.lambda);
    }
}

TEST_CASE("refine_measure reports satisfy the pigeonhole guarantees on random instances") {
    Rng rng(137);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t m = 4 + rng.uniform_index(20);
        DiscreteMeasure mu = random_measure(rng, m, 1);
        KernelMatrix k = random_kernel(rng, m);
        AssumptionReport ar = operator_norm(k, mu, 1e-10, 5000);
        if (!(ar.c_lower > 0.0)) continue;
        auto [refined, rep] = refine_measure(k, mu);
        CHECK(rep.removed_mass <= 1.0 / (rep.n_param * rep.n_param) + 1e-12);
        std::vector<double> ones(m, 1.0);
        auto u1 = apply_UK(k, mu, ones);
        for (std::size_t i : rep.kept_indices) CHECK(u1[i] <= rep.lambda);
        CHECK(rep.c_lower_after >= ar.c_lower / 2.0 - 1e-12);
    }
}

TEST_CASE("refine_measure rejects a vanishing lower constant") {
    DiscreteMeasure mu = two_point_measure();
    KernelMatrix zero(2, {0, 0, 0, 0}, "zero");
    CHECK_THROWS_WITH_AS(refine_measure(zero, mu).first.size(),
                         "refine_measure: assumption (1) fails (c_lower = 0)",
                         std::invalid_argument);
}
