#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "testutil.hpp"
#include "treelab/spectral.hpp"

using namespace treelab;
using namespace testutil;

TEST_CASE("decay slope closed forms") {
    std::vector<int> j{0, 1, 2};
    std::vector<double> up{1, 2, 4};
    CHECK(decay_slope(j, up) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> flat{3, 3, 3};
    CHECK(decay_slope(j, flat) == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<double> down{8, 2, 0.5};
    CHECK(decay_slope(j, down) == doctest::Approx(-2.0).epsilon(1e-12));
    std::vector<double> sparse{1, 0, 0};
    CHECK_THROWS_AS(decay_slope(j, sparse), std::invalid_argument);
}

TEST_CASE("dft of the binned grid matches a direct transform") {
    Rng rng(501);
    DiscreteMeasure mu = random_measure(rng, 9, 1);
    const int L = 5;
    auto cells = bin_measure_grid(mu, L);
    auto spectrum = dft_grid(cells, L, 1);
    const std::size_t n = 1u << L;
    for (std::size_t xi : {std::size_t{0}, std::size_t{1}, std::size_t{7}, n - 1}) {
        std::complex<double> direct{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            double ang = -2.0 * std::numbers::pi * static_cast<double>(xi) *
                         static_cast<double>(k) / static_cast<double>(n);
            direct += cells[k] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(spectrum[xi] - direct) <= 1e-12);
    }
}

TEST_CASE("binning preserves mass") {
    Rng rng(503);
    for (int dim : {1, 2}) {
        DiscreteMeasure mu = random_measure(rng, 20, dim);
        auto cells = bin_measure_grid(mu, 4);
        CHECK(stable_sum(cells) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("a single point mass has flat spectrum and annulus slope exactly d") {
    DiscreteMeasure mu(1, {0.5}, {1.0});
    SpectralReport rep = annulus_energies(mu, 8, {2, 6});
    // |mu_hat| = 1 everywhere, so E_j counts the 2^j frequencies in the annulus
    for (std::size_t i = 0; i < rep.scales.size(); ++i)
        CHECK(rep.quantities[i] ==
              doctest::Approx(std::pow(2.0, rep.scales[i])).epsilon(1e-9));
    CHECK(rep.fit_slope == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the uniform measure on a full grid has no high-frequency energy") {
    const int L = 6;
    const std::size_t n = 1u << L;
    std::vector<double> pts(n), w(n, 1.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k)
        pts[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    DiscreteMeasure mu(1, std::move(pts), std::move(w));
    SpectralReport rep = annulus_energies(mu, L, {1, 5});
    for (double q : rep.quantities) CHECK(q <= 1e-20);
    CHECK(std::isnan(rep.fit_slope));  // fewer than 2 nonzero scales
}

TEST_CASE("parseval: annuli plus the zero cell partition the spectrum") {
    Rng rng(509);
    for (int dim : {1, 2}) {
        DiscreteMeasure mu = random_measure(rng, 25, dim);
        const int L = dim == 1 ? 8 : 5;
        auto spectrum = dft_grid(bin_measure_grid(mu, L), L, dim);
        StableSum covered;
        covered.add(zero_cell_energy(spectrum));
        for (int j = 1; j <= L + 2; ++j)
            covered.add(annulus_energy(spectrum, L, dim, j));
        CHECK(covered.value() ==
              doctest::Approx(spectrum_l2(spectrum)).epsilon(1e-9));
    }
}

TEST_CASE("annulus energies of the mid-third cantor measure track d - s") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 5);
    SpectralReport rep = annulus_energies(mu, 12, {2, 7});
    double target = 1.0 - std::log(2.0) / std::log(3.0);
    CHECK(rep.target_slope == doctest::Approx(target).epsilon(1e-12));
    CHECK(std::abs(rep.fit_slope - target) <= 0.3);

    // direct quadratic-form oracle at two scales: E_j as a double sum over the
    // binned masses against the annulus kernel
    auto cells = bin_measure_grid(mu, 12);
    auto spectrum = dft_grid(cells, 12, 1);
    const std::size_t n = std::size_t{1} << 12;
    std::vector<std::pair<std::size_t, double>> atoms;
    for (std::size_t k = 0; k < n; ++k)
        if (cells[k] != 0.0) atoms.emplace_back(k, cells[k]);
    for (int j : {3, 5}) {
        double direct = 0.0;
        for (long long xi = -static_cast<long long>(n) / 2; xi < static_cast<long long>(n) / 2; ++xi) {
            double axi = std::abs(static_cast<double>(xi));
            if (axi < std::pow(2.0, j - 1) || axi >= std::pow(2.0, j)) continue;
            std::complex<double> hat{0.0, 0.0};
            for (auto& [k, mass] : atoms) {
                double ang = -2.0 * std::numbers::pi * static_cast<double>(xi) *
                             static_cast<double>(k) / static_cast<double>(n);
                hat += mass * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            direct += std::norm(hat);
        }
        CHECK(annulus_energy(spectrum, 12, 1, j) ==
              doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("annulus request beyond nyquist or budget is rejected") {
    DiscreteMeasure mu(1, {0.5}, {1.0});
    CHECK_THROWS_AS(annulus_energies(mu, 8, {2, 8}), std::invalid_argument);
    CHECK_THROWS_AS(annulus_energies(mu, 8, {0, 4}), std::invalid_argument);
    DiscreteMeasure mu2(2, {0.5, 0.5}, {1.0});
    CHECK_THROWS_AS(annulus_energies(mu2, 13, {2, 7}, 1 << 20), std::invalid_argument);
}

TEST_CASE("binning requires support in the unit cube") {
    DiscreteMeasure mu(1, {-0.2, 0.5}, {0.5, 0.5});
    CHECK_THROWS_AS(bin_measure_grid(mu, 4), std::invalid_argument);
}

TEST_CASE("scale operator norm vanishes when the scale separates the points") {
    DiscreteMeasure mu = two_point_measure(1.0);  // separation 1
    KernelMatrix k = scale_kernel_matrix(mu, 3, Mollifier::box);  // radius 1/8
    CHECK(k.nonzero_count() == 0);
    SpectralReport rep = scale_operator_norms(mu, {3, 4}, Mollifier::box);
    CHECK(rep.quantities[0] == 0.0);
    CHECK(rep.quantities[1] == 0.0);
}

TEST_CASE("scale operator norm on a tight cluster approaches the rank-one value") {
    // M points inside one 2^-j ball, uniform weights; the flat box profile
    // makes the kernel exactly rank-one off the diagonal
    const int j = 2;
    const std::size_t m = 8;
    std::vector<double> pts(m), w(m, 1.0 / static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        pts[i] = 0.5 + 1e-3 * static_cast<double>(i);
    DiscreteMeasure mu(1, std::move(pts), std::move(w));
    KernelMatrix k = scale_kernel_matrix(mu, j, Mollifier::box);
    AssumptionReport rep = operator_norm(k, mu, 1e-11, 2000);
    // rho(0) = 1/2 in d=1 (box profile normalized over [-1,1]); amplitude
    // 2^{dj} rho(0) = 2; eigenvalue of the hollow rank-one matrix: c(M-1)/M
    double amp = std::pow(2.0, j) * 0.5;
    CHECK(rep.c_norm ==
          doctest::Approx(amp * (m - 1.0) / static_cast<double>(m)).epsilon(1e-9));
}

TEST_CASE("scale operator norms of the cantor measure decay like d - s") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 5);
    SpectralReport rep = scale_operator_norms(mu, {2, 6}, Mollifier::smooth_bump);
    double target = 1.0 - std::log(2.0) / std::log(3.0);
    REQUIRE(rep.scales.size() == 5);
    CHECK(std::abs(rep.fit_slope - target) <= 0.3);

    // Schur dominance at every scale, exactly
    for (std::size_t i = 0; i < rep.scales.size(); ++i) {
        KernelMatrix k = scale_kernel_matrix(mu, rep.scales[i], Mollifier::smooth_bump);
        CHECK(rep.quantities[i] <= schur_row_bound(k, mu) + 1e-12);
    }
}

TEST_CASE("scales below the resolution floor are skipped, all skipped is an error") {
    DiscreteMeasure mu = gen_cantor_measure(1, 2, 1.0 / 3.0, 5);
    // resolution scale is (1/3)^4 * 2/3 ~ 0.0082, so 2^-7 < floor < 2^-6
    SpectralReport rep = scale_operator_norms(mu, {6, 8}, Mollifier::box);
    REQUIRE(rep.scales.size() == 1);
    CHECK(rep.scales[0] == 6);
    CHECK_THROWS_AS(scale_operator_norms(mu, {8, 9}, Mollifier::box),
                    std::invalid_argument);
}

TEST_CASE("a wider bump dominates entrywise and in norm") {
    Rng rng(521);
    for (int trial = 0; trial < 6; ++trial) {
        DiscreteMeasure mu = random_measure(rng, 12, 2);
        const int j = 2;
        for (Mollifier prof : {Mollifier::box, Mollifier::triangle, Mollifier::smooth_bump}) {
            KernelMatrix narrow = scale_kernel_matrix(mu, j, prof, 1.0);
            KernelMatrix wide = scale_kernel_matrix(mu, j, prof, 2.0);
            for (std::size_t a = 0; a < mu.size(); ++a)
                for (std::size_t b = 0; b < mu.size(); ++b)
                    CHECK(wide(a, b) >= narrow(a, b));
            double nn = operator_norm(narrow, mu, 1e-9, 5000).c_norm;
            double nw = operator_norm(wide, mu, 1e-9, 5000).c_norm;
            CHECK(nw >= nn - 1e-9 * std::max(1.0, nn));
        }
    }
}
