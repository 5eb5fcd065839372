#include "treelab/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "treelab/operators.hpp"
#include "treelab/util.hpp"

namespace treelab {

namespace {

// iterative radix-2 complex FFT, forward convention e^{-2 pi i k n / N}
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::size_t grid_cells(int grid_log2, int dim) {
    std::size_t cells = 1;
    for (int a = 0; a < dim; ++a) cells <<= grid_log2;
    return cells;
}

// signed frequency of a DFT index
long long signed_freq(std::size_t k, std::size_t n) {
    return k < n / 2 ? static_cast<long long>(k)
                     : static_cast<long long>(k) - static_cast<long long>(n);
}

// dyadic bucket of |xi|^2: j with 4^{j-1} <= q < 4^j
int annulus_bucket(unsigned long long q) {
    int w = std::bit_width(q);  // q in [2^{w-1}, 2^w)
    return (w + 1) / 2;
}

double radial_normalizer(Mollifier profile, int dim) {
    // integral over R^d of profile(|x|): surface(S^{d-1}) * int_0^1 profile(r) r^{d-1} dr
    double surface = 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
    double radial = 0.0;
    switch (profile) {
        case Mollifier::box:
            radial = 1.0 / dim;
            break;
        case Mollifier::triangle:
            radial = 1.0 / dim - 1.0 / (dim + 1);
            break;
        case Mollifier::smooth_bump: {
            // composite Simpson, integrand vanishes smoothly at r = 1
            const int steps = 4096;
            double h = 1.0 / steps;
            StableSum s;
            for (int k = 0; k < steps; ++k) {
                double r0 = k * h, r1 = (k + 0.5) * h, r2 = (k + 1) * h;
                auto f = [&](double r) {
                    double w = 1.0 - r * r;
                    return (w > 0.0 ? std::exp(-1.0 / w) : 0.0) * std::pow(r, dim - 1);
                };
                s.add(h / 6.0 * (f(r0) + 4.0 * f(r1) + f(r2)));
            }
            radial = s.value();
            break;
        }
    }
    return surface * radial;
}

double radial_profile(Mollifier profile, double r) {
    switch (profile) {
        case Mollifier::box:
            return r <= 1.0 ? 1.0 : 0.0;
        case Mollifier::triangle:
            return r < 1.0 ? 1.0 - r : 0.0;
        case Mollifier::smooth_bump: {
            double w = 1.0 - r * r;
            return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
        }
    }
    return 0.0;
}

}  // namespace

std::vector<double> bin_measure_grid(const DiscreteMeasure& mu, int grid_log2) {
    if (grid_log2 < 1) throw std::invalid_argument("spectral: grid_log2 must be >= 1");
    const int d = mu.ambient_dim();
    const std::size_t n = std::size_t{1} << grid_log2;
    for (double c : mu.points())
        if (c < 0.0 || c > 1.0)
            throw std::invalid_argument(
                "spectral: support must lie in [0,1]^d for grid binning");

    std::vector<double> cells(grid_cells(grid_log2, d), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            auto k = static_cast<std::size_t>(p[static_cast<std::size_t>(a)] *
                                              static_cast<double>(n));
            if (k >= n) k = n - 1;
            flat = flat * n + k;
        }
        cells[flat] += mu.weight(i);
    }
    return cells;
}

std::vector<std::complex<double>> dft_grid(const std::vector<double>& cells,
                                           int grid_log2, int dim) {
    const std::size_t n = std::size_t{1} << grid_log2;
    const std::size_t total = cells.size();
    if (total != grid_cells(grid_log2, dim))
        throw std::invalid_argument("spectral: cell count does not match grid");

    std::vector<std::complex<double>> a(total);
    for (std::size_t i = 0; i < total; ++i) a[i] = cells[i];

    // separable transform: FFT along each axis in turn
    std::vector<std::complex<double>> line(n);
    for (int axis = dim - 1; axis >= 0; --axis) {
        std::size_t stride = 1;
        for (int b = dim - 1; b > axis; --b) stride *= n;
        const std::size_t lines = total / n;
        for (std::size_t l = 0; l < lines; ++l) {
            // base index of line l for this axis
            std::size_t outer = l / stride;
            std::size_t inner = l % stride;
            std::size_t base = outer * stride * n + inner;
            for (std::size_t k = 0; k < n; ++k) line[k] = a[base + k * stride];
            fft_pow2(line);
            for (std::size_t k = 0; k < n; ++k) a[base + k * stride] = line[k];
        }
    }
    return a;
}

double annulus_energy(const std::vector<std::complex<double>>& spectrum,
                      int grid_log2, int dim, int j) {
    if (j < 1) throw std::invalid_argument("spectral: annulus index must be >= 1");
    const std::size_t n = std::size_t{1} << grid_log2;
    StableSum s;
    for (std::size_t flat = 0; flat < spectrum.size(); ++flat) {
        unsigned long long q = 0;
        std::size_t rem = flat;
        for (int a = dim - 1; a >= 0; --a) {
            long long f = signed_freq(rem % n, n);
            q += static_cast<unsigned long long>(f * f);
            rem /= n;
        }
        if (q != 0 && annulus_bucket(q) == j) s.add(std::norm(spectrum[flat]));
    }
    return s.value();
}

double zero_cell_energy(const std::vector<std::complex<double>>& spectrum) {
    return std::norm(spectrum[0]);
}

double spectrum_l2(const std::vector<std::complex<double>>& spectrum) {
    StableSum s;
    for (const auto& v : spectrum) s.add(std::norm(v));
    return s.value();
}

double decay_slope(std::span<const int> scales, std::span<const double> quantities) {
    if (scales.size() != quantities.size())
        throw std::invalid_argument("decay_slope: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (quantities[i] > 0.0) {
            xs.push_back(static_cast<double>(scales[i]));
            ys.push_back(std::log2(quantities[i]));
        }
    }
    if (xs.size() < 2)
        throw std::invalid_argument("decay_slope: fewer than 2 nonzero scales");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("decay_slope: degenerate scale set");
    return sxy / sxx;
}

SpectralReport annulus_energies(const DiscreteMeasure& mu, int grid_log2,
                                std::pair<int, int> j_range, std::size_t cell_budget) {
    const int d = mu.ambient_dim();
    auto [j_min, j_max] = j_range;
    if (j_min < 1 || j_max < j_min)
        throw std::invalid_argument("annulus_energies: bad j range");
    if (j_max > grid_log2 - 1)
        throw std::invalid_argument("annulus_energies: annulus 2^" + std::to_string(j_max) +
                                    " is beyond the grid Nyquist scale 2^" +
                                    std::to_string(grid_log2 - 1));
    double cells = std::pow(2.0, static_cast<double>(grid_log2) * d);
    if (cells > static_cast<double>(cell_budget))
        throw std::invalid_argument("annulus_energies: 2^(grid_log2 * d) exceeds the cell budget");

    auto spectrum = dft_grid(bin_measure_grid(mu, grid_log2), grid_log2, d);

    SpectralReport report;
    for (int j = j_min; j <= j_max; ++j) {
        report.scales.push_back(j);
        report.quantities.push_back(annulus_energy(spectrum, grid_log2, d, j));
    }
    double s = mu.declared_dimension().value_or(std::nan(""));
    report.s_declared = s;
    report.target_slope = d - s;
    try {
        report.fit_slope = decay_slope(report.scales, report.quantities);
    } catch (const std::invalid_argument&) {
        report.fit_slope = std::nan("");
    }
    return report;
}

KernelMatrix scale_kernel_matrix(const DiscreteMeasure& mu, int j, Mollifier profile,
                                 double width_scale) {
    const int d = mu.ambient_dim();
    const double scale = std::pow(2.0, j) / width_scale;  // support radius width_scale * 2^{-j}
    const double amp = std::pow(2.0, static_cast<double>(d) * j) /
                       radial_normalizer(profile, d);
    const std::size_t m = mu.size();
    std::vector<double> values(m * m, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        auto pi = mu.point(i);
        for (std::size_t jj = i + 1; jj < m; ++jj) {
            double v = amp * radial_profile(profile, scale * euclidean_distance(pi, mu.point(jj)));
            values[i * m + jj] = v;
            values[jj * m + i] = v;
        }
    }
    return KernelMatrix(m, std::move(values),
                        "scale_kernel j=" + std::to_string(j) +
                            " profile=" + mollifier_name(profile));
}

double schur_row_bound(const KernelMatrix& kernel, const DiscreteMeasure& mu) {
    double best = 0.0;
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        auto row = kernel.row(i);
        StableSum s;
        for (std::size_t j = 0; j < kernel.size(); ++j) s.add(row[j] * mu.weight(j));
        best = std::max(best, s.value());
    }
    return best;
}

SpectralReport scale_operator_norms(const DiscreteMeasure& mu,
                                    std::pair<int, int> j_range, Mollifier bump,
                                    double tol, int max_iter) {
    auto [j_min, j_max] = j_range;
    if (j_max < j_min) throw std::invalid_argument("scale_operator_norms: bad j range");
    const double floor = mu.resolution_scale();

    SpectralReport report;
    for (int j = j_min; j <= j_max; ++j) {
        if (mu.size() >= 2 && std::pow(2.0, -j) < floor) continue;  // below resolution
        KernelMatrix kernel = scale_kernel_matrix(mu, j, bump);
        AssumptionReport ar = operator_norm(kernel, mu, tol, max_iter);
        report.scales.push_back(j);
        report.quantities.push_back(ar.c_norm);
    }
    if (report.scales.empty())
        throw std::invalid_argument(
            "scale_operator_norms: every requested scale lies below the resolution floor " +
            format_g17(floor));

    double s = mu.declared_dimension().value_or(std::nan(""));
    report.s_declared = s;
    report.target_slope = mu.ambient_dim() - s;
    try {
        report.fit_slope = decay_slope(report.scales, report.quantities);
    } catch (const std::invalid_argument&) {
        report.fit_slope = std::nan("");
    }
    return report;
}

}  // namespace treelab
