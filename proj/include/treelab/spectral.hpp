#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"
#include "treelab/phi.hpp"

namespace treelab {

/// Scale-indexed diagnostic: annulus energies of the binned spectrum or
/// scale-operator norms, with the least-squares decay slope against the
/// d - s target read off the measure's declared dimension (NaN if absent).
struct SpectralReport {
    std::vector<int> scales;
    std::vector<double> quantities;
    double fit_slope = 0.0;
    double target_slope = 0.0;
    double s_declared = 0.0;
};

/// Mass-preserving nearest-cell binning onto the 2^grid_log2 per-axis grid
/// over [0,1]^d; returns the row-major cell masses.
std::vector<double> bin_measure_grid(const DiscreteMeasure& mu, int grid_log2);

/// Unnormalized forward DFT of the cell array (separable radix-2 FFT).
std::vector<std::complex<double>> dft_grid(const std::vector<double>& cells,
                                           int grid_log2, int dim);

/// Energy in the dyadic annulus 2^{j-1} <= |xi| < 2^j (frequency in grid
/// units, j >= 1), plus helpers for the zero cell and the total.
double annulus_energy(const std::vector<std::complex<double>>& spectrum,
                      int grid_log2, int dim, int j);
double zero_cell_energy(const std::vector<std::complex<double>>& spectrum);
double spectrum_l2(const std::vector<std::complex<double>>& spectrum);

SpectralReport annulus_energies(const DiscreteMeasure& mu, int grid_log2,
                                std::pair<int, int> j_range,
                                std::size_t cell_budget = std::size_t{1} << 24);

/// Scale kernel 2^{dj} rho(2^j (p_i - p_j)) with rho the radial unit-integral
/// bump built from the given profile; exposed for the dominance tests.
KernelMatrix scale_kernel_matrix(const DiscreteMeasure& mu, int j, Mollifier profile,
                                 double width_scale = 1.0);

/// Norms of the scale operators U_j; scales below the resolution floor are
/// skipped (error if every scale is skipped).
SpectralReport scale_operator_norms(const DiscreteMeasure& mu,
                                    std::pair<int, int> j_range, Mollifier bump,
                                    double tol = 1e-9, int max_iter = 5000);

/// OLS slope of log2(quantity) against j over nonzero quantities; needs at
/// least two usable scales.
double decay_slope(std::span<const int> scales, std::span<const double> quantities);

/// Maximum weighted row sum of the scale kernel (the Schur bound).
double schur_row_bound(const KernelMatrix& kernel, const DiscreteMeasure& mu);

}  // namespace treelab
