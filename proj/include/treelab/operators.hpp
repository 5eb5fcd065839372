#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"

namespace treelab {

/// The two hypotheses of the tree-building criterion in numeric form:
/// c_lower is the double integral of K, c_norm the estimated L2(mu) operator
/// norm of U_K. Both estimates are lower bounds of the true spectral norm,
/// and c_norm always dominates the L2 norm of U_K 1, so the Chebyshev mass
/// bound derived from it is safe even before full convergence.
struct AssumptionReport {
    double c_lower = 0.0;
    double c_norm = 0.0;
    int iterations = 0;
    double norm_residual = 0.0;
};

struct RefinementReport {
    double n_param = 0.0;       // N
    double lambda = 0.0;        // N * c_norm
    double removed_mass = 0.0;
    double c_lower_after = 0.0; // on restricted, NOT renormalized weights
    std::vector<std::size_t> kept_indices;
};

/// (U_K f)(p_i) = sum_j K[i][j] f[j] w_j.
std::vector<double> apply_UK(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                             std::span<const double> f);

/// <U_K 1, 1> = sum_{i,j} w_i w_j K[i][j].
double lower_constant(const KernelMatrix& kernel, const DiscreteMeasure& mu);

/// Estimates ||U_K||_{L2(mu) -> L2(mu)} as the dominant singular value of
/// S = diag(sqrt w) K diag(sqrt w), by power iteration on S^2 from the
/// all-ones L2(mu) start vector. The exit certificate is the spec'd
/// eigen-residual ||S v - sigma v|| <= tol * sigma for the reconstructed
/// eigenvector v; iterating on S^2 keeps the scheme from oscillating on
/// kernels with a +/-sigma eigenvalue tie (zero-diagonal bipartite supports).
AssumptionReport operator_norm(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                               double tol = 1e-10, int max_iter = 10000);

/// Keeps the sublevel set { U_K 1 <= N * c_norm } and renormalizes, with
/// N = max(2, sqrt(2 c_norm / c_lower)) unless overridden.
std::pair<DiscreteMeasure, RefinementReport> refine_measure(
    const KernelMatrix& kernel, const DiscreteMeasure& mu,
    std::optional<double> n_param = {}, double tol = 1e-10, int max_iter = 10000);

}  // namespace treelab
