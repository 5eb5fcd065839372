#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treelab/measure.hpp"
#include "treelab/phi.hpp"

namespace treelab {

/// Mollified configuration kernel K_{t,eps}(x, y) = eps^{-1} beta((phi(x,y) - t) / eps).
struct KernelSpec {
    PhiSpec phi;
    double t;
    double eps;
    Mollifier mollifier = Mollifier::box;
};

KernelSpec make_kernel_spec(PhiSpec phi, double t, double eps, Mollifier m);

/// Dense symmetric nonnegative matrix with zero diagonal; carrier of a kernel
/// evaluated on a measure's support.
class KernelMatrix {
public:
    KernelMatrix(std::size_t size, std::vector<double> values, std::string provenance,
                 double drop_threshold = 0.0, double dropped_mass_bound = 0.0,
                 std::vector<std::string> warnings = {});

    std::size_t size() const { return size_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * size_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * size_, size_}; }
    const std::vector<double>& values() const { return values_; }

    double max_entry() const { return max_entry_; }
    std::size_t nonzero_count() const { return nonzero_count_; }
    double drop_threshold() const { return drop_threshold_; }
    double dropped_mass_bound() const { return dropped_mass_bound_; }
    const std::string& provenance() const { return provenance_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::size_t size_;
    std::vector<double> values_;
    std::string provenance_;
    double drop_threshold_;
    double dropped_mass_bound_;
    std::vector<std::string> warnings_;
    double max_entry_;
    std::size_t nonzero_count_;
};

/// Pointwise kernel value; x == y is rejected (configurations use distinct points).
double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// values[i][j] = eval_kernel(spec, p_i, p_j) for i != j, entries below
/// drop_below stored as 0 with the dropped mass bound recorded.
KernelMatrix assemble_kernel_matrix(const KernelSpec& spec, const DiscreteMeasure& mu,
                                    double drop_below = 0.0);

/// |det| of the bordered Hessian of phi at a pair (x, y), all entries by
/// central finite differences with step 1e-5 * phi(x, y).
double monge_ampere_det_at(const PhiSpec& phi, std::span<const double> x,
                           std::span<const double> y);

/// Minimum |det| over random pairs projected onto the level set phi = t.
double monge_ampere_min_det(const PhiSpec& phi, double t, int sample_count,
                            std::uint64_t seed);

/// Triangle hyperedge kernel with side lengths (a, b, c):
///   K[i][j] = sigma_a(|p_i-p_j|) * sum_k w_k sigma_b(|p_i-p_k|) sigma_c(|p_j-p_k|),
/// symmetrized by averaging with the (b, c)-swapped assignment.
KernelMatrix triangle_kernel_matrix(double a, double b, double c, double eps,
                                    const DiscreteMeasure& mu, Mollifier mollifier);

}  // namespace treelab
