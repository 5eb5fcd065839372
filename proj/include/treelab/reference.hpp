#pragma once

#include <span>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"
#include "treelab/phi.hpp"

namespace treelab::reference {

// Serial counterparts of the OpenMP kernels. They follow the same summation
// order (per-row, index-ascending), so the parallel versions must match them
// bit for bit; the tests assert exact equality and the benchmark tool
// compares their timings.

KernelMatrix assemble_kernel_matrix(const KernelSpec& spec, const DiscreteMeasure& mu,
                                    double drop_below = 0.0);

std::vector<double> apply_UK(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                             std::span<const double> f);

double lower_constant(const KernelMatrix& kernel, const DiscreteMeasure& mu);

KernelMatrix triangle_kernel_matrix(double a, double b, double c, double eps,
                                    const DiscreteMeasure& mu, Mollifier mollifier);

std::vector<double> scan_j_values(const PhiSpec& phi, const DiscreteMeasure& mu,
                                  std::span<const double> t_grid, double eps,
                                  Mollifier mollifier);

}  // namespace treelab::reference
