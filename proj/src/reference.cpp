#include "treelab/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "treelab/util.hpp"

namespace treelab::reference {

KernelMatrix assemble_kernel_matrix(const KernelSpec& spec, const DiscreteMeasure& mu,
                                    double drop_below) {
    if (!(spec.t > 0.0) || !(spec.eps > 0.0))
        throw std::invalid_argument("assemble_kernel_matrix: t and eps must be > 0");
    if (drop_below < 0.0)
        throw std::invalid_argument("assemble_kernel_matrix: drop_below must be >= 0");
    std::vector<std::string> warnings;
    if (mu.size() >= 2 && spec.eps < mu.resolution_scale())
        warnings.push_back("eps " + format_g17(spec.eps) +
                           " is below the measure's resolution scale " +
                           format_g17(mu.resolution_scale()));

    const std::size_t m = mu.size();
    std::vector<double> values(m * m, 0.0);
    std::vector<double> dropped_rows(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto pi = mu.point(i);
        double dropped = 0.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            double v = shell_value(spec.mollifier, spec.phi(pi, mu.point(j)), spec.t, spec.eps);
            if (v > 0.0 && v < drop_below) {
                dropped += 2.0 * mu.weight(i) * mu.weight(j) * drop_below;
                v = 0.0;
            }
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
        dropped_rows[i] = dropped;
    }
    StableSum dropped_bound;
    for (double v : dropped_rows) dropped_bound.add(v);
    std::string prov = "phi=" + spec.phi.family_name() + " t=" + format_g17(spec.t) +
                       " eps=" + format_g17(spec.eps) +
                       " mollifier=" + mollifier_name(spec.mollifier) +
                       " drop_below=" + format_g17(drop_below);
    return KernelMatrix(m, std::move(values), std::move(prov), drop_below,
                        dropped_bound.value(), std::move(warnings));
}

std::vector<double> apply_UK(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                             std::span<const double> f) {
    const std::size_t m = mu.size();
    if (kernel.size() != m || f.size() != m)
        throw std::invalid_argument("apply_UK: size mismatch");
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * f[j] * mu.weight(j);
        out[i] = acc;
    }
    return out;
}

double lower_constant(const KernelMatrix& kernel, const DiscreteMeasure& mu) {
    const std::size_t m = mu.size();
    if (kernel.size() != m) throw std::invalid_argument("lower_constant: size mismatch");
    StableSum total;
    for (std::size_t i = 0; i < m; ++i) {
        auto row = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * mu.weight(j);
        total.add(mu.weight(i) * acc);
    }
    return total.value();
}

KernelMatrix triangle_kernel_matrix(double a, double b, double c, double eps,
                                    const DiscreteMeasure& mu, Mollifier mollifier) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw std::invalid_argument("triangle_kernel_matrix: sides must be > 0");
    if (a + b <= c || b + c <= a || a + c <= b)
        throw std::invalid_argument("triangle_kernel_matrix: sides violate the strict triangle inequality");
    if (!(eps > 0.0)) throw std::invalid_argument("triangle_kernel_matrix: eps must be > 0");

    std::vector<std::string> warnings;
    if (mu.size() >= 2 && eps < mu.resolution_scale())
        warnings.push_back("eps " + format_g17(eps) +
                           " is below the measure's resolution scale " +
                           format_g17(mu.resolution_scale()));
    if (a + b <= c + 2.0 * eps || b + c <= a + 2.0 * eps || a + c <= b + 2.0 * eps)
        warnings.push_back("sides are within 2*eps of violating the triangle inequality");

    const std::size_t m = mu.size();
    std::vector<double> values(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto pi = mu.point(i);
        for (std::size_t j = i + 1; j < m; ++j) {
            auto pj = mu.point(j);
            double outer = shell_value(mollifier, euclidean_distance(pi, pj), a, eps);
            if (outer == 0.0) continue;
            double inner_bc = 0.0, inner_cb = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                auto pk = mu.point(k);
                double dik = euclidean_distance(pi, pk);
                double djk = euclidean_distance(pj, pk);
                inner_bc += mu.weight(k) * (shell_value(mollifier, dik, b, eps) *
                                            shell_value(mollifier, djk, c, eps));
                inner_cb += mu.weight(k) * (shell_value(mollifier, dik, c, eps) *
                                            shell_value(mollifier, djk, b, eps));
            }
            double v = outer * (0.5 * (inner_bc + inner_cb));
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
    }
    std::string prov = "triangle sides=(" + format_g17(a) + "," + format_g17(b) + "," +
                       format_g17(c) + ") eps=" + format_g17(eps) +
                       " mollifier=" + mollifier_name(mollifier);
    return KernelMatrix(m, std::move(values), std::move(prov), 0.0, 0.0,
                        std::move(warnings));
}

std::vector<double> scan_j_values(const PhiSpec& phi, const DiscreteMeasure& mu,
                                  std::span<const double> t_grid, double eps,
                                  Mollifier mollifier) {
    const std::size_t m = mu.size();
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        std::vector<double> rows(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            auto pi = mu.point(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                acc += mu.weight(j) * shell_value(mollifier, phi(pi, mu.point(j)), t, eps);
            }
            rows[i] = mu.weight(i) * acc;
        }
        StableSum s;
        for (double v : rows) s.add(v);
        out.push_back(s.value());
    }
    return out;
}

}  // namespace treelab::reference
