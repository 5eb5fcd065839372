#include "treelab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "treelab/rng.hpp"
#include "treelab/util.hpp"

namespace treelab {

KernelSpec make_kernel_spec(PhiSpec phi, double t, double eps, Mollifier m) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel: gap t must be > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("kernel: mollification width eps must be > 0");
    return KernelSpec{std::move(phi), t, eps, m};
}

KernelMatrix::KernelMatrix(std::size_t size, std::vector<double> values,
                           std::string provenance, double drop_threshold,
                           double dropped_mass_bound, std::vector<std::string> warnings)
    : size_(size),
      values_(std::move(values)),
      provenance_(std::move(provenance)),
      drop_threshold_(drop_threshold),
      dropped_mass_bound_(dropped_mass_bound),
      warnings_(std::move(warnings)) {
    if (size_ == 0) throw std::invalid_argument("kernel matrix: size must be >= 1");
    if (values_.size() != size_ * size_)
        throw std::invalid_argument("kernel matrix: values size mismatch");
    max_entry_ = 0.0;
    nonzero_count_ = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        if (values_[i * size_ + i] != 0.0)
            throw std::invalid_argument("kernel matrix: diagonal must be zero");
        for (std::size_t j = 0; j < size_; ++j) {
            double v = values_[i * size_ + j];
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("kernel matrix: entries must be finite and >= 0");
            if (v != values_[j * size_ + i])
                throw std::invalid_argument("kernel matrix: values must be exactly symmetric");
            if (v > max_entry_) max_entry_ = v;
            if (v != 0.0) ++nonzero_count_;
        }
    }
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
    if (std::equal(x.begin(), x.end(), y.begin(), y.end()))
        throw std::invalid_argument("eval_kernel: x == y (diagonal excluded)");
    return shell_value(spec.mollifier, spec.phi(x, y), spec.t, spec.eps);
}

namespace {

// The width floor is advisory: below the point spacing the discrete kernel
// starts to resolve individual atoms, which the reports must surface.
void note_eps_floor(double eps, const DiscreteMeasure& mu,
                    std::vector<std::string>& warnings) {
    const double floor = mu.resolution_scale();
    if (mu.size() >= 2 && eps < floor)
        warnings.push_back("eps " + format_g17(eps) +
                           " is below the measure's resolution scale " +
                           format_g17(floor));
}

std::string kernel_provenance(const KernelSpec& spec, double drop_below) {
    return "phi=" + spec.phi.family_name() + " t=" + format_g17(spec.t) +
           " eps=" + format_g17(spec.eps) + " mollifier=" + mollifier_name(spec.mollifier) +
           " drop_below=" + format_g17(drop_below);
}

}  // namespace

KernelMatrix assemble_kernel_matrix(const KernelSpec& spec, const DiscreteMeasure& mu,
                                    double drop_below) {
    if (!(spec.t > 0.0) || !(spec.eps > 0.0))
        throw std::invalid_argument("assemble_kernel_matrix: t and eps must be > 0");
    if (drop_below < 0.0)
        throw std::invalid_argument("assemble_kernel_matrix: drop_below must be >= 0");
    std::vector<std::string> warnings;
    note_eps_floor(spec.eps, mu, warnings);

    const std::size_t m = mu.size();
    std::vector<double> values(m * m, 0.0);
    std::vector<double> dropped_rows(m, 0.0);

#pragma omp parallel for schedule(dynamic, 8)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
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
    return KernelMatrix(m, std::move(values), kernel_provenance(spec, drop_below),
                        drop_below, dropped_bound.value(), std::move(warnings));
}

namespace {

// bordered matrix of phi at (x, y):
//   [ 0                 grad_x phi        ]
//   [ -(grad_y phi)^T   d^2 phi / dx dy   ]
double bordered_det(const PhiSpec& phi, std::span<const double> x,
                    std::span<const double> y, double h) {
    const int d = phi.dim();
    const int n = d + 1;
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
    std::vector<double> mat(static_cast<std::size_t>(n) * n, 0.0);

    for (int i = 0; i < d; ++i) {
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        double gx = (phi(xp, y) - phi(xm, y)) / (2.0 * h);
        mat[static_cast<std::size_t>(i) + 1] = gx;  // row 0, col i+1
        xp[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        xm[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];

        yp[static_cast<std::size_t>(i)] += h;
        ym[static_cast<std::size_t>(i)] -= h;
        double gy = (phi(x, yp) - phi(x, ym)) / (2.0 * h);
        mat[static_cast<std::size_t>(i + 1) * n] = -gy;  // col 0, row i+1
        yp[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
        ym[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
    }

    for (int i = 0; i < d; ++i) {
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        for (int j = 0; j < d; ++j) {
            yp[static_cast<std::size_t>(j)] += h;
            ym[static_cast<std::size_t>(j)] -= h;
            double mixed = (phi(xp, yp) - phi(xp, ym) - phi(xm, yp) + phi(xm, ym)) /
                           (4.0 * h * h);
            mat[static_cast<std::size_t>(i + 1) * n + (j + 1)] = mixed;
            yp[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
            ym[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
        }
        xp[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        xm[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    }
    return dense_determinant(std::move(mat), n);
}

}  // namespace

double monge_ampere_det_at(const PhiSpec& phi, std::span<const double> x,
                           std::span<const double> y) {
    double t = phi(x, y);
    if (!(t > 0.0))
        throw std::invalid_argument("monge_ampere_det_at: phi(x, y) must be > 0");
    return std::abs(bordered_det(phi, x, y, 1e-5 * t));
}

double monge_ampere_min_det(const PhiSpec& phi, double t, int sample_count,
                            std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("monge_ampere_min_det: t must be > 0");
    if (sample_count < 1)
        throw std::invalid_argument("monge_ampere_min_det: sample_count must be >= 1");

    const int d = phi.dim();
    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    int hits = 0;

    for (int s = 0; s < sample_count; ++s) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (double& c : x) c = rng.uniform01();
        std::vector<double> u(static_cast<std::size_t>(d));
        double nrm = 0.0;
        for (double& c : u) {
            c = rng.normal();
            nrm += c * c;
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;
        for (double& c : u) c /= nrm;

        // project onto the level set: find s0 with phi(x, x + s0 u) = t
        auto level = [&](double step) {
            std::vector<double> y(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] +
                                                 step * u[static_cast<std::size_t>(i)];
            return y;
        };
        double lo = 1e-8 * t, hi = t;
        double flo = phi(x, level(lo)) - t;
        if (flo > 0.0) continue;  // level set closer than the bracket start
        double fhi = phi(x, level(hi)) - t;
        int grow = 0;
        while (fhi < 0.0 && grow < 12) {
            hi *= 2.0;
            fhi = phi(x, level(hi)) - t;
            ++grow;
        }
        if (fhi < 0.0) continue;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = phi(x, level(mid)) - t;
            if (fm < 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-14 * t) break;
        }
        double s0 = 0.5 * (lo + hi);
        std::vector<double> y = level(s0);
        if (std::abs(phi(x, y) - t) > 1e-9 * t) continue;

        double det = std::abs(bordered_det(phi, x, y, 1e-5 * t));
        if (det < best) best = det;
        ++hits;
    }
    if (hits == 0)
        throw NonConvergenceError(
            "monge_ampere_min_det: no sample could be projected onto the level set",
            0.0, 0.0, sample_count);
    return best;
}

KernelMatrix triangle_kernel_matrix(double a, double b, double c, double eps,
                                    const DiscreteMeasure& mu, Mollifier mollifier) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw std::invalid_argument("triangle_kernel_matrix: sides must be > 0");
    if (a + b <= c || b + c <= a || a + c <= b)
        throw std::invalid_argument("triangle_kernel_matrix: sides violate the strict triangle inequality");
    if (!(eps > 0.0)) throw std::invalid_argument("triangle_kernel_matrix: eps must be > 0");

    std::vector<std::string> warnings;
    note_eps_floor(eps, mu, warnings);
    const double slack = 2.0 * eps;
    if (a + b <= c + slack || b + c <= a + slack || a + c <= b + slack)
        warnings.push_back("sides are within 2*eps of violating the triangle inequality");

    const std::size_t m = mu.size();
    std::vector<double> values(m * m, 0.0);

#pragma omp parallel for schedule(dynamic, 4)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
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

}  // namespace treelab
