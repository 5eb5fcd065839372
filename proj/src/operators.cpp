#include "treelab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treelab/util.hpp"

namespace treelab {

std::vector<double> apply_UK(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                             std::span<const double> f) {
    const std::size_t m = mu.size();
    if (kernel.size() != m || f.size() != m)
        throw std::invalid_argument("apply_UK: size mismatch");
    std::vector<double> out(m, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
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
    std::vector<double> rows(m, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        auto row = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * mu.weight(j);
        rows[i] = mu.weight(i) * acc;
    }
    StableSum total;
    for (double v : rows) total.add(v);
    return total.value();
}

namespace {

// y = S x with S = diag(sqrt w) K diag(sqrt w)
void apply_similar(const KernelMatrix& kernel, const std::vector<double>& sqrtw,
                   const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t m = sqrtw.size();
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        auto row = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * sqrtw[j] * x[j];
        y[i] = sqrtw[i] * acc;
    }
}

double norm2(const std::vector<double>& v) {
    StableSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    StableSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

}  // namespace

AssumptionReport operator_norm(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                               double tol, int max_iter) {
    const std::size_t m = mu.size();
    if (kernel.size() != m) throw std::invalid_argument("operator_norm: size mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("operator_norm: max_iter must be >= 1");

    AssumptionReport report;
    report.c_lower = lower_constant(kernel, mu);

    std::vector<double> sqrtw(m);
    for (std::size_t i = 0; i < m; ++i) sqrtw[i] = std::sqrt(mu.weight(i));

    // start vector: the constant function 1 in L2(mu), i.e. sqrt(w)/||.||
    std::vector<double> z = sqrtw;
    double zn = norm2(z);
    for (double& x : z) x /= zn;

    std::vector<double> y(m), x2(m);
    double sigma_best = 0.0;
    double cur = 0.0;
    double resid = 0.0;
    bool restarted = false;
    double prev_sigma = -1.0;
    int stall = 0;

    for (int it = 1; it <= max_iter; ++it) {
        apply_similar(kernel, sqrtw, z, y);  // y = S z
        cur = norm2(y);
        sigma_best = std::max(sigma_best, cur);
        report.iterations = it;
        if (cur == 0.0) {
            report.c_norm = sigma_best;
            report.norm_residual = 0.0;
            return report;
        }
        apply_similar(kernel, sqrtw, y, x2);  // x2 = S^2 z

        // residual of the +/-sigma eigenvector reconstructed from (z, y):
        // for u = y + s*sigma*z,  ||S u - s*sigma*u|| = ||x2 - sigma^2 z||.
        double num = 0.0;
        {
            StableSum s;
            for (std::size_t i = 0; i < m; ++i) {
                double r = x2[i] - cur * cur * z[i];
                s.add(r * r);
            }
            num = std::sqrt(s.value());
        }
        double up = 0.0, um = 0.0;
        {
            StableSum sp, sm;
            for (std::size_t i = 0; i < m; ++i) {
                double a = y[i] + cur * z[i];
                double b = y[i] - cur * z[i];
                sp.add(a * a);
                sm.add(b * b);
            }
            up = std::sqrt(sp.value());
            um = std::sqrt(sm.value());
        }
        resid = num / std::max(std::max(up, um), 1e-300) / std::max(cur, 1e-300);
        report.norm_residual = resid;
        if (resid <= tol) {
            report.c_norm = std::max(sigma_best, cur);
            return report;
        }

        if (prev_sigma >= 0.0 && std::abs(cur - prev_sigma) <= 1e-3 * tol * cur) {
            if (++stall >= 25 && !restarted) {
                // deterministic restart orthogonal to the current iterate
                restarted = true;
                stall = 0;
                std::vector<double> alt(m);
                for (std::size_t i = 0; i < m; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
                double proj = dot(alt, z);
                for (std::size_t i = 0; i < m; ++i) alt[i] -= proj * z[i];
                double an = norm2(alt);
                if (an > 0.0) {
                    for (double& v : alt) v /= an;
                    z = std::move(alt);
                    prev_sigma = -1.0;
                    continue;
                }
            }
        } else {
            stall = 0;
        }
        prev_sigma = cur;

        double xn = norm2(x2);
        if (xn == 0.0) {
            report.c_norm = sigma_best;
            return report;  // S^2 z vanished; sigma already certified by y
        }
        for (std::size_t i = 0; i < m; ++i) z[i] = x2[i] / xn;
    }
    throw NonConvergenceError("operator_norm: power iteration did not converge",
                              sigma_best, resid, max_iter);
}

std::pair<DiscreteMeasure, RefinementReport> refine_measure(
    const KernelMatrix& kernel, const DiscreteMeasure& mu,
    std::optional<double> n_param, double tol, int max_iter) {
    const std::size_t m = mu.size();
    if (kernel.size() != m) throw std::invalid_argument("refine_measure: size mismatch");

    AssumptionReport ar = operator_norm(kernel, mu, tol, max_iter);
    if (!(ar.c_lower > 0.0))
        throw std::invalid_argument("refine_measure: assumption (1) fails (c_lower = 0)");

    double n = n_param.value_or(std::max(2.0, std::sqrt(2.0 * ar.c_norm / ar.c_lower)));
    if (!(n > 0.0)) throw std::invalid_argument("refine_measure: N must be > 0");
    const double lambda = n * ar.c_norm;

    std::vector<double> ones(m, 1.0);
    std::vector<double> uk1 = apply_UK(kernel, mu, ones);

    RefinementReport report;
    report.n_param = n;
    report.lambda = lambda;
    StableSum removed;
    for (std::size_t i = 0; i < m; ++i) {
        if (uk1[i] <= lambda)
            report.kept_indices.push_back(i);
        else
            removed.add(mu.weight(i));
    }
    report.removed_mass = removed.value();
    if (report.kept_indices.empty())
        throw std::invalid_argument("refine_measure: every point exceeded the pigeonhole level");

    // restricted (not renormalized) double integral, for the c_lower/2 check
    {
        std::vector<double> rows(report.kept_indices.size(), 0.0);
#pragma omp parallel for schedule(static)
        for (long long aa = 0; aa < static_cast<long long>(report.kept_indices.size()); ++aa) {
            std::size_t i = report.kept_indices[static_cast<std::size_t>(aa)];
            auto row = kernel.row(i);
            double acc = 0.0;
            for (std::size_t j : report.kept_indices) acc += row[j] * mu.weight(j);
            rows[static_cast<std::size_t>(aa)] = mu.weight(i) * acc;
        }
        StableSum s;
        for (double v : rows) s.add(v);
        report.c_lower_after = s.value();
    }

    DiscreteMeasure refined = restrict_measure(mu, report.kept_indices, true);
    return {std::move(refined), std::move(report)};
}

}  // namespace treelab
