#include "treelab/phi.hpp"

#include <cmath>
#include <stdexcept>

#include "treelab/util.hpp"

namespace treelab {

namespace {

// integral of exp(-1/(1-u^2)) over (-1, 1), adaptive Simpson
double bump_raw(double u) {
    double w = 1.0 - u * u;
    return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

double simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(double (*f)(double), double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

double smooth_bump_normalizer() {
    static const double z = adaptive_simpson(&bump_raw, -1.0, 1.0, 1e-15);
    return z;
}

}  // namespace

PhiSpec PhiSpec::euclidean(int dim) {
    if (dim < 1) throw std::invalid_argument("phi: dim must be >= 1");
    return PhiSpec(PhiFamily::euclidean, dim);
}

PhiSpec PhiSpec::quadratic_form(int dim, std::vector<double> q_rowmajor) {
    if (dim < 1) throw std::invalid_argument("phi: dim must be >= 1");
    if (q_rowmajor.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("phi: quadratic form matrix must be d x d");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (q_rowmajor[static_cast<std::size_t>(i) * dim + j] !=
                q_rowmajor[static_cast<std::size_t>(j) * dim + i])
                throw std::invalid_argument("phi: quadratic form matrix must be symmetric");
    if (!is_positive_definite(q_rowmajor, dim))
        throw std::invalid_argument("phi: quadratic form matrix must be positive definite");
    PhiSpec spec(PhiFamily::quadratic_form, dim);
    spec.q_ = std::move(q_rowmajor);
    return spec;
}

PhiSpec PhiSpec::perturbed_euclidean(int dim, double eta, std::vector<double> kappa) {
    if (dim < 1) throw std::invalid_argument("phi: dim must be >= 1");
    if (!(std::abs(eta) < 0.5))
        throw std::invalid_argument("phi: perturbation amplitude must satisfy |eta| < 1/2");
    if (kappa.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("phi: frequency vector must have length d");
    PhiSpec spec(PhiFamily::perturbed_euclidean, dim);
    spec.eta_ = eta;
    spec.kappa_ = std::move(kappa);
    return spec;
}

double PhiSpec::operator()(std::span<const double> x, std::span<const double> y) const {
    switch (family_) {
        case PhiFamily::euclidean:
            return euclidean_distance(x, y);
        case PhiFamily::quadratic_form: {
            double q = 0.0;
            const auto d = static_cast<std::size_t>(dim_);
            for (std::size_t i = 0; i < d; ++i) {
                double di = x[i] - y[i];
                for (std::size_t j = 0; j < d; ++j)
                    q += di * q_[i * d + j] * (x[j] - y[j]);
            }
            return std::sqrt(q);
        }
        case PhiFamily::perturbed_euclidean: {
            double dot = 0.0;
            for (std::size_t i = 0; i < kappa_.size(); ++i) dot += kappa_[i] * (x[i] + y[i]);
            return euclidean_distance(x, y) * (1.0 + eta_ * std::cos(dot));
        }
    }
    throw std::logic_error("phi: unknown family");
}

std::string PhiSpec::family_name() const {
    switch (family_) {
        case PhiFamily::euclidean: return "euclidean";
        case PhiFamily::quadratic_form: return "quadratic_form";
        case PhiFamily::perturbed_euclidean: return "perturbed_euclidean";
    }
    return "?";
}

PhiFamily phi_family_from_name(const std::string& name) {
    if (name == "euclidean") return PhiFamily::euclidean;
    if (name == "quadratic_form") return PhiFamily::quadratic_form;
    if (name == "perturbed_euclidean") return PhiFamily::perturbed_euclidean;
    throw std::invalid_argument("phi: unknown family '" + name + "'");
}

Mollifier mollifier_from_name(const std::string& name) {
    if (name == "box") return Mollifier::box;
    if (name == "triangle") return Mollifier::triangle;
    if (name == "smooth_bump") return Mollifier::smooth_bump;
    throw std::invalid_argument("mollifier: unknown name '" + name + "'");
}

std::string mollifier_name(Mollifier m) {
    switch (m) {
        case Mollifier::box: return "box";
        case Mollifier::triangle: return "triangle";
        case Mollifier::smooth_bump: return "smooth_bump";
    }
    return "?";
}

double mollifier_value(Mollifier m, double u) {
    switch (m) {
        case Mollifier::box:
            return std::abs(u) <= 0.5 ? 1.0 : 0.0;
        case Mollifier::triangle: {
            double a = std::abs(u);
            return a < 1.0 ? 1.0 - a : 0.0;
        }
        case Mollifier::smooth_bump:
            return bump_raw(u) / smooth_bump_normalizer();
    }
    return 0.0;
}

double mollifier_halfwidth(Mollifier m) {
    return m == Mollifier::box ? 0.5 : 1.0;
}

}  // namespace treelab
