#pragma once

#include <span>
#include <string>
#include <vector>

namespace treelab {

enum class PhiFamily { euclidean, quadratic_form, perturbed_euclidean };
enum class Mollifier { box, triangle, smooth_bump };

/// A symmetric configuration function phi(x, y), smooth away from the
/// diagonal. Three built-in families:
///   euclidean             |x - y|
///   quadratic_form        sqrt((x-y)^T Q (x-y)), Q symmetric positive definite
///   perturbed_euclidean   |x - y| * (1 + eta * cos(kappa . (x + y))), |eta| < 1/2
class PhiSpec {
public:
    static PhiSpec euclidean(int dim);
    static PhiSpec quadratic_form(int dim, std::vector<double> q_rowmajor);
    static PhiSpec perturbed_euclidean(int dim, double eta, std::vector<double> kappa);

    PhiFamily family() const { return family_; }
    int dim() const { return dim_; }

    double operator()(std::span<const double> x, std::span<const double> y) const;

    /// Declared smoothing order of the associated averaging operator unless
    /// the user overrides it; (d - 1) / 2 for every built-in family.
    double default_alpha() const { return (dim_ - 1) / 2.0; }

    const std::vector<double>& q() const { return q_; }
    double eta() const { return eta_; }
    const std::vector<double>& kappa() const { return kappa_; }

    std::string family_name() const;

private:
    PhiSpec(PhiFamily f, int dim) : family_(f), dim_(dim) {}
    PhiFamily family_;
    int dim_;
    std::vector<double> q_;      // quadratic_form
    double eta_ = 0.0;           // perturbed_euclidean
    std::vector<double> kappa_;  // perturbed_euclidean
};

PhiFamily phi_family_from_name(const std::string& name);
Mollifier mollifier_from_name(const std::string& name);
std::string mollifier_name(Mollifier m);

/// Unit-integral bump beta(u): box is the indicator of [-1/2, 1/2], triangle
/// the hat on [-1, 1], smooth_bump the normalized exp(-1/(1-u^2)) on (-1, 1).
double mollifier_value(Mollifier m, double u);

/// Half-width of the support of beta.
double mollifier_halfwidth(Mollifier m);

/// Mollified shell sigma_t^eps(v) = eps^{-1} beta((v - t) / eps).
inline double shell_value(Mollifier m, double v, double t, double eps) {
    return mollifier_value(m, (v - t) / eps) / eps;
}

}  // namespace treelab
