#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelab {

inline constexpr const char* kVersion = "0.1.0";

/// Thrown when an iterative solver exhausts its iteration budget.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double last_estimate,
                        double last_residual, int iterations)
        : std::runtime_error(what),
          last_estimate(last_estimate),
          last_residual(last_residual),
          iterations(iterations) {}

    double last_estimate;
    double last_residual;
    int iterations;
};

// Neumaier compensated accumulator. Used wherever a sum feeds a tight
// tolerance (weight normalization checks, energy oracles).
class StableSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double stable_sum(std::span<const double> xs) {
    StableSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        q += d * d;
    }
    return q;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

/// Determinant of a dense n x n matrix (row-major), LU with partial pivoting.
double dense_determinant(std::vector<double> a, int n);

/// True iff the symmetric matrix (row-major) is positive definite
/// (in-place Cholesky succeeds).
bool is_positive_definite(std::vector<double> a, int n);

/// Shortest-width printf formatting used by the CSV writers; 17 significant
/// digits so rereads are bit-exact.
std::string format_g17(double x);

}  // namespace treelab
