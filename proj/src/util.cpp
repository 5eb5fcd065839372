#include "treelab/util.hpp"

#include <algorithm>
#include <cstdio>

namespace treelab {

double dense_determinant(std::vector<double> a, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(pivot) * n + c],
                          a[static_cast<std::size_t>(col) * n + c]);
            det = -det;
        }
        double p = a[static_cast<std::size_t>(col) * n + col];
        det *= p;
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] / p;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -=
                    f * a[static_cast<std::size_t>(col) * n + c];
        }
    }
    return det;
}

bool is_positive_definite(std::vector<double> a, int n) {
    // in-place Cholesky on the lower triangle
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            double l = a[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (!(d > 0.0)) return false;
        double root = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = root;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * n + k] *
                     a[static_cast<std::size_t>(j) * n + k];
            a[static_cast<std::size_t>(i) * n + j] = s / root;
        }
    }
    return true;
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace treelab
