#include "treelab/realization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "treelab/util.hpp"

namespace treelab {

GapScan scan_gap(const PhiSpec& phi, const DiscreteMeasure& mu, double t_min,
                 double t_max, int steps, double eps, double threshold,
                 Mollifier mollifier) {
    if (!(t_min > 0.0) || !(t_max > t_min))
        throw std::invalid_argument("scan_gap: need 0 < t_min < t_max");
    if (steps < 2) throw std::invalid_argument("scan_gap: steps must be >= 2");
    if (!(eps > 0.0)) throw std::invalid_argument("scan_gap: eps must be > 0");

    GapScan scan;
    if (mu.size() >= 2 && eps < mu.resolution_scale())
        scan.warnings.push_back("eps " + format_g17(eps) +
                                " is below the measure's resolution scale " +
                                format_g17(mu.resolution_scale()));
    scan.eps = eps;
    scan.threshold = threshold;
    scan.t_grid.resize(static_cast<std::size_t>(steps));
    scan.j_values.resize(static_cast<std::size_t>(steps), 0.0);
    for (int g = 0; g < steps; ++g)
        scan.t_grid[static_cast<std::size_t>(g)] =
            t_min + (t_max - t_min) * g / (steps - 1);

    const std::size_t m = mu.size();
    std::vector<double> rows(m, 0.0);
    for (int g = 0; g < steps; ++g) {
        const double t = scan.t_grid[static_cast<std::size_t>(g)];
        // J_eps(t) = sum_{i != j} w_i w_j sigma_t^eps(phi(p_i, p_j)); streamed,
        // per-row partials summed in fixed index order.
#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
            auto i = static_cast<std::size_t>(ii);
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
        scan.j_values[static_cast<std::size_t>(g)] = s.value();
    }

    // maximal grid runs with J >= threshold
    int g = 0;
    while (g < steps) {
        if (scan.j_values[static_cast<std::size_t>(g)] >= threshold) {
            int start = g;
            double lo = scan.j_values[static_cast<std::size_t>(g)];
            while (g + 1 < steps && scan.j_values[static_cast<std::size_t>(g + 1)] >= threshold) {
                ++g;
                lo = std::min(lo, scan.j_values[static_cast<std::size_t>(g)]);
            }
            scan.intervals.push_back(GapInterval{scan.t_grid[static_cast<std::size_t>(start)],
                                                 scan.t_grid[static_cast<std::size_t>(g)], lo});
        }
        ++g;
    }
    return scan;
}

namespace {

class BitRows {
public:
    BitRows(std::size_t rows, std::size_t cols)
        : cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

    void set(std::size_t r, std::size_t c) {
        data_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
    }
    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + c / 64] >> (c % 64)) & 1u;
    }
    const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }
    std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
    std::size_t words() const { return words_; }

    bool intersects(std::size_t r, const std::uint64_t* other) const {
        const std::uint64_t* a = row(r);
        for (std::size_t w = 0; w < words_; ++w)
            if (a[w] & other[w]) return true;
        return false;
    }

private:
    std::size_t cols_;
    std::size_t words_;
    std::vector<std::uint64_t> data_;
};

}  // namespace

RealizationResult realize_tree(const DiscreteMeasure& mu, const PhiSpec& phi,
                               double t, double tol, const TreeGraph& tree) {
    if (!(t > 0.0)) throw std::invalid_argument("realize_tree: t must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("realize_tree: tol must be > 0");

    RealizationResult result;
    result.t = t;
    result.tol = tol;

    const std::size_t m = mu.size();
    const int n = tree.vertex_count();
    if (static_cast<std::size_t>(n) > m) return result;  // injectivity impossible

    // threshold adjacency A[i][j] = 1 iff |phi(p_i, p_j) - t| <= tol
    BitRows adj(m, m);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        auto pi = mu.point(i);
        for (std::size_t j = i + 1; j < m; ++j) {
            if (std::abs(phi(pi, mu.point(j)) - t) <= tol) {
                adj.set(i, j);
            }
        }
    }
    // mirror (writes above touch only the upper triangle rows of distinct i)
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (adj.get(i, j)) adj.set(j, i);

    // leaf-to-root candidate filtering: a point supports vertex v if for every
    // child c it has an adjacent point supporting c
    const int root = 0;
    std::vector<int> order, parent(static_cast<std::size_t>(n), -1), stack{root};
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    visited[static_cast<std::size_t>(root)] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int w : tree.adjacency()[static_cast<std::size_t>(v)]) {
            if (!visited[static_cast<std::size_t>(w)]) {
                visited[static_cast<std::size_t>(w)] = true;
                parent[static_cast<std::size_t>(w)] = v;
                stack.push_back(w);
            }
        }
    }

    BitRows cand(static_cast<std::size_t>(n), m);
    std::vector<std::size_t> cand_count(static_cast<std::size_t>(n), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        auto vr = static_cast<std::size_t>(v);
        for (std::size_t p = 0; p < m; ++p) {
            bool ok = true;
            for (int c : tree.adjacency()[vr]) {
                if (parent[static_cast<std::size_t>(c)] != v) continue;
                if (!adj.intersects(p, cand.row(static_cast<std::size_t>(c)))) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                cand.set(vr, p);
                ++cand_count[vr];
            }
        }
        if (cand_count[vr] == 0) return result;  // no support anywhere
    }

    // backtracking in decreasing-constraint order: degree desc, then
    // candidate count asc, then index
    std::vector<int> vorder(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) vorder[static_cast<std::size_t>(v)] = v;
    std::sort(vorder.begin(), vorder.end(), [&](int a, int b) {
        if (tree.degree(a) != tree.degree(b)) return tree.degree(a) > tree.degree(b);
        auto ca = cand_count[static_cast<std::size_t>(a)];
        auto cb = cand_count[static_cast<std::size_t>(b)];
        if (ca != cb) return ca < cb;
        return a < b;
    });

    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(m, false);

    auto consistent = [&](int v, std::size_t p) {
        for (int w : tree.adjacency()[static_cast<std::size_t>(v)]) {
            int q = assign[static_cast<std::size_t>(w)];
            if (q >= 0 && !adj.get(p, static_cast<std::size_t>(q))) return false;
        }
        return true;
    };

    auto search = [&](auto&& self, std::size_t depth) -> bool {
        if (depth == vorder.size()) return true;
        int v = vorder[depth];
        auto vr = static_cast<std::size_t>(v);
        for (std::size_t p = 0; p < m; ++p) {
            if (!cand.get(vr, p) || used[p]) continue;
            if (!consistent(v, p)) continue;
            assign[vr] = static_cast<int>(p);
            used[p] = true;
            if (self(self, depth + 1)) return true;
            assign[vr] = -1;
            used[p] = false;
        }
        return false;
    };

    if (!search(search, 0)) return result;

    result.found = true;
    result.assignment = assign;
    result.residuals.reserve(tree.edges().size());
    for (auto& [a, b] : tree.edges()) {
        auto pa = mu.point(static_cast<std::size_t>(assign[static_cast<std::size_t>(a)]));
        auto pb = mu.point(static_cast<std::size_t>(assign[static_cast<std::size_t>(b)]));
        result.residuals.push_back(std::abs(phi(pa, pb) - t));
    }
    return result;
}

bool verify_realization(const RealizationResult& result, const DiscreteMeasure& mu,
                        const PhiSpec& phi, const TreeGraph& tree) {
    if (!result.found) return false;
    const int n = tree.vertex_count();
    if (result.assignment.size() != static_cast<std::size_t>(n)) return false;
    std::vector<bool> used(mu.size(), false);
    for (int v = 0; v < n; ++v) {
        int p = result.assignment[static_cast<std::size_t>(v)];
        if (p < 0 || static_cast<std::size_t>(p) >= mu.size()) return false;
        if (used[static_cast<std::size_t>(p)]) return false;  // injectivity
        used[static_cast<std::size_t>(p)] = true;
    }
    for (auto& [a, b] : tree.edges()) {
        auto pa = mu.point(static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(a)]));
        auto pb = mu.point(static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(b)]));
        if (std::abs(phi(pa, pb) - result.t) > result.tol) return false;
    }
    return true;
}

}  // namespace treelab
