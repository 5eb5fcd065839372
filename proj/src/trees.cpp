#include "treelab/trees.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treelab/operators.hpp"
#include "treelab/util.hpp"

namespace treelab {

TreeGraph::TreeGraph(int n, std::vector<std::pair<int, int>> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ < 2) throw std::invalid_argument("tree: needs at least 2 vertices");
    if (edges_.size() != static_cast<std::size_t>(n_ - 1))
        throw std::invalid_argument("tree: edge count " + std::to_string(edges_.size()) +
                                    " != n - 1 = " + std::to_string(n_ - 1));
    adj_.assign(static_cast<std::size_t>(n_), {});
    std::vector<std::vector<bool>> seen(static_cast<std::size_t>(n_),
                                        std::vector<bool>(static_cast<std::size_t>(n_), false));
    for (auto& [a, b] : edges_) {
        if (a < 0 || a >= n_ || b < 0 || b >= n_)
            throw std::invalid_argument("tree: edge endpoint out of range");
        if (a == b) throw std::invalid_argument("tree: self-loop");
        if (seen[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
            throw std::invalid_argument("tree: repeated edge");
        seen[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        seen[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
        adj_[static_cast<std::size_t>(a)].push_back(b);
        adj_[static_cast<std::size_t>(b)].push_back(a);
    }
    // connectivity (with n-1 edges and no multi-edges this also forces acyclicity)
    std::vector<bool> visited(static_cast<std::size_t>(n_), false);
    std::vector<int> stack{0};
    visited[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj_[static_cast<std::size_t>(v)]) {
            if (!visited[static_cast<std::size_t>(w)]) {
                visited[static_cast<std::size_t>(w)] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != n_) throw std::invalid_argument("tree: graph is not connected");
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool TreeGraph::has_edge(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) return false;
    const auto& nb = adj_[static_cast<std::size_t>(i)];
    return std::binary_search(nb.begin(), nb.end(), j);
}

bool TreeGraph::is_path() const {
    for (int v = 0; v < n_; ++v)
        if (degree(v) > 2) return false;
    return true;
}

namespace {

// Walk from a leaf through degree-2 vertices; returns the chain from the
// meeting vertex (first vertex of degree >= 3) back to the leaf, or an empty
// vector if the tree is a path.
std::vector<int> pendant_chain(const TreeGraph& tree, int leaf) {
    std::vector<int> walk{leaf};
    int prev = -1, cur = leaf;
    while (tree.degree(cur) < 3) {
        int next = -1;
        for (int w : tree.adjacency()[static_cast<std::size_t>(cur)]) {
            if (w != prev) {
                next = w;
                break;
            }
        }
        if (next == -1) return {};  // ran off the other end: path
        prev = cur;
        cur = next;
        walk.push_back(cur);
    }
    std::reverse(walk.begin(), walk.end());  // now starts at the meeting vertex
    return walk;
}

std::vector<int> complement_plus(const TreeGraph& tree, const std::vector<int>& v1,
                                 int w) {
    std::vector<bool> in_v1(static_cast<std::size_t>(tree.vertex_count()), false);
    for (int v : v1) in_v1[static_cast<std::size_t>(v)] = true;
    std::vector<int> v2{w};
    for (int v = 0; v < tree.vertex_count(); ++v)
        if (!in_v1[static_cast<std::size_t>(v)]) v2.push_back(v);
    std::sort(v2.begin(), v2.end());
    return v2;
}

}  // namespace

WristReport find_wrists(const TreeGraph& tree) {
    WristReport report;
    const int n = tree.vertex_count();

    if (tree.is_path()) {
        report.is_chain = true;
        for (int v = 0; v < n; ++v) {
            if (tree.degree(v) == 1) {
                // endpoint: one chain running down the whole path
                std::vector<int> chain{v};
                int prev = v;
                int cur = tree.adjacency()[static_cast<std::size_t>(v)].front();
                chain.push_back(cur);
                while (tree.degree(cur) == 2) {
                    for (int w : tree.adjacency()[static_cast<std::size_t>(cur)]) {
                        if (w != prev) {
                            prev = cur;
                            cur = w;
                            break;
                        }
                    }
                    chain.push_back(cur);
                }
                report.wrists.push_back(Wrist{v, 1, {chain}, {v}});
            } else {
                // interior: two chains, one toward each endpoint
                std::vector<std::vector<int>> chains;
                for (int start : tree.adjacency()[static_cast<std::size_t>(v)]) {
                    std::vector<int> chain{v, start};
                    int prev = v, cur = start;
                    while (tree.degree(cur) == 2) {
                        for (int w : tree.adjacency()[static_cast<std::size_t>(cur)]) {
                            if (w != prev) {
                                prev = cur;
                                cur = w;
                                break;
                            }
                        }
                        chain.push_back(cur);
                    }
                    chains.push_back(std::move(chain));
                }
                report.wrists.push_back(Wrist{v, 2, std::move(chains), {v}});
            }
        }
        return report;
    }

    // group pendant chains by the first degree->=3 vertex they meet
    std::vector<std::vector<std::vector<int>>> chains_at(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        if (tree.degree(v) != 1) continue;
        std::vector<int> chain = pendant_chain(tree, v);
        if (chain.empty()) continue;
        chains_at[static_cast<std::size_t>(chain.front())].push_back(std::move(chain));
    }
    for (int w = 0; w < n; ++w) {
        auto& chains = chains_at[static_cast<std::size_t>(w)];
        if (chains.size() < 2) continue;
        std::vector<int> v1{w};
        for (const auto& c : chains) v1.insert(v1.end(), c.begin() + 1, c.end());
        report.wrists.push_back(Wrist{w, static_cast<int>(chains.size()), chains,
                                      complement_plus(tree, v1, w)});
    }
    return report;
}

double chain_energy(const KernelMatrix& kernel, const DiscreteMeasure& mu, int k) {
    if (k < 1) throw std::invalid_argument("chain_energy: k must be >= 1");
    if (kernel.size() != mu.size())
        throw std::invalid_argument("chain_energy: size mismatch");
    std::vector<double> v(mu.size(), 1.0);
    for (int step = 0; step < k; ++step) v = apply_UK(kernel, mu, v);
    StableSum s;
    for (std::size_t i = 0; i < mu.size(); ++i) s.add(mu.weight(i) * v[i]);
    return s.value();
}

double tree_energy(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                   const TreeGraph& tree, int root) {
    const std::size_t m = mu.size();
    if (kernel.size() != m) throw std::invalid_argument("tree_energy: size mismatch");
    const int n = tree.vertex_count();
    if (root < 0 || root >= n) throw std::invalid_argument("tree_energy: bad root");

    // post-order traversal from the root
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

    // message at v: product over children c of (U_K m_c)(p_i)
    std::vector<std::vector<double>> message(static_cast<std::size_t>(n));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        std::vector<double> msg(m, 1.0);
        for (int c : tree.adjacency()[static_cast<std::size_t>(v)]) {
            if (parent[static_cast<std::size_t>(c)] != v) continue;
            const auto& child_msg = message[static_cast<std::size_t>(c)];
#pragma omp parallel for schedule(static)
            for (long long pp = 0; pp < static_cast<long long>(m); ++pp) {
                auto i = static_cast<std::size_t>(pp);
                auto row = kernel.row(i);
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    acc += row[j] * child_msg[j] * mu.weight(j);
                msg[i] *= acc;
            }
            message[static_cast<std::size_t>(c)].clear();
        }
        message[static_cast<std::size_t>(v)] = std::move(msg);
    }

    StableSum total;
    const auto& root_msg = message[static_cast<std::size_t>(root)];
    for (std::size_t i = 0; i < m; ++i) total.add(mu.weight(i) * root_msg[i]);
    return total.value();
}

double tree_energy_bruteforce(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                              const TreeGraph& tree, std::size_t tuple_budget) {
    const std::size_t m = mu.size();
    if (kernel.size() != m)
        throw std::invalid_argument("tree_energy_bruteforce: size mismatch");
    const int n = tree.vertex_count();
    std::size_t count = 1;
    for (int v = 0; v < n; ++v) {
        if (count > tuple_budget / m + 1)
            throw std::invalid_argument(
                "tree_energy_bruteforce: M^n exceeds the tuple budget of " +
                std::to_string(tuple_budget));
        count *= m;
    }
    if (count > tuple_budget)
        throw std::invalid_argument("tree_energy_bruteforce: M^n exceeds the tuple budget of " +
                                    std::to_string(tuple_budget));

    const auto& edges = tree.edges();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    StableSum total;
    for (std::size_t step = 0; step < count; ++step) {
        double term = 1.0;
        for (auto& [a, b] : edges) {
            term *= kernel(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
            if (term == 0.0) break;
        }
        if (term != 0.0) {
            for (int v = 0; v < n; ++v) term *= mu.weight(idx[static_cast<std::size_t>(v)]);
            total.add(term);
        }
        for (int v = n - 1; v >= 0; --v) {
            auto a = static_cast<std::size_t>(v);
            if (++idx[a] < m) break;
            idx[a] = 0;
        }
    }
    return total.value();
}

}  // namespace treelab
