#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"

namespace treelab {

/// A finite tree on vertices {0..n-1}: exactly n-1 edges, connected, no
/// self-loops or repeated edges. Construction validates and names the
/// violated invariant on failure.
class TreeGraph {
public:
    TreeGraph(int n, std::vector<std::pair<int, int>> edges);

    int vertex_count() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
    bool has_edge(int i, int j) const;

    /// Edge map E_T(i, j): 1 iff {i, j} is an edge.
    int edge_map(int i, int j) const { return has_edge(i, j) ? 1 : 0; }

    bool is_path() const;

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

/// One wrist: the meeting vertex, its order (number of pendant chains), the
/// chains listed as vertex paths starting at the wrist, and the complement
/// side V2 (which always contains the wrist itself).
struct Wrist {
    int vertex;
    int order;
    std::vector<std::vector<int>> chains;
    std::vector<int> v2_part;
};

struct WristReport {
    std::vector<Wrist> wrists;
    bool is_chain = false;
};

/// Constructive wrist search: walk from every leaf to the first vertex of
/// degree >= 3 and group the pendant chains by meeting vertex. Paths are
/// reported with their endpoint wrists of order 1 and interior wrists of
/// order 2.
WristReport find_wrists(const TreeGraph& tree);

/// C_k(mu): (k+1)-fold chain integral, evaluated by k matrix-vector products.
double chain_energy(const KernelMatrix& kernel, const DiscreteMeasure& mu, int k);

/// T(mu): exact multilinear tree energy by leaf-to-root message passing.
double tree_energy(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                   const TreeGraph& tree, int root = 0);

/// Direct sum over all M^n index tuples; the independent oracle.
double tree_energy_bruteforce(const KernelMatrix& kernel, const DiscreteMeasure& mu,
                              const TreeGraph& tree,
                              std::size_t tuple_budget = 10'000'000);

}  // namespace treelab
