#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "treelab/kernel.hpp"
#include "treelab/measure.hpp"
#include "treelab/trees.hpp"

namespace treelab {

struct LabeledEdge {
    int u;
    int v;
    double t;
};

/// A configuration graph: k vertices, connected, with a positive distance
/// label on every edge and an ordered pair of joint vertices marking the two
/// attachment roles of the induced hyperedge kernel.
class ConfigGraph {
public:
    ConfigGraph(int k, std::vector<LabeledEdge> edges, std::pair<int, int> joint_pair);

    int vertex_count() const { return k_; }
    const std::vector<LabeledEdge>& labeled_edges() const { return edges_; }
    std::pair<int, int> joint_pair() const { return joint_; }

private:
    int k_;
    std::vector<LabeledEdge> edges_;
    std::pair<int, int> joint_;
};

/// Hyperedge kernel: marginalizes the k-2 non-joint vertices of the
/// configuration against mu.
///   W(i, j) = sum over interior assignments of
///             prod_{edges (a,b,t)} sigma_t^eps(phi(point_a, point_b)) * interior weights,
/// with the joint pair mapped to (p_i, p_j); the result is (1/2)(W(i,j) + W(j,i)).
KernelMatrix config_kernel_matrix(const ConfigGraph& config, const PhiSpec& phi,
                                  double eps, const DiscreteMeasure& mu,
                                  Mollifier mollifier,
                                  std::size_t interior_budget = 10'000'000);

/// Tree of hyperedges joined at single vertices: tree_energy of the
/// hyperedge kernel over the given shape.
double config_tree_energy(const ConfigGraph& config, const PhiSpec& phi, double eps,
                          const DiscreteMeasure& mu, const TreeGraph& shape,
                          Mollifier mollifier,
                          std::size_t interior_budget = 10'000'000);

}  // namespace treelab
