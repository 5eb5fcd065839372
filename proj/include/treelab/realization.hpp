#pragma once

#include <vector>

#include "treelab/measure.hpp"
#include "treelab/phi.hpp"
#include "treelab/trees.hpp"

namespace treelab {

struct GapInterval {
    double t_lo;
    double t_hi;
    double min_j;
};

/// The curve t -> J_eps(t) on a uniform grid, with the maximal sub-intervals
/// where J stays at or above the threshold. A positive interval is a discrete
/// certificate, not a continuum proof.
struct GapScan {
    std::vector<double> t_grid;
    std::vector<double> j_values;
    double eps = 0.0;
    double threshold = 0.0;
    std::vector<GapInterval> intervals;
    std::vector<std::string> warnings;
};

GapScan scan_gap(const PhiSpec& phi, const DiscreteMeasure& mu, double t_min,
                 double t_max, int steps, double eps, double threshold,
                 Mollifier mollifier = Mollifier::box);

/// An explicit tree embedding: assignment[v] is the point index realizing
/// tree vertex v, residuals follow the tree's edge order.
struct RealizationResult {
    std::vector<int> assignment;
    std::vector<double> residuals;
    double t = 0.0;
    double tol = 0.0;
    bool found = false;
};

/// Finds an injective assignment with |phi(p_i, p_j) - t| <= tol on every
/// tree edge: leaf-to-root candidate filtering, then backtracking in
/// decreasing-constraint order. Infeasibility is a result, not an error.
RealizationResult realize_tree(const DiscreteMeasure& mu, const PhiSpec& phi,
                               double t, double tol, const TreeGraph& tree);

/// Recomputes every residual from scratch and re-checks injectivity.
bool verify_realization(const RealizationResult& result, const DiscreteMeasure& mu,
                        const PhiSpec& phi, const TreeGraph& tree);

}  // namespace treelab
