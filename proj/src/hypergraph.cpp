#include "treelab/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treelab/util.hpp"

namespace treelab {

ConfigGraph::ConfigGraph(int k, std::vector<LabeledEdge> edges,
                         std::pair<int, int> joint_pair)
    : k_(k), edges_(std::move(edges)), joint_(joint_pair) {
    if (k_ < 2) throw std::invalid_argument("config graph: k must be >= 2");
    if (edges_.empty()) throw std::invalid_argument("config graph: needs at least one edge");
    std::vector<std::vector<bool>> seen(static_cast<std::size_t>(k_),
                                        std::vector<bool>(static_cast<std::size_t>(k_), false));
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(k_));
    for (const auto& e : edges_) {
        if (e.u < 0 || e.u >= k_ || e.v < 0 || e.v >= k_)
            throw std::invalid_argument("config graph: edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("config graph: self-loop");
        if (!(e.t > 0.0)) throw std::invalid_argument("config graph: edge labels must be > 0");
        if (seen[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)])
            throw std::invalid_argument("config graph: duplicate labeled edge");
        seen[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)] = true;
        seen[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)] = true;
        adj[static_cast<std::size_t>(e.u)].push_back(e.v);
        adj[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    auto [ju, jv] = joint_;
    if (ju < 0 || ju >= k_ || jv < 0 || jv >= k_ || ju == jv)
        throw std::invalid_argument("config graph: joint pair must be two distinct vertices");
    std::vector<bool> visited(static_cast<std::size_t>(k_), false);
    std::vector<int> stack{0};
    visited[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!visited[static_cast<std::size_t>(w)]) {
                visited[static_cast<std::size_t>(w)] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != k_) throw std::invalid_argument("config graph: graph is not connected");
}

namespace {

struct MarginalPlan {
    std::vector<int> interior;                       // config vertices != joint
    std::vector<LabeledEdge> joint_edges;            // both endpoints joint
    std::vector<LabeledEdge> mixed_edges;            // at least one interior endpoint
};

MarginalPlan make_plan(const ConfigGraph& config) {
    MarginalPlan plan;
    auto [u, v] = config.joint_pair();
    for (int w = 0; w < config.vertex_count(); ++w)
        if (w != u && w != v) plan.interior.push_back(w);
    for (const auto& e : config.labeled_edges()) {
        bool joint_only = (e.u == u || e.u == v) && (e.v == u || e.v == v);
        (joint_only ? plan.joint_edges : plan.mixed_edges).push_back(e);
    }
    return plan;
}

}  // namespace

KernelMatrix config_kernel_matrix(const ConfigGraph& config, const PhiSpec& phi,
                                  double eps, const DiscreteMeasure& mu,
                                  Mollifier mollifier, std::size_t interior_budget) {
    const int k = config.vertex_count();
    if (k - 2 > 3)
        throw std::invalid_argument("config_kernel_matrix: more than 3 interior vertices");
    if (!(eps > 0.0)) throw std::invalid_argument("config_kernel_matrix: eps must be > 0");
    std::vector<std::string> warnings;
    if (mu.size() >= 2 && eps < mu.resolution_scale())
        warnings.push_back("eps " + format_g17(eps) +
                           " is below the measure's resolution scale " +
                           format_g17(mu.resolution_scale()));

    const std::size_t m = mu.size();
    const MarginalPlan plan = make_plan(config);
    const auto n_int = plan.interior.size();
    std::size_t assignments = 1;
    for (std::size_t a = 0; a < n_int; ++a) {
        if (assignments > interior_budget / std::max<std::size_t>(m, 1) + 1)
            throw std::invalid_argument(
                "config_kernel_matrix: M^(k-2) exceeds the interior budget of " +
                std::to_string(interior_budget));
        assignments *= m;
    }
    if (assignments > interior_budget)
        throw std::invalid_argument("config_kernel_matrix: M^(k-2) exceeds the interior budget of " +
                                    std::to_string(interior_budget));

    auto [ju, jv] = config.joint_pair();

    // W(i, j): joint roles u -> p_i, v -> p_j
    auto half_entry = [&](std::size_t i, std::size_t j) {
        std::vector<std::size_t> slot(static_cast<std::size_t>(k), 0);
        slot[static_cast<std::size_t>(ju)] = i;
        slot[static_cast<std::size_t>(jv)] = j;

        double outer = 1.0;
        for (const auto& e : plan.joint_edges) {
            outer *= shell_value(mollifier,
                                 phi(mu.point(slot[static_cast<std::size_t>(e.u)]),
                                     mu.point(slot[static_cast<std::size_t>(e.v)])),
                                 e.t, eps);
            if (outer == 0.0) return 0.0;
        }
        if (plan.interior.empty()) return outer;

        std::vector<std::size_t> idx(n_int, 0);
        StableSum inner;
        for (std::size_t step = 0; step < assignments; ++step) {
            for (std::size_t a = 0; a < n_int; ++a)
                slot[static_cast<std::size_t>(plan.interior[a])] = idx[a];
            double term = 1.0;
            for (const auto& e : plan.mixed_edges) {
                term *= shell_value(mollifier,
                                    phi(mu.point(slot[static_cast<std::size_t>(e.u)]),
                                        mu.point(slot[static_cast<std::size_t>(e.v)])),
                                    e.t, eps);
                if (term == 0.0) break;
            }
            if (term != 0.0) {
                for (std::size_t a = 0; a < n_int; ++a) term *= mu.weight(idx[a]);
                inner.add(term);
            }
            for (std::size_t a = n_int; a-- > 0;) {
                if (++idx[a] < m) break;
                idx[a] = 0;
            }
        }
        return outer * inner.value();
    };

    std::vector<double> values(m * m, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i + 1; j < m; ++j) {
            double v = 0.5 * (half_entry(i, j) + half_entry(j, i));
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
    }

    std::string prov = "config k=" + std::to_string(k) +
                       " edges=" + std::to_string(config.labeled_edges().size()) +
                       " phi=" + phi.family_name() + " eps=" + format_g17(eps) +
                       " mollifier=" + mollifier_name(mollifier);
    return KernelMatrix(m, std::move(values), std::move(prov), 0.0, 0.0,
                        std::move(warnings));
}

double config_tree_energy(const ConfigGraph& config, const PhiSpec& phi, double eps,
                          const DiscreteMeasure& mu, const TreeGraph& shape,
                          Mollifier mollifier, std::size_t interior_budget) {
    KernelMatrix kernel = config_kernel_matrix(config, phi, eps, mu, mollifier,
                                               interior_budget);
    return tree_energy(kernel, mu, shape);
}

}  // namespace treelab
