#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace treelab {

enum class MassRequirement {
    probability,  // total mass must be 1 within 1e-12
    positive,     // any positive total mass (restricted sub-measures)
};

/// A weighted point cloud standing in for a compactly supported measure.
/// Points are pairwise distinct (exact duplicates are merged at construction
/// by summing their weights) and the resolution scale -- the smallest
/// nearest-neighbor distance -- is cached so kernel widths can be validated
/// against it.
class DiscreteMeasure {
public:
    DiscreteMeasure(int ambient_dim, std::vector<double> points_rowmajor,
                    std::vector<double> weights,
                    std::map<std::string, std::string> meta = {},
                    MassRequirement mass_req = MassRequirement::probability);

    int ambient_dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }

    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

    double total_mass() const { return total_mass_; }

    /// Smallest nearest-neighbor distance; 0 for a single-point measure
    /// (no discreteness constraint).
    double resolution_scale() const { return resolution_; }

    const std::map<std::string, std::string>& meta() const { return meta_; }

    /// Parses the "s" meta key (declared Hausdorff dimension), if present.
    std::optional<double> declared_dimension() const;

private:
    int dim_;
    std::vector<double> points_;
    std::vector<double> weights_;
    std::map<std::string, std::string> meta_;
    double total_mass_;
    double resolution_;
};

struct FrostmanReport {
    double exponent;     // s
    double constant;     // sup of mu(B(x,r)) / r^s over the samples
    std::size_t samples; // number of (center, radius) pairs tested
};

enum class CenterPolicy { all_points, sampled };

/// Product Cantor family: per axis the depth-level iterated-function-system
/// points with uniform weights, support inside [0,1]^d. With a jitter seed
/// each subdivision offset is drawn uniformly inside its allowed slot.
DiscreteMeasure gen_cantor_measure(int ambient_dim, int branches_per_axis,
                                   double ratio, int depth,
                                   std::optional<std::uint64_t> jitter_seed = {},
                                   std::size_t point_budget = std::size_t{1} << 20);

FrostmanReport frostman_constant(const DiscreteMeasure& mu, double s,
                                 std::span<const double> radii,
                                 CenterPolicy centers = CenterPolicy::all_points,
                                 std::size_t center_count = 0,
                                 std::uint64_t seed = 0);

/// Off-diagonal s-energy  sum_{i != j} w_i w_j |p_i - p_j|^{-s}.
double riesz_energy(const DiscreteMeasure& mu, double s);

DiscreteMeasure restrict_measure(const DiscreteMeasure& mu,
                                 std::span<const std::size_t> keep,
                                 bool renormalize);

}  // namespace treelab
