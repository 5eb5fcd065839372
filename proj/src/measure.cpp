#include "treelab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "treelab/rng.hpp"
#include "treelab/util.hpp"

namespace treelab {

namespace {

std::string coord_key(std::span<const double> p) {
    std::string key(p.size() * sizeof(double), '\0');
    for (std::size_t i = 0; i < p.size(); ++i) {
        double v = p[i] == 0.0 ? 0.0 : p[i];  // collapse -0.0 onto +0.0
        std::memcpy(key.data() + i * sizeof(double), &v, sizeof(double));
    }
    return key;
}

double min_nearest_neighbor_distance(const std::vector<double>& pts, int dim,
                                     std::size_t m) {
    if (m < 2) return 0.0;
    double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        const double* pi = pts.data() + i * dim;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* pj = pts.data() + j * dim;
            double q = 0.0;
            for (int k = 0; k < dim; ++k) {
                double d = pi[k] - pj[k];
                q += d * d;
            }
            if (q < best) best = q;
        }
    }
    return std::sqrt(best);
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int ambient_dim, std::vector<double> points_rowmajor,
                                 std::vector<double> weights,
                                 std::map<std::string, std::string> meta,
                                 MassRequirement mass_req)
    : dim_(ambient_dim), meta_(std::move(meta)) {
    if (dim_ < 1) throw std::invalid_argument("measure: ambient_dim must be >= 1");
    const std::size_t d = static_cast<std::size_t>(dim_);
    if (points_rowmajor.empty() || points_rowmajor.size() % d != 0)
        throw std::invalid_argument("measure: points array size is not a multiple of ambient_dim");
    const std::size_t m_in = points_rowmajor.size() / d;
    if (weights.size() != m_in)
        throw std::invalid_argument("measure: weights count does not match point count");
    for (double c : points_rowmajor)
        if (!std::isfinite(c)) throw std::invalid_argument("measure: non-finite coordinate");
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("measure: weights must be finite and >= 0");
    }

    // Merge exact duplicates, keeping first-occurrence order.
    std::unordered_map<std::string, std::size_t> seen;
    seen.reserve(m_in * 2);
    points_.reserve(points_rowmajor.size());
    weights_.reserve(m_in);
    for (std::size_t i = 0; i < m_in; ++i) {
        std::span<const double> p{points_rowmajor.data() + i * d, d};
        auto [it, inserted] = seen.emplace(coord_key(p), weights_.size());
        if (inserted) {
            points_.insert(points_.end(), p.begin(), p.end());
            weights_.push_back(weights[i]);
        } else {
            weights_[it->second] += weights[i];
        }
    }

    total_mass_ = stable_sum(weights_);
    if (!(total_mass_ > 0.0))
        throw std::invalid_argument("measure: total mass must be positive");
    if (mass_req == MassRequirement::probability &&
        std::abs(total_mass_ - 1.0) > 1e-12)
        throw std::invalid_argument(
            "measure: weights must sum to 1 within 1e-12 (got " +
            format_g17(total_mass_) + ")");

    resolution_ = min_nearest_neighbor_distance(points_, dim_, weights_.size());
}

std::optional<double> DiscreteMeasure::declared_dimension() const {
    auto it = meta_.find("s");
    if (it == meta_.end()) return std::nullopt;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

DiscreteMeasure gen_cantor_measure(int ambient_dim, int branches_per_axis,
                                   double ratio, int depth,
                                   std::optional<std::uint64_t> jitter_seed,
                                   std::size_t point_budget) {
    const int d = ambient_dim;
    const int m = branches_per_axis;
    const double r = ratio;
    if (d < 1) throw std::invalid_argument("gen_cantor_measure: ambient_dim must be >= 1");
    if (m < 2) throw std::invalid_argument("gen_cantor_measure: branches_per_axis must be >= 2");
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("gen_cantor_measure: ratio must lie in (0, 1)");
    if (m * r > 1.0 + 1e-15)
        throw std::invalid_argument("gen_cantor_measure: m * r > 1 would overlap cells");
    if (depth < 1) throw std::invalid_argument("gen_cantor_measure: depth must be >= 1");

    double count = std::pow(static_cast<double>(m), static_cast<double>(depth) * d);
    if (count > static_cast<double>(point_budget))
        throw std::invalid_argument("gen_cantor_measure: m^(depth*d) exceeds the point budget of " +
                                    std::to_string(point_budget));

    std::optional<Rng> rng;
    if (jitter_seed) rng.emplace(*jitter_seed);

    // Per-axis IFS points. Offsets are either the endpoint-spread values
    // j*(1-r)/(m-1) or, with jitter, uniform draws from the slot
    // [j/m, (j+1)/m - r] that keeps sibling cells disjoint.
    const double slot_width = 1.0 / m - r;
    std::vector<std::vector<double>> axis_points(static_cast<std::size_t>(d));
    for (int axis = 0; axis < d; ++axis) {
        std::vector<double> pts{0.0};
        double scale = 1.0;
        for (int level = 0; level < depth; ++level) {
            std::vector<double> next;
            next.reserve(pts.size() * static_cast<std::size_t>(m));
            for (double p : pts) {
                for (int j = 0; j < m; ++j) {
                    double c;
                    if (rng) {
                        c = static_cast<double>(j) / m + rng->uniform01() * slot_width;
                    } else {
                        c = static_cast<double>(j) * (1.0 - r) / (m - 1);
                    }
                    next.push_back(p + c * scale);
                }
            }
            pts = std::move(next);
            scale *= r;
        }
        axis_points[static_cast<std::size_t>(axis)] = std::move(pts);
    }

    const std::size_t per_axis = axis_points[0].size();
    std::size_t total = 1;
    for (int axis = 0; axis < d; ++axis) total *= per_axis;

    std::vector<double> points;
    points.reserve(total * static_cast<std::size_t>(d));
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t n = 0; n < total; ++n) {
        for (int axis = 0; axis < d; ++axis)
            points.push_back(axis_points[static_cast<std::size_t>(axis)][idx[static_cast<std::size_t>(axis)]]);
        for (int axis = d - 1; axis >= 0; --axis) {
            auto a = static_cast<std::size_t>(axis);
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
        }
    }
    std::vector<double> weights(total, 1.0 / static_cast<double>(total));

    double s = d * std::log(static_cast<double>(m)) / std::log(1.0 / r);
    std::map<std::string, std::string> meta{
        {"family", "cantor_product"},
        {"s", format_g17(s)},
        {"depth", std::to_string(depth)},
        {"branches", std::to_string(m)},
        {"ratio", format_g17(r)},
    };
    if (jitter_seed) meta["jitter_seed"] = std::to_string(*jitter_seed);

    return DiscreteMeasure(d, std::move(points), std::move(weights), std::move(meta));
}

FrostmanReport frostman_constant(const DiscreteMeasure& mu, double s,
                                 std::span<const double> radii,
                                 CenterPolicy centers, std::size_t center_count,
                                 std::uint64_t seed) {
    if (s < 0.0) throw std::invalid_argument("frostman_constant: s must be >= 0");
    if (radii.empty()) throw std::invalid_argument("frostman_constant: empty radii list");
    const double floor = mu.resolution_scale();
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("frostman_constant: radii must be positive");
        if (r < floor)
            throw std::invalid_argument(
                "frostman_constant: radius " + format_g17(r) +
                " is below the measure's resolution scale " + format_g17(floor));
    }

    std::vector<std::size_t> center_idx;
    if (centers == CenterPolicy::all_points || center_count >= mu.size()) {
        center_idx.resize(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) center_idx[i] = i;
    } else {
        if (center_count == 0)
            throw std::invalid_argument("frostman_constant: sampled policy needs center_count > 0");
        Rng rng(seed);
        center_idx.reserve(center_count);
        for (std::size_t i = 0; i < center_count; ++i)
            center_idx.push_back(rng.uniform_index(mu.size()));
    }

    double best = 0.0;
    for (std::size_t ci : center_idx) {
        auto c = mu.point(ci);
        for (double r : radii) {
            const double r2 = r * r;
            StableSum mass;
            for (std::size_t j = 0; j < mu.size(); ++j) {
                if (squared_distance(c, mu.point(j)) <= r2) mass.add(mu.weight(j));
            }
            double ratio = mass.value() / std::pow(r, s);
            if (ratio > best) best = ratio;
        }
    }
    return FrostmanReport{s, best, center_idx.size() * radii.size()};
}

double riesz_energy(const DiscreteMeasure& mu, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("riesz_energy: s must be > 0");
    const std::size_t m = mu.size();
    std::vector<double> row(m, 0.0);
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        auto i = static_cast<std::size_t>(ii);
        auto pi = mu.point(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double dist = euclidean_distance(pi, mu.point(j));
            acc += mu.weight(j) * std::pow(dist, -s);
        }
        row[i] = mu.weight(i) * acc;
    }
    StableSum total;
    for (double v : row) total.add(v);
    return total.value();
}

DiscreteMeasure restrict_measure(const DiscreteMeasure& mu,
                                 std::span<const std::size_t> keep,
                                 bool renormalize) {
    if (keep.empty()) throw std::invalid_argument("restrict_measure: empty index set");
    std::vector<std::size_t> idx(keep.begin(), keep.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (idx.back() >= mu.size())
        throw std::invalid_argument("restrict_measure: index out of range");

    const std::size_t d = static_cast<std::size_t>(mu.ambient_dim());
    std::vector<double> points;
    points.reserve(idx.size() * d);
    std::vector<double> weights;
    weights.reserve(idx.size());
    StableSum kept;
    for (std::size_t i : idx) {
        auto p = mu.point(i);
        points.insert(points.end(), p.begin(), p.end());
        weights.push_back(mu.weight(i));
        kept.add(mu.weight(i));
    }
    const double kept_mass = kept.value();
    if (!(kept_mass > 0.0))
        throw std::invalid_argument("restrict_measure: kept mass is zero");

    auto meta = mu.meta();
    meta["removed_mass"] = format_g17(mu.total_mass() - kept_mass);
    if (renormalize) {
        for (double& w : weights) w /= kept_mass;
        return DiscreteMeasure(mu.ambient_dim(), std::move(points), std::move(weights),
                               std::move(meta), MassRequirement::probability);
    }
    return DiscreteMeasure(mu.ambient_dim(), std::move(points), std::move(weights),
                           std::move(meta), MassRequirement::positive);
}

}  // namespace treelab
