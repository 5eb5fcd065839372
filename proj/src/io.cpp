#include "treelab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "treelab/util.hpp"

namespace treelab {

using nlohmann::json;

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void dump_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace

DiscreteMeasure read_measure_file(const std::filesystem::path& path) {
    json j = load_json(path);
    if (!j.contains("ambient_dim") || !j.contains("points") || !j.contains("weights"))
        throw std::invalid_argument("measure file " + path.string() +
                                    ": needs ambient_dim, points, weights");
    int dim = j.at("ambient_dim").get<int>();
    std::vector<double> flat;
    for (const auto& row : j.at("points")) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("measure file: point row length != ambient_dim");
        for (const auto& c : row) flat.push_back(c.get<double>());
    }
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    std::map<std::string, std::string> meta;
    if (j.contains("meta"))
        for (auto& [k, v] : j.at("meta").items()) meta[k] = v.get<std::string>();
    return DiscreteMeasure(dim, std::move(flat), std::move(weights), std::move(meta));
}

void write_measure_file(const std::filesystem::path& path, const DiscreteMeasure& mu,
                        const Provenance& prov) {
    json j;
    j["ambient_dim"] = mu.ambient_dim();
    json pts = json::array();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        pts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["points"] = std::move(pts);
    std::vector<double> weights = mu.weights();
    double mass = stable_sum(weights);
    for (double& w : weights) w /= mass;
    j["weights"] = std::move(weights);
    json meta = json::object();
    for (auto& [k, v] : mu.meta()) meta[k] = v;
    meta["config_digest"] = prov.config_digest;
    meta["seed"] = std::to_string(prov.seed);
    meta["version"] = prov.version;
    j["meta"] = std::move(meta);
    dump_file(path, j);
}

TreeGraph read_tree_file(const std::filesystem::path& path) {
    json j = load_json(path);
    if (!j.contains("n") || !j.contains("edges"))
        throw std::invalid_argument("tree file " + path.string() + ": needs n and edges");
    int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("tree file: edges must be 2-element arrays");
        edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);  // 1-based on disk
    }
    return TreeGraph(n, std::move(edges));
}

void write_tree_file(const std::filesystem::path& path, const TreeGraph& tree) {
    json j;
    j["n"] = tree.vertex_count();
    json edges = json::array();
    for (auto& [a, b] : tree.edges()) edges.push_back(json::array({a + 1, b + 1}));
    j["edges"] = std::move(edges);
    dump_file(path, j);
}

ConfigGraph read_config_graph_file(const std::filesystem::path& path) {
    json j = load_json(path);
    if (!j.contains("k") || !j.contains("labeled_edges") || !j.contains("joint_pair"))
        throw std::invalid_argument("config-graph file " + path.string() +
                                    ": needs k, labeled_edges, joint_pair");
    int k = j.at("k").get<int>();
    std::vector<LabeledEdge> edges;
    for (const auto& e : j.at("labeled_edges")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("config-graph file: labeled_edges must be [i, j, t]");
        edges.push_back(LabeledEdge{e[0].get<int>() - 1, e[1].get<int>() - 1,
                                    e[2].get<double>()});
    }
    const auto& jp = j.at("joint_pair");
    if (!jp.is_array() || jp.size() != 2)
        throw std::invalid_argument("config-graph file: joint_pair must be [u, v]");
    return ConfigGraph(k, std::move(edges), {jp[0].get<int>() - 1, jp[1].get<int>() - 1});
}

void write_gap_scan_csv(const std::filesystem::path& path, const GapScan& scan,
                        const Provenance& prov, const std::string& params_line) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << "# treelab scan v" << prov.version << "\n";
    out << "# config_digest=" << prov.config_digest << " seed=" << prov.seed << "\n";
    out << "# " << params_line << "\n";
    out << "# note=discrete certificate; kernel approximates delta(phi - t) with the"
           " coarea normalization, not the unit-normalized surface measure\n";
    out << "t,J\n";
    for (std::size_t g = 0; g < scan.t_grid.size(); ++g)
        out << format_g17(scan.t_grid[g]) << "," << format_g17(scan.j_values[g]) << "\n";
    out << "# intervals with J >= " << format_g17(scan.threshold) << ": t_lo,t_hi,min_J\n";
    for (const auto& iv : scan.intervals)
        out << format_g17(iv.t_lo) << "," << format_g17(iv.t_hi) << ","
            << format_g17(iv.min_j) << "\n";
}

void write_spectral_csv(const std::filesystem::path& path, const SpectralReport& report,
                        const Provenance& prov, const std::string& kind) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << "# treelab spectral " << kind << " v" << prov.version << "\n";
    out << "# config_digest=" << prov.config_digest << " seed=" << prov.seed << "\n";
    out << "j,quantity\n";
    for (std::size_t i = 0; i < report.scales.size(); ++i)
        out << report.scales[i] << "," << format_g17(report.quantities[i]) << "\n";
    out << "fit_slope,target_slope,s_declared\n";
    out << format_g17(report.fit_slope) << "," << format_g17(report.target_slope) << ","
        << format_g17(report.s_declared) << "\n";
}

}  // namespace treelab
