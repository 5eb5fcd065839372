#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "treelab/hypergraph.hpp"
#include "treelab/measure.hpp"
#include "treelab/realization.hpp"
#include "treelab/spectral.hpp"
#include "treelab/trees.hpp"
#include "treelab/util.hpp"

namespace treelab {

struct Provenance {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string version = kVersion;
};

/// 64-bit FNV-1a, hex-encoded; the config digest.
std::string fnv1a_hex(std::string_view data);

// Measure files: JSON with ambient_dim, points (array of arrays, row-major),
// weights, optional meta (string map). The writer emits weights normalized;
// the reader re-validates every invariant and fails loudly.
DiscreteMeasure read_measure_file(const std::filesystem::path& path);
void write_measure_file(const std::filesystem::path& path, const DiscreteMeasure& mu,
                        const Provenance& prov);

// Tree files: JSON with n and edges (1-based vertex pairs).
TreeGraph read_tree_file(const std::filesystem::path& path);
void write_tree_file(const std::filesystem::path& path, const TreeGraph& tree);

// Config-graph files: JSON with k, labeled_edges ([i, j, t], 1-based) and
// joint_pair ([u, v], 1-based).
ConfigGraph read_config_graph_file(const std::filesystem::path& path);

void write_gap_scan_csv(const std::filesystem::path& path, const GapScan& scan,
                        const Provenance& prov, const std::string& params_line);

void write_spectral_csv(const std::filesystem::path& path, const SpectralReport& report,
                        const Provenance& prov, const std::string& kind);

}  // namespace treelab
