#include "treelab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "treelab/io.hpp"
#include "treelab/operators.hpp"
#include "treelab/realization.hpp"
#include "treelab/util.hpp"

namespace treelab {

namespace {

using nlohmann::json;

constexpr const char* kNormalizationNote =
    "kernel approximates delta(phi - t) with the coarea normalization, "
    "not the unit-normalized surface measure";

struct CliFlags {
    std::string config_path;
    std::string measure_path;
    std::string tree_path;
    std::string out_path;
    std::string phi_family;
    std::optional<double> t, eps, tol, threshold, t_min, t_max;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
};

json merged_config(const std::string& command, const CliFlags& flags) {
    json cfg = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + flags.config_path);
        try {
            in >> cfg;
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("invalid JSON config: ") + e.what());
        }
    }
    cfg["command"] = command;
    if (!flags.measure_path.empty()) cfg["measure"] = json{{"path", flags.measure_path}};
    if (!flags.tree_path.empty()) cfg["tree"] = json{{"path", flags.tree_path}};
    if (!flags.phi_family.empty()) cfg["kernel"]["phi"]["family"] = flags.phi_family;
    if (flags.t) cfg["kernel"]["t"] = *flags.t;
    if (flags.eps) cfg["kernel"]["eps"] = *flags.eps;
    if (flags.t_min) cfg["scan"]["t_min"] = *flags.t_min;
    if (flags.t_max) cfg["scan"]["t_max"] = *flags.t_max;
    if (flags.steps) cfg["scan"]["steps"] = *flags.steps;
    if (flags.threshold) cfg["scan"]["threshold"] = *flags.threshold;
    if (flags.tol) cfg["tol"] = *flags.tol;
    if (flags.seed) cfg["seed"] = *flags.seed;
    if (flags.budget) cfg["budget"] = *flags.budget;
    return cfg;
}

std::uint64_t config_seed(const json& cfg) {
    return cfg.value("seed", std::uint64_t{0});
}

std::size_t config_budget(const json& cfg) {
    return cfg.value("budget", std::size_t{10'000'000});
}

DiscreteMeasure load_measure(const json& cfg) {
    if (!cfg.contains("measure"))
        throw std::invalid_argument("config: a measure block or --measure path is required");
    const json& m = cfg.at("measure");
    if (m.contains("path")) return read_measure_file(m.at("path").get<std::string>());
    if (m.contains("generator")) {
        const json& g = m.at("generator");
        std::optional<std::uint64_t> jitter;
        if (g.contains("jitter_seed") && !g.at("jitter_seed").is_null())
            jitter = g.at("jitter_seed").get<std::uint64_t>();
        return gen_cantor_measure(g.at("ambient_dim").get<int>(),
                                  g.at("branches").get<int>(),
                                  g.at("ratio").get<double>(), g.at("depth").get<int>(),
                                  jitter, config_budget(cfg));
    }
    if (m.contains("points")) {
        int dim = m.at("ambient_dim").get<int>();
        std::vector<double> flat;
        for (const auto& row : m.at("points")) {
            if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
                throw std::invalid_argument("config measure: point row length != ambient_dim");
            for (const auto& c : row) flat.push_back(c.get<double>());
        }
        std::map<std::string, std::string> meta;
        if (m.contains("meta"))
            for (auto& [k, v] : m.at("meta").items()) meta[k] = v.get<std::string>();
        return DiscreteMeasure(dim, std::move(flat),
                               m.at("weights").get<std::vector<double>>(), std::move(meta));
    }
    throw std::invalid_argument("config measure: needs path, generator, or inline points");
}

PhiSpec load_phi(const json& cfg, int dim) {
    std::string family = "euclidean";
    if (cfg.contains("kernel") && cfg.at("kernel").contains("phi"))
        family = cfg.at("kernel").at("phi").value("family", "euclidean");
    switch (phi_family_from_name(family)) {
        case PhiFamily::euclidean:
            return PhiSpec::euclidean(dim);
        case PhiFamily::quadratic_form: {
            const json& p = cfg.at("kernel").at("phi");
            if (!p.contains("q"))
                throw std::invalid_argument("config: quadratic_form phi needs a q matrix");
            std::vector<double> q;
            for (const auto& row : p.at("q"))
                for (const auto& c : row) q.push_back(c.get<double>());
            return PhiSpec::quadratic_form(dim, std::move(q));
        }
        case PhiFamily::perturbed_euclidean: {
            const json& p = cfg.at("kernel").at("phi");
            if (!p.contains("eta") || !p.contains("kappa"))
                throw std::invalid_argument("config: perturbed_euclidean phi needs eta and kappa");
            return PhiSpec::perturbed_euclidean(dim, p.at("eta").get<double>(),
                                                p.at("kappa").get<std::vector<double>>());
        }
    }
    throw std::invalid_argument("config: unknown phi family");
}

KernelSpec load_kernel_spec(const json& cfg, const DiscreteMeasure& mu) {
    if (!cfg.contains("kernel") || !cfg.at("kernel").contains("t") ||
        !cfg.at("kernel").contains("eps"))
        throw std::invalid_argument("config: kernel block with t and eps is required");
    const json& k = cfg.at("kernel");
    Mollifier moll = mollifier_from_name(k.value("mollifier", "box"));
    return make_kernel_spec(load_phi(cfg, mu.ambient_dim()), k.at("t").get<double>(),
                            k.at("eps").get<double>(), moll);
}

TreeGraph load_tree(const json& cfg) {
    if (!cfg.contains("tree"))
        throw std::invalid_argument("config: a tree block or --tree path is required");
    const json& t = cfg.at("tree");
    if (t.contains("path")) return read_tree_file(t.at("path").get<std::string>());
    if (!t.contains("n") || !t.contains("edges"))
        throw std::invalid_argument("config tree: needs n and edges (1-based)");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : t.at("edges"))
        edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
    return TreeGraph(t.at("n").get<int>(), std::move(edges));
}

ConfigGraph load_config_graph(const json& cfg) {
    if (!cfg.contains("config_graph"))
        throw std::invalid_argument("config: a config_graph block is required");
    const json& g = cfg.at("config_graph");
    if (g.contains("path")) return read_config_graph_file(g.at("path").get<std::string>());
    if (!g.contains("k") || !g.contains("labeled_edges") || !g.contains("joint_pair"))
        throw std::invalid_argument("config_graph: needs k, labeled_edges, joint_pair");
    std::vector<LabeledEdge> edges;
    for (const auto& e : g.at("labeled_edges"))
        edges.push_back(LabeledEdge{e[0].get<int>() - 1, e[1].get<int>() - 1,
                                    e[2].get<double>()});
    return ConfigGraph(g.at("k").get<int>(), std::move(edges),
                       {g.at("joint_pair")[0].get<int>() - 1,
                        g.at("joint_pair")[1].get<int>() - 1});
}

Provenance make_provenance(const json& cfg) {
    Provenance prov;
    prov.config_digest = fnv1a_hex(cfg.dump());
    prov.seed = config_seed(cfg);
    return prov;
}

json provenance_json(const Provenance& prov) {
    return json{{"config_digest", prov.config_digest},
                {"seed", prov.seed},
                {"version", prov.version}};
}

json kernel_summary_json(const KernelMatrix& kernel) {
    json j{{"max_entry", kernel.max_entry()},
           {"nonzero_count", kernel.nonzero_count()},
           {"dropped_mass_bound", kernel.dropped_mass_bound()},
           {"provenance", kernel.provenance()}};
    if (!kernel.warnings().empty()) j["warnings"] = kernel.warnings();
    return j;
}

void write_json_report(const std::string& path, const json& report) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write report file: " + path);
    out << report.dump(2) << "\n";
}

std::string out_or(const CliFlags& flags, const std::string& fallback) {
    return flags.out_path.empty() ? fallback : flags.out_path;
}

int cmd_gen_measure(const json& cfg, const CliFlags& flags, std::ostream& out) {
    if (!cfg.contains("measure") || !cfg.at("measure").contains("generator"))
        throw std::invalid_argument("gen-measure: config needs a measure.generator block");
    DiscreteMeasure mu = load_measure(cfg);
    Provenance prov = make_provenance(cfg);
    std::string path = out_or(flags, "measure.json");
    write_measure_file(path, mu, prov);
    out << "wrote " << path << " (" << mu.size() << " points, resolution scale "
        << format_g17(mu.resolution_scale()) << ")\n";
    return 0;
}

int cmd_check(const json& cfg, const CliFlags& flags, std::ostream& out) {
    DiscreteMeasure mu = load_measure(cfg);
    KernelSpec spec = load_kernel_spec(cfg, mu);
    Provenance prov = make_provenance(cfg);
    const json& ck = cfg.contains("check") ? cfg.at("check") : json::object();
    double tol = cfg.value("tol", ck.value("tol", 1e-10));
    int max_iter = ck.value("max_iter", 10000);
    int ma_samples = ck.value("ma_samples", 64);
    double alpha = cfg.value("alpha", spec.phi.default_alpha());
    const int d = mu.ambient_dim();

    KernelMatrix kernel = assemble_kernel_matrix(spec, mu,
                                                 cfg.at("kernel").value("drop_below", 0.0));
    AssumptionReport ar = operator_norm(kernel, mu, tol, max_iter);
    double ma = monge_ampere_min_det(spec.phi, spec.t, ma_samples, prov.seed);

    json report;
    report["provenance"] = provenance_json(prov);
    report["normalization_note"] = kNormalizationNote;
    report["kernel_summary"] = kernel_summary_json(kernel);
    report["assumption_report"] = json{{"c_lower", ar.c_lower},
                                       {"c_norm", ar.c_norm},
                                       {"iterations", ar.iterations},
                                       {"norm_residual", ar.norm_residual}};
    report["assumption1_holds"] = ar.c_lower > 0.0;
    report["assumption2_holds"] = true;  // norm estimation converged if we got here
    report["monge_ampere_min_det"] = ma;
    json thresholds{{"tree_realization_dimension_general", d - alpha},
                    {"tree_realization_dimension_euclidean", (d + 1) / 2.0},
                    {"alpha_declared", alpha}};
    if (d >= 4)
        thresholds["triangle_congruence_interior_dimension"] = (2.0 * d + 3.0) / 3.0;
    report["thresholds"] = std::move(thresholds);

    int code = 0;
    if (ar.c_lower > 0.0) {
        auto [refined, rr] = refine_measure(kernel, mu, std::nullopt, tol, max_iter);
        report["refinement_report"] = json{{"n_param", rr.n_param},
                                           {"lambda", rr.lambda},
                                           {"removed_mass", rr.removed_mass},
                                           {"c_lower_after", rr.c_lower_after},
                                           {"kept_count", rr.kept_indices.size()},
                                           {"kept_indices", rr.kept_indices}};
    } else {
        report["refinement_report"] = nullptr;
        code = 2;  // assumption (1) fails: a legal negative outcome
    }

    std::string path = out_or(flags, "check.json");
    write_json_report(path, report);
    out << "c_lower=" << format_g17(ar.c_lower) << " c_norm=" << format_g17(ar.c_norm)
        << " monge_ampere_min_det=" << format_g17(ma) << " -> " << path << "\n";
    return code;
}

int cmd_scan(const json& cfg, const CliFlags& flags, std::ostream& out) {
    DiscreteMeasure mu = load_measure(cfg);
    if (!cfg.contains("scan"))
        throw std::invalid_argument("scan: needs t_min/t_max/steps (flags or config)");
    const json& sc = cfg.at("scan");
    if (!sc.contains("t_min") || !sc.contains("t_max") || !sc.contains("steps"))
        throw std::invalid_argument("scan: needs t_min, t_max and steps");
    double eps = 0.0;
    if (cfg.contains("kernel") && cfg.at("kernel").contains("eps"))
        eps = cfg.at("kernel").at("eps").get<double>();
    else
        throw std::invalid_argument("scan: needs kernel.eps (or --eps)");
    Mollifier moll = Mollifier::box;
    if (cfg.contains("kernel"))
        moll = mollifier_from_name(cfg.at("kernel").value("mollifier", "box"));
    PhiSpec phi = load_phi(cfg, mu.ambient_dim());
    double threshold = sc.value("threshold", 0.0);

    GapScan scan = scan_gap(phi, mu, sc.at("t_min").get<double>(),
                            sc.at("t_max").get<double>(), sc.at("steps").get<int>(), eps,
                            threshold, moll);

    Provenance prov = make_provenance(cfg);
    std::ostringstream params;
    params << "phi=" << phi.family_name() << " t_min=" << format_g17(scan.t_grid.front())
           << " t_max=" << format_g17(scan.t_grid.back()) << " steps=" << scan.t_grid.size()
           << " eps=" << format_g17(eps) << " mollifier=" << mollifier_name(moll)
           << " threshold=" << format_g17(threshold);
    std::string path = out_or(flags, "scan.csv");
    write_gap_scan_csv(path, scan, prov, params.str());
    out << scan.intervals.size() << " interval(s) with J >= " << format_g17(threshold)
        << " -> " << path << "\n";
    return scan.intervals.empty() ? 2 : 0;
}

int cmd_tree_energy(const json& cfg, const CliFlags& flags, std::ostream& out) {
    DiscreteMeasure mu = load_measure(cfg);
    TreeGraph tree = load_tree(cfg);
    KernelSpec spec = load_kernel_spec(cfg, mu);
    Provenance prov = make_provenance(cfg);
    double tol = cfg.value("tol", 1e-10);

    KernelMatrix kernel = assemble_kernel_matrix(spec, mu,
                                                 cfg.at("kernel").value("drop_below", 0.0));
    double energy = tree_energy(kernel, mu, tree);
    AssumptionReport ar = operator_norm(kernel, mu, tol, 10000);

    json report;
    report["provenance"] = provenance_json(prov);
    report["normalization_note"] = kNormalizationNote;
    report["kernel_summary"] = kernel_summary_json(kernel);
    report["tree_energy"] = energy;
    report["assumption_report"] = json{{"c_lower", ar.c_lower},
                                       {"c_norm", ar.c_norm},
                                       {"iterations", ar.iterations},
                                       {"norm_residual", ar.norm_residual}};
    if (ar.c_lower > 0.0) {
        auto [refined, rr] = refine_measure(kernel, mu, std::nullopt, tol, 10000);
        KernelMatrix refined_kernel = assemble_kernel_matrix(
            spec, refined, cfg.at("kernel").value("drop_below", 0.0));
        report["refinement_report"] = json{{"n_param", rr.n_param},
                                           {"lambda", rr.lambda},
                                           {"removed_mass", rr.removed_mass},
                                           {"c_lower_after", rr.c_lower_after},
                                           {"kept_count", rr.kept_indices.size()}};
        report["tree_energy_refined"] = tree_energy(refined_kernel, refined, tree);
    } else {
        report["refinement_report"] = nullptr;
        report["tree_energy_refined"] = nullptr;
    }

    std::string path = out_or(flags, "tree_energy.json");
    write_json_report(path, report);
    out << "T(mu)=" << format_g17(energy) << " -> " << path << "\n";
    return 0;
}

int cmd_realize(const json& cfg, const CliFlags& flags, std::ostream& out) {
    DiscreteMeasure mu = load_measure(cfg);
    TreeGraph tree = load_tree(cfg);
    PhiSpec phi = load_phi(cfg, mu.ambient_dim());
    const json& rz = cfg.contains("realize") ? cfg.at("realize") : json::object();
    double t = cfg.contains("kernel") && cfg.at("kernel").contains("t")
                   ? cfg.at("kernel").at("t").get<double>()
                   : rz.value("t", 0.0);
    double tol = cfg.value("tol", rz.value("tol", 0.0));
    if (!(t > 0.0)) throw std::invalid_argument("realize: needs a gap t > 0 (--t)");
    if (!(tol > 0.0)) throw std::invalid_argument("realize: needs a tolerance > 0 (--tol)");

    RealizationResult result = realize_tree(mu, phi, t, tol, tree);
    bool verified = result.found && verify_realization(result, mu, phi, tree);

    Provenance prov = make_provenance(cfg);
    json report;
    report["provenance"] = provenance_json(prov);
    report["note"] = "discrete certificate";
    report["found"] = result.found;
    report["t"] = t;
    report["tol"] = tol;
    if (result.found) {
        json assignment = json::array();
        for (int v = 0; v < tree.vertex_count(); ++v) {
            int p = result.assignment[static_cast<std::size_t>(v)];
            auto coords = mu.point(static_cast<std::size_t>(p));
            assignment.push_back(json{{"vertex", v + 1},
                                      {"point_index", p},
                                      {"coords", std::vector<double>(coords.begin(), coords.end())}});
        }
        report["assignment"] = std::move(assignment);
        report["residuals"] = result.residuals;
        report["verified"] = verified;
    }

    std::string path = out_or(flags, "realize.json");
    write_json_report(path, report);
    out << (result.found ? "found" : "not found") << " -> " << path << "\n";
    return result.found ? 0 : 2;
}

int cmd_wrist(const json& cfg, const CliFlags& flags, std::ostream& out) {
    TreeGraph tree = load_tree(cfg);
    WristReport report = find_wrists(tree);
    Provenance prov = make_provenance(cfg);

    json j;
    j["provenance"] = provenance_json(prov);
    j["is_chain"] = report.is_chain;
    json wrists = json::array();
    for (const auto& w : report.wrists) {
        json chains = json::array();
        for (const auto& c : w.chains) {
            json chain = json::array();
            for (int v : c) chain.push_back(v + 1);
            chains.push_back(std::move(chain));
        }
        json v2 = json::array();
        for (int v : w.v2_part) v2.push_back(v + 1);
        wrists.push_back(json{{"vertex", w.vertex + 1},
                              {"order", w.order},
                              {"chains", std::move(chains)},
                              {"v2_part", std::move(v2)}});
    }
    j["wrists"] = std::move(wrists);

    std::string path = out_or(flags, "wrist.json");
    write_json_report(path, j);
    out << report.wrists.size() << " wrist(s)"
        << (report.is_chain ? " (tree is a chain)" : "") << " -> " << path << "\n";
    return 0;
}

int cmd_config_energy(const json& cfg, const CliFlags& flags, std::ostream& out) {
    DiscreteMeasure mu = load_measure(cfg);
    ConfigGraph config = load_config_graph(cfg);
    PhiSpec phi = load_phi(cfg, mu.ambient_dim());
    if (!cfg.contains("kernel") || !cfg.at("kernel").contains("eps"))
        throw std::invalid_argument("config-energy: needs kernel.eps (or --eps)");
    double eps = cfg.at("kernel").at("eps").get<double>();
    Mollifier moll = mollifier_from_name(cfg.at("kernel").value("mollifier", "box"));
    // default shape: a single hyperedge (2-vertex path)
    TreeGraph shape = cfg.contains("tree") ? load_tree(cfg) : TreeGraph(2, {{0, 1}});

    KernelMatrix kernel = config_kernel_matrix(config, phi, eps, mu, moll,
                                               config_budget(cfg));
    double energy = tree_energy(kernel, mu, shape);

    Provenance prov = make_provenance(cfg);
    json report;
    report["provenance"] = provenance_json(prov);
    report["normalization_note"] = kNormalizationNote;
    report["kernel_summary"] = kernel_summary_json(kernel);
    report["config_tree_energy"] = energy;
    report["shape_vertices"] = shape.vertex_count();

    std::string path = out_or(flags, "config_energy.json");
    write_json_report(path, report);
    out << "config tree energy " << format_g17(energy) << " -> " << path << "\n";
    return 0;
}

int cmd_spectral(const json& cfg, const CliFlags& flags, std::ostream& out,
                 std::ostream& err) {
    DiscreteMeasure mu = load_measure(cfg);
    const json& sp = cfg.contains("spectral") ? cfg.at("spectral") : json::object();
    int grid_log2 = sp.value("grid_log2", 12);
    int j_min = sp.value("j_min", 2);
    int j_max = sp.value("j_max", std::min(7, grid_log2 - 1));
    Mollifier bump = mollifier_from_name(sp.value("bump", "smooth_bump"));

    SpectralReport annulus = annulus_energies(mu, grid_log2, {j_min, j_max});
    SpectralReport norms = scale_operator_norms(mu, {j_min, j_max}, bump);
    if (norms.scales.size() < static_cast<std::size_t>(j_max - j_min + 1))
        err << "warning: scales below the resolution floor "
            << format_g17(mu.resolution_scale()) << " were skipped\n";

    Provenance prov = make_provenance(cfg);
    std::string prefix = out_or(flags, "spectral");
    write_spectral_csv(prefix + ".annulus.csv", annulus, prov, "annulus");
    write_spectral_csv(prefix + ".ujnorm.csv", norms, prov, "ujnorm");
    out << "annulus slope " << format_g17(annulus.fit_slope) << ", U_j slope "
        << format_g17(norms.fit_slope) << " (target " << format_g17(annulus.target_slope)
        << ") -> " << prefix << ".annulus.csv, " << prefix << ".ujnorm.csv\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
    CLI::App app{"treelab: a numeric laboratory for tree and hypergraph "
                 "configuration energies on discrete fractal measures"};
    app.require_subcommand(1);

    CliFlags flags;
    const std::vector<std::string> commands = {"gen-measure", "check",        "scan",
                                               "tree-energy", "realize",      "wrist",
                                               "config-energy", "spectral"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path, "experiment config file (JSON)");
        sub->add_option("--measure", flags.measure_path, "measure file (JSON)");
        sub->add_option("--tree", flags.tree_path, "tree file (JSON)");
        sub->add_option("--phi", flags.phi_family, "phi family name");
        sub->add_option("--t", flags.t, "gap value");
        sub->add_option("--eps", flags.eps, "mollification width");
        sub->add_option("--t-min", flags.t_min, "scan grid start");
        sub->add_option("--t-max", flags.t_max, "scan grid end");
        sub->add_option("--steps", flags.steps, "scan grid size");
        sub->add_option("--tol", flags.tol, "tolerance");
        sub->add_option("--threshold", flags.threshold, "positivity threshold");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--budget", flags.budget, "enumeration/point budget");
        sub->add_option("--out", flags.out_path, "output path (prefix for spectral)");
    }

    std::vector<const char*> argv;
    argv.push_back("treelab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        json cfg = merged_config(command, flags);
        if (command == "gen-measure") return cmd_gen_measure(cfg, flags, out);
        if (command == "check") return cmd_check(cfg, flags, out);
        if (command == "scan") return cmd_scan(cfg, flags, out);
        if (command == "tree-energy") return cmd_tree_energy(cfg, flags, out);
        if (command == "realize") return cmd_realize(cfg, flags, out);
        if (command == "wrist") return cmd_wrist(cfg, flags, out);
        if (command == "config-energy") return cmd_config_energy(cfg, flags, out);
        if (command == "spectral") return cmd_spectral(cfg, flags, out, err);
        err << "error: unknown command " << command << "\n";
        return 1;
    } catch (const NonConvergenceError& e) {
        err << "non-convergence: " << e.what() << " (estimate "
            << format_g17(e.last_estimate) << ", residual " << format_g17(e.last_residual)
            << " after " << e.iterations << " iterations)\n";
        return 3;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace treelab
