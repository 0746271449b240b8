#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "clustab/distance.hpp"
#include "clustab/error.hpp"
#include "clustab/format.hpp"
#include "clustab/panel.hpp"
#include "clustab/sankey.hpp"
#include "clustab/stability.hpp"

namespace fs = std::filesystem;
using namespace clustab;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("report_cli", "cannot write file '" + path + "'");
    out << text;
    if (!out) throw Error("report_cli", "write failed for '" + path + "'");
}

ordered_json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw Error("report_cli", std::string("cannot open ") + what + " '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
    }
}

// Bad flag values are usage errors (exit 2), matching their config-file twins.
DistanceMethod method_flag(const std::string& name) {
    try {
        return distance_method_from_string(name);
    } catch (const Error& e) {
        throw ConfigError(e.message());
    }
}

VariationKind kind_flag(const std::string& name) {
    try {
        return variation_kind_from_string(name);
    } catch (const Error& e) {
        throw ConfigError(e.message());
    }
}

VariationKind resolve_kind(const std::string& kind, DistanceMethod method) {
    if (kind == "auto") return default_variation_kind(method);
    return kind_flag(kind);
}

int cmd_gen(const std::string& spec_path, std::uint64_t seed, const std::string& out,
            const std::string& labels_out) {
    SyntheticSpec spec = synthetic_spec_from_json(parse_json_file(spec_path, "spec"), seed);
    spec.seed = seed;  // the command-line seed wins over any seed in the file
    SyntheticPanel result = synthesize(spec);
    write_csv(result.panel, out);
    if (!labels_out.empty()) {
        const Partition truth =
            Partition::from_labels(result.panel.asset_ids, result.true_labels);
        write_text(labels_out, partition_to_json(truth).dump(2) + "\n");
    }
    return 0;
}

int cmd_distances(const std::string& in, const std::string& method_name, double theta,
                  std::size_t bins, const std::string& kind_name, std::size_t scale,
                  const std::string& out) {
    const DistanceMethod method = method_flag(method_name);
    LoadResult lr = load_csv(in);
    if (!lr.excluded.empty()) {
        std::cerr << "note: excluded assets with missing data:";
        for (const auto& id : lr.excluded_ids()) std::cerr << ' ' << id;
        std::cerr << '\n';
    }
    const VariationMatrix v = variations(lr.panel, resolve_kind(kind_name, method), scale);
    write_distance_csv(compute_distance(v, method, GnprParams{theta, bins}), out);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = load_config(config_path);
    const StabilityReport report = run_experiment(cfg);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_text((dir / "report.json").string(), report.to_json().dump(2) + "\n");

    std::vector<std::pair<std::string, Partition>> partitions;
    for (const auto& part : report.parts) {
        const std::string stem = sanitize_label(part.label);
        write_distance_csv(part.distances, (dir / ("distances_" + stem + ".csv")).string());
        write_text((dir / ("partition_" + stem + ".json")).string(),
                   partition_to_json(part.partition).dump(2) + "\n");
        partitions.emplace_back(part.label, part.partition);
    }
    if (partitions.size() >= 2) {
        for (const auto& pair : adjacent_pair_svgs(partitions)) {
            const std::string name =
                "sankey_" + sanitize_label(pair.left) + "_" + sanitize_label(pair.right) + ".svg";
            write_text((dir / name).string(), pair.svg);
        }
    }
    return 0;
}

int cmd_compare(const std::string& left_path, const std::string& right_path,
                const std::string& svg_path) {
    const Partition left = load_partition(left_path);
    Partition right = load_partition(right_path);
    if (right.size() != left.size()) {
        throw Error("stability", "partitions cover different asset sets");
    }
    right = right.restrict_to(left.asset_ids);  // errors if an id is missing
    std::printf("%.6f\n", ari(left, right));
    if (!svg_path.empty()) {
        const std::string left_label = fs::path(left_path).stem().string();
        std::string right_label = fs::path(right_path).stem().string();
        if (right_label == left_label) right_label += " (right)";
        const SankeyDiagram diagram =
            sankey_layout({{left_label, left}, {right_label, right}});
        write_text(svg_path, render_svg(diagram));
    }
    return 0;
}

int cmd_meancorr(const std::string& in, std::size_t window, std::size_t step,
                 const std::string& kind_name, std::size_t scale, const std::string& out) {
    LoadResult lr = load_csv(in);
    if (!lr.excluded.empty()) {
        std::cerr << "note: excluded assets with missing data:";
        for (const auto& id : lr.excluded_ids()) std::cerr << ' ' << id;
        std::cerr << '\n';
    }
    const VariationMatrix v =
        variations(lr.panel, kind_flag(kind_name), scale);
    const auto series = mean_correlation_series(v, window, step);
    std::ofstream outf(out);
    if (!outf) throw Error("report_cli", "cannot write file '" + out + "'");
    outf << "start,date,mean_correlation\n";
    for (const auto& point : series) {
        outf << point.start << ',' << lr.panel.dates[v.time_indices[point.start]] << ','
             << format_double(point.value) << '\n';
    }
    if (!outf) throw Error("report_cli", "write failed for '" + out + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering stability toolkit for financial time-series panels"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Synthesize a price panel from a spec file");
    std::string gen_spec, gen_out, gen_labels;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "Synthetic spec JSON")->required();
    gen->add_option("--seed", gen_seed, "Generator seed")->required();
    gen->add_option("--out", gen_out, "Output panel CSV")->required();
    gen->add_option("--labels-out", gen_labels, "Ground-truth partition JSON");

    auto* dist = app.add_subcommand("distances", "Compute a pairwise distance matrix");
    std::string dist_in, dist_method, dist_kind = "auto", dist_out;
    double dist_theta = 0.5;
    std::size_t dist_bins = 0, dist_scale = 1;
    dist->add_option("--in", dist_in, "Input panel CSV")->required();
    dist->add_option("--method", dist_method, "pearson|spearman|euclidean|gnpr")->required();
    dist->add_option("--theta", dist_theta, "gnpr mixing weight in [0,1]");
    dist->add_option("--bins", dist_bins, "gnpr histogram bins (0 = auto)");
    dist->add_option("--kind", dist_kind, "auto|diff|log_diff (default: per method)");
    dist->add_option("--scale", dist_scale, "variation horizon in trading days");
    dist->add_option("--out", dist_out, "Output distance CSV")->required();

    auto* run = app.add_subcommand("run", "Run a perturbation experiment from a config");
    std::string run_config, run_out_dir;
    run->add_option("--config", run_config, "Experiment config JSON")->required();
    run->add_option("--out-dir", run_out_dir, "Output directory")->required();

    auto* cmp = app.add_subcommand("compare", "ARI between two partition files");
    std::string cmp_left, cmp_right, cmp_svg;
    cmp->add_option("--left", cmp_left, "Left partition JSON")->required();
    cmp->add_option("--right", cmp_right, "Right partition JSON")->required();
    cmp->add_option("--svg", cmp_svg, "Optional sankey SVG output");

    auto* mc = app.add_subcommand("meancorr", "Rolling mean pairwise correlation");
    std::string mc_in, mc_kind = "log_diff", mc_out;
    std::size_t mc_window = 0, mc_step = 1, mc_scale = 1;
    mc->add_option("--in", mc_in, "Input panel CSV")->required();
    mc->add_option("--window", mc_window, "Window width in columns")->required();
    mc->add_option("--step", mc_step, "Step between windows");
    mc->add_option("--kind", mc_kind, "diff|log_diff");
    mc->add_option("--scale", mc_scale, "variation horizon in trading days");
    mc->add_option("--out", mc_out, "Output series CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_spec, gen_seed, gen_out, gen_labels);
        if (dist->parsed()) {
            return cmd_distances(dist_in, dist_method, dist_theta, dist_bins, dist_kind,
                                 dist_scale, dist_out);
        }
        if (run->parsed()) return cmd_run(run_config, run_out_dir);
        if (cmp->parsed()) return cmd_compare(cmp_left, cmp_right, cmp_svg);
        if (mc->parsed()) return cmd_meancorr(mc_in, mc_window, mc_step, mc_kind, mc_scale, mc_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}
