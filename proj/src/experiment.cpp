#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "clustab/error.hpp"
#include "clustab/hash.hpp"
#include "clustab/splits.hpp"
#include "clustab/stability.hpp"

namespace clustab {

std::string to_string(PerturbationType t) {
    switch (t) {
        case PerturbationType::none: return "none";
        case PerturbationType::sliding_window: return "sliding_window";
        case PerturbationType::odd_even: return "odd_even";
        case PerturbationType::regimes: return "regimes";
        case PerturbationType::heart_tails: return "heart_tails";
        case PerturbationType::multiscale: return "multiscale";
        case PerturbationType::maturities: return "maturities";
        case PerturbationType::population_resample: return "population_resample";
    }
    throw Error("stability", "unknown perturbation type enum value");
}

PerturbationType perturbation_type_from_string(const std::string& s) {
    if (s == "none") return PerturbationType::none;
    if (s == "sliding_window") return PerturbationType::sliding_window;
    if (s == "odd_even") return PerturbationType::odd_even;
    if (s == "regimes") return PerturbationType::regimes;
    if (s == "heart_tails") return PerturbationType::heart_tails;
    if (s == "multiscale") return PerturbationType::multiscale;
    if (s == "maturities") return PerturbationType::maturities;
    if (s == "population_resample") return PerturbationType::population_resample;
    throw ConfigError("unknown perturbation type '" + s + "'");
}

namespace {

void check_keys(const ordered_json& j, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

double get_number(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
    return x;
}

std::uint64_t get_uint(const ordered_json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError(where + " must be an integer");
    }
    if (v.is_number_integer() && v.get<long long>() < 0) {
        throw ConfigError(where + " must be non-negative");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const ordered_json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

bool get_bool(const ordered_json& v, const std::string& where) {
    if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
    return v.get<bool>();
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const ordered_json& j, std::uint64_t default_seed) {
    check_keys(j, "input.synthetic",
               {"n_assets", "n_days", "n_clusters", "common_factor_weight",
                "cluster_factor_weight", "idiosyncratic_sigma", "mean", "tail_mix",
                "stress_segments", "base_level", "seed"});
    for (const char* key : {"n_assets", "n_days", "n_clusters"}) {
        if (!j.contains(key)) throw ConfigError(std::string("input.synthetic.") + key + " is required");
    }
    SyntheticSpec spec;
    spec.n_assets = static_cast<std::size_t>(get_uint(j.at("n_assets"), "n_assets"));
    spec.n_days = static_cast<std::size_t>(get_uint(j.at("n_days"), "n_days"));
    spec.n_clusters = static_cast<std::size_t>(get_uint(j.at("n_clusters"), "n_clusters"));
    if (j.contains("common_factor_weight")) {
        spec.common_factor_weight = get_number(j.at("common_factor_weight"), "common_factor_weight");
    }
    if (j.contains("cluster_factor_weight")) {
        spec.cluster_factor_weight =
            get_number(j.at("cluster_factor_weight"), "cluster_factor_weight");
    }
    if (j.contains("idiosyncratic_sigma")) {
        const auto& s = j.at("idiosyncratic_sigma");
        spec.idiosyncratic_sigma.clear();
        if (s.is_array()) {
            for (const auto& x : s) {
                spec.idiosyncratic_sigma.push_back(get_number(x, "idiosyncratic_sigma[]"));
            }
        } else {
            spec.idiosyncratic_sigma.push_back(get_number(s, "idiosyncratic_sigma"));
        }
    }
    if (j.contains("mean")) spec.mean = get_number(j.at("mean"), "mean");
    if (j.contains("tail_mix")) {
        const auto& t = j.at("tail_mix");
        check_keys(t, "tail_mix", {"p", "m"});
        if (t.contains("p")) spec.tail_mix.p = get_number(t.at("p"), "tail_mix.p");
        if (t.contains("m")) spec.tail_mix.m = get_number(t.at("m"), "tail_mix.m");
    }
    if (j.contains("stress_segments")) {
        const auto& segs = j.at("stress_segments");
        if (!segs.is_array()) throw ConfigError("stress_segments must be an array");
        for (const auto& seg : segs) {
            check_keys(seg, "stress_segments[]", {"begin", "end", "beta"});
            for (const char* key : {"begin", "end", "beta"}) {
                if (!seg.contains(key)) {
                    throw ConfigError(std::string("stress_segments[].") + key + " is required");
                }
            }
            StressSegment s;
            s.begin = static_cast<std::size_t>(get_uint(seg.at("begin"), "stress begin"));
            s.end = static_cast<std::size_t>(get_uint(seg.at("end"), "stress end"));
            s.beta = get_number(seg.at("beta"), "stress beta");
            spec.stress_segments.push_back(s);
        }
    }
    if (j.contains("base_level")) spec.base_level = get_number(j.at("base_level"), "base_level");
    spec.seed = j.contains("seed") ? get_uint(j.at("seed"), "seed") : default_seed;
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError("input.synthetic: " + e.message());
    }
    return spec;
}

ordered_json synthetic_spec_to_json(const SyntheticSpec& spec) {
    ordered_json j;
    j["n_assets"] = spec.n_assets;
    j["n_days"] = spec.n_days;
    j["n_clusters"] = spec.n_clusters;
    j["common_factor_weight"] = spec.common_factor_weight;
    j["cluster_factor_weight"] = spec.cluster_factor_weight;
    if (spec.idiosyncratic_sigma.size() == 1) {
        j["idiosyncratic_sigma"] = spec.idiosyncratic_sigma[0];
    } else {
        j["idiosyncratic_sigma"] = spec.idiosyncratic_sigma;
    }
    j["mean"] = spec.mean;
    j["tail_mix"] = ordered_json{{"p", spec.tail_mix.p}, {"m", spec.tail_mix.m}};
    ordered_json segs = ordered_json::array();
    for (const auto& s : spec.stress_segments) {
        segs.push_back(ordered_json{{"begin", s.begin}, {"end", s.end}, {"beta", s.beta}});
    }
    j["stress_segments"] = segs;
    j["base_level"] = spec.base_level;
    j["seed"] = spec.seed;
    return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
    check_keys(j, "config",
               {"experiment", "input", "include_imputed", "imputation_noise_sigma",
                "preprocessing", "distance", "clustering", "perturbation", "seed"});
    ExperimentConfig c;
    if (!j.contains("experiment")) throw ConfigError("'experiment' is required");
    c.experiment = get_string(j.at("experiment"), "experiment");
    if (c.experiment.empty()) throw ConfigError("'experiment' must be non-empty");
    c.seed = j.contains("seed") ? get_uint(j.at("seed"), "seed") : 0;

    if (!j.contains("input")) throw ConfigError("'input' is required");
    const auto& in = j.at("input");
    check_keys(in, "input", {"csv", "synthetic", "maturity_stem", "maturities"});
    const int sources = static_cast<int>(in.contains("csv")) +
                        static_cast<int>(in.contains("synthetic")) +
                        static_cast<int>(in.contains("maturity_stem"));
    if (sources != 1) {
        throw ConfigError("input must set exactly one of csv / synthetic / maturity_stem");
    }
    if (in.contains("csv")) {
        c.input.csv = get_string(in.at("csv"), "input.csv");
        if (in.contains("maturities")) throw ConfigError("input.maturities requires maturity_stem");
    } else if (in.contains("synthetic")) {
        c.input.synthetic = synthetic_spec_from_json(in.at("synthetic"), c.seed);
        if (in.contains("maturities")) throw ConfigError("input.maturities requires maturity_stem");
    } else {
        c.input.maturity_stem = get_string(in.at("maturity_stem"), "input.maturity_stem");
        if (!in.contains("maturities")) {
            throw ConfigError("input.maturities is required with maturity_stem");
        }
        const auto& mats = in.at("maturities");
        if (!mats.is_array() || mats.empty()) {
            throw ConfigError("input.maturities must be a non-empty array");
        }
        for (const auto& m : mats) {
            c.input.maturities.push_back(get_string(m, "input.maturities[]"));
        }
    }

    if (j.contains("include_imputed")) {
        c.include_imputed = get_bool(j.at("include_imputed"), "include_imputed");
    }
    if (j.contains("imputation_noise_sigma")) {
        c.imputation_noise_sigma =
            get_number(j.at("imputation_noise_sigma"), "imputation_noise_sigma");
        if (c.imputation_noise_sigma < 0.0) {
            throw ConfigError("imputation_noise_sigma must be >= 0");
        }
    }

    if (j.contains("preprocessing")) {
        const auto& pp = j.at("preprocessing");
        check_keys(pp, "preprocessing", {"kind", "scale"});
        if (pp.contains("kind")) {
            const std::string kind = get_string(pp.at("kind"), "preprocessing.kind");
            if (kind != "auto") {
                try {
                    c.preprocessing = variation_kind_from_string(kind);
                } catch (const Error&) {
                    throw ConfigError("preprocessing.kind must be auto, diff, or log_diff");
                }
            }
        }
        if (pp.contains("scale")) {
            c.scale = static_cast<std::size_t>(get_uint(pp.at("scale"), "preprocessing.scale"));
            if (c.scale < 1) throw ConfigError("preprocessing.scale must be >= 1");
        }
    }

    if (!j.contains("distance")) throw ConfigError("'distance' is required");
    const auto& dist = j.at("distance");
    check_keys(dist, "distance", {"method", "params"});
    if (!dist.contains("method")) throw ConfigError("distance.method is required");
    try {
        c.method = distance_method_from_string(get_string(dist.at("method"), "distance.method"));
    } catch (const Error& e) {
        throw ConfigError(e.message());
    }
    if (dist.contains("params")) {
        const auto& params = dist.at("params");
        check_keys(params, "distance.params", {"theta", "bins"});
        if (params.contains("theta")) {
            c.gnpr.theta = get_number(params.at("theta"), "distance.params.theta");
            if (c.gnpr.theta < 0.0 || c.gnpr.theta > 1.0) {
                throw ConfigError("distance.params.theta must lie in [0,1]");
            }
        }
        if (params.contains("bins")) {
            c.gnpr.bins = static_cast<std::size_t>(get_uint(params.at("bins"), "distance.params.bins"));
            if (c.gnpr.bins == 1) throw ConfigError("distance.params.bins must be 0 (auto) or >= 2");
        }
    }

    if (!j.contains("clustering")) throw ConfigError("'clustering' is required");
    const auto& clus = j.at("clustering");
    check_keys(clus, "clustering", {"linkage", "k"});
    if (clus.contains("linkage") &&
        get_string(clus.at("linkage"), "clustering.linkage") != "wpgma") {
        throw ConfigError("clustering.linkage must be \"wpgma\"");
    }
    if (!clus.contains("k")) throw ConfigError("clustering.k is required");
    c.k = static_cast<std::size_t>(get_uint(clus.at("k"), "clustering.k"));
    if (c.k < 1) throw ConfigError("clustering.k must be >= 1");

    if (!j.contains("perturbation")) throw ConfigError("'perturbation' is required");
    const auto& pert = j.at("perturbation");
    if (!pert.is_object() || !pert.contains("type")) {
        throw ConfigError("perturbation.type is required");
    }
    c.perturbation.type = perturbation_type_from_string(get_string(pert.at("type"), "type"));
    switch (c.perturbation.type) {
        case PerturbationType::sliding_window: {
            check_keys(pert, "perturbation", {"type", "window", "step"});
            if (!pert.contains("window") || !pert.contains("step")) {
                throw ConfigError("sliding_window needs window and step");
            }
            c.perturbation.window =
                static_cast<std::size_t>(get_uint(pert.at("window"), "window"));
            c.perturbation.step = static_cast<std::size_t>(get_uint(pert.at("step"), "step"));
            if (c.perturbation.window < 3) throw ConfigError("window must be >= 3");
            if (c.perturbation.step < 1) throw ConfigError("step must be >= 1");
            break;
        }
        case PerturbationType::regimes: {
            check_keys(pert, "perturbation", {"type", "breakpoints"});
            if (pert.contains("breakpoints")) {
                const auto& bps = pert.at("breakpoints");
                if (!bps.is_array()) throw ConfigError("breakpoints must be an array of dates");
                for (const auto& bp : bps) {
                    c.perturbation.breakpoints.push_back(get_string(bp, "breakpoints[]"));
                }
            }
            break;
        }
        case PerturbationType::multiscale: {
            check_keys(pert, "perturbation", {"type", "scales"});
            if (pert.contains("scales")) {
                const auto& scales = pert.at("scales");
                if (!scales.is_array() || scales.empty()) {
                    throw ConfigError("scales must be a non-empty array");
                }
                for (const auto& s : scales) {
                    const auto k = static_cast<std::size_t>(get_uint(s, "scales[]"));
                    if (k < 1) throw ConfigError("scales entries must be >= 1");
                    c.perturbation.scales.push_back(k);
                }
            }
            break;
        }
        case PerturbationType::population_resample: {
            check_keys(pert, "perturbation", {"type", "keep_fraction", "draws"});
            if (!pert.contains("keep_fraction")) {
                throw ConfigError("population_resample needs keep_fraction");
            }
            c.perturbation.keep_fraction = get_number(pert.at("keep_fraction"), "keep_fraction");
            if (!(c.perturbation.keep_fraction > 0.0) || c.perturbation.keep_fraction > 1.0) {
                throw ConfigError("keep_fraction must lie in (0,1]");
            }
            if (pert.contains("draws")) {
                c.perturbation.draws = static_cast<std::size_t>(get_uint(pert.at("draws"), "draws"));
                if (c.perturbation.draws < 1) throw ConfigError("draws must be >= 1");
            }
            break;
        }
        case PerturbationType::maturities: {
            check_keys(pert, "perturbation", {"type"});
            if (c.input.maturity_stem.empty()) {
                throw ConfigError("maturities perturbation requires a maturity_stem input");
            }
            break;
        }
        default: check_keys(pert, "perturbation", {"type"}); break;
    }
    if (c.perturbation.type != PerturbationType::maturities && !c.input.maturity_stem.empty()) {
        throw ConfigError("maturity_stem input requires the maturities perturbation");
    }
    if (c.include_imputed && !c.input.maturity_stem.empty()) {
        throw ConfigError("include_imputed is not supported with maturity inputs");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

ordered_json config_to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["experiment"] = c.experiment;
    ordered_json in;
    if (c.input.synthetic) {
        in["synthetic"] = synthetic_spec_to_json(*c.input.synthetic);
    } else if (!c.input.maturity_stem.empty()) {
        in["maturity_stem"] = c.input.maturity_stem;
        in["maturities"] = c.input.maturities;
    } else {
        in["csv"] = c.input.csv;
    }
    j["input"] = in;
    j["include_imputed"] = c.include_imputed;
    j["imputation_noise_sigma"] = c.imputation_noise_sigma;
    j["preprocessing"] = ordered_json{
        {"kind", c.preprocessing ? to_string(*c.preprocessing) : "auto"}, {"scale", c.scale}};
    ordered_json params = ordered_json::object();
    if (c.method == DistanceMethod::gnpr) {
        params["theta"] = c.gnpr.theta;
        params["bins"] = c.gnpr.bins;
    }
    j["distance"] = ordered_json{{"method", to_string(c.method)}, {"params", params}};
    j["clustering"] = ordered_json{{"linkage", "wpgma"}, {"k", c.k}};
    ordered_json pert;
    pert["type"] = to_string(c.perturbation.type);
    switch (c.perturbation.type) {
        case PerturbationType::sliding_window:
            pert["window"] = c.perturbation.window;
            pert["step"] = c.perturbation.step;
            break;
        case PerturbationType::regimes: pert["breakpoints"] = c.perturbation.breakpoints; break;
        case PerturbationType::multiscale:
            pert["scales"] =
                c.perturbation.scales.empty() ? kDefaultMultiscale : c.perturbation.scales;
            break;
        case PerturbationType::population_resample:
            pert["keep_fraction"] = c.perturbation.keep_fraction;
            pert["draws"] = c.perturbation.draws;
            break;
        default: break;
    }
    j["perturbation"] = pert;
    j["seed"] = c.seed;
    return j;
}

namespace {

struct PartInput {
    std::string label;
    ordered_json descriptor;
    VariationMatrix matrix;
};

std::string date_of_column(const PricePanel& panel, const VariationMatrix& v, std::size_t col) {
    return panel.dates.at(v.time_indices.at(col));
}

ordered_json range_descriptor(const PricePanel& panel, const VariationMatrix& v, std::size_t lo,
                              std::size_t hi) {
    ordered_json d;
    d["begin"] = lo;
    d["end"] = hi;
    d["date_range"] = ordered_json::array(
        {date_of_column(panel, v, lo), date_of_column(panel, v, hi - 1)});
    return d;
}

// Best-correlated complete asset decides the donor cluster for an excluded
// series; correlation is measured on diff variations over the observed
// overlap.
std::vector<std::string> pick_donor_cluster(const PricePanel& panel, const Partition& clusters,
                                            const PartialSeries& partial) {
    const std::size_t t = panel.n_dates();
    const std::size_t s = partial.suffix_start();
    if (t - s < 4) {
        throw Error("stability", "cannot impute '" + partial.asset_id +
                                     "': observed overlap is too short to pick donors");
    }
    std::vector<double> pv;
    for (std::size_t j = s; j + 1 < t; ++j) {
        pv.push_back(partial.values[j + 1] - partial.values[j]);
    }
    if (is_constant(pv)) {
        throw Error("stability", "cannot impute '" + partial.asset_id +
                                     "': observed variations are constant");
    }
    double best = -2.0;
    std::size_t best_row = panel.n_assets();
    std::vector<double> dv(pv.size());
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
        for (std::size_t j = s; j + 1 < t; ++j) {
            dv[j - s] = panel.values(i, j + 1) - panel.values(i, j);
        }
        if (is_constant(dv)) continue;
        const double rho = pearson_corr(pv, dv);
        if (rho > best) {
            best = rho;
            best_row = i;
        }
    }
    if (best_row == panel.n_assets()) {
        throw Error("stability",
                    "cannot impute '" + partial.asset_id + "': no usable donor candidates");
    }
    const int label = clusters.labels[best_row];
    std::vector<std::string> donors;
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
        if (clusters.labels[i] == label) donors.push_back(panel.asset_ids[i]);
    }
    return donors;
}

}  // namespace

StabilityReport run_experiment(const ExperimentConfig& cfg) {
    StabilityReport report;
    report.config = cfg;

    const VariationKind kind =
        cfg.preprocessing ? *cfg.preprocessing : default_variation_kind(cfg.method);

    // ---- input acquisition ----
    PricePanel panel;
    std::vector<int> truth;
    std::vector<std::pair<std::string, PricePanel>> maturity_panels;
    const bool is_maturity = cfg.perturbation.type == PerturbationType::maturities;
    if (cfg.input.synthetic) {
        SyntheticPanel syn = synthesize(*cfg.input.synthetic);
        panel = std::move(syn.panel);
        truth = std::move(syn.true_labels);
        report.input_hash = hash_string(synthetic_spec_to_json(*cfg.input.synthetic).dump());
    } else if (is_maturity) {
        std::map<std::string, PricePanel> panels;
        std::string hash_acc;
        for (const auto& m : cfg.input.maturities) {
            const std::string path = cfg.input.maturity_stem + "_" + m + ".csv";
            LoadResult lr = load_csv(path);
            if (!lr.excluded.empty()) {
                throw Error("stability", "maturity '" + m + "': incomplete assets present (" +
                                             lr.excluded[0].asset_id +
                                             ", ...); maturity runs need complete panels");
            }
            hash_acc += m + "=" + hash_file(path) + ";";
            panels.emplace(m, std::move(lr.panel));
        }
        maturity_panels = maturity_split(panels);
        report.input_hash = hash_string(hash_acc);
    } else {
        LoadResult lr = load_csv(cfg.input.csv);
        panel = std::move(lr.panel);
        report.input_hash = hash_file(cfg.input.csv);
        if (cfg.include_imputed && !lr.excluded.empty()) {
            // Donor choice clusters the complete panel once with the
            // configured distance.
            const VariationMatrix base = variations(panel, kind, cfg.scale);
            const DistanceMatrix bd = compute_distance(base, cfg.method, cfg.gnpr);
            const Partition donors_partition = cut_to_k(wpgma_linkage(bd), cfg.k);
            const PricePanel complete = panel;
            for (const auto& partial : lr.excluded) {
                const auto donors = pick_donor_cluster(complete, donors_partition, partial);
                panel = impute_proxy(panel, partial, donors, cfg.imputation_noise_sigma,
                                     cfg.seed ^ fnv1a64(partial.asset_id));
            }
        }
    }

    // ---- part assembly ----
    std::vector<PartInput> parts;
    if (is_maturity) {
        for (const auto& [name, mp] : maturity_panels) {
            PartInput part;
            part.label = name;
            part.descriptor["maturity"] = name;
            part.matrix = variations(mp, kind, cfg.scale);
            parts.push_back(std::move(part));
        }
    } else if (cfg.perturbation.type == PerturbationType::multiscale) {
        const auto& scales =
            cfg.perturbation.scales.empty() ? kDefaultMultiscale : cfg.perturbation.scales;
        std::vector<VariationMatrix> plan = multiscale_plan(panel, scales, kind);
        for (std::size_t s = 0; s < scales.size(); ++s) {
            PartInput part;
            part.label = "scale=" + std::to_string(scales[s]);
            part.descriptor["scale"] = scales[s];
            part.matrix = std::move(plan[s]);
            parts.push_back(std::move(part));
        }
    } else {
        const VariationMatrix v = variations(panel, kind, cfg.scale);
        switch (cfg.perturbation.type) {
            case PerturbationType::none: {
                PartInput part;
                part.label = "full";
                part.descriptor = range_descriptor(panel, v, 0, v.n_cols());
                part.matrix = v;
                parts.push_back(std::move(part));
                break;
            }
            case PerturbationType::sliding_window: {
                const SampleSplit split =
                    sliding_windows(v.n_cols(), cfg.perturbation.window, cfg.perturbation.step);
                for (const auto& sp : split.parts) {
                    PartInput part;
                    part.label = sp.label;
                    part.descriptor =
                        range_descriptor(panel, v, sp.indices.front(), sp.indices.back() + 1);
                    part.matrix = v.select_columns(sp.indices);
                    parts.push_back(std::move(part));
                }
                break;
            }
            case PerturbationType::odd_even: {
                const SampleSplit split = odd_even(v.n_cols());
                for (const auto& sp : split.parts) {
                    PartInput part;
                    part.label = sp.label;
                    part.descriptor["indices"] = sp.indices;
                    part.matrix = v.select_columns(sp.indices);
                    parts.push_back(std::move(part));
                }
                break;
            }
            case PerturbationType::regimes: {
                std::vector<std::string> col_dates(v.n_cols());
                for (std::size_t j = 0; j < v.n_cols(); ++j) {
                    col_dates[j] = date_of_column(panel, v, j);
                }
                const auto cols =
                    breakpoint_columns(panel.dates, v.time_indices, cfg.perturbation.breakpoints);
                const SampleSplit split = regimes(v.n_cols(), cols, &col_dates);
                for (const auto& sp : split.parts) {
                    PartInput part;
                    part.label = sp.label;
                    part.descriptor =
                        range_descriptor(panel, v, sp.indices.front(), sp.indices.back() + 1);
                    part.matrix = v.select_columns(sp.indices);
                    parts.push_back(std::move(part));
                }
                break;
            }
            case PerturbationType::heart_tails: {
                const SampleSplit split = heart_tails(v);
                for (const auto& sp : split.parts) {
                    PartInput part;
                    part.label = sp.label;
                    part.descriptor["indices"] = sp.indices;
                    part.matrix = v.select_columns(sp.indices);
                    parts.push_back(std::move(part));
                }
                break;
            }
            case PerturbationType::population_resample: {
                PartInput full;
                full.label = "full";
                full.descriptor["assets"] = v.asset_ids;
                full.matrix = v;
                parts.push_back(std::move(full));
                for (std::size_t draw = 1; draw <= cfg.perturbation.draws; ++draw) {
                    const auto ids = population_resample(
                        v.asset_ids, cfg.perturbation.keep_fraction, cfg.seed + draw);
                    std::vector<std::size_t> rows;
                    rows.reserve(ids.size());
                    for (const auto& id : ids) {
                        rows.push_back(static_cast<std::size_t>(
                            std::find(v.asset_ids.begin(), v.asset_ids.end(), id) -
                            v.asset_ids.begin()));
                    }
                    PartInput part;
                    part.label = "draw@" + std::to_string(draw);
                    part.descriptor["assets"] = ids;
                    part.matrix = v.select_assets(rows);
                    parts.push_back(std::move(part));
                }
                break;
            }
            default: throw Error("stability", "unhandled perturbation type");
        }
    }

    // ---- per-part clustering ----
    report.assets = is_maturity ? maturity_panels.front().second.asset_ids : panel.asset_ids;
    for (auto& part : parts) {
        try {
            if (cfg.k > part.matrix.n_assets()) {
                throw Error("clustering", "k = " + std::to_string(cfg.k) + " exceeds " +
                                              std::to_string(part.matrix.n_assets()) + " assets");
            }
            ReportPart rp;
            rp.label = part.label;
            rp.descriptor = std::move(part.descriptor);
            rp.distances = compute_distance(part.matrix, cfg.method, cfg.gnpr);
            rp.partition = cut_to_k(wpgma_linkage(rp.distances), cfg.k);
            report.parts.push_back(std::move(rp));
        } catch (const Error& e) {
            throw Error(e.module(), "part '" + part.label + "': " + e.message());
        }
    }

    // ---- pairwise ARI ----
    const std::size_t n_parts = report.parts.size();
    report.ari_values = Matrix(n_parts, n_parts, 0.0);
    for (std::size_t i = 0; i < n_parts; ++i) {
        report.ari_values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n_parts; ++j) {
            const Partition& pi = report.parts[i].partition;
            const Partition& pj = report.parts[j].partition;
            double value;
            if (pi.asset_ids == pj.asset_ids) {
                value = ari(pi, pj);
            } else {
                std::vector<std::string> common;
                for (const auto& id : pi.asset_ids) {
                    if (std::find(pj.asset_ids.begin(), pj.asset_ids.end(), id) !=
                        pj.asset_ids.end()) {
                        common.push_back(id);
                    }
                }
                if (common.size() < 2) {
                    throw Error("stability", "parts '" + report.parts[i].label + "' and '" +
                                                 report.parts[j].label +
                                                 "' share fewer than 2 assets");
                }
                value = ari(pi.restrict_to(common), pj.restrict_to(common));
            }
            report.ari_values(i, j) = value;
            report.ari_values(j, i) = value;
        }
    }

    // ---- ground truth (synthetic only) ----
    if (!truth.empty()) {
        const Partition truth_partition = Partition::from_labels(panel.asset_ids, truth);
        for (const auto& part : report.parts) {
            const Partition ref = part.partition.asset_ids == truth_partition.asset_ids
                                      ? truth_partition
                                      : truth_partition.restrict_to(part.partition.asset_ids);
            report.ground_truth.push_back(ari(part.partition, ref));
        }
    }
    return report;
}

ordered_json StabilityReport::to_json() const {
    ordered_json j;
    j["experiment"] = config.experiment;
    ordered_json params = ordered_json::object();
    if (config.method == DistanceMethod::gnpr) {
        params["theta"] = config.gnpr.theta;
        params["bins"] = config.gnpr.bins;
    }
    j["distance"] = ordered_json{{"method", to_string(config.method)}, {"params", params}};
    j["clustering"] = ordered_json{{"linkage", "wpgma"}, {"k", config.k}};
    j["assets"] = assets;
    ordered_json parts_json = ordered_json::array();
    for (const auto& part : parts) {
        ordered_json p;
        p["label"] = part.label;
        for (const auto& [key, value] : part.descriptor.items()) p[key] = value;
        parts_json.push_back(std::move(p));
    }
    j["parts"] = parts_json;
    ordered_json partitions = ordered_json::object();
    for (const auto& part : parts) partitions[part.label] = part.partition.labels;
    j["partitions"] = partitions;
    ordered_json labels = ordered_json::array();
    for (const auto& part : parts) labels.push_back(part.label);
    ordered_json matrix = ordered_json::array();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t jdx = 0; jdx < parts.size(); ++jdx) row.push_back(ari_values(i, jdx));
        matrix.push_back(std::move(row));
    }
    j["ari"] = ordered_json{{"labels", labels}, {"matrix", matrix}};
    if (!ground_truth.empty()) {
        ordered_json gt = ordered_json::object();
        for (std::size_t i = 0; i < parts.size(); ++i) gt[parts[i].label] = ground_truth[i];
        j["ground_truth_ari"] = gt;
    }
    j["provenance"] = ordered_json{{"input_hash", input_hash},
                                   {"seed", config.seed},
                                   {"version", "0.1.0"},
                                   {"config", config_to_json(config)}};
    return j;
}

ordered_json partition_to_json(const Partition& p) {
    p.validate();
    ordered_json labels = ordered_json::object();
    for (std::size_t i = 0; i < p.asset_ids.size(); ++i) labels[p.asset_ids[i]] = p.labels[i];
    return ordered_json{{"k", p.k}, {"labels", labels}};
}

Partition partition_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("labels") || !j.at("labels").is_object()) {
        throw Error("stability", "partition JSON needs a 'labels' object");
    }
    if (!j.contains("k")) throw Error("stability", "partition JSON needs a 'k' field");
    std::vector<std::string> ids;
    std::vector<int> raw;
    for (const auto& [id, label] : j.at("labels").items()) {
        if (!label.is_number_integer() && !label.is_number_unsigned()) {
            throw Error("stability", "partition label for '" + id + "' must be an integer");
        }
        ids.push_back(id);
        raw.push_back(label.get<int>());
    }
    Partition p = Partition::from_labels(std::move(ids), raw);
    if (j.contains("k")) {
        if (!j.at("k").is_number_integer() && !j.at("k").is_number_unsigned()) {
            throw Error("stability", "partition 'k' must be an integer");
        }
        if (j.at("k").get<int>() != p.k) {
            throw Error("stability", "partition 'k' does not match the labels");
        }
    }
    return p;
}

Partition load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("stability", "cannot open partition file '" + path + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("stability", "partition '" + path + "' is not valid JSON: " + e.what());
    }
    return partition_from_json(j);
}

ordered_json dendrogram_to_json(const Dendrogram& d) {
    d.validate();
    ordered_json merges = ordered_json::array();
    for (const auto& m : d.merges) {
        merges.push_back(ordered_json{
            {"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
    }
    return ordered_json{{"asset_ids", d.asset_ids}, {"merges", merges}};
}

std::vector<std::pair<std::string, Partition>> partitions_from_report(const ordered_json& report) {
    if (!report.contains("assets") || !report.contains("partitions") ||
        !report.contains("parts")) {
        throw Error("stability", "report JSON is missing assets/parts/partitions");
    }
    const auto all_assets = report.at("assets").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, Partition>> out;
    for (const auto& part : report.at("parts")) {
        const std::string label = part.at("label").get<std::string>();
        std::vector<std::string> ids = part.contains("assets")
                                           ? part.at("assets").get<std::vector<std::string>>()
                                           : all_assets;
        const auto& labels_json = report.at("partitions").at(label);
        const auto raw = labels_json.get<std::vector<int>>();
        if (raw.size() != ids.size()) {
            throw Error("stability", "report partition '" + label + "' has wrong length");
        }
        out.emplace_back(label, Partition::from_labels(std::move(ids), raw));
    }
    return out;
}

}  // namespace clustab
