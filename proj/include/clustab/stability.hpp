#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clustab/distance.hpp"
#include "clustab/linkage.hpp"
#include "clustab/panel.hpp"

namespace clustab {

using ordered_json = nlohmann::ordered_json;

struct Contingency {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<long long> counts;  // row-major

    long long at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
    std::vector<long long> row_sums() const;
    std::vector<long long> col_sums() const;
    long long total() const;
};

// Cluster co-membership counts. Both partitions must list the same assets in
// the same order.
Contingency contingency(const Partition& p, const Partition& q);

// Hubert-Arabie adjusted Rand index. When the adjustment is degenerate
// (expected index equals maximum index) the result is 1 for partitions that
// are identical up to relabeling and 0 otherwise.
double ari(const Partition& p, const Partition& q);

struct MeanCorrelationPoint {
    std::size_t start = 0;  // first column of the window
    double value = 0.0;
};

// Rolling mean of the upper-triangle Pearson correlations. Pairs with a
// constant row inside a window are skipped; a window with no usable pair is
// an error.
std::vector<MeanCorrelationPoint> mean_correlation_series(const VariationMatrix& v,
                                                          std::size_t window, std::size_t step);

// ---- experiment orchestration ----

enum class PerturbationType {
    none,
    sliding_window,
    odd_even,
    regimes,
    heart_tails,
    multiscale,
    maturities,
    population_resample,
};

std::string to_string(PerturbationType t);
PerturbationType perturbation_type_from_string(const std::string& s);

struct PerturbationSpec {
    PerturbationType type = PerturbationType::none;
    std::size_t window = 0;  // sliding_window
    std::size_t step = 0;
    std::vector<std::string> breakpoints;  // regimes, ISO dates
    std::vector<std::size_t> scales;       // multiscale; empty = 1,2,4,8,16,32
    double keep_fraction = 0.8;            // population_resample
    std::size_t draws = 5;
};

// Exactly one of csv / synthetic / maturity_stem must be set.
struct InputSpec {
    std::string csv;
    std::optional<SyntheticSpec> synthetic;
    std::string maturity_stem;
    std::vector<std::string> maturities;
};

struct ExperimentConfig {
    std::string experiment;
    InputSpec input;
    bool include_imputed = false;
    double imputation_noise_sigma = 0.0;
    std::optional<VariationKind> preprocessing;  // nullopt = per-method default
    std::size_t scale = 1;
    DistanceMethod method = DistanceMethod::gnpr;
    GnprParams gnpr;
    std::size_t k = 16;
    PerturbationSpec perturbation;
    std::uint64_t seed = 0;
};

// Validating loader: unknown keys, missing required keys, and out-of-range
// values all raise ConfigError.
ExperimentConfig config_from_json(const ordered_json& j);
ExperimentConfig load_config(const std::string& path);
ordered_json config_to_json(const ExperimentConfig& c);

// Standalone synthetic-spec files use the same schema as input.synthetic.
SyntheticSpec synthetic_spec_from_json(const ordered_json& j, std::uint64_t default_seed = 0);
ordered_json synthetic_spec_to_json(const SyntheticSpec& spec);

struct ReportPart {
    std::string label;
    ordered_json descriptor;  // indices / date_range / scale / maturity / assets
    Partition partition;
    DistanceMatrix distances;
};

struct StabilityReport {
    ExperimentConfig config;
    std::vector<std::string> assets;
    std::vector<ReportPart> parts;
    Matrix ari_values;                // parts x parts
    std::vector<double> ground_truth;  // per-part ARI vs true labels; empty if n/a
    std::string input_hash;

    ordered_json to_json() const;
};

StabilityReport run_experiment(const ExperimentConfig& config);

// Partition file format: {"k": K, "labels": {asset id: label}}.
ordered_json partition_to_json(const Partition& p);
Partition partition_from_json(const ordered_json& j);
Partition load_partition(const std::string& path);

ordered_json dendrogram_to_json(const Dendrogram& d);

// Partitions embedded in a serialized report, in part order. Population
// parts carry their own asset subsets.
std::vector<std::pair<std::string, Partition>> partitions_from_report(const ordered_json& report);

}  // namespace clustab
