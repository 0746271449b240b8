#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clustab/matrix.hpp"

namespace clustab {

enum class VariationKind { diff, log_diff };

std::string to_string(VariationKind kind);
VariationKind variation_kind_from_string(const std::string& s);

// N x T panel of strictly positive prices (or spreads, in bp), one row per
// asset, one column per trading date.
struct PricePanel {
    std::vector<std::string> asset_ids;
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    Matrix values;                   // N x T
    std::optional<std::string> maturity;

    std::size_t n_assets() const { return asset_ids.size(); }
    std::size_t n_dates() const { return dates.size(); }

    // N >= 2, T >= 3, shapes consistent, dates valid/increasing, values
    // finite and > 0. Throws Error("data", ...) on violation.
    void validate() const;

    // Panel restricted to the given asset rows, in the given order.
    PricePanel select_assets(const std::vector<std::size_t>& rows) const;

    std::optional<std::size_t> asset_index(const std::string& id) const;
};

// N x T' matrix of per-asset variations at sampling scale `scale`.
// Column j holds the variation realized at source date index jk+k, i.e.
// P(t_{jk+k}) - P(t_{jk}) (or the log version).
struct VariationMatrix {
    std::vector<std::string> asset_ids;
    std::vector<std::size_t> time_indices;  // column -> realization date index
    Matrix values;                          // N x T'
    VariationKind kind = VariationKind::diff;
    std::size_t scale = 1;

    std::size_t n_assets() const { return asset_ids.size(); }
    std::size_t n_cols() const { return time_indices.size(); }

    void validate() const;

    VariationMatrix select_columns(const std::vector<std::size_t>& cols) const;
    VariationMatrix select_assets(const std::vector<std::size_t>& rows) const;
};

// Half-open range of variation columns driven by an elevated common factor.
struct StressSegment {
    std::size_t begin = 0;
    std::size_t end = 0;
    double beta = 0.0;
};

// With probability p a noise draw is scaled by m (two-component mixture).
struct TailMix {
    double p = 0.0;
    double m = 1.0;
};

struct SyntheticSpec {
    std::size_t n_assets = 0;
    std::size_t n_days = 0;
    std::size_t n_clusters = 1;
    double common_factor_weight = 0.0;   // beta
    double cluster_factor_weight = 0.0;  // gamma
    std::vector<double> idiosyncratic_sigma{1.0};  // one entry, or one per cluster
    double mean = 0.0;
    TailMix tail_mix;
    std::vector<StressSegment> stress_segments;
    double base_level = 100.0;
    std::uint64_t seed = 0;

    void validate() const;
    double sigma_for_cluster(std::size_t c) const;
};

struct SyntheticPanel {
    PricePanel panel;
    std::vector<int> true_labels;  // ground-truth cluster of each asset
};

// Asset observed only on a suffix of the panel dates; NaN marks missing.
// values is aligned to the panel's date axis.
struct PartialSeries {
    std::string asset_id;
    std::vector<double> values;

    // Index of the first observed value (values.size() when fully missing).
    // Throws Error("data", ...) if the observed cells do not form a suffix.
    std::size_t suffix_start() const;
};

struct LoadResult {
    PricePanel panel;
    std::vector<PartialSeries> excluded;  // assets dropped for missing cells

    std::vector<std::string> excluded_ids() const;
};

LoadResult load_csv(const std::string& path);
void write_csv(const PricePanel& panel, const std::string& path);

VariationMatrix variations(const PricePanel& panel, VariationKind kind, std::size_t scale = 1);

// Inverse of variations at scale 1: cumulative sums (diff) or exponentiated
// cumulative sums (log_diff) from per-asset base levels. Dates for the
// reconstructed panel are taken from `dates` when given, otherwise stamped
// as consecutive weekdays from 2006-01-02.
PricePanel prices_from_variations(const VariationMatrix& v, const std::vector<double>& base_levels,
                                  const std::vector<std::string>* dates = nullptr);

SyntheticPanel synthesize(const SyntheticSpec& spec);

// Appends `partial` to the panel with its missing prefix filled in: each
// missing variation is the equal-weight mean variation of donor_cluster plus
// Gaussian noise, and prices are rebuilt backwards from the first observed
// price. A fully missing series is anchored at the donors' mean final price,
// so with a single donor and zero noise the appended series copies it.
PricePanel impute_proxy(const PricePanel& panel, const PartialSeries& partial,
                        const std::vector<std::string>& donor_cluster, double noise_sigma,
                        std::uint64_t seed = 0);

}  // namespace clustab
