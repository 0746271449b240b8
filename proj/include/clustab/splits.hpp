#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clustab/panel.hpp"

namespace clustab {

// Labeled subsets of a variation matrix's columns. Parts need not cover or
// partition the full range, but each must hold at least 3 columns.
struct SplitPart {
    std::string label;
    std::vector<std::size_t> indices;  // strictly increasing
};

struct SampleSplit {
    std::string name;
    std::size_t column_count = 0;
    std::vector<SplitPart> parts;

    void validate() const;
};

// Windows [t, t+window) for t = 0, step, 2*step, ... while t+window fits.
SampleSplit sliding_windows(std::size_t t_count, std::size_t window, std::size_t step);

// Two interleaved parts; "odd" holds the 1st, 3rd, ... trading days, which
// are the even column indices.
SampleSplit odd_even(std::size_t t_count);

// Contiguous regimes between breakpoints (outer bounds 0 and t_count are
// implied). col_dates, when given, must have one date per column and is used
// for the part labels.
SampleSplit regimes(std::size_t t_count, const std::vector<std::size_t>& breakpoints,
                    const std::vector<std::string>* col_dates = nullptr);

// Maps calendar breakpoints to variation columns: each date resolves to the
// first column realized on or after it.
std::vector<std::size_t> breakpoint_columns(const std::vector<std::string>& panel_dates,
                                            const std::vector<std::size_t>& time_indices,
                                            const std::vector<std::string>& breakpoint_dates);

// Splits columns by the cross-sectional mean variation: "tails" holds the
// columns at or beyond the quartiles of that series, "heart" the rest.
SampleSplit heart_tails(const VariationMatrix& v);

// Linear-interpolation (type-7) quantile of the values; p in [0, 1].
double type7_quantile(std::vector<double> values, double p);

inline const std::vector<std::size_t> kDefaultMultiscale = {1, 2, 4, 8, 16, 32};

// One variation matrix per sampling scale. Every scale must leave at least
// 3 columns.
std::vector<VariationMatrix> multiscale_plan(const PricePanel& panel,
                                             const std::vector<std::size_t>& scales,
                                             VariationKind kind);

// Validates that all maturity panels are aligned on assets and dates and
// orders them by parsed tenor (e.g. 6m < 1y < 5y < 10y).
std::vector<std::pair<std::string, PricePanel>> maturity_split(
    const std::map<std::string, PricePanel>& panels);

// Seed-deterministic subset of round(keep_fraction * N) assets, in original
// order. The subset must have at least 4 assets.
std::vector<std::string> population_resample(const std::vector<std::string>& asset_ids,
                                             double keep_fraction, std::uint64_t seed);

}  // namespace clustab
