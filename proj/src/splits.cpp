#include "clustab/splits.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "clustab/distance.hpp"
#include "clustab/error.hpp"
#include "clustab/rng.hpp"

namespace clustab {

void SampleSplit::validate() const {
    if (parts.empty()) throw Error("perturbations", "split '" + name + "' has no parts");
    for (const auto& part : parts) {
        if (part.label.empty()) {
            throw Error("perturbations", "split '" + name + "' has a part with an empty label");
        }
        if (part.indices.size() < 3) {
            throw Error("perturbations", "split '" + name + "': part '" + part.label +
                                             "' has fewer than 3 columns");
        }
        std::size_t prev = 0;
        bool first = true;
        for (std::size_t idx : part.indices) {
            if (idx >= column_count) {
                throw Error("perturbations",
                            "split '" + name + "': column index out of range in part '" +
                                part.label + "'");
            }
            if (!first && idx <= prev) {
                throw Error("perturbations", "split '" + name +
                                                 "': indices not strictly increasing in part '" +
                                                 part.label + "'");
            }
            prev = idx;
            first = false;
        }
    }
}

SampleSplit sliding_windows(std::size_t t_count, std::size_t window, std::size_t step) {
    if (window < 3) throw Error("perturbations", "window must be >= 3");
    if (window > t_count) {
        throw Error("perturbations", "window " + std::to_string(window) + " exceeds " +
                                         std::to_string(t_count) + " columns");
    }
    if (step < 1) throw Error("perturbations", "step must be >= 1");
    SampleSplit split;
    split.name = "sliding_window";
    split.column_count = t_count;
    for (std::size_t t = 0; t + window <= t_count; t += step) {
        SplitPart part;
        part.label = "win@" + std::to_string(t);
        part.indices.resize(window);
        for (std::size_t j = 0; j < window; ++j) part.indices[j] = t + j;
        split.parts.push_back(std::move(part));
    }
    split.validate();
    return split;
}

SampleSplit odd_even(std::size_t t_count) {
    if (t_count < 6) throw Error("perturbations", "odd/even split needs at least 6 columns");
    SampleSplit split;
    split.name = "odd_even";
    split.column_count = t_count;
    SplitPart odd{"odd", {}};
    SplitPart even{"even", {}};
    for (std::size_t t = 0; t < t_count; ++t) {
        (t % 2 == 0 ? odd : even).indices.push_back(t);
    }
    split.parts.push_back(std::move(odd));
    split.parts.push_back(std::move(even));
    split.validate();
    return split;
}

SampleSplit regimes(std::size_t t_count, const std::vector<std::size_t>& breakpoints,
                    const std::vector<std::string>* col_dates) {
    if (col_dates && col_dates->size() != t_count) {
        throw Error("perturbations", "regimes: one date per column required");
    }
    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    for (std::size_t b : breakpoints) {
        if (b != 0 && b != t_count) bounds.push_back(b);
    }
    bounds.push_back(t_count);
    for (std::size_t i = 1; i < bounds.size(); ++i) {
        if (bounds[i] <= bounds[i - 1]) {
            throw Error("perturbations", "regime breakpoints must be strictly increasing");
        }
    }
    SampleSplit split;
    split.name = "regimes";
    split.column_count = t_count;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        SplitPart part;
        const std::size_t lo = bounds[i];
        const std::size_t hi = bounds[i + 1];
        if (hi - lo < 3) {
            throw Error("perturbations", "regime [" + std::to_string(lo) + ", " +
                                             std::to_string(hi) + ") has fewer than 3 columns");
        }
        part.label = col_dates ? (*col_dates)[lo] + ".." + (*col_dates)[hi - 1]
                               : "cols[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
        part.indices.resize(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) part.indices[j - lo] = j;
        split.parts.push_back(std::move(part));
    }
    split.validate();
    return split;
}

std::vector<std::size_t> breakpoint_columns(const std::vector<std::string>& panel_dates,
                                            const std::vector<std::size_t>& time_indices,
                                            const std::vector<std::string>& breakpoint_dates) {
    std::vector<std::size_t> cols;
    cols.reserve(breakpoint_dates.size());
    for (const auto& bp : breakpoint_dates) {
        std::size_t col = time_indices.size();
        for (std::size_t j = 0; j < time_indices.size(); ++j) {
            if (panel_dates.at(time_indices[j]) >= bp) {
                col = j;
                break;
            }
        }
        if (col == time_indices.size()) {
            throw Error("perturbations", "breakpoint '" + bp + "' is beyond the panel's dates");
        }
        cols.push_back(col);
    }
    return cols;
}

double type7_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw Error("perturbations", "quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("perturbations", "quantile level out of [0,1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SampleSplit heart_tails(const VariationMatrix& v) {
    v.validate();
    const std::size_t t = v.n_cols();
    if (t < 8) throw Error("perturbations", "heart/tails split needs at least 8 columns");
    std::vector<double> mean_series(t, 0.0);
    for (std::size_t j = 0; j < t; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < v.n_assets(); ++i) acc += v.values(i, j);
        mean_series[j] = acc / static_cast<double>(v.n_assets());
    }
    if (is_constant(mean_series)) {
        throw Error("perturbations", "degenerate split: mean variation series is constant");
    }
    const double q1 = type7_quantile(mean_series, 0.25);
    const double q3 = type7_quantile(mean_series, 0.75);

    SampleSplit split;
    split.name = "heart_tails";
    split.column_count = t;
    SplitPart tails{"tails", {}};
    SplitPart heart{"heart", {}};
    for (std::size_t j = 0; j < t; ++j) {
        const double x = mean_series[j];
        (x <= q1 || x >= q3 ? tails : heart).indices.push_back(j);
    }
    split.parts.push_back(std::move(tails));
    split.parts.push_back(std::move(heart));
    split.validate();
    return split;
}

std::vector<VariationMatrix> multiscale_plan(const PricePanel& panel,
                                             const std::vector<std::size_t>& scales,
                                             VariationKind kind) {
    if (scales.empty()) throw Error("perturbations", "multiscale plan needs at least one scale");
    std::set<std::size_t> seen;
    std::vector<VariationMatrix> out;
    out.reserve(scales.size());
    for (std::size_t k : scales) {
        if (!seen.insert(k).second) {
            throw Error("perturbations", "duplicate scale " + std::to_string(k));
        }
        VariationMatrix v = variations(panel, kind, k);
        if (v.n_cols() < 3) {
            throw Error("perturbations", "scale " + std::to_string(k) + " leaves only " +
                                             std::to_string(v.n_cols()) +
                                             " columns (minimum 3)");
        }
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

// Tenor strings like "6m" or "10y", parsed to year counts for ordering.
double tenor_years(const std::string& tenor) {
    const auto fail = [&]() -> Error {
        return Error("perturbations",
                     "maturity label '" + tenor + "' is not a tenor like '6m' or '5y'");
    };
    if (tenor.size() < 2) throw fail();
    const char unit = tenor.back();
    double scale;
    if (unit == 'y' || unit == 'Y') {
        scale = 1.0;
    } else if (unit == 'm' || unit == 'M') {
        scale = 1.0 / 12.0;
    } else {
        throw fail();
    }
    double num = 0.0;
    for (std::size_t i = 0; i + 1 < tenor.size(); ++i) {
        if (tenor[i] < '0' || tenor[i] > '9') throw fail();
        num = num * 10.0 + (tenor[i] - '0');
    }
    if (num <= 0.0) throw fail();
    return num * scale;
}

}  // namespace

std::vector<std::pair<std::string, PricePanel>> maturity_split(
    const std::map<std::string, PricePanel>& panels) {
    if (panels.empty()) throw Error("perturbations", "maturity split needs at least one panel");
    const PricePanel& ref = panels.begin()->second;
    const std::string& ref_name = panels.begin()->first;
    for (const auto& [name, panel] : panels) {
        panel.validate();
        if (panel.asset_ids != ref.asset_ids) {
            for (const auto& id : ref.asset_ids) {
                if (std::find(panel.asset_ids.begin(), panel.asset_ids.end(), id) ==
                    panel.asset_ids.end()) {
                    throw Error("perturbations", "maturity '" + name + "' is missing asset '" +
                                                     id + "' present in '" + ref_name + "'");
                }
            }
            for (const auto& id : panel.asset_ids) {
                if (std::find(ref.asset_ids.begin(), ref.asset_ids.end(), id) ==
                    ref.asset_ids.end()) {
                    throw Error("perturbations", "maturity '" + ref_name +
                                                     "' is missing asset '" + id +
                                                     "' present in '" + name + "'");
                }
            }
            throw Error("perturbations",
                        "maturity '" + name + "' lists assets in a different order than '" +
                            ref_name + "'");
        }
        if (panel.dates != ref.dates) {
            throw Error("perturbations", "maturity '" + name + "' has different dates than '" +
                                             ref_name + "'");
        }
    }
    std::map<std::string, double> years;
    for (const auto& [name, panel] : panels) years[name] = tenor_years(name);
    std::vector<std::pair<std::string, PricePanel>> out(panels.begin(), panels.end());
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        const double ya = years.at(a.first);
        const double yb = years.at(b.first);
        return ya != yb ? ya < yb : a.first < b.first;
    });
    for (auto& [name, panel] : out) panel.maturity = name;
    return out;
}

std::vector<std::string> population_resample(const std::vector<std::string>& asset_ids,
                                             double keep_fraction, std::uint64_t seed) {
    const std::size_t n = asset_ids.size();
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
        throw Error("perturbations", "keep_fraction must lie in (0, 1]");
    }
    const auto m = static_cast<std::size_t>(
        std::llround(keep_fraction * static_cast<double>(n)));
    if (m < 4) {
        throw Error("perturbations", "resampled population of " + std::to_string(m) +
                                         " assets is too small (minimum 4)");
    }
    Rng rng(seed);
    std::vector<std::size_t> picked = rng.sample_without_replacement(n, m);
    std::sort(picked.begin(), picked.end());
    std::vector<std::string> out;
    out.reserve(m);
    for (std::size_t idx : picked) out.push_back(asset_ids[idx]);
    return out;
}

}  // namespace clustab
