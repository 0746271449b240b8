#include "clustab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "clustab/error.hpp"
#include "clustab/format.hpp"

namespace clustab {

std::string to_string(DistanceMethod m) {
    switch (m) {
        case DistanceMethod::pearson: return "pearson";
        case DistanceMethod::spearman: return "spearman";
        case DistanceMethod::euclidean: return "euclidean";
        case DistanceMethod::gnpr: return "gnpr";
    }
    throw Error("distances", "unknown distance method enum value");
}

DistanceMethod distance_method_from_string(const std::string& s) {
    if (s == "pearson") return DistanceMethod::pearson;
    if (s == "spearman") return DistanceMethod::spearman;
    if (s == "euclidean") return DistanceMethod::euclidean;
    if (s == "gnpr") return DistanceMethod::gnpr;
    throw Error("distances", "unknown distance method '" + s + "'");
}

VariationKind default_variation_kind(DistanceMethod m) {
    return (m == DistanceMethod::pearson || m == DistanceMethod::euclidean)
               ? VariationKind::log_diff
               : VariationKind::diff;
}

void DistanceMatrix::validate() const {
    const std::size_t n = asset_ids.size();
    if (n < 2) throw Error("distances", "distance matrix needs at least 2 assets");
    if (values.rows() != n || values.cols() != n) {
        throw Error("distances", "distance matrix is not square over the asset ids");
    }
    const bool unit_range = method != DistanceMethod::euclidean;
    for (std::size_t i = 0; i < n; ++i) {
        if (values(i, i) != 0.0) {
            throw Error("distances", "nonzero diagonal at asset '" + asset_ids[i] + "'");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double x = values(i, j);
            if (!std::isfinite(x) || x < 0.0) {
                throw Error("distances", "invalid distance entry for pair '" + asset_ids[i] +
                                             "','" + asset_ids[j] + "'");
            }
            if (unit_range && x > 1.0 + 1e-12) {
                throw Error("distances", "distance entry above 1 for method " + to_string(method));
            }
            if (std::fabs(x - values(j, i)) > 1e-12) {
                throw Error("distances", "asymmetric distance for pair '" + asset_ids[i] + "','" +
                                             asset_ids[j] + "'");
            }
        }
    }
}

bool is_constant(std::span<const double> values) {
    for (double x : values) {
        if (x != values[0]) return false;
    }
    return true;
}

double pearson_corr(std::span<const double> a, std::span<const double> b) {
    const std::size_t t = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(t);
    mb /= static_cast<double>(t);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double rho = sab / std::sqrt(saa * sbb);
    return std::clamp(rho, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

namespace {

DistanceMatrix empty_result(const VariationMatrix& v, DistanceMethod m) {
    DistanceMatrix d;
    d.asset_ids = v.asset_ids;
    d.method = m;
    d.values = Matrix(v.n_assets(), v.n_assets(), 0.0);
    return d;
}

void require_no_constant_rows(const VariationMatrix& v, const char* what) {
    for (std::size_t i = 0; i < v.n_assets(); ++i) {
        if (is_constant(v.values.row(i))) {
            throw Error("distances", std::string("degenerate series: asset '") + v.asset_ids[i] +
                                         "' has constant " + what);
        }
    }
}

// Correlation distance (1 - rho)/2 from precomputed per-row series.
void fill_corr_distance(DistanceMatrix& d, const Matrix& rows) {
    const std::size_t n = rows.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double rho = pearson_corr(rows.row(i), rows.row(j));
            const double dist = (1.0 - rho) / 2.0;
            d.values(i, j) = dist;
            d.values(j, i) = dist;
        }
    }
}

Matrix rank_matrix(const VariationMatrix& v) {
    Matrix ranks(v.n_assets(), v.n_cols());
    for (std::size_t i = 0; i < v.n_assets(); ++i) {
        std::vector<double> r = average_ranks(v.values.row(i));
        for (std::size_t j = 0; j < v.n_cols(); ++j) ranks(i, j) = r[j];
    }
    return ranks;
}

}  // namespace

DistanceMatrix pearson_distance(const VariationMatrix& v) {
    v.validate();
    if (v.n_cols() < 3) throw Error("distances", "pearson distance needs at least 3 columns");
    require_no_constant_rows(v, "variations");
    DistanceMatrix d = empty_result(v, DistanceMethod::pearson);
    fill_corr_distance(d, v.values);
    d.validate();
    return d;
}

DistanceMatrix spearman_distance(const VariationMatrix& v) {
    v.validate();
    if (v.n_cols() < 3) throw Error("distances", "spearman distance needs at least 3 columns");
    require_no_constant_rows(v, "variations (all ranks tied)");
    DistanceMatrix d = empty_result(v, DistanceMethod::spearman);
    fill_corr_distance(d, rank_matrix(v));
    d.validate();
    return d;
}

DistanceMatrix euclidean_distance(const VariationMatrix& v) {
    v.validate();
    if (v.n_cols() < 2) throw Error("distances", "euclidean distance needs at least 2 columns");
    DistanceMatrix d = empty_result(v, DistanceMethod::euclidean);
    const std::size_t n = v.n_assets();
    const std::size_t t = v.n_cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < t; ++c) {
                const double diff = v.values(i, c) - v.values(j, c);
                acc += diff * diff;
            }
            const double dist = std::sqrt(acc / static_cast<double>(t));
            d.values(i, j) = dist;
            d.values(j, i) = dist;
        }
    }
    d.validate();
    return d;
}

std::size_t default_gnpr_bins(std::size_t t_count) {
    const auto root = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(t_count))));
    return std::min<std::size_t>(std::max<std::size_t>(root, 2), 100);
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw Error("distances", "hellinger_sq: histogram lengths differ");
    }
    double sp = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(p[k] >= 0.0) || !(q[k] >= 0.0)) {
            throw Error("distances", "hellinger_sq: negative histogram mass");
        }
        sp += p[k];
        sq += q[k];
    }
    if (std::fabs(sp - 1.0) > 1e-9 || std::fabs(sq - 1.0) > 1e-9) {
        throw Error("distances", "hellinger_sq: histogram does not sum to 1");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double diff = std::sqrt(p[k]) - std::sqrt(q[k]);
        acc += diff * diff;
    }
    return 0.5 * acc;
}

DistanceMatrix gnpr_distance(const VariationMatrix& v, double theta, std::size_t bins) {
    v.validate();
    if (v.n_cols() < 3) throw Error("distances", "gnpr distance needs at least 3 columns");
    if (!std::isfinite(theta) || theta < 0.0 || theta > 1.0) {
        throw Error("distances", "gnpr theta must lie in [0,1]");
    }
    if (bins == 0) bins = default_gnpr_bins(v.n_cols());
    if (bins < 2) throw Error("distances", "gnpr needs at least 2 bins");
    require_no_constant_rows(v, "variations");

    DistanceMatrix d = empty_result(v, DistanceMethod::gnpr);
    d.params = GnprParams{theta, bins};
    const Matrix ranks = rank_matrix(v);
    const std::size_t n = v.n_assets();
    const std::size_t t = v.n_cols();
    std::vector<double> hi(bins), hj(bins);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double rank_part = (1.0 - pearson_corr(ranks.row(i), ranks.row(j))) / 2.0;

            // Pooled equal-width binning over the pair's joint value range.
            double lo = v.values(i, 0), hi_val = v.values(i, 0);
            for (std::size_t c = 0; c < t; ++c) {
                lo = std::min({lo, v.values(i, c), v.values(j, c)});
                hi_val = std::max({hi_val, v.values(i, c), v.values(j, c)});
            }
            const double width = (hi_val - lo) / static_cast<double>(bins);
            std::fill(hi.begin(), hi.end(), 0.0);
            std::fill(hj.begin(), hj.end(), 0.0);
            const double unit = 1.0 / static_cast<double>(t);
            for (std::size_t c = 0; c < t; ++c) {
                auto cell = [&](double x) {
                    auto b = static_cast<std::size_t>((x - lo) / width);
                    return std::min(b, bins - 1);
                };
                hi[cell(v.values(i, c))] += unit;
                hj[cell(v.values(j, c))] += unit;
            }
            const double dist_part = hellinger_sq(hi, hj);
            const double inner = theta * rank_part + (1.0 - theta) * dist_part;
            const double dist = std::sqrt(std::max(inner, 0.0));
            d.values(i, j) = dist;
            d.values(j, i) = dist;
        }
    }
    d.validate();
    return d;
}

DistanceMatrix compute_distance(const VariationMatrix& v, DistanceMethod m,
                                const GnprParams& params) {
    switch (m) {
        case DistanceMethod::pearson: return pearson_distance(v);
        case DistanceMethod::spearman: return spearman_distance(v);
        case DistanceMethod::euclidean: return euclidean_distance(v);
        case DistanceMethod::gnpr: return gnpr_distance(v, params.theta, params.bins);
    }
    throw Error("distances", "unknown distance method enum value");
}

void write_distance_csv(const DistanceMatrix& d, const std::string& path) {
    d.validate();
    std::ofstream out(path);
    if (!out) throw Error("distances", "cannot write file '" + path + "'");
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << (i == 0 ? "" : ",") << d.asset_ids[i];
    }
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            out << (j == 0 ? "" : ",") << format_double(d.values(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("distances", "write failed for '" + path + "'");
}

}  // namespace clustab
