#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clustab/matrix.hpp"
#include "clustab/panel.hpp"

namespace clustab {

enum class DistanceMethod { pearson, spearman, euclidean, gnpr };

std::string to_string(DistanceMethod m);
DistanceMethod distance_method_from_string(const std::string& s);

// Preprocessing convention: log-differences for the value-sensitive
// distances, plain differences for the rank/distribution ones.
VariationKind default_variation_kind(DistanceMethod m);

struct GnprParams {
    double theta = 0.5;
    std::size_t bins = 0;  // 0 = ceil(sqrt(T')), capped at 100
};

struct DistanceMatrix {
    std::vector<std::string> asset_ids;
    Matrix values;  // N x N
    DistanceMethod method = DistanceMethod::pearson;
    GnprParams params;  // meaningful for gnpr only

    std::size_t size() const { return asset_ids.size(); }

    // Symmetry to 1e-12, zero diagonal, finite non-negative entries; [0,1]
    // bound for the correlation-based methods. Throws Error("distances", ...).
    void validate() const;
};

DistanceMatrix pearson_distance(const VariationMatrix& v);
DistanceMatrix spearman_distance(const VariationMatrix& v);
DistanceMatrix euclidean_distance(const VariationMatrix& v);
DistanceMatrix gnpr_distance(const VariationMatrix& v, double theta, std::size_t bins = 0);

DistanceMatrix compute_distance(const VariationMatrix& v, DistanceMethod m,
                                const GnprParams& params = {});

// Squared Hellinger distance between two normalized histograms.
double hellinger_sq(std::span<const double> p, std::span<const double> q);

// Mid-rank transform: ties receive the average of the ranks they straddle.
// Ranks are 1-based.
std::vector<double> average_ranks(std::span<const double> values);

bool is_constant(std::span<const double> values);

// Sample Pearson correlation, clamped to [-1, 1]. Precondition: neither
// argument is constant.
double pearson_corr(std::span<const double> a, std::span<const double> b);

std::size_t default_gnpr_bins(std::size_t t_count);

void write_distance_csv(const DistanceMatrix& d, const std::string& path);

}  // namespace clustab
