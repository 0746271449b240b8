#include "clustab/stability.hpp"

#include <algorithm>
#include <cmath>

#include "clustab/error.hpp"

namespace clustab {

std::vector<long long> Contingency::row_sums() const {
    std::vector<long long> sums(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) sums[i] += at(i, j);
    }
    return sums;
}

std::vector<long long> Contingency::col_sums() const {
    std::vector<long long> sums(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) sums[j] += at(i, j);
    }
    return sums;
}

long long Contingency::total() const {
    long long acc = 0;
    for (long long c : counts) acc += c;
    return acc;
}

Contingency contingency(const Partition& p, const Partition& q) {
    p.validate();
    q.validate();
    if (p.asset_ids != q.asset_ids) {
        throw Error("stability", "partitions cover different asset sets");
    }
    Contingency c;
    c.rows = static_cast<std::size_t>(p.k);
    c.cols = static_cast<std::size_t>(q.k);
    c.counts.assign(c.rows * c.cols, 0);
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        const auto r = static_cast<std::size_t>(p.labels[i]);
        const auto col = static_cast<std::size_t>(q.labels[i]);
        ++c.counts[r * c.cols + col];
    }
    return c;
}

namespace {

long long comb2(long long n) { return n * (n - 1) / 2; }

// Identical up to relabeling <=> the contingency table is a one-to-one
// matching between the clusters.
bool identical_up_to_relabel(const Contingency& c) {
    if (c.rows != c.cols) return false;
    for (std::size_t i = 0; i < c.rows; ++i) {
        std::size_t nonzero = 0;
        for (std::size_t j = 0; j < c.cols; ++j) {
            if (c.at(i, j) != 0) ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    for (std::size_t j = 0; j < c.cols; ++j) {
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < c.rows; ++i) {
            if (c.at(i, j) != 0) ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    return true;
}

}  // namespace

double ari(const Partition& p, const Partition& q) {
    const Contingency c = contingency(p, q);
    const long long n = c.total();
    if (n < 2) throw Error("stability", "ARI needs at least 2 assets");

    long long index = 0;
    for (long long cnt : c.counts) index += comb2(cnt);
    long long pa = 0, pb = 0;
    for (long long s : c.row_sums()) pa += comb2(s);
    for (long long s : c.col_sums()) pb += comb2(s);
    const long long pairs = comb2(n);

    // Degenerate adjustment: expected == max, detected exactly by
    // cross-multiplying (pa+pb)/2 == pa*pb/pairs in 128-bit integers.
    const bool degenerate =
        static_cast<__int128>(pa + pb) * pairs == static_cast<__int128>(2) * pa * pb;
    if (degenerate) return identical_up_to_relabel(c) ? 1.0 : 0.0;

    const double expected =
        static_cast<double>(pa) * static_cast<double>(pb) / static_cast<double>(pairs);
    const double maximum = 0.5 * (static_cast<double>(pa) + static_cast<double>(pb));
    return (static_cast<double>(index) - expected) / (maximum - expected);
}

std::vector<MeanCorrelationPoint> mean_correlation_series(const VariationMatrix& v,
                                                          std::size_t window, std::size_t step) {
    v.validate();
    if (v.n_assets() < 2) throw Error("stability", "mean correlation needs at least 2 assets");
    if (window < 3) throw Error("stability", "window must be >= 3");
    if (step < 1) throw Error("stability", "step must be >= 1");
    if (window > v.n_cols()) {
        throw Error("stability", "window " + std::to_string(window) + " exceeds " +
                                     std::to_string(v.n_cols()) + " columns");
    }
    std::vector<MeanCorrelationPoint> series;
    const std::size_t n = v.n_assets();
    for (std::size_t t = 0; t + window <= v.n_cols(); t += step) {
        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto wi = v.values.row(i).subspan(t, window);
            if (is_constant(wi)) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto wj = v.values.row(j).subspan(t, window);
                if (is_constant(wj)) continue;
                acc += pearson_corr(wi, wj);
                ++used;
            }
        }
        if (used == 0) {
            throw Error("stability",
                        "all pairs degenerate in window starting at " + std::to_string(t));
        }
        series.push_back({t, acc / static_cast<double>(used)});
    }
    return series;
}

}  // namespace clustab
