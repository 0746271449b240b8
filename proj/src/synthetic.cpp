#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "clustab/dates.hpp"
#include "clustab/error.hpp"
#include "clustab/panel.hpp"
#include "clustab/rng.hpp"

namespace clustab {

void SyntheticSpec::validate() const {
    if (n_assets < 2) throw Error("data", "synthetic spec needs n_assets >= 2");
    if (n_days < 3) throw Error("data", "synthetic spec needs n_days >= 3");
    if (n_clusters < 1 || n_clusters > n_assets) {
        throw Error("data", "synthetic spec needs 1 <= n_clusters <= n_assets");
    }
    const double beta = common_factor_weight;
    const double gamma = cluster_factor_weight;
    if (!std::isfinite(beta) || beta < 0.0 || beta >= 1.0) {
        throw Error("data", "common_factor_weight must lie in [0,1)");
    }
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0) {
        throw Error("data", "cluster_factor_weight must lie in [0,1]");
    }
    if (beta + gamma > 1.0) throw Error("data", "infeasible spec: beta + gamma > 1");
    if (idiosyncratic_sigma.empty() ||
        (idiosyncratic_sigma.size() != 1 && idiosyncratic_sigma.size() != n_clusters)) {
        throw Error("data", "idiosyncratic_sigma needs one entry or one per cluster");
    }
    for (double s : idiosyncratic_sigma) {
        if (!std::isfinite(s) || s <= 0.0) throw Error("data", "idiosyncratic_sigma must be > 0");
    }
    if (!std::isfinite(mean)) throw Error("data", "mean must be finite");
    if (!std::isfinite(tail_mix.p) || tail_mix.p < 0.0 || tail_mix.p > 1.0) {
        throw Error("data", "tail_mix.p must lie in [0,1]");
    }
    if (!std::isfinite(tail_mix.m) || tail_mix.m <= 0.0) {
        throw Error("data", "tail_mix.m must be > 0");
    }
    if (!std::isfinite(base_level) || base_level <= 0.0) {
        throw Error("data", "base_level must be > 0");
    }
    std::size_t prev_end = 0;
    bool first = true;
    for (const auto& seg : stress_segments) {
        if (seg.begin >= seg.end || seg.end > n_days) {
            throw Error("data", "stress segment out of range [" + std::to_string(seg.begin) +
                                    ", " + std::to_string(seg.end) + ")");
        }
        if (!first && seg.begin < prev_end) throw Error("data", "stress segments overlap");
        if (!std::isfinite(seg.beta) || seg.beta < 0.0 || seg.beta >= 1.0) {
            throw Error("data", "stress segment beta must lie in [0,1)");
        }
        if (seg.beta + gamma > 1.0) {
            throw Error("data", "infeasible stress segment: beta_stress + gamma > 1");
        }
        prev_end = seg.end;
        first = false;
    }
}

double SyntheticSpec::sigma_for_cluster(std::size_t c) const {
    return idiosyncratic_sigma.size() == 1 ? idiosyncratic_sigma[0] : idiosyncratic_sigma[c];
}

namespace {

std::string synthetic_asset_id(std::size_t i) {
    std::string id = "A";
    std::string num = std::to_string(i);
    // zero-pad to 4 so lexicographic order matches numeric order
    return id + std::string(num.size() < 4 ? 4 - num.size() : 0, '0') + num;
}

}  // namespace

SyntheticPanel synthesize(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_assets;
    const std::size_t t_var = spec.n_days - 1;
    const std::size_t k = spec.n_clusters;

    std::vector<double> beta_t(t_var, spec.common_factor_weight);
    for (const auto& seg : spec.stress_segments) {
        for (std::size_t t = seg.begin; t < seg.end && t < t_var; ++t) beta_t[t] = seg.beta;
    }

    Rng rng(spec.seed);

    // Factor draw order is fixed: common stream, then one stream per cluster,
    // then per-asset noise. Redraws on a positivity failure consume only that
    // asset's stream, so earlier assets are unaffected.
    std::vector<double> common(t_var);
    for (double& x : common) x = rng.normal();
    std::vector<std::vector<double>> cluster(k, std::vector<double>(t_var));
    for (std::size_t c = 0; c < k; ++c) {
        for (double& x : cluster[c]) x = rng.normal();
    }

    SyntheticPanel out;
    out.panel.asset_ids.reserve(n);
    out.panel.dates = business_days("2006-01-02", spec.n_days);
    out.panel.values = Matrix(n, spec.n_days);
    out.true_labels.reserve(n);

    const double gamma = spec.cluster_factor_weight;
    std::vector<double> prices(spec.n_days);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % k;
        const double sigma = spec.sigma_for_cluster(c);
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            prices[0] = spec.base_level;
            ok = true;
            for (std::size_t t = 0; t < t_var; ++t) {
                double eps = rng.normal();
                if (spec.tail_mix.p > 0.0 && rng.uniform() < spec.tail_mix.p) {
                    eps *= spec.tail_mix.m;
                }
                const double dx =
                    spec.mean + beta_t[t] * common[t] + gamma * cluster[c][t] + sigma * eps;
                prices[t + 1] = prices[t] + dx;
                if (prices[t + 1] <= 0.0) ok = false;
            }
        }
        if (!ok) {
            throw Error("data", "synthesize: asset " + std::to_string(i) +
                                    " kept crossing zero after 100 redraws; raise base_level or "
                                    "lower the variation scale");
        }
        out.panel.asset_ids.push_back(synthetic_asset_id(i));
        for (std::size_t j = 0; j < spec.n_days; ++j) out.panel.values(i, j) = prices[j];
        out.true_labels.push_back(static_cast<int>(c));
    }
    out.panel.validate();
    return out;
}

PricePanel impute_proxy(const PricePanel& panel, const PartialSeries& partial,
                        const std::vector<std::string>& donor_cluster, double noise_sigma,
                        std::uint64_t seed) {
    panel.validate();
    if (donor_cluster.empty()) throw Error("data", "impute_proxy: empty donor cluster");
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
        throw Error("data", "impute_proxy: noise_sigma must be >= 0");
    }
    if (partial.values.size() != panel.n_dates()) {
        throw Error("data", "impute_proxy: partial series is not aligned to the panel dates");
    }
    if (panel.asset_index(partial.asset_id)) {
        throw Error("data", "impute_proxy: asset '" + partial.asset_id + "' already in panel");
    }
    std::vector<std::size_t> donors;
    donors.reserve(donor_cluster.size());
    for (const auto& id : donor_cluster) {
        auto idx = panel.asset_index(id);
        if (!idx) throw Error("data", "impute_proxy: donor '" + id + "' not in panel");
        donors.push_back(*idx);
    }

    const std::size_t t = panel.n_dates();
    const std::size_t s = partial.suffix_start();
    for (std::size_t j = s; j < t; ++j) {
        const double x = partial.values[j];
        if (!std::isfinite(x) || x <= 0.0) {
            throw Error("data", "impute_proxy: non-positive observed price for '" +
                                    partial.asset_id + "' on " + panel.dates[j]);
        }
    }

    // Anchor: first observed price, or the donors' mean final price when the
    // series is fully missing (then the result is a pure donor proxy).
    std::vector<double> filled(t);
    std::size_t anchor = s < t ? s : t - 1;
    double anchor_price;
    if (s < t) {
        anchor_price = partial.values[s];
        for (std::size_t j = s; j < t; ++j) filled[j] = partial.values[j];
    } else {
        double sum = 0.0;
        for (std::size_t d : donors) sum += panel.values(d, t - 1);
        anchor_price = sum / static_cast<double>(donors.size());
        filled[t - 1] = anchor_price;
    }

    Rng rng(seed);
    // Mean donor variation for each missing step, walked backwards from the
    // anchor so the observed suffix stays verbatim.
    std::vector<double> var(anchor);
    for (std::size_t j = 0; j < anchor; ++j) {
        double sum = 0.0;
        for (std::size_t d : donors) sum += panel.values(d, j + 1) - panel.values(d, j);
        var[j] = sum / static_cast<double>(donors.size());
        if (noise_sigma > 0.0) var[j] += noise_sigma * rng.normal();
    }
    double p = anchor_price;
    for (std::size_t j = anchor; j-- > 0;) {
        p -= var[j];
        if (!(p > 0.0)) {
            throw Error("data", "impute_proxy: reconstructed price for '" + partial.asset_id +
                                    "' is non-positive on " + panel.dates[j]);
        }
        filled[j] = p;
    }

    PricePanel out = panel;
    out.asset_ids.push_back(partial.asset_id);
    Matrix grown(out.asset_ids.size(), t);
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
        for (std::size_t j = 0; j < t; ++j) grown(i, j) = panel.values(i, j);
    }
    for (std::size_t j = 0; j < t; ++j) grown(panel.n_assets(), j) = filled[j];
    out.values = std::move(grown);
    out.validate();
    return out;
}

}  // namespace clustab
