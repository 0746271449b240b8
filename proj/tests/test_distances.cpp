#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "clustab/distance.hpp"
#include "clustab/error.hpp"
#include "clustab/panel.hpp"
#include "clustab/rng.hpp"
#include "support/helpers.hpp"

using namespace clustab;

namespace {

VariationMatrix make_vm(std::vector<std::vector<double>> rows) {
    VariationMatrix v;
    const std::size_t n = rows.size();
    const std::size_t t = rows.front().size();
    for (std::size_t i = 0; i < n; ++i) v.asset_ids.push_back("A" + std::to_string(i));
    for (std::size_t j = 0; j < t; ++j) v.time_indices.push_back(j + 1);
    v.values = Matrix(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < t; ++j) v.values(i, j) = rows[i][j];
    }
    return v;
}

VariationMatrix normal_rows(std::size_t n, std::size_t t, double sigma, std::uint64_t seed) {
    VariationMatrix v;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) v.asset_ids.push_back("A" + std::to_string(i));
    for (std::size_t j = 0; j < t; ++j) v.time_indices.push_back(j + 1);
    v.values = Matrix(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < t; ++j) v.values(i, j) = sigma * rng.normal();
    }
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("distances");

TEST_CASE("pearson distance is 0 for affine and 1 for inverted series") {
    const std::vector<double> base = {0.3, -1.2, 0.8, 2.1, -0.4, 0.05};
    std::vector<double> affine(base.size()), negated(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) {
        affine[j] = 2.0 * base[j] + 5.0;
        negated[j] = -base[j];
    }
    const DistanceMatrix d = pearson_distance(make_vm({base, affine, negated}));
    CHECK(d.values(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.values(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.values(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
    d.validate();
}

TEST_CASE("pearson distance of independent normals concentrates at 0.5") {
    const DistanceMatrix d = pearson_distance(normal_rows(4, 100000, 1.0, 2024));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            CHECK(d.values(i, j) == doctest::Approx(0.5).epsilon(0.02));
            CHECK(std::abs(d.values(i, j) - 0.5) < 0.01);
        }
    }
}

TEST_CASE("spearman distance is invariant to increasing transforms") {
    const std::vector<double> base = {0.3, -1.2, 0.8, 2.1, -0.4, 0.05};
    std::vector<double> expd(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) expd[j] = std::exp(base[j]);
    const DistanceMatrix d = spearman_distance(make_vm({base, expd}));
    CHECK(d.values(0, 1) == 0.0);
}

TEST_CASE("spearman distance is 1 for reversed ranks") {
    const std::vector<double> base = {1.0, 5.0, 3.0, 4.0, 2.0};
    const std::vector<double> reversed = {5.0, 1.0, 3.0, 2.0, 4.0};
    const DistanceMatrix d = spearman_distance(make_vm({base, reversed}));
    CHECK(d.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spearman distance matches the hand-computed rank formula") {
    // ranks d^2 sum = 2, rho_S = 1 - 6*2/(4*15) = 0.8, D = (1-0.8)/2 = 0.1
    const DistanceMatrix d =
        spearman_distance(make_vm({{1, 2, 3, 4}, {1, 3, 2, 4}}));
    CHECK(d.values(0, 1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("average ranks resolve ties to midpoints") {
    const std::vector<double> x = {3.0, 1.0, 3.0, 2.0, 3.0};
    const std::vector<double> r = average_ranks(x);
    CHECK(r == std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0});
    const std::vector<double> y = {5.0, 5.0};
    CHECK(average_ranks(y) == std::vector<double>{1.5, 1.5});
}

TEST_CASE("euclidean distance follows the direct formula") {
    const DistanceMatrix d = euclidean_distance(make_vm({{0, 0}, {3, 4}, {0, 0}}));
    CHECK(d.values(0, 1) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(d.values(0, 2) == 0.0);
}

TEST_CASE("euclidean distance squared tracks twice the variance") {
    const double sigma = 2.0;
    const DistanceMatrix d = euclidean_distance(normal_rows(4, 100000, sigma, 515));
    double mean_sq = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            mean_sq += d.values(i, j) * d.values(i, j);
            ++count;
        }
    }
    mean_sq /= count;
    CHECK(mean_sq == doctest::Approx(2.0 * sigma * sigma).epsilon(0.05));
}

TEST_CASE("hellinger_sq on histograms") {
    const std::vector<double> p = {0.5, 0.5};
    CHECK(hellinger_sq(p, p) == 0.0);
    CHECK(hellinger_sq(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // (1/2)((sqrt(.5)-sqrt(.25))^2 + (sqrt(.5)-sqrt(.75))^2); cross-checked
    // against the equivalent 1 - Bhattacharyya-coefficient identity
    const double expected = 0.5 * ((std::sqrt(0.5) - std::sqrt(0.25)) * (std::sqrt(0.5) - std::sqrt(0.25)) +
                                   (std::sqrt(0.5) - std::sqrt(0.75)) * (std::sqrt(0.5) - std::sqrt(0.75)));
    CHECK(hellinger_sq(p, std::vector<double>{0.25, 0.75}) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.0340742).epsilon(1e-5));
    const double bc = std::sqrt(0.5 * 0.25) + std::sqrt(0.5 * 0.75);
    CHECK(expected == doctest::Approx(1.0 - bc).epsilon(1e-12));
    CHECK_THROWS_AS(hellinger_sq(p, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(hellinger_sq(p, std::vector<double>{0.7, 0.7}), Error);
}

TEST_CASE("gnpr distance vanishes for identical rows") {
    const VariationMatrix v = make_vm({{0.1, -0.4, 0.7, 0.2}, {0.1, -0.4, 0.7, 0.2}});
    const DistanceMatrix d = gnpr_distance(v, 0.5);
    CHECK(d.values(0, 1) == 0.0);
}

TEST_CASE("gnpr at theta=1 squares to the spearman distance") {
    const VariationMatrix v = normal_rows(6, 400, 1.0, 88);
    const DistanceMatrix g = gnpr_distance(v, 1.0);
    const DistanceMatrix s = spearman_distance(v);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(g.values(i, j) * g.values(i, j) ==
                  doctest::Approx(s.values(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gnpr rank part is invariant to increasing transforms") {
    const VariationMatrix v = normal_rows(4, 300, 1.0, 99);
    VariationMatrix w = v;
    for (std::size_t j = 0; j < w.n_cols(); ++j) {
        w.values(2, j) = std::atan(w.values(2, j));  // order-preserving
    }
    const DistanceMatrix dv = gnpr_distance(v, 1.0);
    const DistanceMatrix dw = gnpr_distance(w, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(dw.values(i, j) == doctest::Approx(dv.values(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gnpr at theta=0 separates laws with different means") {
    // rows 0,1 ~ N(0,1); row 2 ~ N(4,1). Analytic Hellinger between N(0,1)
    // and N(4,1) is sqrt(1 - exp(-2)) ~ 0.9299.
    VariationMatrix v = normal_rows(3, 100000, 1.0, 4096);
    for (std::size_t j = 0; j < v.n_cols(); ++j) v.values(2, j) += 4.0;
    const DistanceMatrix d = gnpr_distance(v, 0.0, 100);
    CHECK(d.values(0, 1) < 0.1);
    CHECK(d.values(0, 2) > 0.1);
    CHECK(d.values(0, 2) == doctest::Approx(std::sqrt(1.0 - std::exp(-2.0))).epsilon(0.05));
}

TEST_CASE("default gnpr bin count is sqrt of the column count, clamped") {
    CHECK(default_gnpr_bins(4) == 2);
    CHECK(default_gnpr_bins(100) == 10);
    CHECK(default_gnpr_bins(101) == 11);
    CHECK(default_gnpr_bins(2) == 2);
    CHECK(default_gnpr_bins(1000000) == 100);
}

TEST_CASE("gnpr rejects bad parameters") {
    const VariationMatrix v = make_vm({{1, 2, 3}, {2, 1, 3}});
    CHECK_THROWS_AS(gnpr_distance(v, -0.1), Error);
    CHECK_THROWS_AS(gnpr_distance(v, 1.1), Error);
    CHECK_THROWS_AS(gnpr_distance(v, 0.5, 1), Error);
    CHECK_NOTHROW(gnpr_distance(v, 0.5, 2));
}

TEST_CASE("correlation distances reject constant rows") {
    const VariationMatrix v = make_vm({{1, 1, 1}, {2, 1, 3}});
    CHECK_THROWS_AS(pearson_distance(v), Error);
    CHECK_THROWS_AS(spearman_distance(v), Error);
    CHECK_THROWS_AS(gnpr_distance(v, 0.5), Error);
    CHECK_NOTHROW(euclidean_distance(v));
}

TEST_CASE("method and kind lookups round trip") {
    for (const auto m : {DistanceMethod::pearson, DistanceMethod::spearman,
                         DistanceMethod::euclidean, DistanceMethod::gnpr}) {
        CHECK(distance_method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(distance_method_from_string("cosine"), Error);
    CHECK(default_variation_kind(DistanceMethod::pearson) == VariationKind::log_diff);
    CHECK(default_variation_kind(DistanceMethod::euclidean) == VariationKind::log_diff);
    CHECK(default_variation_kind(DistanceMethod::spearman) == VariationKind::diff);
    CHECK(default_variation_kind(DistanceMethod::gnpr) == VariationKind::diff);
}

TEST_CASE("compute_distance dispatches and stamps metadata") {
    const VariationMatrix v = normal_rows(3, 50, 1.0, 7);
    const DistanceMatrix d = compute_distance(v, DistanceMethod::gnpr, GnprParams{0.25, 4});
    CHECK(d.method == DistanceMethod::gnpr);
    CHECK(d.params.theta == 0.25);
    CHECK(d.params.bins == 4);
    CHECK(d.asset_ids == v.asset_ids);
    const DistanceMatrix e = compute_distance(v, DistanceMethod::euclidean);
    CHECK(e.method == DistanceMethod::euclidean);
}

TEST_CASE("distance matrix validation catches violations") {
    const VariationMatrix v = normal_rows(3, 50, 1.0, 8);
    DistanceMatrix d = pearson_distance(v);
    CHECK_NOTHROW(d.validate());
    SUBCASE("asymmetry") {
        d.values(0, 1) += 1e-6;
        CHECK_THROWS_AS(d.validate(), Error);
    }
    SUBCASE("nonzero diagonal") {
        d.values(1, 1) = 1e-9;
        CHECK_THROWS_AS(d.validate(), Error);
    }
    SUBCASE("out of unit range") {
        d.values(0, 1) = d.values(1, 0) = 1.5;
        CHECK_THROWS_AS(d.validate(), Error);
    }
    SUBCASE("euclidean may exceed 1") {
        DistanceMatrix e = euclidean_distance(v);
        e.values(0, 1) = e.values(1, 0) = 1.5;
        CHECK_NOTHROW(e.validate());
    }
}

TEST_CASE("distance csv lists assets in the header and a square body") {
    testutil::TempDir dir;
    const DistanceMatrix d = pearson_distance(make_vm({{1, 2, 3}, {3, 1, 2}, {2, 3, 1}}));
    write_distance_csv(d, dir.file("d.csv"));
    const std::string text = testutil::read_file(dir.file("d.csv"));
    CHECK(text.substr(0, text.find('\n')) == "A0,A1,A2");
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 4);
}

TEST_SUITE_END();
