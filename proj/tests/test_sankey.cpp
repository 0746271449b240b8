#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "clustab/error.hpp"
#include "clustab/linkage.hpp"
#include "clustab/rng.hpp"
#include "clustab/sankey.hpp"

using namespace clustab;

namespace {

Partition part(std::vector<int> raw, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("A" + std::to_string(i));
    return Partition::from_labels(std::move(ids), raw);
}

Partition random_partition(std::size_t n, int k, Rng& rng) {
    for (;;) {
        std::vector<int> raw(n);
        std::vector<bool> used(k, false);
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = static_cast<int>(rng.below(static_cast<std::size_t>(k)));
            used[raw[i]] = true;
        }
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
            return part(raw, n);
        }
    }
}

// Extracts every `attr="..."` value from the svg text, in order.
std::vector<std::string> attr_values(const std::string& svg, const std::string& attr) {
    std::vector<std::string> out;
    const std::string needle = attr + "=\"";
    std::size_t pos = 0;
    while ((pos = svg.find(needle, pos)) != std::string::npos) {
        pos += needle.size();
        const std::size_t end = svg.find('"', pos);
        out.push_back(svg.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

// The ribbons live in the one group that disables fill.
std::string links_group(const std::string& svg) {
    const std::size_t start = svg.find("<g fill=\"none\"");
    const std::size_t end = svg.find("</g>", start);
    REQUIRE(start != std::string::npos);
    return svg.substr(start, end - start);
}

// Every cluster rectangle, skipping the full-canvas background (no x attr).
std::vector<std::pair<double, double>> rect_spans(const std::string& svg) {
    std::vector<std::pair<double, double>> out;
    std::size_t pos = 0;
    while ((pos = svg.find("<rect x=", pos)) != std::string::npos) {
        const std::size_t close = svg.find('>', pos);
        const std::string rect = svg.substr(pos, close - pos);
        out.emplace_back(std::stod(attr_values(rect, "y").at(0)),
                         std::stod(attr_values(rect, "height").at(0)));
        pos = close;
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("sankey");

TEST_CASE("identical partitions map one-to-one") {
    const Partition p = part({0, 0, 1, 1, 2}, 5);
    const SankeyDiagram d = sankey_layout({{"left", p}, {"right", p}});
    d.validate();
    REQUIRE(d.links.size() == 1);
    CHECK(d.links[0].size() == 3);  // one link per cluster, no crossings
    for (const auto& link : d.links[0]) {
        CHECK(link.from == link.to);
        CHECK(link.weight == d.nodes[0][link.from].size);
    }
}

TEST_CASE("crossed two-cluster partitions give four unit links") {
    // left {a,b | c,d}, right {a,c | b,d}
    const Partition l = part({0, 0, 1, 1}, 4);
    const Partition r = part({0, 1, 0, 1}, 4);
    const SankeyDiagram d = sankey_layout({{"left", l}, {"right", r}});
    d.validate();
    REQUIRE(d.links.size() == 1);
    REQUIRE(d.links[0].size() == 4);
    for (const auto& link : d.links[0]) CHECK(link.weight == 1);
}

TEST_CASE("flow conservation holds on random partition sequences") {
    Rng rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 50;
        std::vector<std::pair<std::string, Partition>> cols;
        const int n_cols = 2 + static_cast<int>(rng.below(3));
        for (int c = 0; c < n_cols; ++c) {
            const int k = 2 + static_cast<int>(rng.below(6));
            cols.emplace_back("col" + std::to_string(c), random_partition(n, k, rng));
        }
        const SankeyDiagram d = sankey_layout(cols);
        CAPTURE(trial);
        CHECK_NOTHROW(d.validate());
        // explicit recount, independent of validate()
        for (std::size_t pair = 0; pair < d.links.size(); ++pair) {
            std::size_t total = 0;
            for (const auto& link : d.links[pair]) total += link.weight;
            CHECK(total == n);
        }
    }
}

TEST_CASE("layout requires aligned asset sets and at least two columns") {
    const Partition p = part({0, 1, 0}, 3);
    Partition q = part({0, 1, 1}, 3);
    CHECK_THROWS_AS(sankey_layout({{"solo", p}}), Error);
    q.asset_ids[2] = "other";
    CHECK_THROWS_AS(sankey_layout({{"l", p}, {"r", q}}), Error);
}

TEST_CASE("the first column lists clusters in canonical order") {
    const Partition p = part({2, 0, 1, 0, 2}, 5);  // canonical: 0,1,2 by first member
    const SankeyDiagram d = sankey_layout({{"l", p}, {"r", p}});
    REQUIRE(d.nodes[0].size() == 3);
    CHECK(d.nodes[0][0].label == 0);
    CHECK(d.nodes[0][1].label == 1);
    CHECK(d.nodes[0][2].label == 2);
}

TEST_CASE("barycenter ordering keeps a swapped relabeling parallel") {
    // right partition is the left with cluster names swapped; display order
    // should follow the flows so ribbons stay parallel
    const Partition l = part({0, 0, 0, 1, 1, 2}, 6);
    const Partition r = part({1, 1, 1, 2, 2, 0}, 6);
    const SankeyDiagram d = sankey_layout({{"l", l}, {"r", r}});
    d.validate();
    for (const auto& link : d.links[0]) CHECK(link.from == link.to);
}

TEST_CASE("rendering is deterministic") {
    Rng rng(11);
    const Partition l = random_partition(20, 4, rng);
    const Partition r = random_partition(20, 3, rng);
    const SankeyDiagram d = sankey_layout({{"l", l}, {"r", r}});
    const std::string a = render_svg(d);
    const std::string b = render_svg(d);
    CHECK(a == b);
    CHECK(a.substr(0, 4) == "<svg");
    CHECK(a.find("</svg>") != std::string::npos);
}

TEST_CASE("ribbon widths equal link weight times the unit scale") {
    Rng rng(21);
    const Partition l = random_partition(24, 4, rng);
    const Partition r = random_partition(24, 5, rng);
    const SankeyDiagram d = sankey_layout({{"l", l}, {"r", r}});
    const SankeyStyle style;
    const double scale = sankey_unit_scale(d, style);
    const std::string svg = render_svg(d, style);

    std::vector<double> widths;
    for (const auto& s : attr_values(links_group(svg), "stroke-width")) {
        widths.push_back(std::stod(s));
    }
    std::vector<std::size_t> weights;
    for (const auto& link : d.links[0]) weights.push_back(link.weight);
    REQUIRE(widths.size() == weights.size());
    // links are emitted in layout order
    for (std::size_t i = 0; i < widths.size(); ++i) {
        CHECK(widths[i] == doctest::Approx(weights[i] * scale).epsilon(0.005));
        CHECK(std::abs(widths[i] - static_cast<double>(weights[i]) * scale) < 0.5);
    }
}

TEST_CASE("node rectangles stack within the canvas") {
    Rng rng(31);
    const Partition l = random_partition(30, 6, rng);
    const Partition r = random_partition(30, 2, rng);
    const SankeyStyle style;
    const std::string svg = render_svg(sankey_layout({{"l", l}, {"r", r}}), style);
    const auto spans = rect_spans(svg);
    REQUIRE(spans.size() == 8);  // 6 + 2 cluster rectangles
    for (const auto& [y, h] : spans) {
        CHECK(y >= style.margin_y - 1e-9);
        CHECK(y + h <= style.height - style.margin_y + 1e-9);
    }
}

TEST_CASE("labels are escaped in the emitted xml") {
    Partition p = Partition::from_labels({"a<b", "c&d", "e\"f"}, {0, 0, 1});
    const SankeyDiagram d = sankey_layout({{"l<&>", p}, {"r", p}});
    const std::string svg = render_svg(d);
    CHECK(svg.find("l&lt;&amp;&gt;") != std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("c&amp;d") != std::string::npos);
    CHECK(svg.find("l<&>") == std::string::npos);
}

TEST_CASE("sanitize_label keeps filenames portable") {
    CHECK(sanitize_label("win@120") == "win-120");
    CHECK(sanitize_label("2008-01-02..2009-12-31") == "2008-01-02..2009-12-31");
    CHECK(sanitize_label("scale=4") == "scale-4");
    CHECK(sanitize_label("a b/c") == "a-b-c");
}

TEST_CASE("adjacent pairs restrict to common assets") {
    // middle column drops two assets, as a population draw would
    const Partition full1 = part({0, 0, 1, 1, 2, 2}, 6);
    Partition sub = full1.restrict_to({"A0", "A2", "A3", "A4"});
    const Partition full2 = part({0, 1, 1, 0, 2, 2}, 6);
    const auto svgs = adjacent_pair_svgs(
        {{"first", full1}, {"draw", sub}, {"second", full2}});
    REQUIRE(svgs.size() == 2);
    CHECK(svgs[0].left == "first");
    CHECK(svgs[0].right == "draw");
    CHECK(svgs[1].left == "draw");
    CHECK(svgs[1].right == "second");
    for (const auto& pair : svgs) {
        CHECK(pair.svg.find("</svg>") != std::string::npos);
    }
}

TEST_CASE("adjacent pairs with too little overlap are an error") {
    const Partition a = part({0, 1, 2}, 3);
    Partition b = Partition::from_labels({"B0", "B1", "A0"}, {0, 1, 2});
    CHECK_THROWS_AS(adjacent_pair_svgs({{"a", a}, {"b", b}}), Error);
}

TEST_SUITE_END();
