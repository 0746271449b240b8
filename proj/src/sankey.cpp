#include "clustab/sankey.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "clustab/error.hpp"
#include "clustab/format.hpp"

namespace clustab {

void SankeyDiagram::validate() const {
    if (columns.size() < 2) throw Error("report_cli", "sankey needs at least 2 columns");
    if (nodes.size() != columns.size() || links.size() + 1 != columns.size()) {
        throw Error("report_cli", "sankey column/node/link shape mismatch");
    }
    for (std::size_t c = 0; c < nodes.size(); ++c) {
        std::size_t total = 0;
        for (const auto& node : nodes[c]) total += node.size;
        if (total != n_assets) {
            throw Error("report_cli", "column '" + columns[c] + "' sizes do not sum to N");
        }
    }
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
        std::vector<std::size_t> out_flow(nodes[c].size(), 0);
        std::vector<std::size_t> in_flow(nodes[c + 1].size(), 0);
        std::size_t total = 0;
        for (const auto& link : links[c]) {
            if (link.from >= out_flow.size() || link.to >= in_flow.size()) {
                throw Error("report_cli", "sankey link endpoint out of range");
            }
            if (link.weight == 0 || link.weight != link.assets.size()) {
                throw Error("report_cli", "sankey link weight does not match its asset list");
            }
            out_flow[link.from] += link.weight;
            in_flow[link.to] += link.weight;
            total += link.weight;
        }
        if (total != n_assets) {
            throw Error("report_cli", "link weights between columns " + std::to_string(c) +
                                          " and " + std::to_string(c + 1) + " do not sum to N");
        }
        for (std::size_t i = 0; i < out_flow.size(); ++i) {
            if (out_flow[i] != nodes[c][i].size) {
                throw Error("report_cli", "out-flow mismatch at column " + std::to_string(c) +
                                              ", node " + std::to_string(i));
            }
        }
        for (std::size_t i = 0; i < in_flow.size(); ++i) {
            if (in_flow[i] != nodes[c + 1][i].size) {
                throw Error("report_cli", "in-flow mismatch at column " + std::to_string(c + 1) +
                                              ", node " + std::to_string(i));
            }
        }
    }
}

SankeyDiagram sankey_layout(const std::vector<std::pair<std::string, Partition>>& partitions) {
    if (partitions.size() < 2) {
        throw Error("report_cli", "sankey layout needs at least 2 partitions");
    }
    const Partition& first = partitions.front().second;
    first.validate();
    for (const auto& [label, p] : partitions) {
        p.validate();
        if (p.asset_ids != first.asset_ids) {
            throw Error("report_cli", "partition '" + label + "' covers different assets");
        }
    }
    const std::size_t n = first.size();

    SankeyDiagram d;
    d.n_assets = n;
    // display_order[c][label] = display index of that cluster in column c
    std::vector<std::vector<std::size_t>> display_order(partitions.size());

    for (std::size_t c = 0; c < partitions.size(); ++c) {
        const Partition& p = partitions[c].second;
        d.columns.push_back(partitions[c].first);
        const auto kc = static_cast<std::size_t>(p.k);
        std::vector<std::size_t> sizes(kc, 0);
        for (int l : p.labels) ++sizes[static_cast<std::size_t>(l)];

        std::vector<std::size_t> order(kc);  // display position -> label
        std::iota(order.begin(), order.end(), 0);
        if (c > 0) {
            // Barycenter of incoming flows, computed against the previous
            // column's display positions.
            const Partition& prev = partitions[c - 1].second;
            std::vector<double> weighted(kc, 0.0);
            std::vector<double> total(kc, 0.0);
            for (std::size_t a = 0; a < n; ++a) {
                const auto to = static_cast<std::size_t>(p.labels[a]);
                const auto from_label = static_cast<std::size_t>(prev.labels[a]);
                weighted[to] += static_cast<double>(display_order[c - 1][from_label]);
                total[to] += 1.0;
            }
            std::vector<double> bary(kc);
            for (std::size_t l = 0; l < kc; ++l) bary[l] = weighted[l] / total[l];
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (bary[a] != bary[b]) return bary[a] < bary[b];
                return a < b;
            });
        }
        display_order[c].assign(kc, 0);
        for (std::size_t pos = 0; pos < kc; ++pos) {
            display_order[c][order[pos]] = pos;
        }
        std::vector<SankeyNode> col_nodes(kc);
        for (std::size_t pos = 0; pos < kc; ++pos) {
            col_nodes[pos] = SankeyNode{static_cast<int>(order[pos]), sizes[order[pos]]};
        }
        d.nodes.push_back(std::move(col_nodes));
    }

    for (std::size_t c = 0; c + 1 < partitions.size(); ++c) {
        const Partition& left = partitions[c].second;
        const Partition& right = partitions[c + 1].second;
        // bucket assets by (left display, right display)
        std::vector<std::vector<std::vector<std::string>>> bucket(
            d.nodes[c].size(), std::vector<std::vector<std::string>>(d.nodes[c + 1].size()));
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t from = display_order[c][static_cast<std::size_t>(left.labels[a])];
            const std::size_t to =
                display_order[c + 1][static_cast<std::size_t>(right.labels[a])];
            bucket[from][to].push_back(left.asset_ids[a]);
        }
        std::vector<SankeyLink> pair_links;
        for (std::size_t from = 0; from < bucket.size(); ++from) {
            for (std::size_t to = 0; to < bucket[from].size(); ++to) {
                if (bucket[from][to].empty()) continue;
                SankeyLink link;
                link.from = from;
                link.to = to;
                link.weight = bucket[from][to].size();
                link.assets = std::move(bucket[from][to]);
                pair_links.push_back(std::move(link));
            }
        }
        d.links.push_back(std::move(pair_links));
    }
    d.validate();
    return d;
}

double sankey_unit_scale(const SankeyDiagram& d, const SankeyStyle& style) {
    std::size_t max_nodes = 0;
    for (const auto& col : d.nodes) max_nodes = std::max(max_nodes, col.size());
    const double gaps = static_cast<double>(max_nodes > 0 ? max_nodes - 1 : 0) * style.node_gap;
    const double usable = style.height - 2.0 * style.margin_y - gaps;
    if (usable <= 0.0) throw Error("report_cli", "sankey style leaves no vertical space");
    return usable / static_cast<double>(d.n_assets);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
                          "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};

}  // namespace

std::string render_svg(const SankeyDiagram& d, const SankeyStyle& style) {
    d.validate();
    const double scale = sankey_unit_scale(d, style);
    const std::size_t n_cols = d.columns.size();
    const double spread =
        (style.width - 2.0 * style.margin_x - style.node_width) / static_cast<double>(n_cols - 1);

    // node_top[c][i] = top y of node i in column c
    std::vector<std::vector<double>> node_top(n_cols);
    std::vector<double> col_x(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        col_x[c] = style.margin_x + static_cast<double>(c) * spread;
        double y = style.margin_y;
        node_top[c].reserve(d.nodes[c].size());
        for (const auto& node : d.nodes[c]) {
            node_top[c].push_back(y);
            y += static_cast<double>(node.size) * scale + style.node_gap;
        }
    }

    // Slot offsets: outgoing links stack by destination order, incoming by
    // source order, so ribbons inside one node never cross.
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_px(style.width)
        << "\" height=\"" << format_px(style.height) << "\" viewBox=\"0 0 "
        << format_px(style.width) << " " << format_px(style.height) << "\">\n";
    svg << "<rect width=\"" << format_px(style.width) << "\" height=\"" << format_px(style.height)
        << "\" fill=\"#ffffff\"/>\n";

    svg << "<g fill=\"none\" stroke=\"#9aa0a6\" stroke-opacity=\"0.45\">\n";
    for (std::size_t c = 0; c + 1 < n_cols; ++c) {
        std::vector<double> out_offset(d.nodes[c].size(), 0.0);
        std::vector<double> in_offset(d.nodes[c + 1].size(), 0.0);
        // links are already ordered (from asc, to asc), which matches the
        // slot stacking on both sides
        for (const auto& link : d.links[c]) {
            const double w = static_cast<double>(link.weight) * scale;
            const double y0 = node_top[c][link.from] + out_offset[link.from] + w / 2.0;
            const double y1 = node_top[c + 1][link.to] + in_offset[link.to] + w / 2.0;
            out_offset[link.from] += w;
            in_offset[link.to] += w;
            const double x0 = col_x[c] + style.node_width;
            const double x1 = col_x[c + 1];
            const double xm = (x0 + x1) / 2.0;
            svg << "<path d=\"M" << format_px(x0) << "," << format_px(y0) << " C" << format_px(xm)
                << "," << format_px(y0) << " " << format_px(xm) << "," << format_px(y1) << " "
                << format_px(x1) << "," << format_px(y1) << "\" stroke-width=\""
                << format_px(w) << "\">";
            std::string assets;
            for (std::size_t a = 0; a < link.assets.size(); ++a) {
                if (a > 0) assets += ", ";
                assets += link.assets[a];
            }
            svg << "<title>" << xml_escape(assets) << "</title></path>\n";
        }
    }
    svg << "</g>\n";

    svg << "<g stroke=\"#3c4043\" stroke-width=\"0.5\">\n";
    for (std::size_t c = 0; c < n_cols; ++c) {
        for (std::size_t i = 0; i < d.nodes[c].size(); ++i) {
            const SankeyNode& node = d.nodes[c][i];
            const double h = static_cast<double>(node.size) * scale;
            svg << "<rect x=\"" << format_px(col_x[c]) << "\" y=\"" << format_px(node_top[c][i])
                << "\" width=\"" << format_px(style.node_width) << "\" height=\"" << format_px(h)
                << "\" fill=\"" << kPalette[static_cast<std::size_t>(node.label) % 12] << "\">";
            svg << "<title>" << xml_escape(d.columns[c]) << ": cluster "
                << node.label << " (" << node.size << " assets)</title></rect>\n";
        }
    }
    svg << "</g>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#202124\">\n";
    for (std::size_t c = 0; c < n_cols; ++c) {
        const double anchor_x = col_x[c] + style.node_width / 2.0;
        svg << "<text x=\"" << format_px(anchor_x) << "\" y=\""
            << format_px(style.margin_y - 12.0) << "\" text-anchor=\"middle\">"
            << xml_escape(d.columns[c]) << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out += ok ? c : '-';
    }
    return out;
}

std::vector<PairSvg> adjacent_pair_svgs(const std::vector<std::pair<std::string, Partition>>& parts,
                                        const SankeyStyle& style) {
    if (parts.size() < 2) throw Error("report_cli", "need at least 2 partitions to render");
    std::vector<PairSvg> out;
    out.reserve(parts.size() - 1);
    for (std::size_t c = 0; c + 1 < parts.size(); ++c) {
        const auto& [left_label, left] = parts[c];
        const auto& [right_label, right] = parts[c + 1];
        std::vector<std::pair<std::string, Partition>> pair;
        if (left.asset_ids == right.asset_ids) {
            pair = {{left_label, left}, {right_label, right}};
        } else {
            std::vector<std::string> common;
            for (const auto& id : left.asset_ids) {
                if (std::find(right.asset_ids.begin(), right.asset_ids.end(), id) !=
                    right.asset_ids.end()) {
                    common.push_back(id);
                }
            }
            if (common.size() < 2) {
                throw Error("report_cli", "partitions '" + left_label + "' and '" + right_label +
                                              "' share fewer than 2 assets");
            }
            pair = {{left_label, left.restrict_to(common)},
                    {right_label, right.restrict_to(common)}};
        }
        out.push_back(PairSvg{left_label, right_label, render_svg(sankey_layout(pair), style)});
    }
    return out;
}

}  // namespace clustab
