#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clustab/linkage.hpp"

namespace clustab {

struct SankeyNode {
    int label = 0;         // cluster label within its partition
    std::size_t size = 0;  // asset count
};

// Flow between adjacent columns; from/to are display indices into the two
// columns' node lists.
struct SankeyLink {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t weight = 0;
    std::vector<std::string> assets;
};

struct SankeyDiagram {
    std::vector<std::string> columns;            // partition labels
    std::vector<std::vector<SankeyNode>> nodes;  // per column, display order
    std::vector<std::vector<SankeyLink>> links;  // per adjacent column pair
    std::size_t n_assets = 0;

    // Flow conservation: per adjacent pair the link weights sum to N, and
    // each node's in-flow and out-flow match its size.
    void validate() const;
};

struct SankeyStyle {
    double width = 960.0;
    double height = 600.0;
    double margin_x = 60.0;
    double margin_y = 40.0;
    double node_width = 18.0;
    double node_gap = 8.0;
};

// Columns follow the input order; the first column lists clusters in
// canonical label order and each later column is ordered by the barycenter
// of its incoming links, which keeps stable clusterings visually parallel.
SankeyDiagram sankey_layout(const std::vector<std::pair<std::string, Partition>>& partitions);

// Vertical pixels per asset: (height - 2*margin_y - max inter-node gaps)/N.
// Ribbon stroke widths are link weight times this scale.
double sankey_unit_scale(const SankeyDiagram& d, const SankeyStyle& style);

std::string render_svg(const SankeyDiagram& d, const SankeyStyle& style = {});

// Filesystem-safe version of a part label (for sankey_<pair>.svg names).
std::string sanitize_label(const std::string& label);

struct PairSvg {
    std::string left;
    std::string right;
    std::string svg;
};

// One rendered diagram per adjacent partition pair. Pairs over different
// asset sets (population draws) are restricted to their common assets first.
std::vector<PairSvg> adjacent_pair_svgs(const std::vector<std::pair<std::string, Partition>>& parts,
                                        const SankeyStyle& style = {});

}  // namespace clustab
