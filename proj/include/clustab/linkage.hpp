#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clustab/distance.hpp"

namespace clustab {

// One agglomeration step. Node ids: leaves are 0..N-1, the i-th merge
// creates node N+i. left < right always (the tie-break orders the pair).
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;  // leaves under the new node
};

struct Dendrogram {
    std::vector<std::string> asset_ids;
    std::vector<Merge> merges;  // exactly N-1 entries

    std::size_t n_leaves() const { return asset_ids.size(); }
    void validate() const;
};

struct Partition {
    std::vector<std::string> asset_ids;
    std::vector<int> labels;  // surjection onto 0..k-1
    int k = 0;

    std::size_t size() const { return asset_ids.size(); }
    void validate() const;

    // Canonicalizes arbitrary raw labels: clusters are renumbered 0..k-1 by
    // ascending smallest member index.
    static Partition from_labels(std::vector<std::string> ids, const std::vector<int>& raw);

    // Sub-partition over the given asset ids (which must all be present),
    // relabeled canonically.
    Partition restrict_to(const std::vector<std::string>& ids) const;
};

// Weighted-linkage (WPGMA) agglomeration: repeatedly merge the closest pair;
// the merged cluster's distance to any other node is the plain average of its
// two children's distances. Ties on the minimum are broken toward the
// lexicographically smallest (left, right) node-id pair.
Dendrogram wpgma_linkage(const DistanceMatrix& d);

// Partition from undoing the last k-1 merges, canonically labeled.
Partition cut_to_k(const Dendrogram& dend, std::size_t k);

// Constant-height variant: applies merges in order while height <= cut
// height and both children are still unmerged roots (which keeps the cut
// well-defined on non-monotone WPGMA sequences).
Partition cut_at_height(const Dendrogram& dend, double height);

}  // namespace clustab
