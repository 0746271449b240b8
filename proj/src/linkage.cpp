#include "clustab/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "clustab/error.hpp"

namespace clustab {

void Dendrogram::validate() const {
    const std::size_t n = n_leaves();
    if (n < 2) throw Error("clustering", "dendrogram needs at least 2 leaves");
    if (merges.size() != n - 1) {
        throw Error("clustering", "dendrogram must have exactly N-1 merges");
    }
    std::vector<bool> used(2 * n - 1, false);
    for (std::size_t i = 0; i < merges.size(); ++i) {
        const Merge& m = merges[i];
        const std::size_t created = n + i;
        if (m.left >= m.right || m.right >= created) {
            throw Error("clustering", "merge " + std::to_string(i) + " references invalid nodes");
        }
        if (used[m.left] || used[m.right]) {
            throw Error("clustering", "node merged twice at step " + std::to_string(i));
        }
        used[m.left] = used[m.right] = true;
        if (!std::isfinite(m.height) || m.height < 0.0) {
            throw Error("clustering", "merge height must be finite and >= 0");
        }
    }
}

void Partition::validate() const {
    if (asset_ids.empty() || labels.size() != asset_ids.size()) {
        throw Error("clustering", "partition labels must match asset ids");
    }
    if (k < 1) throw Error("clustering", "partition needs k >= 1");
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int l : labels) {
        if (l < 0 || l >= k) throw Error("clustering", "partition label out of range");
        seen[static_cast<std::size_t>(l)] = true;
    }
    for (bool s : seen) {
        if (!s) throw Error("clustering", "partition has an empty cluster label");
    }
}

Partition Partition::from_labels(std::vector<std::string> ids, const std::vector<int>& raw) {
    if (ids.size() != raw.size() || ids.empty()) {
        throw Error("clustering", "labels must match asset ids");
    }
    // First-seen order over asset index = ascending smallest member.
    int next = 0;
    std::map<int, int> canon;
    for (int l : raw) {
        if (!canon.count(l)) canon[l] = next++;
    }
    Partition p;
    p.asset_ids = std::move(ids);
    p.labels.reserve(raw.size());
    for (int l : raw) p.labels.push_back(canon[l]);
    p.k = next;
    p.validate();
    return p;
}

Partition Partition::restrict_to(const std::vector<std::string>& ids) const {
    validate();
    std::vector<int> raw;
    raw.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = std::find(asset_ids.begin(), asset_ids.end(), id);
        if (it == asset_ids.end()) {
            throw Error("clustering", "restrict_to: asset '" + id + "' not in partition");
        }
        raw.push_back(labels[static_cast<std::size_t>(it - asset_ids.begin())]);
    }
    return from_labels(ids, raw);
}

Dendrogram wpgma_linkage(const DistanceMatrix& dm) {
    dm.validate();
    const std::size_t n = dm.size();
    const std::size_t total = 2 * n - 1;

    // Full (2N-1)^2 working matrix indexed by node id; simple and exact.
    Matrix d(total, total, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d(i, j) = dm.values(i, j);
    }
    std::vector<std::size_t> live(n);
    std::iota(live.begin(), live.end(), 0);
    std::vector<std::size_t> size(total, 1);

    Dendrogram dend;
    dend.asset_ids = dm.asset_ids;
    dend.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // Scanning live ids ascending and keeping strict improvement picks
        // the lexicographically smallest (u, v) among tied minima.
        std::size_t best_a = 0, best_b = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < live.size(); ++a) {
            for (std::size_t b = a + 1; b < live.size(); ++b) {
                const double dist = d(live[a], live[b]);
                if (dist < best) {
                    best = dist;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const std::size_t u = live[best_a];
        const std::size_t v = live[best_b];
        const std::size_t w = n + step;
        size[w] = size[u] + size[v];
        dend.merges.push_back(Merge{u, v, best, size[w]});

        live.erase(live.begin() + static_cast<std::ptrdiff_t>(best_b));
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(best_a));
        for (std::size_t x : live) {
            const double mixed = (d(u, x) + d(v, x)) / 2.0;
            d(w, x) = mixed;
            d(x, w) = mixed;
        }
        live.push_back(w);  // w is the largest id, so live stays sorted
    }
    dend.validate();
    return dend;
}

namespace {

Partition partition_from_roots(const Dendrogram& dend, const std::vector<std::size_t>& parent) {
    const std::size_t n = dend.n_leaves();
    std::vector<int> raw(n);
    std::map<std::size_t, int> root_label;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::size_t x = leaf;
        while (parent[x] != x) x = parent[x];
        auto it = root_label.find(x);
        if (it == root_label.end()) {
            it = root_label.emplace(x, static_cast<int>(root_label.size())).first;
        }
        raw[leaf] = it->second;
    }
    return Partition::from_labels(dend.asset_ids, raw);
}

}  // namespace

Partition cut_to_k(const Dendrogram& dend, std::size_t k) {
    dend.validate();
    const std::size_t n = dend.n_leaves();
    if (k < 1 || k > n) {
        throw Error("clustering", "k = " + std::to_string(k) + " out of range 1.." +
                                      std::to_string(n));
    }
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i + k < n; ++i) {  // first n-k merges
        parent[dend.merges[i].left] = n + i;
        parent[dend.merges[i].right] = n + i;
    }
    Partition p = partition_from_roots(dend, parent);
    if (static_cast<std::size_t>(p.k) != k) {
        throw Error("clustering", "cut produced wrong cluster count");
    }
    return p;
}

Partition cut_at_height(const Dendrogram& dend, double height) {
    dend.validate();
    const std::size_t n = dend.n_leaves();
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> applied(2 * n - 1, false);
    for (std::size_t i = 0; i < n; ++i) applied[i] = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Merge& m = dend.merges[i];
        if (m.height <= height && applied[m.left] && applied[m.right]) {
            parent[m.left] = n + i;
            parent[m.right] = n + i;
            applied[n + i] = true;
        }
    }
    return partition_from_roots(dend, parent);
}

}  // namespace clustab
