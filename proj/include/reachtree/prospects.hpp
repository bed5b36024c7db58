#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace reachtree {

// Weight of the x-th neighbor: (x^2 + 1)^-k. Larger k keeps the horizontal
// spread more local.
inline double prospect_weight(double x, double k) {
    return std::pow(x * x + 1.0, -k);
}

// Accumulator for one unexplored sibling bin. Contributions are folded in as
// a weighted running mean so the estimate stays inside [-1, 1] no matter how
// many updates arrive.
struct ProspectCell {
    double value = 0.0;    // weighted mean of signed contributions
    double weight = 0.0;   // total weight absorbed so far
    bool promoted = false; // bin now owned by a real node; accumulator retired

    void add(double contribution, double w) {
        if (promoted || w <= 0.0) return;
        value = (value * weight + contribution * w) / (weight + w);
        weight += w;
    }
};

// Prospect accumulators for every child bin under one parent node.
struct ProspectLayer {
    int level = 0;  // tree level of the bins this layer covers (1..4)
    double k = 2.0; // degree of propagation
    std::vector<ProspectCell> cells;

    ProspectLayer() = default;
    ProspectLayer(int level_, std::size_t bins, double k_) : level(level_), k(k_), cells(bins) {}

    // Once a bin gets a real node its own statistics take over; the
    // accumulated prospect is discarded and the cell stops absorbing updates.
    void promote(int bin) {
        ProspectCell& c = cells[static_cast<std::size_t>(bin)];
        c.value = 0.0;
        c.weight = 0.0;
        c.promoted = true;
    }

    double value_at(int bin) const {
        const ProspectCell& c = cells[static_cast<std::size_t>(bin)];
        return c.promoted ? 0.0 : c.value;
    }
};

// Smear a signed attempt result sideways: every live bin at index distance x
// from the visited bin absorbs signed_delta * P_x with weight P_x. Bins that
// already have real nodes are left alone.
inline void propagate_horizontal(ProspectLayer& layer, int visited_bin, double signed_delta) {
    const int n = static_cast<int>(layer.cells.size());
    for (int b = 0; b < n; ++b) {
        if (b == visited_bin) continue;
        const double px = prospect_weight(std::abs(b - visited_bin), layer.k);
        layer.cells[static_cast<std::size_t>(b)].add(signed_delta * px, px);
    }
}

} // namespace reachtree
