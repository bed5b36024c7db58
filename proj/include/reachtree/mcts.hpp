#pragma once

#include "reachtree/kinematics.hpp"
#include "reachtree/prospects.hpp"
#include "reachtree/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace reachtree {

constexpr int kTreeDepth = 4; // yaw, pitch, roll, elbow — one level each

struct NodeStats {
    double q_total = 0.0;       // cumulative normalized reward, 0 <= q <= n
    std::uint64_t n_visits = 0;
};

// Empirical mean reward (Q/N). Callers must route unvisited nodes through the
// UCT infinity rule instead of asking for a mean that does not exist.
inline double mean_reward(const NodeStats& s) {
    if (s.n_visits == 0) throw std::domain_error("mean_reward: node has no visits");
    return s.q_total / static_cast<double>(s.n_visits);
}

// UCT: mean + cp * sqrt(ln(parent visits) / child visits). An unvisited child
// scores +infinity so it is always preferred; cp = 0 degenerates to greedy.
inline double uct_value(const NodeStats& child, std::uint64_t parent_n, double cp) {
    if (child.n_visits == 0) return std::numeric_limits<double>::infinity();
    const double bonus = std::sqrt(std::log(static_cast<double>(parent_n)) /
                                   static_cast<double>(child.n_visits));
    return mean_reward(child) + cp * bonus;
}

struct SearchParams {
    double cp = std::sqrt(2.0);        // exploration constant
    std::uint64_t visit_threshold = 1; // below this, children are picked uniformly
    std::array<int, kTreeDepth> bins{12, 8, 12, 6}; // per-level bin counts
    std::uint64_t rng_seed = 1;
    double prospect_k = 2.0;           // degree of horizontal propagation

    void validate() const {
        if (cp < 0.0) throw std::invalid_argument("search: cp must be >= 0");
        for (int b : bins)
            if (b < 2) throw std::invalid_argument("search: every level needs >= 2 bins");
        if (!(prospect_k > 0.0)) throw std::invalid_argument("search: prospect_k must be > 0");
    }
};

// One selection decision over candidate stats. If any candidate sits below
// the visit threshold the pick is uniform among those; otherwise the UCT
// argmax wins, with exact ties broken uniformly at random.
inline std::size_t select_among(std::span<const NodeStats> candidates, std::uint64_t parent_n,
                                double cp, std::uint64_t threshold, Rng& rng) {
    if (candidates.empty()) throw std::logic_error("select_among: no candidates");

    std::vector<std::size_t> below;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].n_visits < threshold) below.push_back(i);
    if (!below.empty()) return below[uniform_index(rng, below.size())];

    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double v = uct_value(candidates[i], parent_n, cp);
        if (v > best) {
            best = v;
            ties.assign(1, i);
        } else if (v == best) {
            ties.push_back(i);
        }
    }
    return ties[uniform_index(rng, ties.size())];
}

struct TreeNode {
    int level = 0; // 0 = root, kTreeDepth = leaf
    int bin = -1;  // incoming action: bin index at this node's level (-1 for root)
    std::int32_t parent = -1;
    NodeStats stats;
    std::vector<std::int32_t> children; // slot per child bin, -1 = not yet created
    ProspectLayer prospects;            // estimates for the not-yet-created child bins
};

using TreePath = std::array<std::int32_t, kTreeDepth + 1>; // node ids, root..leaf

// The constant-depth search tree over discretized joint angles. All
// randomness is injected per call, so the tree itself is a deterministic
// value type; one instance has a single writer.
class Tree {
public:
    explicit Tree(SearchParams params) : params_(params) {
        params_.validate();
        nodes_.push_back(make_node(0, -1, -1));
    }

    const SearchParams& params() const { return params_; }
    const TreeNode& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::int32_t node_count() const { return static_cast<std::int32_t>(nodes_.size()); }
    const NodeStats& root_stats() const { return nodes_[0].stats; }

    std::int32_t child_at(std::int32_t id, int bin) const {
        return nodes_[static_cast<std::size_t>(id)].children[static_cast<std::size_t>(bin)];
    }

    // Materialize the child node for a bin, retiring its prospect cell.
    std::int32_t ensure_child(std::int32_t id, int bin) {
        TreeNode& parent = nodes_[static_cast<std::size_t>(id)];
        if (bin < 0 || bin >= static_cast<int>(parent.children.size()))
            throw std::out_of_range("ensure_child: bin out of range");
        std::int32_t child = parent.children[static_cast<std::size_t>(bin)];
        if (child >= 0) return child;
        child = static_cast<std::int32_t>(nodes_.size());
        const int level = parent.level + 1;
        parent.children[static_cast<std::size_t>(bin)] = child;
        parent.prospects.promote(bin);
        nodes_.push_back(make_node(level, bin, id)); // invalidates `parent`
        return child;
    }

    // Selection among the existing children of a node (below-threshold rule,
    // then UCT argmax). Returns the chosen child node id.
    std::int32_t best_child(std::int32_t id, double cp, std::uint64_t threshold, Rng& rng) const {
        const TreeNode& n = nodes_[static_cast<std::size_t>(id)];
        std::vector<NodeStats> stats;
        std::vector<std::int32_t> ids;
        for (std::int32_t c : n.children) {
            if (c < 0) continue;
            stats.push_back(nodes_[static_cast<std::size_t>(c)].stats);
            ids.push_back(c);
        }
        if (ids.empty()) throw std::logic_error("best_child: node has no children");
        return ids[select_among(stats, n.stats.n_visits, cp, threshold, rng)];
    }

    // One simulated descent: four selection decisions from the root, treating
    // every not-yet-created bin as an unvisited child. At most one new node
    // per level is created (the one the descent passes through).
    TreePath select_path(Rng& rng) {
        TreePath path{};
        path[0] = 0;
        for (int level = 0; level < kTreeDepth; ++level) {
            const std::int32_t id = path[level];
            const TreeNode& n = nodes_[static_cast<std::size_t>(id)];
            std::vector<NodeStats> stats(n.children.size());
            for (std::size_t b = 0; b < n.children.size(); ++b)
                if (n.children[b] >= 0) stats[b] = nodes_[static_cast<std::size_t>(n.children[b])].stats;
            const int bin = static_cast<int>(
                select_among(stats, n.stats.n_visits, params_.cp, params_.visit_threshold, rng));
            path[level + 1] = ensure_child(id, bin);
        }
        return path;
    }

    // Deterministic variant: materialize the nodes along an explicit bin path.
    TreePath ensure_path(const std::array<int, kTreeDepth>& bins) {
        TreePath path{};
        path[0] = 0;
        for (int level = 0; level < kTreeDepth; ++level)
            path[level + 1] = ensure_child(path[level], bins[level]);
        return path;
    }

    // Vertical update: every node on the path absorbs one visit and the
    // normalized reward. Sibling (horizontal) updates are a separate pass.
    void backpropagate(const TreePath& path, double delta) {
        if (!(delta >= 0.0 && delta <= 1.0))
            throw std::out_of_range("backpropagate: delta outside [0,1]");
        for (std::int32_t id : path) {
            NodeStats& s = nodes_[static_cast<std::size_t>(id)].stats;
            s.n_visits += 1;
            s.q_total += delta;
        }
    }

    // Horizontal update: at each level of the path, smear the signed score
    // onto the unexplored sibling bins of the visited node.
    void propagate_prospects(const TreePath& path, double signed_score) {
        for (int level = 0; level < kTreeDepth; ++level) {
            TreeNode& parent = nodes_[static_cast<std::size_t>(path[level])];
            const int bin = nodes_[static_cast<std::size_t>(path[level + 1])].bin;
            propagate_horizontal(parent.prospects, bin, signed_score);
        }
    }

    // Write access for snapshot restore and for tests that pin tree state.
    // Normal play goes through backpropagate / propagate_prospects.
    NodeStats& mutable_stats(std::int32_t id) { return nodes_[static_cast<std::size_t>(id)].stats; }
    ProspectLayer& mutable_prospects(std::int32_t id) {
        return nodes_[static_cast<std::size_t>(id)].prospects;
    }

    // Signed success estimate in [-1,1] for one child bin of a node: real
    // statistics when the child has been visited, the prospect accumulator
    // when it has not been created, neutral zero otherwise.
    double signed_estimate(std::int32_t id, int bin) const {
        const TreeNode& n = nodes_[static_cast<std::size_t>(id)];
        const std::int32_t child = n.children[static_cast<std::size_t>(bin)];
        if (child >= 0) {
            const NodeStats& s = nodes_[static_cast<std::size_t>(child)].stats;
            return s.n_visits > 0 ? 2.0 * mean_reward(s) - 1.0 : 0.0;
        }
        return n.prospects.value_at(bin);
    }

private:
    TreeNode make_node(int level, int bin, std::int32_t parent) const {
        TreeNode n;
        n.level = level;
        n.bin = bin;
        n.parent = parent;
        if (level < kTreeDepth) {
            const int child_bins = params_.bins[static_cast<std::size_t>(level)];
            n.children.assign(static_cast<std::size_t>(child_bins), -1);
            n.prospects = ProspectLayer(level + 1, static_cast<std::size_t>(child_bins),
                                        params_.prospect_k);
        }
        return n;
    }

    SearchParams params_;
    std::vector<TreeNode> nodes_;
};

// Discretization: a bin maps to the midpoint angle of its slice of the
// joint's admissible range. Level 1..4 correspond to yaw/pitch/roll/elbow.
inline double bin_midpoint(int level, int bin, int n_bins) {
    const JointRange& r = kJointRanges[static_cast<std::size_t>(level - 1)];
    return r.lo_rad + (static_cast<double>(bin) + 0.5) * (r.hi_rad - r.lo_rad) /
                          static_cast<double>(n_bins);
}

inline JointAngles angles_for_path(const std::array<int, kTreeDepth>& path_bins,
                                   const std::array<int, kTreeDepth>& bin_counts) {
    for (int level = 0; level < kTreeDepth; ++level)
        if (path_bins[level] < 0 || path_bins[level] >= bin_counts[level])
            throw std::out_of_range("angles_for_path: bin index out of range");
    return JointAngles{bin_midpoint(1, path_bins[0], bin_counts[0]),
                       bin_midpoint(2, path_bins[1], bin_counts[1]),
                       bin_midpoint(3, path_bins[2], bin_counts[2]),
                       bin_midpoint(4, path_bins[3], bin_counts[3])};
}

} // namespace reachtree
