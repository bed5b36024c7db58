#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/geometry.hpp"
#include "reachtree/kinematics.hpp"
#include "reachtree/mcts.hpp"
#include "reachtree/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace reachtree {

struct SpawnPolicyConfig {
    double epsilon = 0.1;            // chance of a uniformly random feasible leaf
    double decision_budget_ms = 10.0; // performance contract, checked by tests
    ReachLimit reach_limit{};

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("spawn: epsilon must be in [0,1]");
        if (!(decision_budget_ms > 0.0))
            throw std::invalid_argument("spawn: decision_budget_ms must be > 0");
        if (!(reach_limit.t_path_mm > 0.0))
            throw std::invalid_argument("spawn: reach_limit must be > 0");
    }
};

struct SpawnDecision {
    std::array<int, kTreeDepth> path_bins{};
    Vec3 target_mm{};
    double ambiguity = 0.0; // mean per-level |signed estimate|, in [0,1]
    std::uint64_t fruit_id = 0;
    std::uint64_t spawn_time_ms = 0;
};

// Fingertip position for a bin path, evaluated at each level's bin midpoint.
inline Vec3 spawn_position(const std::array<int, kTreeDepth>& path_bins,
                           const std::array<int, kTreeDepth>& bin_counts,
                           const ArmSegments& segs) {
    return pose_from_angles(angles_for_path(path_bins, bin_counts), segs).p4;
}

// Picks where the next fruit appears: usually the feasible leaf whose success
// estimate is most ambiguous (closest to zero along its path), occasionally a
// uniformly random feasible leaf. Leaf positions and feasibility depend only
// on the discretization, so they are cached up front; one decision is a
// single pass over the leaf lattice.
class Spawner {
public:
    Spawner(const SearchParams& params, const SpawnPolicyConfig& cfg, const ArmSegments& segs)
        : bins_(params.bins), cfg_(cfg) {
        cfg_.validate();
        segs.validate();
        const auto [b1, b2, b3, b4] = bins_;
        positions_.reserve(static_cast<std::size_t>(b1 * b2 * b3 * b4));
        feasible_.reserve(positions_.capacity());
        for (int i1 = 0; i1 < b1; ++i1)
            for (int i2 = 0; i2 < b2; ++i2)
                for (int i3 = 0; i3 < b3; ++i3)
                    for (int i4 = 0; i4 < b4; ++i4) {
                        const Vec3 p = spawn_position({i1, i2, i3, i4}, bins_, segs);
                        positions_.push_back(p);
                        feasible_.push_back(norm(p) <= cfg_.reach_limit.t_path_mm);
                        if (feasible_.back()) ++n_feasible_;
                    }
    }

    const SpawnPolicyConfig& config() const { return cfg_; }
    std::size_t feasible_leaves() const { return n_feasible_; }

    SpawnDecision choose(const Tree& tree, Rng& rng, std::uint64_t fruit_id,
                         std::uint64_t spawn_time_ms) const {
        if (n_feasible_ == 0)
            throw ConfigError("spawn: no feasible leaf; reach_limit too small for the arm");

        std::array<int, kTreeDepth> chosen{};
        double chosen_ambiguity = 0.0;
        if (uniform01(rng) < cfg_.epsilon) {
            pick_uniform(rng, chosen);
            chosen_ambiguity = path_ambiguity(tree, chosen);
        } else {
            pick_min_ambiguity(tree, rng, chosen, chosen_ambiguity);
        }

        return SpawnDecision{chosen, positions_[flat_index(chosen)], chosen_ambiguity, fruit_id,
                             spawn_time_ms};
    }

    // Mean over the four levels of |signed estimate| along the bin path.
    double path_ambiguity(const Tree& tree, const std::array<int, kTreeDepth>& path_bins) const {
        double sum = 0.0;
        std::int32_t node = 0;
        for (int level = 0; level < kTreeDepth; ++level) {
            if (node >= 0) {
                sum += std::abs(tree.signed_estimate(node, path_bins[level]));
                node = tree.child_at(node, path_bins[level]);
            }
            // past a missing node every deeper bin is untouched: estimate 0
        }
        return sum / kTreeDepth;
    }

private:
    std::size_t flat_index(const std::array<int, kTreeDepth>& p) const {
        return static_cast<std::size_t>(
            ((p[0] * bins_[1] + p[1]) * bins_[2] + p[2]) * bins_[3] + p[3]);
    }

    void pick_uniform(Rng& rng, std::array<int, kTreeDepth>& out) const {
        std::uint64_t target = uniform_index(rng, n_feasible_);
        for (std::size_t i = 0; i < feasible_.size(); ++i) {
            if (!feasible_[i]) continue;
            if (target == 0) {
                unflatten(i, out);
                return;
            }
            --target;
        }
        throw std::logic_error("spawn: feasible count out of sync");
    }

    // Single pass over all leaves; exact ties are resolved uniformly at
    // random by reservoir counting.
    void pick_min_ambiguity(const Tree& tree, Rng& rng, std::array<int, kTreeDepth>& out,
                            double& out_ambiguity) const {
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t tie_count = 0;
        std::size_t flat = 0;
        for (int i1 = 0; i1 < bins_[0]; ++i1) {
            const double e1 = std::abs(tree.signed_estimate(0, i1));
            const std::int32_t n1 = tree.child_at(0, i1);
            for (int i2 = 0; i2 < bins_[1]; ++i2) {
                const double e2 = n1 >= 0 ? std::abs(tree.signed_estimate(n1, i2)) : 0.0;
                const std::int32_t n2 = n1 >= 0 ? tree.child_at(n1, i2) : -1;
                for (int i3 = 0; i3 < bins_[2]; ++i3) {
                    const double e3 = n2 >= 0 ? std::abs(tree.signed_estimate(n2, i3)) : 0.0;
                    const std::int32_t n3 = n2 >= 0 ? tree.child_at(n2, i3) : -1;
                    for (int i4 = 0; i4 < bins_[3]; ++i4, ++flat) {
                        if (!feasible_[flat]) continue;
                        const double e4 = n3 >= 0 ? std::abs(tree.signed_estimate(n3, i4)) : 0.0;
                        const double amb = (e1 + e2 + e3 + e4) / kTreeDepth;
                        if (amb < best) {
                            best = amb;
                            tie_count = 1;
                            out = {i1, i2, i3, i4};
                        } else if (amb == best) {
                            ++tie_count;
                            if (uniform_index(rng, tie_count) == 0) out = {i1, i2, i3, i4};
                        }
                    }
                }
            }
        }
        out_ambiguity = best;
    }

    void unflatten(std::size_t flat, std::array<int, kTreeDepth>& out) const {
        out[3] = static_cast<int>(flat % static_cast<std::size_t>(bins_[3]));
        flat /= static_cast<std::size_t>(bins_[3]);
        out[2] = static_cast<int>(flat % static_cast<std::size_t>(bins_[2]));
        flat /= static_cast<std::size_t>(bins_[2]);
        out[1] = static_cast<int>(flat % static_cast<std::size_t>(bins_[1]));
        out[0] = static_cast<int>(flat / static_cast<std::size_t>(bins_[1]));
    }

    std::array<int, kTreeDepth> bins_;
    SpawnPolicyConfig cfg_;
    std::vector<Vec3> positions_; // leaf fingertip targets, lexicographic bin order
    std::vector<bool> feasible_;
    std::size_t n_feasible_ = 0;
};

} // namespace reachtree
