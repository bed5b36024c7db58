#include "reachtree/spawner.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

using namespace reachtree;

namespace {

SearchParams small_params() {
    SearchParams p;
    p.bins = {3, 2, 2, 2};
    return p;
}

// Every leaf path for a bin configuration, lexicographic.
std::vector<std::array<int, kTreeDepth>> all_leaves(const std::array<int, kTreeDepth>& bins) {
    std::vector<std::array<int, kTreeDepth>> out;
    for (int a = 0; a < bins[0]; ++a)
        for (int b = 0; b < bins[1]; ++b)
            for (int c = 0; c < bins[2]; ++c)
                for (int d = 0; d < bins[3]; ++d) out.push_back({a, b, c, d});
    return out;
}

} // namespace

TEST_CASE("spawn positions agree with the arm model and stay within reach") {
    const SearchParams params; // default discretization
    const ArmSegments segs;
    for (const auto& leaf : all_leaves(params.bins)) {
        const Vec3 p = spawn_position(leaf, params.bins, segs);
        const Vec3 expected = pose_from_angles(angles_for_path(leaf, params.bins), segs).p4;
        REQUIRE(p.x == expected.x);
        REQUIRE(p.y == expected.y);
        REQUIRE(p.z == expected.z);
        REQUIRE(norm(p) <= segs.total_mm() + 1e-9);
    }
    CHECK_THROWS_AS(spawn_position({12, 0, 0, 0}, params.bins, segs), std::out_of_range);
}

TEST_CASE("spawner caches the full feasible lattice") {
    const SearchParams params = small_params();
    SpawnPolicyConfig cfg;
    cfg.epsilon = 0.0;
    const Spawner spawner(params, cfg, ArmSegments{});
    // default reach limit covers the whole arm, so every leaf is feasible
    CHECK(spawner.feasible_leaves() == 24);

    SpawnPolicyConfig bad = cfg;
    bad.epsilon = -0.1;
    CHECK_THROWS_AS(Spawner(params, bad, ArmSegments{}), std::invalid_argument);
}

TEST_CASE("spawner hunts the most ambiguous branch") {
    const SearchParams params = small_params();
    Tree tree(params);
    // hand-built first level: estimates 0.9, 0.05, -0.7
    const std::int32_t c0 = tree.ensure_child(0, 0);
    const std::int32_t c1 = tree.ensure_child(0, 1);
    const std::int32_t c2 = tree.ensure_child(0, 2);
    tree.mutable_stats(c0) = NodeStats{38.0, 40};
    tree.mutable_stats(c1) = NodeStats{21.0, 40};
    tree.mutable_stats(c2) = NodeStats{6.0, 40};
    tree.mutable_stats(0) = NodeStats{65.0, 120};

    SpawnPolicyConfig cfg;
    cfg.epsilon = 0.0;
    const Spawner spawner(params, cfg, ArmSegments{});
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const SpawnDecision d = spawner.choose(tree, rng, static_cast<std::uint64_t>(i), 0);
        CHECK(d.path_bins[0] == 1); // |0.05| beats |0.9| and |-0.7|
        CHECK(d.ambiguity == Catch::Approx(0.05 / 4).epsilon(1e-12));
        CHECK(d.fruit_id == static_cast<std::uint64_t>(i));
    }
}

TEST_CASE("greedy choice matches an exhaustive ambiguity scan") {
    const SearchParams params = small_params();
    Tree tree(params);
    Rng play(11);
    for (int i = 0; i < 400; ++i) {
        const TreePath path = tree.select_path(play);
        const double delta = uniform01(play);
        tree.backpropagate(path, delta);
        tree.propagate_prospects(path, 2.0 * delta - 1.0);
    }

    SpawnPolicyConfig cfg;
    cfg.epsilon = 0.0;
    const Spawner spawner(params, cfg, ArmSegments{});

    double brute_min = std::numeric_limits<double>::infinity();
    for (const auto& leaf : all_leaves(params.bins))
        brute_min = std::min(brute_min, spawner.path_ambiguity(tree, leaf));

    Rng rng(3);
    const SpawnDecision d = spawner.choose(tree, rng, 0, 0);
    CHECK(d.ambiguity == brute_min);
    CHECK(spawner.path_ambiguity(tree, d.path_bins) == brute_min);
}

TEST_CASE("untouched tree ties everywhere and spreads choices") {
    const SearchParams params = small_params();
    const Tree tree(params);
    SpawnPolicyConfig cfg;
    cfg.epsilon = 0.0;
    const Spawner spawner(params, cfg, ArmSegments{});

    Rng rng(17);
    std::set<std::array<int, kTreeDepth>> seen;
    for (int i = 0; i < 300; ++i) {
        const SpawnDecision d = spawner.choose(tree, rng, 0, 0);
        CHECK(d.ambiguity == 0.0);
        seen.insert(d.path_bins);
    }
    CHECK(seen.size() >= 20); // 24 leaves, uniform tie-break reaches nearly all
}

TEST_CASE("exploration rate one ignores the estimates") {
    const SearchParams params = small_params();
    Tree tree(params);
    // make branch 1 overwhelmingly preferred by the greedy rule
    const std::int32_t c1 = tree.ensure_child(0, 1);
    tree.mutable_stats(c1) = NodeStats{5.0, 10};
    tree.mutable_stats(0) = NodeStats{5.0, 10};

    SpawnPolicyConfig cfg;
    cfg.epsilon = 1.0;
    const Spawner spawner(params, cfg, ArmSegments{});
    Rng rng(29);
    std::array<int, 3> level1_counts{};
    for (int i = 0; i < 600; ++i) {
        const SpawnDecision d = spawner.choose(tree, rng, 0, 0);
        ++level1_counts[static_cast<std::size_t>(d.path_bins[0])];
    }
    for (int count : level1_counts) CHECK(count > 120); // ~200 each when uniform
}

TEST_CASE("reach limit filters the lattice") {
    const SearchParams params = small_params();

    SECTION("unreachably small limit refuses to spawn") {
        SpawnPolicyConfig cfg;
        cfg.reach_limit.t_path_mm = 100.0;
        const Spawner spawner(params, cfg, ArmSegments{});
        CHECK(spawner.feasible_leaves() == 0);
        const Tree tree(params);
        Rng rng(1);
        CHECK_THROWS_AS(spawner.choose(tree, rng, 0, 0), ConfigError);
    }

    SECTION("tighter limit keeps every target inside it") {
        // fingertip distance depends only on the elbow bin here: the bent
        // midpoint lands near 612 mm, the straighter one near 716 mm
        SpawnPolicyConfig cfg;
        cfg.reach_limit.t_path_mm = 650.0;
        const Spawner spawner(params, cfg, ArmSegments{});
        REQUIRE(spawner.feasible_leaves() == 12);

        Tree tree(params);
        Rng rng(41);
        for (int i = 0; i < 200; ++i) {
            const SpawnDecision d = spawner.choose(tree, rng, 0, 0);
            CHECK(norm(d.target_mm) <= 650.0);
            CHECK(d.path_bins[3] == 1);
            const TreePath path = tree.ensure_path(d.path_bins);
            tree.backpropagate(path, uniform01(rng));
        }
    }
}
