#include "reachtree/mcts.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>

using namespace reachtree;

namespace {

Tree small_tree(std::array<int, 4> bins = {2, 2, 2, 2}, double cp = std::sqrt(2.0)) {
    SearchParams p;
    p.bins = bins;
    p.cp = cp;
    return Tree(p);
}

} // namespace

TEST_CASE("mean_reward is Q/N and refuses unvisited nodes") {
    CHECK(mean_reward({3.0, 4}) == 0.75);
    CHECK(mean_reward({0.0, 5}) == 0.0);
    CHECK(mean_reward({5.0, 5}) == 1.0);
    CHECK_THROWS_AS(mean_reward({0.0, 0}), std::domain_error);
}

TEST_CASE("uct_value") {
    SECTION("unvisited child scores infinity") {
        CHECK(std::isinf(uct_value({0.0, 0}, 10, std::sqrt(2.0))));
    }
    SECTION("cp = 0 degenerates to the empirical mean") {
        CHECK(uct_value({3.0, 4}, 100, 0.0) == 0.75);
    }
    SECTION("pinned scalar case") {
        // X=0.5, parent_n=100, n_j=10, cp=sqrt(2)
        CHECK(uct_value({5.0, 10}, 100, std::sqrt(2.0)) == Catch::Approx(1.4597).margin(5e-5));
    }
    SECTION("strictly increasing in parent_n for a fixed child") {
        double prev = uct_value({1.0, 2}, 2, std::sqrt(2.0));
        for (std::uint64_t parent = 3; parent <= 100; ++parent) {
            const double v = uct_value({1.0, 2}, parent, std::sqrt(2.0));
            CHECK(v > prev);
            prev = v;
        }
    }
    SECTION("strictly decreasing in child visits for a fixed mean") {
        double prev = uct_value({0.5, 1}, 1000, std::sqrt(2.0));
        for (std::uint64_t n = 2; n <= 50; ++n) {
            const double v = uct_value({0.5 * static_cast<double>(n), n}, 1000, std::sqrt(2.0));
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("best_child follows UCT and the visit-threshold rule") {
    Tree t = small_tree();
    Rng rng(7);
    const auto a = t.ensure_child(0, 0); // mean 0.9, n = 50
    const auto b = t.ensure_child(0, 1); // mean 0.2, n = 2
    t.mutable_stats(a) = {45.0, 50};
    t.mutable_stats(b) = {0.4, 2};
    t.mutable_stats(0) = {45.4, 52};

    SECTION("exploration bonus favours the rarely tried arm") {
        // UCT(a) ~ 1.298 < UCT(b) ~ 2.188
        for (int i = 0; i < 20; ++i) CHECK(t.best_child(0, std::sqrt(2.0), 1, rng) == b);
    }
    SECTION("greedy picks the higher mean") {
        for (int i = 0; i < 20; ++i) CHECK(t.best_child(0, 0.0, 1, rng) == a);
    }
    SECTION("an unvisited child is taken first") {
        t.mutable_stats(b) = {0.0, 0};
        for (int i = 0; i < 20; ++i) CHECK(t.best_child(0, std::sqrt(2.0), 1, rng) == b);
    }
    SECTION("childless node is a structural error") {
        Tree fresh = small_tree();
        CHECK_THROWS_AS(fresh.best_child(0, 1.0, 1, rng), std::logic_error);
    }
}

TEST_CASE("select_among picks uniformly among below-threshold candidates") {
    Rng rng(21);
    const std::vector<NodeStats> stats{{5.0, 9}, {0.0, 0}, {1.0, 3}, {2.0, 8}};
    std::map<std::size_t, int> counts;
    for (int i = 0; i < 3000; ++i) counts[select_among(stats, 20, std::sqrt(2.0), 5, rng)]++;
    // candidates 1 and 2 sit below the threshold of 5; nothing else is eligible
    CHECK(counts.count(0) == 0);
    CHECK(counts.count(3) == 0);
    CHECK(counts[1] > 1200);
    CHECK(counts[2] > 1200);
}

TEST_CASE("select_among breaks exact UCT ties uniformly") {
    Rng rng(3);
    const std::vector<NodeStats> stats{{2.0, 4}, {2.0, 4}, {2.0, 4}};
    std::map<std::size_t, int> counts;
    for (int i = 0; i < 3000; ++i) counts[select_among(stats, 12, std::sqrt(2.0), 1, rng)]++;
    for (const auto& [arm, n] : counts) {
        (void)arm;
        CHECK(n > 800);
    }
    CHECK(counts.size() == 3);
}

TEST_CASE("select_path descends exactly four levels") {
    Tree t = small_tree();
    Rng rng(11);
    const TreePath path = t.select_path(rng);
    CHECK(path[0] == 0);
    for (int level = 0; level <= kTreeDepth; ++level) {
        CHECK(t.node(path[static_cast<std::size_t>(level)]).level == level);
        if (level > 0) {
            const TreeNode& n = t.node(path[static_cast<std::size_t>(level)]);
            CHECK(n.parent == path[static_cast<std::size_t>(level - 1)]);
            CHECK(n.bin >= 0);
            CHECK(n.bin < 2);
        }
    }
    // expansion: first simulation creates exactly one node per level
    CHECK(t.node_count() == 5);
}

TEST_CASE("select_path on a fresh tree is a uniformly random leaf choice") {
    Rng rng(1234);
    std::map<std::array<int, 4>, int> leaves;
    for (int i = 0; i < 2000; ++i) {
        Tree t = small_tree();
        const TreePath path = t.select_path(rng);
        std::array<int, 4> bins{};
        for (int level = 1; level <= kTreeDepth; ++level)
            bins[static_cast<std::size_t>(level - 1)] =
                t.node(path[static_cast<std::size_t>(level)]).bin;
        leaves[bins]++;
    }
    CHECK(leaves.size() == 16); // every leaf of the 2^4 lattice shows up
    for (const auto& [bins, n] : leaves) {
        (void)bins;
        CHECK(n > 60); // expected 125 each
    }
}

TEST_CASE("below-threshold bins are explored before UCT engages") {
    Tree t = small_tree();
    Rng rng(5);
    const TreePath first = t.select_path(rng);
    t.backpropagate(first, 1.0);
    const int first_root_bin = t.node(first[1]).bin;
    const TreePath second = t.select_path(rng);
    CHECK(t.node(second[1]).bin == 1 - first_root_bin);
}

TEST_CASE("greedy composition: cp=0 on a fully visited tree walks the max-mean path") {
    SearchParams p;
    p.bins = {2, 2, 2, 2};
    p.cp = 0.0;
    Tree t(p);
    const std::array<int, 4> target{1, 0, 1, 1};
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            for (int b3 = 0; b3 < 2; ++b3)
                for (int b4 = 0; b4 < 2; ++b4) t.ensure_path({b1, b2, b3, b4});
    for (std::int32_t id = 0; id < t.node_count(); ++id) t.mutable_stats(id) = {0.5, 1};
    std::int32_t id = 0;
    for (int level = 0; level < kTreeDepth; ++level) {
        id = t.child_at(id, target[static_cast<std::size_t>(level)]);
        t.mutable_stats(id) = {0.9, 1};
    }
    Rng rng(2);
    const TreePath path = t.select_path(rng);
    for (int level = 1; level <= kTreeDepth; ++level)
        CHECK(t.node(path[static_cast<std::size_t>(level)]).bin ==
              target[static_cast<std::size_t>(level - 1)]);
}

TEST_CASE("backpropagate updates exactly the path") {
    Tree t = small_tree();
    const TreePath path = t.ensure_path({0, 1, 0, 1});
    const TreePath other = t.ensure_path({1, 0, 1, 0});
    t.backpropagate(path, 1.0);
    for (std::int32_t id : path) {
        CHECK(t.node(id).stats.n_visits == 1);
        CHECK(t.node(id).stats.q_total == 1.0);
    }
    for (std::size_t i = 1; i < other.size(); ++i) {
        CHECK(t.node(other[i]).stats.n_visits == 0);
        CHECK(t.node(other[i]).stats.q_total == 0.0);
    }

    t.backpropagate(path, 0.0); // visits move, reward does not
    CHECK(t.node(path[4]).stats.n_visits == 2);
    CHECK(t.node(path[4]).stats.q_total == 1.0);

    CHECK_THROWS_AS(t.backpropagate(path, -0.01), std::out_of_range);
    CHECK_THROWS_AS(t.backpropagate(path, 1.01), std::out_of_range);
}

TEST_CASE("conservation: root visits equal completed simulations") {
    SearchParams p;
    p.bins = {3, 2, 2, 2};
    Tree t(p);
    Rng rng(99);
    const int sims = 10000;
    for (int i = 0; i < sims; ++i) {
        const TreePath path = t.select_path(rng);
        t.backpropagate(path, uniform01(rng));
    }
    CHECK(t.root_stats().n_visits == static_cast<std::uint64_t>(sims));
    for (std::int32_t id = 0; id < t.node_count(); ++id) {
        const TreeNode& n = t.node(id);
        if (n.level == kTreeDepth) continue;
        std::uint64_t child_sum = 0;
        for (std::int32_t c : n.children)
            if (c >= 0) child_sum += t.node(c).stats.n_visits;
        CHECK(n.stats.n_visits >= child_sum);
    }
}

TEST_CASE("greedy argmax is invariant under a positive affine reward map") {
    Rng build_rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Tree t = small_tree({4, 2, 2, 2});
        for (int b = 0; b < 4; ++b) {
            const auto id = t.ensure_child(0, b);
            const std::uint64_t n = 5 + uniform_index(build_rng, 20);
            const double mean = uniform01(build_rng) * 0.6 + 0.1;
            t.mutable_stats(id) = {mean * static_cast<double>(n), n};
        }
        t.mutable_stats(0) = {0.0, 40};

        Rng rng_a(1), rng_b(1);
        const auto before = t.best_child(0, 0.0, 1, rng_a);
        // rescale every child's rewards by r' = 0.5 r + 0.25 (stays in [0,1])
        for (int b = 0; b < 4; ++b) {
            const auto id = t.child_at(0, b);
            NodeStats& s = t.mutable_stats(id);
            s.q_total = 0.5 * s.q_total + 0.25 * static_cast<double>(s.n_visits);
        }
        CHECK(t.best_child(0, 0.0, 1, rng_b) == before);
    }
}

TEST_CASE("ensure_child validates bins and promotes prospect cells once") {
    Tree t = small_tree();
    CHECK_THROWS_AS(t.ensure_child(0, 2), std::out_of_range);
    CHECK_THROWS_AS(t.ensure_child(0, -1), std::out_of_range);
    const auto a = t.ensure_child(0, 0);
    CHECK(t.ensure_child(0, 0) == a);
    CHECK(t.node(0).prospects.cells[0].promoted);
    CHECK_FALSE(t.node(0).prospects.cells[1].promoted);
}

TEST_CASE("bin midpoints discretize the joint ranges") {
    constexpr double pi = std::numbers::pi;
    CHECK(bin_midpoint(1, 0, 12) == Catch::Approx(-pi / 2 + 0.5 * pi / 12).margin(1e-15));
    CHECK(bin_midpoint(1, 11, 12) == Catch::Approx(pi / 2 - 0.5 * pi / 12).margin(1e-15));
    // midpoints always lie strictly inside the range
    const std::array<int, 4> counts{12, 8, 12, 6};
    for (int level = 1; level <= 4; ++level) {
        const JointRange& r = kJointRanges[static_cast<std::size_t>(level - 1)];
        const int n = counts[static_cast<std::size_t>(level - 1)];
        for (int b = 0; b < n; ++b) {
            const double mid = bin_midpoint(level, b, n);
            CHECK(mid > r.lo_rad);
            CHECK(mid < r.hi_rad);
        }
    }
    CHECK_THROWS_AS(angles_for_path({12, 0, 0, 0}, {12, 8, 12, 6}), std::out_of_range);
    const JointAngles a = angles_for_path({0, 0, 0, 0}, {12, 8, 12, 6});
    CHECK(a.yaw_rad == Catch::Approx(bin_midpoint(1, 0, 12)));
    CHECK(a.elbow_rad == Catch::Approx(bin_midpoint(4, 0, 6)));
}
