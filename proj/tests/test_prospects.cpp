#include "reachtree/mcts.hpp"
#include "reachtree/prospects.hpp"
#include "reachtree/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace reachtree;

TEST_CASE("prospect kernel values") {
    for (double k : {0.5, 1.0, 2.0, 4.0}) CHECK(prospect_weight(0, k) == 1.0);
    CHECK(prospect_weight(1, 1) == Catch::Approx(0.5).margin(1e-15));
    CHECK(prospect_weight(2, 2) == Catch::Approx(0.04).margin(1e-12)); // 5^-2
}

TEST_CASE("prospect kernel is strictly decreasing in distance and in k") {
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
        for (int x = 0; x < 32; ++x)
            CHECK(prospect_weight(x, k) > prospect_weight(x + 1, k));
    }
    const double ks[] = {0.5, 1.0, 2.0, 4.0};
    for (int x = 1; x <= 32; ++x)
        for (int i = 0; i + 1 < 4; ++i)
            CHECK(prospect_weight(x, ks[i]) > prospect_weight(x, ks[i + 1]));
}

TEST_CASE("horizontal propagation smears by index distance") {
    ProspectLayer layer(1, 5, 2.0);
    propagate_horizontal(layer, 2, 1.0);
    CHECK(layer.value_at(1) == Catch::Approx(0.25).margin(1e-15));
    CHECK(layer.value_at(3) == Catch::Approx(0.25).margin(1e-15));
    CHECK(layer.value_at(0) == Catch::Approx(0.04).margin(1e-12));
    CHECK(layer.value_at(4) == Catch::Approx(0.04).margin(1e-12));
    CHECK(layer.value_at(2) == 0.0); // the visited bin itself takes nothing
}

TEST_CASE("larger k localizes the spread") {
    ProspectLayer narrow(1, 6, 4.0), wide(1, 6, 1.0);
    propagate_horizontal(narrow, 0, 1.0);
    propagate_horizontal(wide, 0, 1.0);
    for (int b = 1; b < 6; ++b) CHECK(narrow.value_at(b) < wide.value_at(b));
}

TEST_CASE("accumulator is a weighted running mean of contributions") {
    ProspectLayer layer(1, 8, 2.0);
    // bin 3 hears from bin 2 (x=1, s=+1) and from bin 5 (x=2, s=-1)
    propagate_horizontal(layer, 2, 1.0);
    propagate_horizontal(layer, 5, -1.0);
    const double p1 = prospect_weight(1, 2.0);
    const double p2 = prospect_weight(2, 2.0);
    const double expected = (p1 * p1 * 1.0 + p2 * p2 * -1.0) / (p1 + p2);
    CHECK(layer.value_at(3) == Catch::Approx(expected).margin(1e-15));
}

TEST_CASE("accumulators stay inside [-1, 1] under any update storm") {
    ProspectLayer layer(1, 12, 2.0);
    Rng rng(404);
    for (int i = 0; i < 5000; ++i) {
        const int source = static_cast<int>(uniform_index(rng, 12));
        const double s = uniform01(rng) * 2.0 - 1.0;
        propagate_horizontal(layer, source, s);
        // occasionally promote a random bin mid-storm
        if (i % 500 == 250) layer.promote(static_cast<int>(uniform_index(rng, 12)));
    }
    for (int b = 0; b < 12; ++b) {
        CHECK(layer.value_at(b) <= 1.0);
        CHECK(layer.value_at(b) >= -1.0);
    }
}

TEST_CASE("promotion freezes and discards the accumulator") {
    ProspectLayer layer(1, 4, 2.0);
    propagate_horizontal(layer, 0, 1.0);
    CHECK(layer.value_at(1) > 0.0);
    layer.promote(1);
    CHECK(layer.value_at(1) == 0.0);
    propagate_horizontal(layer, 0, 1.0);
    CHECK(layer.value_at(1) == 0.0); // promoted cells absorb nothing
    CHECK(layer.cells[1].weight == 0.0);
}

TEST_CASE("signed estimates bridge real stats and prospects") {
    SearchParams p;
    p.bins = {4, 2, 2, 2};
    Tree t(p);
    const auto child = t.ensure_child(0, 0);

    SECTION("visited nodes map mean through 2m - 1") {
        t.mutable_stats(child) = {3.0, 3};
        CHECK(t.signed_estimate(0, 0) == 1.0);
        t.mutable_stats(child) = {0.0, 3};
        CHECK(t.signed_estimate(0, 0) == -1.0);
        t.mutable_stats(child) = {1.5, 3};
        CHECK(t.signed_estimate(0, 0) == 0.0);
    }
    SECTION("created-but-unvisited nodes read neutral") {
        CHECK(t.signed_estimate(0, 0) == 0.0);
    }
    SECTION("untouched bins read zero, smeared bins read their accumulator") {
        CHECK(t.signed_estimate(0, 2) == 0.0);
        const TreePath path = t.ensure_path({0, 0, 0, 0});
        t.propagate_prospects(path, 1.0);
        CHECK(t.signed_estimate(0, 1) == Catch::Approx(0.25).margin(1e-15));
        CHECK(t.signed_estimate(0, 2) == Catch::Approx(1.0 / 25.0).margin(1e-15));
        // level-2 sibling under the same parent hears it too
        CHECK(t.signed_estimate(path[1], 1) == Catch::Approx(0.25).margin(1e-15));
    }
}

TEST_CASE("horizontal propagation never touches real node statistics") {
    SearchParams p;
    p.bins = {3, 2, 2, 2};
    Tree t(p);
    const TreePath a = t.ensure_path({0, 0, 0, 0});
    const TreePath b = t.ensure_path({1, 0, 0, 0});
    t.backpropagate(b, 1.0);
    const NodeStats before = t.node(b[1]).stats;

    t.propagate_prospects(a, -1.0);
    CHECK(t.node(b[1]).stats.n_visits == before.n_visits);
    CHECK(t.node(b[1]).stats.q_total == before.q_total);
    // and its prospect cell under the root is promoted, so it reads real stats
    CHECK(t.signed_estimate(0, 1) == 1.0);
    // while the genuinely untouched bin 2 absorbed the smear
    CHECK(t.signed_estimate(0, 2) < 0.0);
}
