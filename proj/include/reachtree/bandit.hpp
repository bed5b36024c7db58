#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/mcts.hpp"
#include "reachtree/rng.hpp"
#include "reachtree/text.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace reachtree {

struct BanditResult {
    std::vector<std::uint64_t> pulls;
    std::vector<double> empirical_mean; // 0 for arms never pulled
    std::size_t best_arm = 0;           // most-pulled arm, lowest index on ties
};

// UCT as plain UCB1: a depth-1 tree whose "children" are Bernoulli arms.
// Exercises exactly the selection rule the search tree uses (threshold, the
// unvisited-arm infinity rule, random tie-breaks).
inline BanditResult run_bernoulli_bandit(const std::vector<double>& arm_means,
                                         std::uint64_t iterations, double cp,
                                         std::uint64_t threshold, std::uint64_t seed) {
    if (arm_means.size() < 2) throw ConfigError("bandit: need at least 2 arms");
    for (double p : arm_means)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("bandit: arm means must be in [0,1]");
    if (cp < 0.0) throw ConfigError("bandit: cp must be >= 0");

    Rng rng(seed);
    std::vector<NodeStats> arms(arm_means.size());
    std::uint64_t total = 0;
    for (std::uint64_t it = 0; it < iterations; ++it) {
        const std::size_t arm = select_among(arms, total, cp, threshold, rng);
        const double reward = uniform01(rng) < arm_means[arm] ? 1.0 : 0.0;
        arms[arm].n_visits += 1;
        arms[arm].q_total += reward;
        ++total;
    }

    BanditResult result;
    result.pulls.reserve(arms.size());
    result.empirical_mean.reserve(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) {
        result.pulls.push_back(arms[i].n_visits);
        result.empirical_mean.push_back(
            arms[i].n_visits > 0 ? mean_reward(arms[i]) : 0.0);
        if (arms[i].n_visits > arms[result.best_arm].n_visits) result.best_arm = i;
    }
    return result;
}

// Arm specs for the CLI: either an explicit list "0.1,0.5,0.9" or a linear
// range "0.1..0.9x10" (10 arms evenly spaced from 0.1 to 0.9 inclusive).
inline std::vector<double> parse_arm_spec(std::string_view spec) {
    std::vector<double> arms;
    const std::size_t dots = spec.find("..");
    if (dots != std::string_view::npos) {
        const std::size_t x = spec.find('x', dots + 2);
        if (x == std::string_view::npos)
            throw ConfigError("arms: range form is <lo>..<hi>x<count>");
        const auto lo = parse_double(trim(spec.substr(0, dots)));
        const auto hi = parse_double(trim(spec.substr(dots + 2, x - dots - 2)));
        const auto count = parse_int(trim(spec.substr(x + 1)));
        if (!lo || !hi || !count || *count < 2)
            throw ConfigError("arms: bad range '" + std::string(spec) + "'");
        for (std::int64_t i = 0; i < *count; ++i)
            arms.push_back(*lo + (*hi - *lo) * static_cast<double>(i) /
                                     static_cast<double>(*count - 1));
        return arms;
    }
    for (const auto part : split(spec, ',')) {
        const auto p = parse_double(trim(part));
        if (!p) throw ConfigError("arms: bad probability '" + std::string(part) + "'");
        arms.push_back(*p);
    }
    return arms;
}

} // namespace reachtree
