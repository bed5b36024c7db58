#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace reachtree {

// Finite MDP with per-(state, action) rewards and sparse transition rows.
// Used as an independent oracle for validating search decisions on small
// abstractions, not as part of the spawn loop.
struct FiniteMDP {
    struct Action {
        double reward = 0.0;
        std::vector<std::pair<int, double>> transitions; // (next state, probability)
    };

    std::vector<std::vector<Action>> states; // states[s][a]

    int n_states() const { return static_cast<int>(states.size()); }

    void validate() const {
        if (states.empty()) throw std::invalid_argument("mdp: no states");
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (states[s].empty())
                throw std::invalid_argument("mdp: state " + std::to_string(s) + " has no actions");
            for (std::size_t a = 0; a < states[s].size(); ++a) {
                double total = 0.0;
                for (const auto& [next, p] : states[s][a].transitions) {
                    if (next < 0 || next >= n_states())
                        throw std::invalid_argument("mdp: transition to unknown state");
                    if (p < 0.0) throw std::invalid_argument("mdp: negative probability");
                    total += p;
                }
                if (std::abs(total - 1.0) > 1e-12)
                    throw std::invalid_argument("mdp: probabilities of state " +
                                                std::to_string(s) + " action " +
                                                std::to_string(a) + " sum to " +
                                                fmt_double(total));
            }
        }
    }
};

struct Policy {
    std::vector<int> action; // action index per state
};

namespace detail {

inline void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || gamma >= 1.0)
        throw std::invalid_argument("mdp: gamma must satisfy 0 <= gamma < 1");
}

inline double backup(const FiniteMDP::Action& act, const std::vector<double>& v, double gamma) {
    double value = act.reward;
    for (const auto& [next, p] : act.transitions)
        value += gamma * p * v[static_cast<std::size_t>(next)];
    return value;
}

} // namespace detail

// Iterative policy evaluation: sweeps V <- T_pi V until successive iterates
// differ by less than tol in max norm. Because T_pi is a gamma-contraction,
// the returned (post-sweep) iterate has Bellman residual below tol as well.
inline std::vector<double> policy_evaluation(const FiniteMDP& mdp, const Policy& policy,
                                             double gamma, double tol = 1e-10) {
    detail::check_gamma(gamma);
    if (!(tol > 0.0)) throw std::invalid_argument("mdp: tol must be > 0");
    mdp.validate();
    const std::size_t n = static_cast<std::size_t>(mdp.n_states());
    if (policy.action.size() != n) throw std::invalid_argument("mdp: policy size mismatch");
    for (std::size_t s = 0; s < n; ++s)
        if (policy.action[s] < 0 ||
            policy.action[s] >= static_cast<int>(mdp.states[s].size()))
            throw std::invalid_argument("mdp: policy picks unknown action in state " +
                                        std::to_string(s));

    std::vector<double> v(n, 0.0), next(n, 0.0);
    while (true) {
        double diff = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            next[s] = detail::backup(mdp.states[s][static_cast<std::size_t>(policy.action[s])],
                                     v, gamma);
            diff = std::max(diff, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        if (diff < tol) return v;
    }
}

struct ValueIterationResult {
    std::vector<double> values;
    Policy policy; // greedy w.r.t. values; ties resolved to the lowest action index
};

inline ValueIterationResult value_iteration(const FiniteMDP& mdp, double gamma,
                                            double tol = 1e-10) {
    detail::check_gamma(gamma);
    if (!(tol > 0.0)) throw std::invalid_argument("mdp: tol must be > 0");
    mdp.validate();
    const std::size_t n = static_cast<std::size_t>(mdp.n_states());

    std::vector<double> v(n, 0.0), next(n, 0.0);
    while (true) {
        double diff = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (const FiniteMDP::Action& act : mdp.states[s])
                best = std::max(best, detail::backup(act, v, gamma));
            next[s] = best;
            diff = std::max(diff, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        if (diff < tol) break;
    }

    Policy greedy;
    greedy.action.resize(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mdp.states[s].size(); ++a) {
            const double value = detail::backup(mdp.states[s][a], v, gamma);
            if (value > best) {
                best = value;
                greedy.action[s] = static_cast<int>(a);
            }
        }
    }
    return {std::move(v), std::move(greedy)};
}

// Fixture format, line oriented:
//
//   mdp v1
//   states <N>
//   action <state> <reward>            declares the next action of <state>
//   trans <state> <action> <next> <p>  one transition of a declared action
//
// Blank lines and lines starting with '#' are ignored.
inline FiniteMDP parse_mdp(std::string_view text) {
    const auto lines = split_lines(text);
    FiniteMDP mdp;
    bool header_seen = false;
    bool states_seen = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t ln = i + 1;

        if (!header_seen) {
            if (line != "mdp v1") throw ParseError(ln, "header", "expected 'mdp v1'");
            header_seen = true;
            continue;
        }
        const auto tokens = split_ws(line);
        if (tokens[0] == "states") {
            if (states_seen) throw ParseError(ln, "states", "duplicate states line");
            const auto count =
                tokens.size() == 2 ? parse_int(tokens[1]) : std::optional<std::int64_t>{};
            if (!count || *count <= 0) throw ParseError(ln, "states", "bad state count");
            mdp.states.resize(static_cast<std::size_t>(*count));
            states_seen = true;
        } else if (tokens[0] == "action") {
            if (!states_seen) throw ParseError(ln, "action", "action before states line");
            const auto state =
                tokens.size() == 3 ? parse_int(tokens[1]) : std::optional<std::int64_t>{};
            const auto reward =
                tokens.size() == 3 ? parse_double(tokens[2]) : std::optional<double>{};
            if (!state || !reward || *state < 0 || *state >= mdp.n_states())
                throw ParseError(ln, "action", "expected 'action <state> <reward>'");
            mdp.states[static_cast<std::size_t>(*state)].push_back({*reward, {}});
        } else if (tokens[0] == "trans") {
            if (!states_seen) throw ParseError(ln, "trans", "trans before states line");
            if (tokens.size() != 5)
                throw ParseError(ln, "trans", "expected 'trans <state> <action> <next> <p>'");
            const auto state = parse_int(tokens[1]);
            const auto action = parse_int(tokens[2]);
            const auto next = parse_int(tokens[3]);
            const auto p = parse_double(tokens[4]);
            if (!state || !action || !next || !p || *state < 0 || *state >= mdp.n_states())
                throw ParseError(ln, "trans", "bad transition field");
            auto& actions = mdp.states[static_cast<std::size_t>(*state)];
            if (*action < 0 || *action >= static_cast<int>(actions.size()))
                throw ParseError(ln, "trans", "transition for undeclared action");
            if (*next < 0 || *next >= mdp.n_states())
                throw ParseError(ln, "trans", "next state out of range");
            actions[static_cast<std::size_t>(*action)].transitions.emplace_back(
                static_cast<int>(*next), *p);
        } else {
            throw ParseError(ln, "record", "unknown record '" + std::string(tokens[0]) + "'");
        }
    }
    if (!header_seen) throw ParseError(1, "header", "empty fixture");
    if (!states_seen) throw ParseError(lines.size() + 1, "states", "missing states line");
    try {
        mdp.validate();
    } catch (const std::invalid_argument& e) {
        // Whole-model inconsistency (leaky probabilities, actionless state) is
        // only detectable once all records are in; attribute it to end of input.
        throw ParseError(lines.size(), "model", e.what());
    }
    return mdp;
}

} // namespace reachtree
