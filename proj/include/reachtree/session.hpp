#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/mcts.hpp"
#include "reachtree/player.hpp"
#include "reachtree/reward.hpp"
#include "reachtree/rng.hpp"
#include "reachtree/spawner.hpp"
#include "reachtree/text.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reachtree {

// Everything the engine itself needs to run (the player model and output
// layout live on top of this, in the CLI's RunConfig).
struct EngineConfig {
    SearchParams search;
    SpawnPolicyConfig spawn;
    TimingConfig timing;
    ArmSegments segments;

    void validate() const {
        search.validate();
        spawn.validate();
        timing.validate();
        segments.validate();
        if (spawn.reach_limit.t_path_mm > segments.total_mm() + 1e-9)
            throw std::invalid_argument("spawn: reach_limit exceeds the arm's total length");
    }
};

struct SessionRecord {
    std::uint64_t fruit_id = 0;
    std::uint64_t spawn_time_ms = 0;
    std::array<int, kTreeDepth> path_bins{};
    Vec3 target_mm{};
    OutcomeKind outcome = OutcomeKind::fail;
    double elapsed_ms = 0.0;
    double signed_score = 0.0;
    double delta = 0.0;
    double ambiguity = 0.0;
};

struct SessionLog {
    std::uint64_t seed = 0;
    std::string config_hash; // 16 hex digits
    std::vector<SessionRecord> records;
};

struct SessionResult {
    SessionLog log;
    Tree tree;
};

// One closed-loop session: spawn -> attempt -> score -> backpropagate
// (vertical and horizontal), n_fruits times. The seed fully determines the
// result; spawner and player consume independent derived RNG streams so the
// draw sequences cannot interleave differently across configurations.
inline SessionResult run_session(const EngineConfig& cfg, const PlayerModel& player,
                                 int n_fruits, std::uint64_t seed,
                                 std::string config_hash = std::string(16, '0')) {
    cfg.validate();
    player.validate();
    if (n_fruits < 0) throw std::invalid_argument("run_session: n_fruits must be >= 0");

    SearchParams params = cfg.search;
    params.rng_seed = seed;
    SessionResult result{SessionLog{seed, std::move(config_hash), {}}, Tree(params)};

    const Spawner spawner(params, cfg.spawn, cfg.segments);
    Rng spawn_rng(derive_seed(seed, 0));
    Rng player_rng(derive_seed(seed, 1));
    const double workspace = cfg.segments.total_mm();

    std::uint64_t clock_ms = 0;
    result.log.records.reserve(static_cast<std::size_t>(n_fruits));
    for (int i = 0; i < n_fruits; ++i) {
        const SpawnDecision spawn =
            spawner.choose(result.tree, spawn_rng, static_cast<std::uint64_t>(i), clock_ms);
        const TreePath path = result.tree.ensure_path(spawn.path_bins);
        const AttemptOutcome outcome = attempt(spawn.target_mm, player, cfg.timing, player_rng,
                                               workspace);
        const RewardValue reward = normalized_reward(outcome, cfg.timing);
        result.tree.backpropagate(path, reward.delta);
        result.tree.propagate_prospects(path, reward.signed_score);

        result.log.records.push_back(SessionRecord{
            spawn.fruit_id, spawn.spawn_time_ms, spawn.path_bins, spawn.target_mm, outcome.kind,
            outcome.elapsed_ms, reward.signed_score, reward.delta, spawn.ambiguity});
        clock_ms += static_cast<std::uint64_t>(std::llround(outcome.elapsed_ms));
    }
    return result;
}

// Session log, versioned structured text:
//
//   reachtree session v1
//   seed <u64>
//   config <16 hex digits>
//   columns fruit_id spawn_ms b1 b2 b3 b4 x y z outcome elapsed_ms signed delta ambiguity
//   <one record per line in that order>
inline std::string write_session_log(const SessionLog& log) {
    std::string out = "reachtree session v1\n";
    out += "seed " + std::to_string(log.seed) + '\n';
    out += "config " + log.config_hash + '\n';
    out += "columns fruit_id spawn_ms b1 b2 b3 b4 x y z outcome elapsed_ms signed delta ambiguity\n";
    for (const SessionRecord& r : log.records) {
        out += std::to_string(r.fruit_id);
        out += ' ';
        out += std::to_string(r.spawn_time_ms);
        for (int b : r.path_bins) {
            out += ' ';
            out += std::to_string(b);
        }
        out += ' ' + fmt_double(r.target_mm.x);
        out += ' ' + fmt_double(r.target_mm.y);
        out += ' ' + fmt_double(r.target_mm.z);
        out += ' ';
        out += outcome_name(r.outcome);
        out += ' ' + fmt_double(r.elapsed_ms);
        out += ' ' + fmt_double(r.signed_score);
        out += ' ' + fmt_double(r.delta);
        out += ' ' + fmt_double(r.ambiguity);
        out += '\n';
    }
    return out;
}

inline SessionLog parse_session_log(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "reachtree session v1")
        throw ParseError(1, "header", "expected 'reachtree session v1'");
    if (lines.size() < 4) throw ParseError(lines.size() + 1, "header", "truncated log header");

    SessionLog log;
    {
        const auto t = split_ws(lines[1]);
        const auto seed = t.size() == 2 && t[0] == "seed" ? parse_uint(t[1])
                                                          : std::optional<std::uint64_t>{};
        if (!seed) throw ParseError(2, "seed", "expected 'seed <u64>'");
        log.seed = *seed;
    }
    {
        const auto t = split_ws(lines[2]);
        if (t.size() != 2 || t[0] != "config" || t[1].size() != 16)
            throw ParseError(3, "config", "expected 'config <16 hex digits>'");
        log.config_hash = std::string(t[1]);
    }
    if (split_ws(lines[3]).size() != 15 || split_ws(lines[3])[0] != "columns")
        throw ParseError(4, "columns", "malformed columns line");

    for (std::size_t i = 4; i < lines.size(); ++i) {
        const std::size_t ln = i + 1;
        const auto t = split_ws(lines[i]);
        if (t.size() != 14) throw ParseError(ln, "record", "expected 14 fields");
        SessionRecord r;
        const auto fruit = parse_uint(t[0]);
        const auto spawn_ms = parse_uint(t[1]);
        if (!fruit || !spawn_ms) throw ParseError(ln, "record", "bad id/timestamp");
        r.fruit_id = *fruit;
        r.spawn_time_ms = *spawn_ms;
        for (int b = 0; b < kTreeDepth; ++b) {
            const auto bin = parse_int(t[static_cast<std::size_t>(2 + b)]);
            if (!bin) throw ParseError(ln, "record", "bad bin index");
            r.path_bins[static_cast<std::size_t>(b)] = static_cast<int>(*bin);
        }
        const auto x = parse_double(t[6]);
        const auto y = parse_double(t[7]);
        const auto z = parse_double(t[8]);
        if (!x || !y || !z) throw ParseError(ln, "record", "bad target coordinate");
        r.target_mm = {*x, *y, *z};
        try {
            r.outcome = outcome_from_name(t[9]);
        } catch (const std::invalid_argument&) {
            throw ParseError(ln, "record", "unknown outcome '" + std::string(t[9]) + "'");
        }
        const auto elapsed = parse_double(t[10]);
        const auto signed_score = parse_double(t[11]);
        const auto delta = parse_double(t[12]);
        const auto ambiguity = parse_double(t[13]);
        if (!elapsed || !signed_score || !delta || !ambiguity)
            throw ParseError(ln, "record", "bad numeric field");
        r.elapsed_ms = *elapsed;
        r.signed_score = *signed_score;
        r.delta = *delta;
        r.ambiguity = *ambiguity;
        log.records.push_back(r);
    }
    return log;
}

} // namespace reachtree
