#pragma once

#include "reachtree/config.hpp"
#include "reachtree/io.hpp"
#include "reachtree/session.hpp"
#include "reachtree/snapshot.hpp"
#include "reachtree/text.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace reachtree {

struct BlockSummary {
    std::size_t first = 0, count = 0; // record range [first, first+count)
    double mean_distance_mm = 0.0;    // spawn distance from the player's comfort center
    double success_rate = 0.0;
    double mean_ambiguity = 0.0;
};

struct SessionSummary {
    std::uint64_t seed = 0;
    std::vector<BlockSummary> blocks;
    double success_rate = 0.0;
    double mean_distance_mm = 0.0;
};

// Per-block aggregates of one session, measured against the player's comfort
// center (the adaptive-migration signal: block means should drift outward).
inline SessionSummary summarize_session(const SessionLog& log, const PlayerModel& player,
                                        std::size_t n_blocks = 4) {
    SessionSummary s;
    s.seed = log.seed;
    const std::size_t n = log.records.size();
    double dist_sum = 0.0;
    std::size_t successes = 0;
    for (const SessionRecord& r : log.records) {
        dist_sum += distance(r.target_mm, player.comfort_center_mm);
        if (r.outcome == OutcomeKind::success) ++successes;
    }
    s.success_rate = n ? static_cast<double>(successes) / static_cast<double>(n) : 0.0;
    s.mean_distance_mm = n ? dist_sum / static_cast<double>(n) : 0.0;

    if (n_blocks == 0 || n == 0) return s;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        BlockSummary block;
        block.first = n * b / n_blocks;
        block.count = n * (b + 1) / n_blocks - block.first;
        if (block.count == 0) continue;
        double d = 0.0, amb = 0.0;
        std::size_t ok = 0;
        for (std::size_t i = block.first; i < block.first + block.count; ++i) {
            const SessionRecord& r = log.records[i];
            d += distance(r.target_mm, player.comfort_center_mm);
            amb += r.ambiguity;
            if (r.outcome == OutcomeKind::success) ++ok;
        }
        block.mean_distance_mm = d / static_cast<double>(block.count);
        block.success_rate = static_cast<double>(ok) / static_cast<double>(block.count);
        block.mean_ambiguity = amb / static_cast<double>(block.count);
        s.blocks.push_back(block);
    }
    return s;
}

struct SimulateResult {
    std::vector<SessionSummary> sessions;
    std::string summary_text;
    std::vector<std::filesystem::path> files_written;
};

inline std::string format_summary(const std::vector<SessionSummary>& sessions,
                                  const std::string& hash) {
    std::string out = "reachtree summary v1\n";
    out += "config " + hash + '\n';
    for (const SessionSummary& s : sessions) {
        for (std::size_t b = 0; b < s.blocks.size(); ++b) {
            const BlockSummary& blk = s.blocks[b];
            out += "session " + std::to_string(s.seed);
            out += " block " + std::to_string(b + 1);
            out += " n " + std::to_string(blk.count);
            out += " mean_distance_mm " + fmt_double(blk.mean_distance_mm);
            out += " success_rate " + fmt_double(blk.success_rate);
            out += " mean_ambiguity " + fmt_double(blk.mean_ambiguity);
            out += '\n';
        }
        out += "session " + std::to_string(s.seed);
        out += " overall mean_distance_mm " + fmt_double(s.mean_distance_mm);
        out += " success_rate " + fmt_double(s.success_rate);
        out += '\n';
    }
    return out;
}

// Run cfg.sessions sessions of cfg.fruits fruits each; per-session seeds are
// derived from the run seed. When write_files is set, session logs, final
// tree snapshots and the summary land under cfg.out_dir.
inline SimulateResult run_simulate(const RunConfig& cfg, bool write_files = true) {
    cfg.validate();
    const std::string hash = config_hash(cfg);
    SimulateResult result;

    for (int i = 0; i < cfg.sessions; ++i) {
        const std::uint64_t session_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        SessionResult session = run_session(cfg.engine, cfg.player, cfg.fruits, session_seed, hash);
        result.sessions.push_back(summarize_session(session.log, cfg.player));
        if (write_files) {
            char name[32];
            std::snprintf(name, sizeof name, "session_%03d", i);
            const std::filesystem::path dir(cfg.out_dir);
            const auto log_path = dir / (std::string(name) + ".log");
            const auto tree_path = dir / (std::string(name) + ".tree");
            write_file(log_path, write_session_log(session.log));
            write_file(tree_path, save_tree(session.tree));
            result.files_written.push_back(log_path);
            result.files_written.push_back(tree_path);
        }
    }

    result.summary_text = format_summary(result.sessions, hash);
    if (write_files) {
        const auto summary_path = std::filesystem::path(cfg.out_dir) / "summary.txt";
        write_file(summary_path, result.summary_text);
        result.files_written.push_back(summary_path);
    }
    return result;
}

} // namespace reachtree
