#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/ingest.hpp"
#include "reachtree/player.hpp"
#include "reachtree/session.hpp"
#include "reachtree/text.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reachtree {

// Full run configuration: engine + player + run layout + replay options.
// Sourced from a flat dotted-key file, overridable per key; all keys are
// listed in canonical_config below (which doubles as the hashed identity of
// a run).
struct RunConfig {
    EngineConfig engine;
    PlayerModel player;
    ReplayConfig replay;
    int sessions = 1;
    int fruits = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    void validate() const {
        try {
            engine.validate();
            player.validate();
            replay.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (sessions < 0) throw ConfigError("run: sessions must be >= 0");
        if (fruits < 0) throw ConfigError("run: fruits must be >= 0");
        if (out_dir.empty()) throw ConfigError("run: out_dir must not be empty");
    }
};

namespace detail {

inline double need_double(std::string_view key, std::string_view value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError(std::string(key) + ": expected a number, got '" +
                              std::string(value) + "'");
    return *v;
}

inline std::int64_t need_int(std::string_view key, std::string_view value) {
    const auto v = parse_int(value);
    if (!v) throw ConfigError(std::string(key) + ": expected an integer, got '" +
                              std::string(value) + "'");
    return *v;
}

inline std::uint64_t need_uint(std::string_view key, std::string_view value) {
    const auto v = parse_uint(value);
    if (!v) throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                              std::string(value) + "'");
    return *v;
}

inline std::vector<double> need_doubles(std::string_view key, std::string_view value,
                                        std::size_t count) {
    const auto parts = split(value, ',');
    if (parts.size() != count)
        throw ConfigError(std::string(key) + ": expected " + std::to_string(count) +
                          " comma-separated values");
    std::vector<double> out;
    for (const auto part : parts) out.push_back(need_double(key, trim(part)));
    return out;
}

} // namespace detail

// Set one configuration key. Both the file loader and the CLI's --set
// overrides funnel through here, so precedence is purely call order.
inline void apply_override(RunConfig& cfg, std::string_view key, std::string_view raw_value) {
    using namespace detail;
    const std::string_view value = trim(raw_value);

    if (key == "search.cp") cfg.engine.search.cp = need_double(key, value);
    else if (key == "search.visit_threshold")
        cfg.engine.search.visit_threshold = need_uint(key, value);
    else if (key == "search.bins") {
        const auto parts = split(value, ',');
        if (parts.size() != kTreeDepth)
            throw ConfigError("search.bins: expected 4 comma-separated counts");
        for (std::size_t i = 0; i < kTreeDepth; ++i)
            cfg.engine.search.bins[i] = static_cast<int>(need_int(key, trim(parts[i])));
    } else if (key == "search.prospect_k")
        cfg.engine.search.prospect_k = need_double(key, value);
    else if (key == "spawn.epsilon") cfg.engine.spawn.epsilon = need_double(key, value);
    else if (key == "spawn.decision_budget_ms")
        cfg.engine.spawn.decision_budget_ms = need_double(key, value);
    else if (key == "spawn.reach_limit_mm")
        cfg.engine.spawn.reach_limit.t_path_mm = need_double(key, value);
    else if (key == "timing.t_best_ms") cfg.engine.timing.t_best_ms = need_double(key, value);
    else if (key == "timing.t_max_ms") cfg.engine.timing.t_max_ms = need_double(key, value);
    else if (key == "arm.upper_mm") cfg.engine.segments.upper_mm = need_double(key, value);
    else if (key == "arm.forearm_mm") cfg.engine.segments.forearm_mm = need_double(key, value);
    else if (key == "arm.hand_mm") cfg.engine.segments.hand_mm = need_double(key, value);
    else if (key == "player.center_mm") {
        const auto v = need_doubles(key, value, 3);
        cfg.player.comfort_center_mm = {v[0], v[1], v[2]};
    } else if (key == "player.radius_mm")
        cfg.player.competence_radius_mm = need_double(key, value);
    else if (key == "player.steepness") cfg.player.steepness = need_double(key, value);
    else if (key == "player.place_prob") cfg.player.place_success_prob = need_double(key, value);
    else if (key == "replay.side") cfg.replay.side = std::string(value);
    else if (key == "replay.grab_radius_mm")
        cfg.replay.grab_radius_mm = need_double(key, value);
    else if (key == "replay.basket_center_mm") {
        const auto v = need_doubles(key, value, 3);
        cfg.replay.basket_center_mm = {v[0], v[1], v[2]};
    } else if (key == "replay.basket_radius_mm")
        cfg.replay.basket_radius_mm = need_double(key, value);
    else if (key == "run.sessions") cfg.sessions = static_cast<int>(need_int(key, value));
    else if (key == "run.fruits") cfg.fruits = static_cast<int>(need_int(key, value));
    else if (key == "run.seed") cfg.seed = need_uint(key, value);
    else if (key == "run.out_dir") cfg.out_dir = std::string(value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

// Config file: one `key = value` per line, '#' comments, blank lines ignored.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(i + 1) + ": expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        try {
            apply_override(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return cfg;
}

// Canonical key order; the FNV-1a hash of this text identifies a run setup in
// logs and reports. run.out_dir is excluded: where output lands does not
// change what was computed.
inline std::string canonical_config(const RunConfig& cfg) {
    std::string out;
    auto kv = [&out](std::string_view key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("search.cp", fmt_double(cfg.engine.search.cp));
    kv("search.visit_threshold", std::to_string(cfg.engine.search.visit_threshold));
    kv("search.bins", std::to_string(cfg.engine.search.bins[0]) + ',' +
                          std::to_string(cfg.engine.search.bins[1]) + ',' +
                          std::to_string(cfg.engine.search.bins[2]) + ',' +
                          std::to_string(cfg.engine.search.bins[3]));
    kv("search.prospect_k", fmt_double(cfg.engine.search.prospect_k));
    kv("spawn.epsilon", fmt_double(cfg.engine.spawn.epsilon));
    kv("spawn.decision_budget_ms", fmt_double(cfg.engine.spawn.decision_budget_ms));
    kv("spawn.reach_limit_mm", fmt_double(cfg.engine.spawn.reach_limit.t_path_mm));
    kv("timing.t_best_ms", fmt_double(cfg.engine.timing.t_best_ms));
    kv("timing.t_max_ms", fmt_double(cfg.engine.timing.t_max_ms));
    kv("arm.upper_mm", fmt_double(cfg.engine.segments.upper_mm));
    kv("arm.forearm_mm", fmt_double(cfg.engine.segments.forearm_mm));
    kv("arm.hand_mm", fmt_double(cfg.engine.segments.hand_mm));
    kv("player.center_mm", fmt_double(cfg.player.comfort_center_mm.x) + ',' +
                               fmt_double(cfg.player.comfort_center_mm.y) + ',' +
                               fmt_double(cfg.player.comfort_center_mm.z));
    kv("player.radius_mm", fmt_double(cfg.player.competence_radius_mm));
    kv("player.steepness", fmt_double(cfg.player.steepness));
    kv("player.place_prob", fmt_double(cfg.player.place_success_prob));
    kv("replay.side", cfg.replay.side);
    kv("replay.grab_radius_mm", fmt_double(cfg.replay.grab_radius_mm));
    kv("replay.basket_center_mm", fmt_double(cfg.replay.basket_center_mm.x) + ',' +
                                      fmt_double(cfg.replay.basket_center_mm.y) + ',' +
                                      fmt_double(cfg.replay.basket_center_mm.z));
    kv("replay.basket_radius_mm", fmt_double(cfg.replay.basket_radius_mm));
    kv("run.sessions", std::to_string(cfg.sessions));
    kv("run.fruits", std::to_string(cfg.fruits));
    kv("run.seed", std::to_string(cfg.seed));
    return out;
}

inline std::string config_hash(const RunConfig& cfg) {
    return to_hex(fnv1a64(canonical_config(cfg)));
}

} // namespace reachtree
