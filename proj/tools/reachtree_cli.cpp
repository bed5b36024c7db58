// Command-line front end: simulations, recording replay, bandit benchmarks,
// log export, and a forward-kinematics debug helper. All file output lands
// under the configured output directory; diagnostics go to stderr and the
// exit code is 0 only when the command completed.
#include "reachtree/reachtree.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace reachtree;

namespace {

std::string read_input_file(const std::string& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw std::runtime_error(path + ": no such file");
    return read_file(path);
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

int run_simulate_cmd(const RunConfig& cfg) {
    const SimulateResult result = run_simulate(cfg);
    std::fputs(result.summary_text.c_str(), stdout);
    for (const fs::path& p : result.files_written)
        std::fprintf(stderr, "wrote %s\n", p.string().c_str());
    return 0;
}

int run_replay_cmd(RunConfig cfg, const std::string& skeleton_path,
                   const std::string& myo_path) {
    // The run seed drives the replayed spawner stream, so --seed and
    // run.seed behave the same here as in simulate.
    cfg.replay.seed = cfg.seed;

    std::vector<SkeletonFrame> frames;
    try {
        frames = parse_skeleton_stream(decode_stream_bytes(read_input_file(skeleton_path)));
    } catch (const ParseError& e) {
        throw std::runtime_error(skeleton_path + ": " + e.what());
    }

    std::string myo_note;
    if (!myo_path.empty()) {
        MyoParseResult myo;
        try {
            myo = parse_myo_stream(decode_stream_bytes(read_input_file(myo_path)));
        } catch (const ParseError& e) {
            throw std::runtime_error(myo_path + ": " + e.what());
        }
        for (const std::string& w : myo.warnings)
            std::fprintf(stderr, "warning: %s: %s\n", myo_path.c_str(), w.c_str());
        myo_note = "myo_records " + std::to_string(myo.records.size());
        if (!myo.records.empty())
            myo_note += " span_ms " +
                        fmt_double(myo.records.back().t_ms - myo.records.front().t_ms);
    }

    const SessionResult result = replay(frames, cfg.engine, cfg.replay, config_hash(cfg));

    std::string report = "reachtree replay report\n";
    report += "config " + result.log.config_hash + "\n";
    report += "frames " + std::to_string(frames.size());
    if (!frames.empty())
        report += " span_ms " + fmt_double(frames.back().t_ms - frames.front().t_ms);
    report += "\n";
    if (!myo_note.empty()) report += myo_note + "\n";

    std::size_t n_success = 0, n_unsuccessful = 0, n_fail = 0;
    for (const SessionRecord& r : result.log.records) {
        switch (r.outcome) {
            case OutcomeKind::success: ++n_success; break;
            case OutcomeKind::unsuccessful: ++n_unsuccessful; break;
            case OutcomeKind::fail: ++n_fail; break;
        }
        report += "fruit " + std::to_string(r.fruit_id) + " spawn_ms " +
                  std::to_string(r.spawn_time_ms) + " outcome " + outcome_name(r.outcome) +
                  " elapsed_ms " + fmt_double(r.elapsed_ms) + " signed " +
                  fmt_double(r.signed_score) + " reach_mm " + fmt_double(norm(r.target_mm)) +
                  " basket_mm " +
                  fmt_double(distance(r.target_mm, cfg.replay.basket_center_mm)) + "\n";
    }
    report += "attempts " + std::to_string(result.log.records.size()) + " success " +
              std::to_string(n_success) + " unsuccessful " + std::to_string(n_unsuccessful) +
              " fail " + std::to_string(n_fail) + "\n";

    const fs::path dir = prepare_out_dir(cfg);
    write_file(dir / "replay.log", write_session_log(result.log));
    write_file(dir / "replay_report.txt", report);
    std::fputs(report.c_str(), stdout);
    std::fprintf(stderr, "wrote %s\n", (dir / "replay.log").string().c_str());
    std::fprintf(stderr, "wrote %s\n", (dir / "replay_report.txt").string().c_str());
    return 0;
}

int run_bandit_cmd(const RunConfig& cfg, const std::string& arm_spec, int iterations) {
    const std::vector<double> means = parse_arm_spec(arm_spec);
    const BanditResult result = run_bernoulli_bandit(
        means, iterations, cfg.engine.search.cp, cfg.engine.search.visit_threshold, cfg.seed);
    std::printf("arm true_mean pulls empirical_mean\n");
    for (std::size_t i = 0; i < means.size(); ++i)
        std::printf("%zu %s %llu %s\n", i, fmt_double(means[i]).c_str(),
                    static_cast<unsigned long long>(result.pulls[i]),
                    fmt_double(result.empirical_mean[i]).c_str());
    std::printf("best_arm %zu\n", result.best_arm);
    return 0;
}

int run_export_cmd(const RunConfig& cfg, const std::vector<std::string>& log_paths) {
    std::string csv = "seed,config,fruit_id,spawn_ms,b1,b2,b3,b4,x_mm,y_mm,z_mm,outcome,"
                      "elapsed_ms,signed,delta,ambiguity\n";
    std::size_t rows = 0;
    for (const std::string& path : log_paths) {
        SessionLog log;
        try {
            log = parse_session_log(read_input_file(path));
        } catch (const ParseError& e) {
            throw std::runtime_error(path + ": " + e.what());
        }
        for (const SessionRecord& r : log.records) {
            csv += std::to_string(log.seed) + ',' + log.config_hash + ',' +
                   std::to_string(r.fruit_id) + ',' + std::to_string(r.spawn_time_ms);
            for (int b : r.path_bins) csv += ',' + std::to_string(b);
            csv += ',' + fmt_double(r.target_mm.x) + ',' + fmt_double(r.target_mm.y) + ',' +
                   fmt_double(r.target_mm.z) + ',' + outcome_name(r.outcome) + ',' +
                   fmt_double(r.elapsed_ms) + ',' + fmt_double(r.signed_score) + ',' +
                   fmt_double(r.delta) + ',' + fmt_double(r.ambiguity) + '\n';
            ++rows;
        }
    }
    const fs::path out = prepare_out_dir(cfg) / "export.csv";
    write_file(out, csv);
    std::fprintf(stderr, "wrote %s (%zu rows from %zu logs)\n", out.string().c_str(), rows,
                 log_paths.size());
    return 0;
}

int run_fk_cmd(const RunConfig& cfg, double yaw_deg, double pitch_deg, double roll_deg,
               double elbow_deg) {
    constexpr double kRad = std::numbers::pi / 180.0;
    JointAngles a;
    a.yaw_rad = yaw_deg * kRad;
    a.pitch_rad = pitch_deg * kRad;
    a.roll_rad = roll_deg * kRad;
    a.elbow_rad = elbow_deg * kRad;
    for (const ConstraintViolation& v : check_constraints(a))
        std::fprintf(stderr, "warning: %s\n", v.describe().c_str());

    const ArmPose pose = pose_from_angles(a, cfg.engine.segments);
    auto print_point = [](const char* name, const Vec3& p) {
        std::printf("%s %s %s %s\n", name, fmt_double(p.x).c_str(), fmt_double(p.y).c_str(),
                    fmt_double(p.z).c_str());
    };
    print_point("p1", pose.p1);
    print_point("p2", pose.p2);
    print_point("p3", pose.p3);
    print_point("p4", pose.p4);
    std::printf("reach_mm %s\n", fmt_double(distance(pose.p4, pose.p1)).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive reach-target engine: simulate sessions, replay recordings,\n"
                 "benchmark the selection rule, export logs"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_flag;
    app.add_option("-c,--config", config_path, "key = value configuration file");
    app.add_option("--set", overrides, "override one config key (repeatable)")
        ->type_name("KEY=VALUE");
    app.add_option("-o,--out", out_flag, "output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "run closed-loop sessions")->fallthrough();
    int sessions = 0, fruits = 0;
    std::uint64_t seed = 0;
    auto* opt_sessions = simulate->add_option("--sessions", sessions, "number of sessions");
    auto* opt_fruits = simulate->add_option("--fruits", fruits, "fruits per session");
    auto* opt_seed = simulate->add_option("--seed", seed, "base seed");

    CLI::App* replay_cmd = app.add_subcommand("replay", "replay a recorded session")->fallthrough();
    std::string skeleton_path, myo_path;
    replay_cmd->add_option("--skeleton", skeleton_path, "skeleton stream (.txt or .gz)")
        ->required();
    replay_cmd->add_option("--myo", myo_path, "armband stream (.csv or .gz)");
    auto* opt_rseed = replay_cmd->add_option("--seed", seed, "spawner seed");

    CLI::App* bandit = app.add_subcommand("bandit-eval", "selection rule on Bernoulli arms")->fallthrough();
    std::string arm_spec = "0.1..0.9x10";
    int iterations = 1000;
    double cp = 0.0;
    std::uint64_t threshold = 0;
    bandit->add_option("--arms", arm_spec, "means: '0.1,0.5,0.9' or '0.1..0.9x10'");
    bandit->add_option("--iterations", iterations, "selection steps");
    auto* opt_cp = bandit->add_option("--cp", cp, "exploration constant");
    auto* opt_thresh = bandit->add_option("--threshold", threshold, "visit threshold");
    auto* opt_bseed = bandit->add_option("--seed", seed, "rng seed");

    CLI::App* export_cmd = app.add_subcommand("export", "flatten session logs to csv")->fallthrough();
    std::vector<std::string> log_paths;
    export_cmd->add_option("logs", log_paths, "session log files")->required();

    CLI::App* fk = app.add_subcommand("fk", "forward kinematics for one pose (degrees)")->fallthrough();
    double yaw_deg = 0.0, pitch_deg = 0.0, roll_deg = 0.0, elbow_deg = 0.0;
    fk->add_option("--yaw", yaw_deg, "shoulder yaw");
    fk->add_option("--pitch", pitch_deg, "shoulder pitch");
    fk->add_option("--roll", roll_deg, "shoulder roll");
    fk->add_option("--elbow", elbow_deg, "elbow flexion");

    CLI11_PARSE(app, argc, argv);

    try {
        // Precedence: defaults, then config file, then the environment's
        // output directory, then flags (most specific last).
        RunConfig cfg;
        if (!config_path.empty()) {
            try {
                cfg = parse_config(read_input_file(config_path));
            } catch (const ConfigError& e) {
                throw std::runtime_error(config_path + ": " + e.what());
            }
        }
        if (const char* env_out = std::getenv("REACHTREE_OUT"); env_out && *env_out)
            cfg.out_dir = env_out;
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set " + kv + ": expected KEY=VALUE");
            apply_override(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        if (!out_flag.empty()) cfg.out_dir = out_flag;
        if (opt_sessions->count()) cfg.sessions = sessions;
        if (opt_fruits->count()) cfg.fruits = fruits;
        if (opt_seed->count() || opt_rseed->count() || opt_bseed->count()) cfg.seed = seed;
        if (opt_cp->count()) cfg.engine.search.cp = cp;
        if (opt_thresh->count()) cfg.engine.search.visit_threshold = threshold;
        cfg.validate();

        if (simulate->parsed()) return run_simulate_cmd(cfg);
        if (replay_cmd->parsed()) return run_replay_cmd(cfg, skeleton_path, myo_path);
        if (bandit->parsed()) return run_bandit_cmd(cfg, arm_spec, iterations);
        if (export_cmd->parsed()) return run_export_cmd(cfg, log_paths);
        if (fk->parsed()) return run_fk_cmd(cfg, yaw_deg, pitch_deg, roll_deg, elbow_deg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
