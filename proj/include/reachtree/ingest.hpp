#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/geometry.hpp"
#include "reachtree/kinematics.hpp"
#include "reachtree/session.hpp"
#include "reachtree/text.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reachtree {

// ---------------------------------------------------------------------------
// Skeleton stream: one frame per line, Kinect v2 joint order.
//
//   skeleton v1
//   <t_ms> <x y z> x 25
// ---------------------------------------------------------------------------

constexpr std::size_t kSkeletonJoints = 25;

inline constexpr std::array<std::string_view, kSkeletonJoints> kSkeletonJointNames{
    "SpineBase",     "SpineMid",  "Neck",      "Head",        "ShoulderLeft",
    "ElbowLeft",     "WristLeft", "HandLeft",  "ShoulderRight", "ElbowRight",
    "WristRight",    "HandRight", "HipLeft",   "KneeLeft",    "AnkleLeft",
    "FootLeft",      "HipRight",  "KneeRight", "AnkleRight",  "FootRight",
    "SpineShoulder", "HandTipLeft", "ThumbLeft", "HandTipRight", "ThumbRight"};

inline std::size_t skeleton_joint_index(std::string_view name) {
    for (std::size_t i = 0; i < kSkeletonJointNames.size(); ++i)
        if (kSkeletonJointNames[i] == name) return i;
    throw std::invalid_argument("unknown skeleton joint '" + std::string(name) + "'");
}

struct SkeletonFrame {
    double t_ms = 0.0;
    std::array<Vec3, kSkeletonJoints> joints{};

    const Vec3& joint(std::string_view name) const { return joints[skeleton_joint_index(name)]; }
};

inline std::vector<SkeletonFrame> parse_skeleton_stream(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) return {};
    if (trim(lines[0]) != "skeleton v1")
        throw ParseError(1, "header", "expected 'skeleton v1'");

    std::vector<SkeletonFrame> frames;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t ln = i + 1;
        const auto tokens = split_ws(lines[i]);
        if (tokens.empty()) continue; // blank line
        if (tokens.size() != 1 + 3 * kSkeletonJoints) {
            const std::size_t joints = tokens.size() >= 1 ? (tokens.size() - 1) / 3 : 0;
            throw ParseError(ln, "joints",
                             "expected 25 joints (76 fields), got " + std::to_string(joints) +
                                 " (" + std::to_string(tokens.size()) + " fields)");
        }
        SkeletonFrame frame;
        const auto t = parse_double(tokens[0]);
        if (!t) throw ParseError(ln, "t_ms", "bad timestamp '" + std::string(tokens[0]) + "'");
        frame.t_ms = *t;
        if (!frames.empty() && !(frame.t_ms > frames.back().t_ms))
            throw ParseError(ln, "t_ms", "timestamps must be strictly increasing");
        for (std::size_t j = 0; j < kSkeletonJoints; ++j) {
            const auto x = parse_double(tokens[1 + 3 * j]);
            const auto y = parse_double(tokens[2 + 3 * j]);
            const auto z = parse_double(tokens[3 + 3 * j]);
            if (!x || !y || !z)
                throw ParseError(ln, std::string(kSkeletonJointNames[j]), "bad coordinate");
            frame.joints[j] = {*x, *y, *z};
        }
        frames.push_back(frame);
    }
    return frames;
}

inline std::string write_skeleton_stream(const std::vector<SkeletonFrame>& frames) {
    std::string out = "skeleton v1\n";
    for (const SkeletonFrame& f : frames) {
        out += fmt_double(f.t_ms);
        for (const Vec3& p : f.joints) {
            out += ' ' + fmt_double(p.x);
            out += ' ' + fmt_double(p.y);
            out += ' ' + fmt_double(p.z);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Armband stream: CSV, fixed 19-column order
// t, 3 accel (g), 3 gyro (deg/s), 4 quaternion, 8 EMG.
// ---------------------------------------------------------------------------

constexpr std::string_view kMyoHeader =
    "t_ms,ax_g,ay_g,az_g,gx_dps,gy_dps,gz_dps,qw,qx,qy,qz,"
    "emg1,emg2,emg3,emg4,emg5,emg6,emg7,emg8";

struct MyoRecord {
    double t_ms = 0.0;
    std::array<double, 3> accel_g{};
    std::array<double, 3> gyro_dps{};
    std::array<double, 4> quat{1.0, 0.0, 0.0, 0.0}; // w, x, y, z
    std::array<int, 8> emg{};
};

struct MyoParseResult {
    std::vector<MyoRecord> records;
    std::vector<std::string> warnings; // nominal-rate deviations, not errors
};

inline MyoParseResult parse_myo_stream(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) return {};
    if (trim(lines[0]) != kMyoHeader)
        throw ParseError(1, "header", "expected the 19-column armband CSV header");

    MyoParseResult result;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t ln = i + 1;
        if (trim(lines[i]).empty()) continue;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 19) {
            // EMG is the trailing block, so a short row reads as missing pods
            if (fields.size() >= 11 && fields.size() < 19)
                throw ParseError(ln, "emg",
                                 "expected 8 EMG channels, got " + std::to_string(fields.size() - 11));
            throw ParseError(ln, "columns",
                             "expected 19 columns, got " + std::to_string(fields.size()));
        }
        MyoRecord rec;
        std::array<double, 11> nums{};
        for (std::size_t f = 0; f < 11; ++f) {
            const auto v = parse_double(trim(fields[f]));
            if (!v) throw ParseError(ln, "column " + std::to_string(f + 1), "bad numeric value");
            nums[f] = *v;
        }
        rec.t_ms = nums[0];
        rec.accel_g = {nums[1], nums[2], nums[3]};
        rec.gyro_dps = {nums[4], nums[5], nums[6]};
        rec.quat = {nums[7], nums[8], nums[9], nums[10]};
        for (std::size_t c = 0; c < 8; ++c) {
            const auto v = parse_int(trim(fields[11 + c]));
            if (!v) throw ParseError(ln, "emg" + std::to_string(c + 1), "bad EMG value");
            rec.emg[c] = static_cast<int>(*v);
        }

        const double qnorm = std::sqrt(rec.quat[0] * rec.quat[0] + rec.quat[1] * rec.quat[1] +
                                       rec.quat[2] * rec.quat[2] + rec.quat[3] * rec.quat[3]);
        if (!(std::abs(qnorm - 1.0) <= 1e-3))
            throw ParseError(ln, "quaternion",
                             "norm " + fmt_double(qnorm) + " not within 1e-3 of 1");
        if (!result.records.empty() && !(rec.t_ms > result.records.back().t_ms))
            throw ParseError(ln, "t_ms", "timestamps must be strictly increasing");
        result.records.push_back(rec);
    }

    // Rate sanity: the armband emits EMG at 200 Hz and IMU at 50 Hz. Warn if
    // the median gap is more than 20% away from both nominal periods.
    if (result.records.size() >= 2) {
        std::vector<double> gaps;
        gaps.reserve(result.records.size() - 1);
        for (std::size_t i = 1; i < result.records.size(); ++i)
            gaps.push_back(result.records[i].t_ms - result.records[i - 1].t_ms);
        std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                         gaps.end());
        const double median = gaps[gaps.size() / 2];
        const bool near_emg = std::abs(median - 5.0) <= 0.2 * 5.0;
        const bool near_imu = std::abs(median - 20.0) <= 0.2 * 20.0;
        if (!near_emg && !near_imu)
            result.warnings.push_back("median inter-record gap " + fmt_double(median) +
                                      " ms deviates >20% from nominal 200 Hz EMG and 50 Hz IMU rates");
    }
    return result;
}

inline std::string write_myo_stream(const std::vector<MyoRecord>& records) {
    std::string out{kMyoHeader};
    out += '\n';
    for (const MyoRecord& r : records) {
        out += fmt_double(r.t_ms);
        for (double v : r.accel_g) out += ',' + fmt_double(v);
        for (double v : r.gyro_dps) out += ',' + fmt_double(v);
        for (double v : r.quat) out += ',' + fmt_double(v);
        for (int v : r.emg) out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// gzip support: both stream formats are accepted gzip-compressed.
// ---------------------------------------------------------------------------

inline bool looks_gzipped(std::string_view bytes) {
    return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
           static_cast<unsigned char>(bytes[1]) == 0x8b;
}

inline std::string gunzip_bytes(std::string_view bytes) {
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
        throw std::runtime_error("gzip: inflateInit failed");

    std::string out;
    std::array<char, 1 << 15> buf;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    zs.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf.data());
        zs.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError(1, "gzip", "corrupt gzip stream (zlib rc " + std::to_string(rc) + ")");
        }
        out.append(buf.data(), buf.size() - zs.avail_out);
    } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ParseError(1, "gzip", "truncated gzip stream");
    return out;
}

// Transparently decode a possibly-gzipped text payload.
inline std::string decode_stream_bytes(std::string_view bytes) {
    if (looks_gzipped(bytes)) return gunzip_bytes(bytes);
    return std::string(bytes);
}

// ---------------------------------------------------------------------------
// Replay: drive the engine with a recorded skeleton stream instead of the
// simulated player.
// ---------------------------------------------------------------------------

struct ReplayConfig {
    std::string side = "right"; // which arm's shoulder/elbow/wrist to track
    double grab_radius_mm = 50.0;
    Vec3 basket_center_mm{200.0, -400.0, 200.0};
    double basket_radius_mm = 150.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (side != "right" && side != "left")
            throw ConfigError("replay: side must be 'right' or 'left'");
        if (!(grab_radius_mm > 0.0)) throw ConfigError("replay: grab_radius_mm must be > 0");
        if (!(basket_radius_mm > 0.0)) throw ConfigError("replay: basket_radius_mm must be > 0");
    }
};

// Fingertip of the model arm driven by one recorded frame: joint angles are
// reconstructed from the recorded shoulder/elbow/wrist, then pushed through
// the forward model with the configured segment lengths.
inline Vec3 replay_fingertip(const SkeletonFrame& frame, const ReplayConfig& rcfg,
                             const ArmSegments& segs, std::size_t frame_no) {
    const bool right = rcfg.side == "right";
    const Vec3& shoulder = frame.joints[right ? 8u : 4u];
    const Vec3& elbow = frame.joints[right ? 9u : 5u];
    const Vec3& wrist = frame.joints[right ? 10u : 6u];
    try {
        const IkResult ik = angles_from_positions(shoulder, elbow, wrist);
        return pose_from_angles(ik.angles, segs).p4;
    } catch (const std::invalid_argument& e) {
        throw ReplayError("frame " + std::to_string(frame_no) + ": " + e.what() +
                          " (missing or degenerate " + rcfg.side + "-arm joints)");
    }
}

// Segments one recording into fruit attempts: each fruit is spawned by the
// regular ambiguity policy, then the recorded fingertip either grabs it
// (within grab_radius) and carries it over the basket (success), grabs it and
// times out (unsuccessful), or times out / runs out of recording (fail).
// Produces the same log schema as the simulated player.
inline SessionResult replay(const std::vector<SkeletonFrame>& frames, const EngineConfig& cfg,
                            const ReplayConfig& rcfg,
                            std::string config_hash = std::string(16, '0')) {
    cfg.validate();
    rcfg.validate();

    SearchParams params = cfg.search;
    params.rng_seed = rcfg.seed;
    SessionResult result{SessionLog{rcfg.seed, std::move(config_hash), {}}, Tree(params)};
    const Spawner spawner(params, cfg.spawn, cfg.segments);
    Rng spawn_rng(derive_seed(rcfg.seed, 0));

    const double t0_stream = frames.empty() ? 0.0 : frames[0].t_ms;
    std::size_t i = 0;
    std::uint64_t fruit_id = 0;
    while (i < frames.size()) {
        const double t_spawn = frames[i].t_ms;
        const SpawnDecision spawn = spawner.choose(
            result.tree, spawn_rng, fruit_id,
            static_cast<std::uint64_t>(std::llround(t_spawn - t0_stream)));

        bool grabbed = false;
        bool resolved = false;
        AttemptOutcome outcome = AttemptOutcome::make_fail(cfg.timing.t_max_ms);
        for (; i < frames.size(); ++i) {
            const double elapsed = frames[i].t_ms - t_spawn;
            if (elapsed >= cfg.timing.t_max_ms) {
                // frame not consumed: it starts the next attempt
                outcome = grabbed ? AttemptOutcome::make_unsuccessful(cfg.timing.t_max_ms)
                                  : AttemptOutcome::make_fail(cfg.timing.t_max_ms);
                resolved = true;
                break;
            }
            const Vec3 fingertip = replay_fingertip(frames[i], rcfg, cfg.segments, i + 1);
            if (!grabbed) {
                if (distance(fingertip, spawn.target_mm) <= rcfg.grab_radius_mm) grabbed = true;
            } else if (distance(fingertip, rcfg.basket_center_mm) <= rcfg.basket_radius_mm) {
                outcome = AttemptOutcome::make_success(std::max(elapsed, 0.0));
                resolved = true;
                ++i;
                break;
            }
        }
        if (!resolved)
            // recording ended mid-attempt: the timer would have expired unanswered
            outcome = grabbed ? AttemptOutcome::make_unsuccessful(cfg.timing.t_max_ms)
                              : AttemptOutcome::make_fail(cfg.timing.t_max_ms);

        const TreePath path = result.tree.ensure_path(spawn.path_bins);
        const RewardValue reward = normalized_reward(outcome, cfg.timing);
        result.tree.backpropagate(path, reward.delta);
        result.tree.propagate_prospects(path, reward.signed_score);
        result.log.records.push_back(SessionRecord{
            spawn.fruit_id, spawn.spawn_time_ms, spawn.path_bins, spawn.target_mm, outcome.kind,
            outcome.elapsed_ms, reward.signed_score, reward.delta, spawn.ambiguity});
        ++fruit_id;
    }
    return result;
}

} // namespace reachtree
