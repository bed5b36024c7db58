#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachtree/geometry.hpp"

namespace reachtree {

// Frame convention: right-handed, Y up, shoulder at the origin, rest pose arm
// along -Y. Yaw rotates about world Y, pitch about the yawed X axis, roll
// about the upper-arm axis; elbow flexion swings the forearm into the local
// +Z half-plane.

enum class JointId { yaw = 0, pitch = 1, roll = 2, elbow = 3 };

inline const char* joint_name(JointId id) {
    switch (id) {
        case JointId::yaw: return "yaw";
        case JointId::pitch: return "pitch";
        case JointId::roll: return "roll";
        case JointId::elbow: return "elbow";
    }
    return "?";
}

struct JointRange {
    double lo_rad;
    double hi_rad;
};

inline constexpr std::array<JointRange, 4> kJointRanges{{
    {-std::numbers::pi / 2, std::numbers::pi / 2}, // yaw, 180 deg span
    {-std::numbers::pi / 6, std::numbers::pi / 2}, // pitch, 120 deg span
    {-std::numbers::pi / 2, std::numbers::pi / 2}, // roll, 180 deg span
    {0.0, std::numbers::pi / 2},                   // elbow, 90 deg span
}};

struct JointAngles {
    double yaw_rad = 0.0;
    double pitch_rad = 0.0;
    double roll_rad = 0.0;
    double elbow_rad = 0.0;

    double operator[](JointId id) const {
        switch (id) {
            case JointId::yaw: return yaw_rad;
            case JointId::pitch: return pitch_rad;
            case JointId::roll: return roll_rad;
            case JointId::elbow: return elbow_rad;
        }
        return 0.0;
    }
};

struct ArmSegments {
    double upper_mm = 285.0;
    double forearm_mm = 260.0;
    double hand_mm = 184.0;

    double total_mm() const { return upper_mm + forearm_mm + hand_mm; }

    void validate() const {
        if (!(upper_mm > 0.0) || !(forearm_mm > 0.0) || !(hand_mm > 0.0))
            throw std::invalid_argument("arm segment lengths must be strictly positive");
    }
};

// Shoulder, elbow, wrist, fingertip in mm, shoulder-relative.
struct ArmPose {
    Vec3 p1, p2, p3, p4;
};

struct ReachLimit {
    double t_path_mm = ArmSegments{}.total_mm();
};

struct ConstraintViolation {
    JointId joint;
    double value_rad;
    double lo_rad;
    double hi_rad;

    std::string describe() const {
        return std::string(joint_name(joint)) + " = " + std::to_string(value_rad) +
               " rad outside [" + std::to_string(lo_rad) + ", " + std::to_string(hi_rad) + "]";
    }
};

inline std::vector<ConstraintViolation> check_constraints(const JointAngles& a) {
    std::vector<ConstraintViolation> out;
    for (int i = 0; i < 4; ++i) {
        const auto id = static_cast<JointId>(i);
        const double v = a[id];
        const JointRange& r = kJointRanges[static_cast<std::size_t>(i)];
        if (!(v >= r.lo_rad && v <= r.hi_rad)) out.push_back({id, v, r.lo_rad, r.hi_rad});
    }
    return out;
}

// Pose evaluation without range checking; replay feeds it reconstructed
// angles that may sit outside the nominal joint ranges.
inline ArmPose pose_from_angles(const JointAngles& a, const ArmSegments& segs) {
    const Vec3 down{0.0, -1.0, 0.0};
    const Vec3 upper_dir = rotate_y(rotate_x(down, a.pitch_rad), a.yaw_rad);
    Vec3 fore_dir = rotate_x(down, -a.elbow_rad);
    fore_dir = rotate_y(fore_dir, a.roll_rad);
    fore_dir = rotate_x(fore_dir, a.pitch_rad);
    fore_dir = rotate_y(fore_dir, a.yaw_rad);

    ArmPose pose;
    pose.p1 = {0.0, 0.0, 0.0};
    pose.p2 = pose.p1 + segs.upper_mm * upper_dir;
    pose.p3 = pose.p2 + segs.forearm_mm * fore_dir;
    pose.p4 = pose.p3 + segs.hand_mm * fore_dir;
    return pose;
}

inline ArmPose forward_kinematics(const JointAngles& a, const ArmSegments& segs) {
    segs.validate();
    const auto violations = check_constraints(a);
    if (!violations.empty())
        throw std::invalid_argument("joint out of range: " + violations.front().describe());
    return pose_from_angles(a, segs);
}

// Shoulder-to-fingertip distance |P1P4|.
inline double reach_distance(const ArmPose& pose) {
    return distance(pose.p1, pose.p4);
}

struct IkResult {
    JointAngles angles;
    // Set when |pitch| lands within 1 deg of +-90 deg; the roll estimate is
    // reported but should not be trusted there.
    bool roll_low_confidence = false;
};

// Recovers the four joint angles from recorded shoulder/elbow/wrist points.
// The fingertip adds no information: the hand extends the forearm.
inline IkResult angles_from_positions(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    constexpr double kMinSegment = 1e-9;
    const Vec3 v12 = p2 - p1;
    const Vec3 v23 = p3 - p2;
    if (norm(v12) < kMinSegment || norm(v23) < kMinSegment)
        throw std::invalid_argument("degenerate joint positions: coincident points");

    const Vec3 u = normalized(v12);
    const Vec3 f = normalized(v23);

    const double horizontal = std::hypot(u.x, u.z);
    double pitch = std::atan2(horizontal, -u.y);
    double yaw = horizontal > 0.0 ? std::atan2(-u.x, -u.z) : 0.0;
    // (yaw, pitch) and (yaw -+ pi, -pitch) give the same upper-arm direction;
    // keep the branch whose yaw lies inside the joint range.
    if (yaw > std::numbers::pi / 2 || yaw < -std::numbers::pi / 2) {
        yaw += yaw > 0.0 ? -std::numbers::pi : std::numbers::pi;
        pitch = -pitch;
    }

    const double elbow = std::acos(std::clamp(dot(u, f), -1.0, 1.0));

    const Vec3 g = rotate_x(rotate_y(f, -yaw), -pitch);
    const double roll = (g.x == 0.0 && g.z == 0.0) ? 0.0 : std::atan2(g.x, g.z);

    IkResult result;
    result.angles = {yaw, pitch, roll, elbow};
    constexpr double kGimbalMargin = 89.0 * std::numbers::pi / 180.0;
    result.roll_low_confidence = std::abs(pitch) > kGimbalMargin;
    return result;
}

} // namespace reachtree
