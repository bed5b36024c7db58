#pragma once

#include "reachtree/geometry.hpp"
#include "reachtree/kinematics.hpp"
#include "reachtree/reward.hpp"
#include "reachtree/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reachtree {

// Stand-in for the human player: a logistic competence field around a comfort
// center. Targets near the center are reached reliably; the probability rolls
// off across a frontier of width ~1/steepness at competence_radius. The
// default frontier sits beyond the mean spawn distance of a fresh (uniform)
// session, so the closed loop migrates targets outward as inner regions
// resolve.
struct PlayerModel {
    Vec3 comfort_center_mm{0.0, -400.0, 200.0};
    double competence_radius_mm = 700.0;
    double steepness = 0.02; // logistic slope per mm
    double place_success_prob = 0.95;

    void validate() const {
        if (!(competence_radius_mm > 0.0))
            throw std::invalid_argument("player: competence_radius_mm must be > 0");
        if (!(steepness > 0.0)) throw std::invalid_argument("player: steepness must be > 0");
        if (!(place_success_prob >= 0.0 && place_success_prob <= 1.0))
            throw std::invalid_argument("player: place_success_prob must be in [0,1]");
    }

    double reach_probability(const Vec3& target_mm) const {
        const double margin = competence_radius_mm - distance(target_mm, comfort_center_mm);
        return 1.0 / (1.0 + std::exp(-steepness * margin));
    }
};

// Simulate one reach attempt. Exactly three uniform draws are consumed per
// call (reach, placement, time) regardless of the branch taken, so outcome
// streams stay aligned across models that share a seed: raising competence
// can only flip results in the success direction, never the reverse.
inline AttemptOutcome attempt(const Vec3& target_mm, const PlayerModel& model,
                              const TimingConfig& cfg, Rng& rng,
                              double workspace_mm = ArmSegments{}.total_mm()) {
    const double u_reach = uniform01(rng);
    const double u_place = uniform01(rng);
    const double u_time = uniform01(rng);

    const double p = model.reach_probability(target_mm);
    const bool reachable = norm(target_mm) <= workspace_mm;
    if (!reachable || u_reach >= p) return AttemptOutcome::make_fail(cfg.t_max_ms);

    // competent reaches are quick: expected time scales with (1 - p)
    const double u = 0.5 + u_time; // uniform [0.5, 1.5)
    const double elapsed = std::clamp(cfg.t_best_ms + (cfg.t_max_ms - cfg.t_best_ms) * (1.0 - p) * u,
                                      cfg.t_best_ms, cfg.t_max_ms);
    if (u_place < model.place_success_prob) return AttemptOutcome::make_success(elapsed);
    return AttemptOutcome::make_unsuccessful(elapsed);
}

} // namespace reachtree
