#pragma once

#include <algorithm>
#include <stdexcept>
#include <string_view>

namespace reachtree {

// Outcome of one reach attempt: the fruit was collected and placed, collected
// but dropped elsewhere, or never collected at all.
enum class OutcomeKind { success, unsuccessful, fail };

inline const char* outcome_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::success: return "success";
        case OutcomeKind::unsuccessful: return "unsuccessful";
        case OutcomeKind::fail: return "fail";
    }
    return "?";
}

inline OutcomeKind outcome_from_name(std::string_view name) {
    if (name == "success") return OutcomeKind::success;
    if (name == "unsuccessful") return OutcomeKind::unsuccessful;
    if (name == "fail") return OutcomeKind::fail;
    throw std::invalid_argument("unknown outcome kind");
}

struct AttemptOutcome {
    OutcomeKind kind = OutcomeKind::fail;
    double elapsed_ms = 0.0;
    bool released_over_basket = false;

    static AttemptOutcome make_success(double elapsed_ms) {
        return {OutcomeKind::success, elapsed_ms, true};
    }
    static AttemptOutcome make_unsuccessful(double elapsed_ms) {
        return {OutcomeKind::unsuccessful, elapsed_ms, false};
    }
    static AttemptOutcome make_fail(double elapsed_ms) {
        return {OutcomeKind::fail, elapsed_ms, false};
    }
};

struct TimingConfig {
    double t_best_ms = 2000.0; // at or below this, full time efficiency
    double t_max_ms = 15000.0; // timer expiry, zero efficiency

    void validate() const {
        if (!(t_best_ms > 0.0) || !(t_best_ms < t_max_ms))
            throw std::invalid_argument("timing: need 0 < t_best_ms < t_max_ms");
    }
};

// Raw game score: +1 collected and placed, 0 collected only, -1 missed.
inline int outcome_score(const AttemptOutcome& outcome) {
    switch (outcome.kind) {
        case OutcomeKind::success: return 1;
        case OutcomeKind::unsuccessful: return 0;
        case OutcomeKind::fail: return -1;
    }
    return 0;
}

// Linear interpolation between best time (1.0) and the timer limit (0.0).
inline double time_efficiency(double elapsed_ms, const TimingConfig& cfg) {
    const double eff = (cfg.t_max_ms - elapsed_ms) / (cfg.t_max_ms - cfg.t_best_ms);
    return std::clamp(eff, 0.0, 1.0);
}

struct RewardValue {
    double signed_score = 0.0; // [-1, 1], feeds horizontal propagation
    double delta = 0.0;        // [0, 1], feeds vertical backpropagation
};

// Time efficiency scales only the success branch: shrinking the -1 penalty
// for slow failures would erase the penalty entirely (failures run the timer
// out), so the penalty is kept whole.
inline RewardValue normalized_reward(const AttemptOutcome& outcome, const TimingConfig& cfg) {
    const int score = outcome_score(outcome);
    const double s = score == 1 ? time_efficiency(outcome.elapsed_ms, cfg)
                                : static_cast<double>(score);
    return {s, (s + 1.0) / 2.0};
}

} // namespace reachtree
