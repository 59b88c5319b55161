#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "robest/model.hpp"

namespace robest {

enum class AttackKind { Theorem2, RandomGross, TargetedLs };

std::string attack_kind_name(AttackKind kind);
AttackKind attack_kind_from_name(const std::string& name);

// A parametrized attack; `magnitude` is the sweep variable t.
struct AttackPlan {
    AttackKind kind = AttackKind::Theorem2;
    Eigen::VectorXd u0;          // unit direction (theorem2, targeted_ls)
    std::vector<int> support;    // attacked sensors I0, 0-based
    double magnitude = 0.0;      // t >= 0

    void validate(const MeasurementModel& model, int p) const;
};

// The necessity-proof construction: attacked blocks are replaced by
// y_i = t * H_i u0; everything else passes through unchanged.
Eigen::VectorXd synthesize_theorem2(const MeasurementModel& model, const Eigen::VectorXd& z,
                                    const AttackPlan& plan, int p);

// Baseline: attacked blocks replaced by uniform noise in [-scale, scale].
Eigen::VectorXd random_gross_attack(const MeasurementModel& model, const Eigen::VectorXd& z,
                                    const std::vector<int>& support, double scale,
                                    std::uint64_t seed, int p);

struct TargetedLsAttack {
    SparseAttack attack;
    Eigen::VectorXd predicted_shift;  // bias of the least-squares estimate
};

// Additive attack a_i = t * H_i * direction on the support; the induced
// least-squares bias (H'H)^-1 H' a is returned alongside.
TargetedLsAttack targeted_ls_attack(const MeasurementModel& model, const std::vector<int>& support,
                                    const Eigen::VectorXd& bias_direction, double t, int p);

// Manipulated measurements for a plan applied to clean measurements z.
Eigen::VectorXd apply_plan(const Scenario& scenario, const Eigen::VectorXd& z,
                           const AttackPlan& plan, std::uint64_t seed_stream);

}  // namespace robest
