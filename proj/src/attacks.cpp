#include "robest/attacks.hpp"

#include <cmath>
#include <stdexcept>

#include "robest/rng.hpp"

namespace robest {

std::string attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::Theorem2: return "theorem2";
        case AttackKind::RandomGross: return "random_gross";
        case AttackKind::TargetedLs: return "targeted_ls";
    }
    throw std::logic_error("unknown attack kind");
}

AttackKind attack_kind_from_name(const std::string& name) {
    if (name == "theorem2") return AttackKind::Theorem2;
    if (name == "random_gross" || name == "random") return AttackKind::RandomGross;
    if (name == "targeted_ls" || name == "targeted") return AttackKind::TargetedLs;
    throw std::invalid_argument("attack kind: unknown value '" + name + "'");
}

namespace {

void check_support(const MeasurementModel& model, const std::vector<int>& support, int p) {
    if (static_cast<int>(support.size()) > p) {
        throw std::invalid_argument("attack support: size " + std::to_string(support.size()) +
                                    " exceeds attack budget p = " + std::to_string(p));
    }
    for (int i : support) {
        if (i < 0 || i >= model.sensor_count()) {
            throw std::invalid_argument("attack support: sensor index " + std::to_string(i + 1) +
                                        " out of range 1.." + std::to_string(model.sensor_count()));
        }
    }
}

}  // namespace

void AttackPlan::validate(const MeasurementModel& model, int p) const {
    check_support(model, support, p);
    if (kind != AttackKind::RandomGross) {
        if (u0.size() != model.state_dim()) {
            throw std::invalid_argument("attack.u0: expected length " +
                                        std::to_string(model.state_dim()));
        }
        if (kind == AttackKind::Theorem2 && std::abs(u0.norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("attack.u0: must be a unit vector");
        }
    }
    if (magnitude < 0.0) throw std::invalid_argument("attack.t: must be nonnegative");
}

Eigen::VectorXd synthesize_theorem2(const MeasurementModel& model, const Eigen::VectorXd& z,
                                    const AttackPlan& plan, int p) {
    plan.validate(model, p);
    if (z.size() != model.total_rows()) {
        throw std::invalid_argument("synthesize_theorem2: measurement length mismatch");
    }
    Eigen::VectorXd y = z;
    for (int i : plan.support) {
        y.segment(model.block_offset(i), model.block_rows(i)) =
            plan.magnitude * (model.block(i) * plan.u0);
    }
    return y;
}

Eigen::VectorXd random_gross_attack(const MeasurementModel& model, const Eigen::VectorXd& z,
                                    const std::vector<int>& support, double scale,
                                    std::uint64_t seed, int p) {
    check_support(model, support, p);
    if (z.size() != model.total_rows()) {
        throw std::invalid_argument("random_gross_attack: measurement length mismatch");
    }
    Eigen::VectorXd y = z;
    Rng rng(seed);
    for (int i : support) {
        for (int r = 0; r < model.block_rows(i); ++r) {
            y[model.block_offset(i) + r] = scale == 0.0 ? 0.0 : rng.uniform(-scale, scale);
        }
    }
    return y;
}

TargetedLsAttack targeted_ls_attack(const MeasurementModel& model, const std::vector<int>& support,
                                    const Eigen::VectorXd& bias_direction, double t, int p) {
    check_support(model, support, p);
    if (bias_direction.size() != model.state_dim()) {
        throw std::invalid_argument("targeted_ls_attack: direction has wrong dimension");
    }
    TargetedLsAttack result;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(model.total_rows());
    for (int i : support) {
        const Eigen::VectorXd a_i = t * (model.block(i) * bias_direction);
        result.attack.blocks[i] = a_i;
        a.segment(model.block_offset(i), model.block_rows(i)) = a_i;
    }
    result.predicted_shift = model.stacked().householderQr().solve(a);
    return result;
}

Eigen::VectorXd apply_plan(const Scenario& scenario, const Eigen::VectorXd& z,
                           const AttackPlan& plan, std::uint64_t seed_stream) {
    const auto& model = scenario.model;
    switch (plan.kind) {
        case AttackKind::Theorem2:
            return synthesize_theorem2(model, z, plan, scenario.p);
        case AttackKind::RandomGross:
            return random_gross_attack(model, z, plan.support, plan.magnitude,
                                       derive_seed(scenario.seed, seed_stream), scenario.p);
        case AttackKind::TargetedLs: {
            const auto targeted =
                targeted_ls_attack(model, plan.support, plan.u0, plan.magnitude, scenario.p);
            return apply_attack(model, z, targeted.attack);
        }
    }
    throw std::logic_error("unknown attack kind");
}

}  // namespace robest
