#include "robest/selftest.hpp"

#include <cmath>
#include <vector>

#include "robest/certifier.hpp"
#include "robest/harness.hpp"
#include "robest/rng.hpp"
#include "robest/solver.hpp"

namespace robest {

namespace {

Scenario scalar_scenario(int m, int p, CostKind kind) {
    std::vector<Eigen::MatrixXd> blocks(static_cast<size_t>(m), Eigen::MatrixXd::Ones(1, 1));
    std::vector<CostSpec> costs(static_cast<size_t>(m), CostSpec{kind, 1.0, 1});
    return Scenario{MeasurementModel(1, std::move(blocks)), std::move(costs), p, NoiseSpec{}, 7};
}

bool check_cost_properties() {
    Rng rng(1234);
    const std::vector<CostSpec> specs{{CostKind::SquaredL2, 1.0, 3},
                                      {CostKind::L1, 1.0, 3},
                                      {CostKind::L2Norm, 1.0, 3},
                                      {CostKind::LassoEnvelope, 2.0, 3}};
    for (const auto& cost : specs) {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
        if (cost_eval(cost, zero) != 0.0) return false;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd v(3), w(3);
            for (int j = 0; j < 3; ++j) {
                v[j] = rng.uniform(-2.0, 2.0);
                w[j] = rng.uniform(-2.0, 2.0);
            }
            if (cost_eval(cost, v) != cost_eval(cost, -v)) return false;
            const Eigen::VectorXd g = cost_subgradient(cost, v);
            if (cost_eval(cost, w) < cost_eval(cost, v) + g.dot(w - v) - 1e-9) return false;
            const auto profile = radial_profile(cost, v, {0.5, 1.0, 2.0, 8.0});
            for (size_t k = 1; k < profile.size(); ++k) {
                if (profile[k] < profile[k - 1] - 1e-12) return false;
            }
        }
    }
    return true;
}

bool check_gain_seminorm() {
    Rng rng(99);
    Eigen::MatrixXd H(2, 2);
    H << 1.0, 2.0, 0.0, 1.0;
    const std::vector<CostSpec> specs{{CostKind::L1, 1.0, 2},
                                      {CostKind::L2Norm, 1.0, 2},
                                      {CostKind::LassoEnvelope, 0.5, 2}};
    for (const auto& cost : specs) {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd u1(2), u2(2);
            for (int j = 0; j < 2; ++j) {
                u1[j] = rng.uniform(-2.0, 2.0);
                u2[j] = rng.uniform(-2.0, 2.0);
            }
            const double alpha = rng.uniform(-3.0, 3.0);
            const double c1 = asymptotic_gain(cost, H, u1).value;
            const double c2 = asymptotic_gain(cost, H, u2).value;
            const double c_sum = asymptotic_gain(cost, H, u1 + u2).value;
            const double c_scaled = asymptotic_gain(cost, H, alpha * u1).value;
            if (std::abs(c_scaled - std::abs(alpha) * c1) > 1e-9 * (1.0 + std::abs(alpha) * c1)) {
                return false;
            }
            if (c_sum > c1 + c2 + 1e-9) return false;
        }
    }
    return true;
}

bool check_scalar_battery() {
    for (int m = 3; m <= 7; ++m) {
        for (int p = 0; p < m; ++p) {
            const auto cert = certify(scalar_scenario(m, p, CostKind::L1));
            const Decision expected = m > 2 * p   ? Decision::Robust
                                      : m == 2 * p ? Decision::Inconclusive
                                                   : Decision::NotRobust;
            if (cert.decision != expected) return false;
        }
    }
    return true;
}

bool check_solver_examples() {
    // median of (1, 2, 100)
    {
        const Scenario scenario = scalar_scenario(3, 1, CostKind::L1);
        Eigen::VectorXd y(3);
        y << 1.0, 2.0, 100.0;
        const auto result = estimate(scenario, y);
        if (std::abs(result.x_hat[0] - 2.0) > 1e-6) return false;
    }
    // mean of (1, 2, 3)
    {
        const Scenario scenario = scalar_scenario(3, 1, CostKind::SquaredL2);
        Eigen::VectorXd y(3);
        y << 1.0, 2.0, 3.0;
        const auto result = estimate(scenario, y);
        if (std::abs(result.x_hat[0] - 2.0) > 1e-9) return false;
    }
    // geometric median of a square is its center
    {
        std::vector<Eigen::MatrixXd> blocks(4, Eigen::MatrixXd::Identity(2, 2));
        std::vector<CostSpec> costs(4, CostSpec{CostKind::L2Norm, 1.0, 2});
        const Scenario scenario{MeasurementModel(2, std::move(blocks)), std::move(costs), 1,
                                NoiseSpec{}, 7};
        Eigen::VectorXd y(8);
        y << 0, 0, 1, 0, 0, 1, 1, 1;
        const auto result = estimate(scenario, y);
        Eigen::VectorXd center(2);
        center << 0.5, 0.5;
        if ((result.x_hat - center).norm() > 1e-6) return false;
    }
    return true;
}

bool check_dichotomy() {
    const std::vector<double> ts{10.0, 100.0, 1000.0, 10000.0};
    HarnessOptions options;
    options.trials = 3;

    Scenario fragile = scalar_scenario(3, 2, CostKind::L1);
    const auto cert_fragile = certify(fragile);
    AttackPlan plan;
    plan.kind = AttackKind::Theorem2;
    plan.u0 = cert_fragile.witness_u;
    plan.support = cert_fragile.witness_I;
    if (cert_fragile.decision != Decision::NotRobust) return false;
    if (bias_curve(fragile, plan, ts, options).flag != SweepFlag::Diverging) return false;

    Scenario sturdy = scalar_scenario(3, 1, CostKind::L1);
    if (certify(sturdy).decision != Decision::Robust) return false;
    AttackPlan single = plan;
    single.support = {0};
    if (bias_curve(sturdy, single, ts, options).flag != SweepFlag::Plateau) return false;
    return true;
}

}  // namespace

bool run_selftest(std::ostream& out) {
    struct Check {
        const char* name;
        bool (*fn)();
    };
    const Check checks[] = {
        {"cost function properties", check_cost_properties},
        {"asymptotic gain semi-norm", check_gain_seminorm},
        {"scalar certifier battery", check_scalar_battery},
        {"solver worked examples", check_solver_examples},
        {"breakdown dichotomy", check_dichotomy},
    };
    bool all_ok = true;
    for (const auto& check : checks) {
        const bool ok = check.fn();
        all_ok = all_ok && ok;
        out << (ok ? "[PASS] " : "[FAIL] ") << check.name << "\n";
    }
    out << (all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
    return all_ok;
}

}  // namespace robest
