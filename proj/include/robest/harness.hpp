#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "robest/attacks.hpp"
#include "robest/certifier.hpp"
#include "robest/model.hpp"
#include "robest/solver.hpp"

namespace robest {

struct TrialRecord {
    Eigen::VectorXd true_x;
    Eigen::VectorXd noise;
    AttackPlan plan;
    EstimateResult estimate;
    double bias_norm = 0.0;
    double wall_time_seconds = 0.0;  // diagnostic only, never serialized
};

enum class SweepFlag { Plateau, Diverging, Unknown };

std::string sweep_flag_name(SweepFlag flag);

struct SweepPoint {
    double t = 0.0;
    double bias_median = 0.0;
    double bias_max = 0.0;
    std::vector<double> biases;      // per trial
    std::vector<double> objectives;  // per trial
    std::vector<bool> converged;     // per trial
};

struct SweepReport {
    int p = -1;                 // attack budget of the swept scenario
    std::vector<SweepPoint> points;
    SweepFlag flag = SweepFlag::Unknown;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct HarnessOptions {
    int trials = 20;
    int jobs = 1;
    SolverOptions solver;
};

// measure -> attack -> estimate; deterministic in (scenario, plan, seed).
TrialRecord run_trial(const Scenario& scenario, const Eigen::VectorXd& x, const AttackPlan& plan,
                      std::uint64_t trial_seed, const SolverOptions& solver_options = {});

// Max-over-trials bias per magnitude, flagged PLATEAU when the last two
// points agree to 1e-3 relative and DIVERGING when the log-log slope over
// the last decade reaches 0.9.
SweepReport bias_curve(const Scenario& scenario, const AttackPlan& plan_template,
                       const std::vector<double>& ts, const HarnessOptions& options = {});

struct BreakdownEntry {
    int p;
    Certificate certificate;
    SweepReport sweep;
    // "consistent" when the certified decision matches the empirical flag;
    // "unverified" when the certificate is Inconclusive or UnboundedGain.
    std::string consistency;
};

// Re-certifies and sweeps the scenario for each attack budget.
std::vector<BreakdownEntry> breakdown_sweep(const Scenario& scenario,
                                            const std::vector<int>& p_values,
                                            const std::vector<double>& ts,
                                            const HarnessOptions& options = {},
                                            const CertifyOptions& cert_options = {});

// CSV with header `p,t,trial,bias_norm,converged`.
void write_sweep_csv(std::ostream& out, const std::vector<BreakdownEntry>& entries);
void write_bias_curve_csv(std::ostream& out, const SweepReport& report);

}  // namespace robest
