#include "robest/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "robest/parallel.hpp"
#include "robest/rng.hpp"

namespace robest {

std::string sweep_flag_name(SweepFlag flag) {
    switch (flag) {
        case SweepFlag::Plateau: return "PLATEAU";
        case SweepFlag::Diverging: return "DIVERGING";
        case SweepFlag::Unknown: return "UNKNOWN";
    }
    throw std::logic_error("unknown sweep flag");
}

TrialRecord run_trial(const Scenario& scenario, const Eigen::VectorXd& x, const AttackPlan& plan,
                      std::uint64_t trial_seed, const SolverOptions& solver_options) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord record;
    record.true_x = x;
    record.plan = plan;
    record.noise = scenario.sample_noise(trial_seed);

    const Eigen::VectorXd z = measure(scenario.model, x, record.noise);
    const Eigen::VectorXd y = apply_plan(scenario, z, plan, trial_seed);

    record.estimate = estimate(scenario, y, solver_options);
    record.bias_norm = (record.estimate.x_hat - x).norm();
    record.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

namespace {

// Draw a reproducible true state for one trial.
Eigen::VectorXd draw_state(const Scenario& scenario, std::uint64_t trial_seed) {
    Rng rng(derive_seed(scenario.seed, mix_seed(trial_seed) ^ 0x57a7eULL));
    Eigen::VectorXd x(scenario.model.state_dim());
    for (int j = 0; j < x.size(); ++j) x[j] = rng.uniform(-1.0, 1.0);
    return x;
}

SweepFlag classify(const std::vector<SweepPoint>& points) {
    if (points.size() < 2) return SweepFlag::Unknown;
    const double last = points.back().bias_max;
    const double prev = points[points.size() - 2].bias_max;
    if (std::abs(last - prev) <= 1e-3 * std::max(1e-300, std::max(std::abs(last), std::abs(prev)))) {
        return SweepFlag::Plateau;
    }
    // log-log slope across the last decade of magnitudes
    const double t_last = points.back().t;
    size_t first = points.size() - 2;
    while (first > 0 && points[first - 1].t >= t_last / 10.0) --first;
    const auto& a = points[first];
    const auto& b = points.back();
    if (a.bias_max > 0.0 && b.bias_max > 0.0 && b.t > a.t) {
        const double slope = (std::log(b.bias_max) - std::log(a.bias_max)) /
                             (std::log(b.t) - std::log(a.t));
        if (slope >= 0.9) return SweepFlag::Diverging;
    }
    return SweepFlag::Unknown;
}

}  // namespace

SweepReport bias_curve(const Scenario& scenario, const AttackPlan& plan_template,
                       const std::vector<double>& ts, const HarnessOptions& options) {
    if (ts.empty() || !(ts[0] > 0.0)) {
        throw std::invalid_argument("bias_curve: ts must be positive and increasing");
    }
    for (size_t k = 1; k < ts.size(); ++k) {
        if (!(ts[k] > ts[k - 1])) {
            throw std::invalid_argument("bias_curve: ts must be positive and increasing");
        }
    }

    SweepReport report;
    report.p = scenario.p;
    report.trials = options.trials;
    report.seed = scenario.seed;
    report.points.resize(ts.size());

    for (size_t k = 0; k < ts.size(); ++k) {
        SweepPoint& point = report.points[k];
        point.t = ts[k];
        point.biases.assign(static_cast<size_t>(options.trials), 0.0);
        point.objectives.assign(static_cast<size_t>(options.trials), 0.0);
        point.converged.assign(static_cast<size_t>(options.trials), false);

        AttackPlan plan = plan_template;
        plan.magnitude = ts[k];

        // Trial randomness depends on the trial index only, so the same noise
        // draw is paired across magnitudes and attack budgets.
        parallel_for(options.trials, options.jobs, [&](long trial) {
            const std::uint64_t trial_seed = static_cast<std::uint64_t>(trial);
            const Eigen::VectorXd x = draw_state(scenario, trial_seed);
            const TrialRecord record = run_trial(scenario, x, plan, trial_seed, options.solver);
            point.biases[static_cast<size_t>(trial)] = record.bias_norm;
            point.objectives[static_cast<size_t>(trial)] = record.estimate.objective;
            point.converged[static_cast<size_t>(trial)] = record.estimate.converged;
        });

        std::vector<double> sorted = point.biases;
        std::sort(sorted.begin(), sorted.end());
        point.bias_max = sorted.back();
        point.bias_median = sorted[sorted.size() / 2];
    }

    report.flag = classify(report.points);
    return report;
}

std::vector<BreakdownEntry> breakdown_sweep(const Scenario& scenario,
                                            const std::vector<int>& p_values,
                                            const std::vector<double>& ts,
                                            const HarnessOptions& options,
                                            const CertifyOptions& cert_options) {
    std::vector<BreakdownEntry> entries;
    entries.reserve(p_values.size());
    for (int p : p_values) {
        if (p < 0 || p >= scenario.model.sensor_count()) {
            throw std::invalid_argument("breakdown_sweep: p out of range");
        }
        Scenario swept = scenario;
        swept.p = p;

        BreakdownEntry entry;
        entry.p = p;
        entry.certificate = certify(swept, cert_options);

        // Sweep along the certificate's witness when it names one; fall back
        // to attacking the first p sensors along e1.
        AttackPlan plan;
        plan.kind = AttackKind::Theorem2;
        if (entry.certificate.witness_u.size() == swept.model.state_dim() &&
            !entry.certificate.witness_I.empty()) {
            plan.u0 = entry.certificate.witness_u;
            plan.support = entry.certificate.witness_I;
        } else {
            plan.u0 = Eigen::VectorXd::Zero(swept.model.state_dim());
            plan.u0[0] = 1.0;
            for (int i = 0; i < p; ++i) plan.support.push_back(i);
        }
        entry.sweep = bias_curve(swept, plan, ts, options);

        switch (entry.certificate.decision) {
            case Decision::Robust:
                entry.consistency =
                    entry.sweep.flag == SweepFlag::Plateau ? "consistent" : "inconsistent";
                break;
            case Decision::NotRobust:
            case Decision::UnboundedGain:
                entry.consistency =
                    entry.sweep.flag == SweepFlag::Diverging ? "consistent" : "inconsistent";
                break;
            default:
                entry.consistency = "unverified";
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

namespace {

void append_csv_rows(std::ostream& out, int p, const SweepReport& report) {
    char buffer[64];
    for (const auto& point : report.points) {
        for (size_t trial = 0; trial < point.biases.size(); ++trial) {
            out << p << ',';
            std::snprintf(buffer, sizeof(buffer), "%.17g", point.t);
            out << buffer << ',' << trial << ',';
            std::snprintf(buffer, sizeof(buffer), "%.17g", point.biases[trial]);
            out << buffer << ',' << (point.converged[trial] ? 1 : 0) << '\n';
        }
    }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<BreakdownEntry>& entries) {
    out << "p,t,trial,bias_norm,converged\n";
    for (const auto& entry : entries) append_csv_rows(out, entry.p, entry.sweep);
}

void write_bias_curve_csv(std::ostream& out, const SweepReport& report) {
    out << "p,t,trial,bias_norm,converged\n";
    append_csv_rows(out, report.p, report);
}

}  // namespace robest
