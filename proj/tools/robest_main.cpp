#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include "robest/certifier.hpp"
#include "robest/harness.hpp"
#include "robest/rng.hpp"
#include "robest/scenario_io.hpp"
#include "robest/selftest.hpp"

namespace {

using robest::AttackKind;
using robest::AttackPlan;
using robest::CertifyOptions;
using robest::HarnessOptions;
using robest::MethodChoice;
using robest::Scenario;
using robest::SolverOptions;

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument(flag + ": cannot parse number '" + item + "'");
        }
    }
    if (values.empty()) throw std::invalid_argument(flag + ": empty list");
    return values;
}

std::vector<int> parse_index_list(const std::string& text, const std::string& flag) {
    std::vector<int> values;
    for (double v : parse_number_list(text, flag)) values.push_back(static_cast<int>(v));
    return values;
}

// Sensor indices are 1-based on the command line.
std::vector<int> parse_support(const std::string& text) {
    std::vector<int> support = parse_index_list(text, "--support");
    for (int& i : support) --i;
    return support;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

MethodChoice parse_method(const std::string& name) {
    if (name == "auto") return MethodChoice::Auto;
    if (name == "closed") return MethodChoice::Closed;
    if (name == "weiszfeld") return MethodChoice::Weiszfeld;
    if (name == "subgrad") return MethodChoice::Subgrad;
    throw std::invalid_argument("--method: unknown value '" + name + "'");
}

Scenario load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed) {
    Scenario scenario = robest::load_scenario(path);
    if (seed) {
        scenario.seed = *seed;
    } else if (const char* env = std::getenv("ROBUST_EST_SEED")) {
        scenario.seed = std::strtoull(env, nullptr, 10);
    }
    return scenario;
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void print_certificate(const robest::Certificate& cert) {
    std::cout << "decision: " << robest::decision_name(cert.decision) << "\n";
    std::cout << "margin_min: " << cert.margin_min << "\n";
    if (cert.witness_u.size() > 0) {
        std::cout << "witness_u:";
        for (Eigen::Index j = 0; j < cert.witness_u.size(); ++j) std::cout << ' ' << cert.witness_u[j];
        std::cout << "\n";
    }
    if (!cert.witness_I.empty()) {
        std::cout << "witness_I (1-based):";
        for (int i : cert.witness_I) std::cout << ' ' << (i + 1);
        std::cout << "\n";
    }
    std::cout << "rigorous: " << (cert.rigorous ? "yes" : "no")
              << "  mesh_resolution: " << cert.mesh_resolution
              << "  directions: " << cert.directions_evaluated << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust multi-sensor state estimation under sparse attacks"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;

    // certify
    auto* cmd_certify = app.add_subcommand("certify", "Certify or refute estimator robustness");
    double mesh_eps = 0.0, cert_tol = 1e-9;
    int random_dirs = 64;
    cmd_certify->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_certify->add_option("--mesh-eps", mesh_eps, "sphere mesh covering radius (0 = auto)");
    cmd_certify->add_option("--random-dirs", random_dirs, "extra random directions");
    cmd_certify->add_option("--tol", cert_tol, "margin decision tolerance");
    cmd_certify->add_option("--seed", seed_override, "seed override");
    cmd_certify->add_option("--jobs", jobs, "worker threads");
    cmd_certify->add_option("--out", out_dir, "output directory");

    // estimate
    auto* cmd_estimate = app.add_subcommand("estimate", "Run the estimator on measurements");
    std::string y_text, method_text = "auto";
    int max_iters = 200000;
    double solver_tol = 1e-10;
    cmd_estimate->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_estimate->add_option("--y", y_text, "stacked measurements, comma separated");
    cmd_estimate->add_option("--method", method_text, "auto|closed|weiszfeld|subgrad");
    cmd_estimate->add_option("--max-iters", max_iters, "iteration budget");
    cmd_estimate->add_option("--tol", solver_tol, "relative stall tolerance");
    cmd_estimate->add_option("--seed", seed_override, "seed override");
    cmd_estimate->add_option("--out", out_dir, "output directory");

    // attack
    auto* cmd_attack = app.add_subcommand("attack", "Sweep an attack and report bias per magnitude");
    std::string kind_text = "theorem2", t_text, support_text, u0_text;
    int attack_trials = 1;
    int trials = 20;
    cmd_attack->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_attack->add_option("--kind", kind_text, "theorem2|random|targeted");
    cmd_attack->add_option("--t", t_text, "magnitudes, comma separated")->required();
    cmd_attack->add_option("--support", support_text, "attacked sensors, 1-based");
    cmd_attack->add_option("--u0", u0_text, "attack direction, comma separated");
    cmd_attack->add_option("--trials", attack_trials, "trials per magnitude");
    cmd_attack->add_option("--seed", seed_override, "seed override");
    cmd_attack->add_option("--jobs", jobs, "worker threads");
    cmd_attack->add_option("--out", out_dir, "output directory");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "Breakdown sweep across attack budgets");
    std::string p_text, sweep_t_text = "10,100,1000,10000,100000,1000000";
    cmd_sweep->add_option("scenario", scenario_path, "scenario file")->required();
    cmd_sweep->add_option("--p-values", p_text, "attack budgets, comma separated");
    cmd_sweep->add_option("--t", sweep_t_text, "magnitudes, comma separated");
    cmd_sweep->add_option("--trials", trials, "trials per point");
    cmd_sweep->add_option("--mesh-eps", mesh_eps, "sphere mesh covering radius (0 = auto)");
    cmd_sweep->add_option("--tol", cert_tol, "margin decision tolerance");
    cmd_sweep->add_option("--seed", seed_override, "seed override");
    cmd_sweep->add_option("--jobs", jobs, "worker threads");
    cmd_sweep->add_option("--out", out_dir, "output directory");

    // selftest
    auto* cmd_selftest = app.add_subcommand("selftest", "Run the bundled property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 2;
    }

    try {
        if (cmd_selftest->parsed()) {
            return robest::run_selftest(std::cout) ? 0 : 1;
        }

        if (cmd_certify->parsed()) {
            const Scenario scenario = load_with_overrides(scenario_path, seed_override);
            CertifyOptions options;
            options.mesh_eps = mesh_eps;
            options.random_dirs = random_dirs;
            options.tol = cert_tol;
            options.jobs = jobs;
            const auto cert = robest::certify(scenario, options);
            print_certificate(cert);
            robest::write_text_file(out_path(out_dir, "certificate.json"),
                                    robest::dump_json(robest::certificate_to_json(cert)));
            return 0;
        }

        if (cmd_estimate->parsed()) {
            const Scenario scenario = load_with_overrides(scenario_path, seed_override);
            SolverOptions options;
            options.method = parse_method(method_text);
            options.max_iters = max_iters;
            options.tol = solver_tol;

            Eigen::VectorXd y;
            if (!y_text.empty()) {
                y = to_vector(parse_number_list(y_text, "--y"));
            } else {
                // No measurements given: simulate one trial from the seed.
                robest::Rng rng(robest::derive_seed(scenario.seed, 0xe57));
                Eigen::VectorXd x(scenario.model.state_dim());
                for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.uniform(-1.0, 1.0);
                y = robest::measure(scenario.model, x, scenario.sample_noise(0));
                std::cout << "simulated true x:";
                for (Eigen::Index j = 0; j < x.size(); ++j) std::cout << ' ' << x[j];
                std::cout << "\n";
            }

            const auto result = robest::estimate(scenario, y, options);
            std::cout << "x_hat:";
            for (Eigen::Index j = 0; j < result.x_hat.size(); ++j) std::cout << ' ' << result.x_hat[j];
            std::cout << "\nobjective: " << result.objective << "\nmethod: "
                      << robest::solve_method_name(result.method)
                      << "  iterations: " << result.iterations
                      << "  converged: " << (result.converged ? "yes" : "no") << "\n";
            robest::write_text_file(out_path(out_dir, "estimate.json"),
                                    robest::dump_json(robest::estimate_to_json(result)));
            return 0;
        }

        if (cmd_attack->parsed()) {
            const Scenario scenario = load_with_overrides(scenario_path, seed_override);
            AttackPlan plan;
            plan.kind = robest::attack_kind_from_name(kind_text);
            if (!support_text.empty()) {
                plan.support = parse_support(support_text);
            } else if (scenario.p > 0) {
                for (int i = 0; i < scenario.p; ++i) plan.support.push_back(i);
            }
            if (!u0_text.empty()) {
                plan.u0 = to_vector(parse_number_list(u0_text, "--u0"));
                if (plan.kind == AttackKind::Theorem2 && plan.u0.norm() > 0) plan.u0.normalize();
            } else if (plan.kind != AttackKind::RandomGross) {
                plan.u0 = Eigen::VectorXd::Zero(scenario.model.state_dim());
                plan.u0[0] = 1.0;
            }

            HarnessOptions options;
            options.trials = attack_trials;
            options.jobs = jobs;
            const auto report =
                robest::bias_curve(scenario, plan, parse_number_list(t_text, "--t"), options);

            std::ostringstream csv;
            csv << "t,bias_norm,objective,converged\n";
            for (const auto& point : report.points) {
                for (size_t trial = 0; trial < point.biases.size(); ++trial) {
                    char buffer[64];
                    std::snprintf(buffer, sizeof(buffer), "%.17g", point.t);
                    csv << buffer << ',';
                    std::snprintf(buffer, sizeof(buffer), "%.17g", point.biases[trial]);
                    csv << buffer << ',';
                    std::snprintf(buffer, sizeof(buffer), "%.17g", point.objectives[trial]);
                    csv << buffer << ',' << (point.converged[trial] ? 1 : 0) << '\n';
                }
            }
            std::cout << csv.str();
            std::cout << "flag: " << robest::sweep_flag_name(report.flag) << "\n";
            robest::write_text_file(out_path(out_dir, "attack.csv"), csv.str());
            return 0;
        }

        if (cmd_sweep->parsed()) {
            const Scenario scenario = load_with_overrides(scenario_path, seed_override);
            std::vector<int> p_values;
            if (!p_text.empty()) {
                p_values = parse_index_list(p_text, "--p-values");
            } else {
                p_values.push_back(scenario.p);
            }

            HarnessOptions options;
            options.trials = trials;
            options.jobs = jobs;
            CertifyOptions cert_options;
            cert_options.mesh_eps = mesh_eps;
            cert_options.tol = cert_tol;
            cert_options.jobs = jobs;

            const auto entries = robest::breakdown_sweep(
                scenario, p_values, parse_number_list(sweep_t_text, "--t"), options, cert_options);

            for (const auto& entry : entries) {
                std::cout << "p=" << entry.p << "  decision="
                          << robest::decision_name(entry.certificate.decision)
                          << "  flag=" << robest::sweep_flag_name(entry.sweep.flag)
                          << "  consistency=" << entry.consistency << "\n";
            }

            std::ostringstream csv;
            robest::write_sweep_csv(csv, entries);
            robest::write_text_file(out_path(out_dir, "sweep.csv"), csv.str());
            robest::write_text_file(
                out_path(out_dir, "summary.json"),
                robest::dump_json(robest::sweep_summary_to_json(entries, scenario.seed, trials)));
            return 0;
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
