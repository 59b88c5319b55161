#include "robest/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "robest/parallel.hpp"
#include "robest/rng.hpp"

namespace robest {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::string decision_name(Decision decision) {
    switch (decision) {
        case Decision::Robust: return "Robust";
        case Decision::NotRobust: return "NotRobust";
        case Decision::Inconclusive: return "Inconclusive";
        case Decision::UnboundedGain: return "UnboundedGain";
    }
    throw std::logic_error("unknown decision");
}

std::pair<double, std::vector<int>> subset_margin(const std::vector<double>& gains, int p) {
    const int m = static_cast<int>(gains.size());
    if (p < 0 || p > m) throw std::invalid_argument("subset_margin: requires 0 <= p <= m");
    for (double g : gains) {
        if (!std::isfinite(g) || g < 0.0) {
            throw std::invalid_argument("subset_margin: gains must be finite and nonnegative");
        }
    }

    std::vector<int> order(gains.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gains[static_cast<size_t>(a)] > gains[static_cast<size_t>(b)]; });

    std::vector<int> worst(order.begin(), order.begin() + p);
    std::sort(worst.begin(), worst.end());

    const double total = std::accumulate(gains.begin(), gains.end(), 0.0);
    double worst_sum = 0.0;
    for (int i : worst) worst_sum += gains[static_cast<size_t>(i)];
    return {total - 2.0 * worst_sum, worst};
}

long sphere_mesh_size(int n, double eps) {
    if (n == 1) return 2;
    if (n == 2) return static_cast<long>(std::ceil(2.0 * kPi / eps));
    const long polar = static_cast<long>(std::ceil(kPi / eps)) + 1;
    return 2 + (polar - 2) * sphere_mesh_size(n - 1, eps / 2.0);
}

std::vector<Eigen::VectorXd> sphere_mesh(int n, double eps) {
    if (n < 1) throw std::invalid_argument("sphere_mesh: n must be positive");
    std::vector<Eigen::VectorXd> points;
    if (n == 1) {
        Eigen::VectorXd plus(1), minus(1);
        plus[0] = 1.0;
        minus[0] = -1.0;
        points.push_back(plus);
        points.push_back(minus);
        return points;
    }
    if (!(eps > 0.0)) throw std::invalid_argument("sphere_mesh: eps must be positive for n >= 2");
    if (n == 2) {
        const long count = static_cast<long>(std::ceil(2.0 * kPi / eps));
        points.reserve(static_cast<size_t>(count));
        for (long k = 0; k < count; ++k) {
            const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
            Eigen::VectorXd u(2);
            u << std::cos(theta), std::sin(theta);
            points.push_back(u);
        }
        return points;
    }

    // u = (cos theta, sin theta * v): the polar grid contributes at most half
    // a step and the sub-mesh at most eps/2, so the covering radius is <= eps.
    const long polar_steps = static_cast<long>(std::ceil(kPi / eps));
    const auto sub = sphere_mesh(n - 1, eps / 2.0);

    Eigen::VectorXd pole = Eigen::VectorXd::Zero(n);
    pole[0] = 1.0;
    points.push_back(pole);
    for (long j = 1; j < polar_steps; ++j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(polar_steps);
        const double c = std::cos(theta), s = std::sin(theta);
        for (const auto& v : sub) {
            Eigen::VectorXd u(n);
            u[0] = c;
            u.tail(n - 1) = s * v;
            points.push_back(u);
        }
    }
    pole[0] = -1.0;
    points.push_back(pole);
    return points;
}

namespace {

// Per-sensor asymptotic gain; a squared_l2 sensor with a zero block has
// C_i == 0 and never trips the unbounded screen.
double finite_gain_at(const Scenario& scenario, int i, const Eigen::VectorXd& u) {
    const AsymptoticGain g =
        asymptotic_gain(scenario.costs[static_cast<size_t>(i)], scenario.model.block(i), u);
    if (g.unbounded) throw std::invalid_argument("gain is unbounded along this direction");
    return g.value;
}

std::vector<double> gains_at(const Scenario& scenario, const Eigen::VectorXd& u) {
    std::vector<double> gains(static_cast<size_t>(scenario.model.sensor_count()));
    for (int i = 0; i < scenario.model.sensor_count(); ++i) {
        gains[static_cast<size_t>(i)] = finite_gain_at(scenario, i, u);
    }
    return gains;
}

struct MarginEval {
    double margin;
    std::vector<int> worst_I;
};

MarginEval eval_margin(const Scenario& scenario, const Eigen::VectorXd& u, int p) {
    auto [margin, worst] = subset_margin(gains_at(scenario, u), p);
    return {margin, std::move(worst)};
}

// Deterministic pattern search on the sphere around a starting direction.
void refine_local(const Scenario& scenario, int p, Eigen::VectorXd& u, MarginEval& best,
                  double initial_radius) {
    const int n = static_cast<int>(u.size());
    if (n <= 1) return;
    double radius = initial_radius;
    for (int rounds = 0; rounds < 2000 && radius > 1e-7; ++rounds) {
        bool improved = false;
        Eigen::VectorXd best_candidate;
        MarginEval best_eval = best;
        for (int j = 0; j < n; ++j) {
            for (double sign : {1.0, -1.0}) {
                Eigen::VectorXd candidate = u;
                candidate[j] += sign * radius;
                candidate.normalize();
                MarginEval eval = eval_margin(scenario, candidate, p);
                if (eval.margin < best_eval.margin - 1e-15) {
                    best_eval = eval;
                    best_candidate = candidate;
                    improved = true;
                }
            }
        }
        if (improved) {
            u = best_candidate;
            best = best_eval;
        } else {
            radius *= 0.5;
        }
    }
}

double auto_mesh_eps(int n, long budget) {
    for (double eps : {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.2, 0.3, 0.5, 1.0}) {
        if (sphere_mesh_size(n, eps) <= budget) return eps;
    }
    return 0.0;  // nothing fits
}

}  // namespace

Certificate certify(const Scenario& scenario, const CertifyOptions& options) {
    scenario.validate();
    const auto& model = scenario.model;
    const int n = model.state_dim();
    const int m = model.sensor_count();

    Certificate cert;
    cert.tol = options.tol;

    // Screen for unbounded gains over coordinate and random directions.
    bool any_unbounded = false;
    Eigen::VectorXd unbounded_dir;
    int unbounded_sensor = -1;
    {
        std::vector<Eigen::VectorXd> screen_dirs;
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e[j] = 1.0;
            screen_dirs.push_back(e);
        }
        Rng rng(derive_seed(scenario.seed, 0x5c7ee11));
        for (int r = 0; r < 8; ++r) {
            Eigen::VectorXd u(n);
            for (int j = 0; j < n; ++j) u[j] = rng.normal();
            const double norm = u.norm();
            if (norm > 0) screen_dirs.push_back(u / norm);
        }
        for (const auto& u : screen_dirs) {
            for (int i = 0; i < m && !any_unbounded; ++i) {
                const AsymptoticGain g =
                    asymptotic_gain(scenario.costs[static_cast<size_t>(i)], model.block(i), u);
                if (g.unbounded) {
                    any_unbounded = true;
                    unbounded_dir = u;
                    unbounded_sensor = i;
                }
            }
            if (any_unbounded) break;
        }
    }

    if (scenario.p == 0) {
        // No attack exists; the estimator is trivially robust. Margins are
        // still reported when they are finite.
        cert.decision = Decision::Robust;
        cert.rigorous = true;
        if (any_unbounded) {
            cert.margin_min = kInf;
            cert.margin_min_mesh = kInf;
            return cert;
        }
    } else if (any_unbounded) {
        cert.decision = Decision::UnboundedGain;
        cert.rigorous = true;
        cert.margin_min = -kInf;
        cert.margin_min_mesh = -kInf;
        cert.witness_u = unbounded_dir;
        cert.witness_I = {unbounded_sensor};
        return cert;
    }

    // Margin Lipschitz constant: each gain enters with coefficient +-1 and
    // the worst subset can change, bounded by twice the total variation.
    double lipschitz_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& cost = scenario.costs[static_cast<size_t>(i)];
        if (cost.gain_finite()) {
            lipschitz_sum += gain_lipschitz(cost, model.block(i));
        }
        // else: zero block, contributes nothing
    }
    cert.lipschitz_total = 2.0 * lipschitz_sum;

    // Covering mesh within budget, or fall back to random search only.
    double eps = options.mesh_eps;
    bool mesh_ok = true;
    if (n == 1) {
        eps = 0.0;
    } else if (eps <= 0.0) {
        eps = auto_mesh_eps(n, options.mesh_budget);
        if (eps == 0.0) mesh_ok = false;
    } else if (sphere_mesh_size(n, eps) > options.mesh_budget) {
        mesh_ok = false;
    }

    std::vector<Eigen::VectorXd> directions;
    long mesh_count = 0;
    if (mesh_ok) {
        directions = sphere_mesh(n, eps);
        mesh_count = static_cast<long>(directions.size());
        cert.mesh_resolution = eps;
    } else {
        cert.mesh_resolution = 0.0;
    }

    {
        Rng rng(derive_seed(scenario.seed, 0xd1a5));
        const int extra = std::max(options.random_dirs, mesh_ok ? 0 : 512);
        for (int r = 0; r < extra; ++r) {
            Eigen::VectorXd u(n);
            for (int j = 0; j < n; ++j) u[j] = rng.normal();
            const double norm = u.norm();
            if (norm > 0) directions.push_back(u / norm);
        }
    }

    const long total_dirs = static_cast<long>(directions.size());
    std::vector<MarginEval> evals(static_cast<size_t>(total_dirs));
    parallel_for(total_dirs, options.jobs, [&](long idx) {
        evals[static_cast<size_t>(idx)] = eval_margin(scenario, directions[static_cast<size_t>(idx)],
                                                      scenario.p);
    });
    cert.directions_evaluated = total_dirs;

    // Deterministic min reduction: strictly smaller margin wins, ties go to
    // the lower direction index.
    long argmin = 0;
    long argmin_mesh = mesh_ok ? 0 : -1;
    for (long idx = 1; idx < total_dirs; ++idx) {
        if (evals[static_cast<size_t>(idx)].margin < evals[static_cast<size_t>(argmin)].margin) {
            argmin = idx;
        }
        if (mesh_ok && idx < mesh_count &&
            evals[static_cast<size_t>(idx)].margin < evals[static_cast<size_t>(argmin_mesh)].margin) {
            argmin_mesh = idx;
        }
    }

    Eigen::VectorXd worst_u = directions[static_cast<size_t>(argmin)];
    MarginEval worst = evals[static_cast<size_t>(argmin)];
    cert.margin_min_mesh = mesh_ok ? evals[static_cast<size_t>(argmin_mesh)].margin
                                   : std::numeric_limits<double>::quiet_NaN();

    refine_local(scenario, scenario.p, worst_u, worst,
                 mesh_ok ? std::max(eps, 0.05) : 0.5);

    cert.margin_min = worst.margin;
    cert.witness_u = worst_u;
    cert.witness_I = worst.worst_I;

    if (scenario.p == 0) {
        return cert;  // decision fixed above; margins are diagnostics
    }

    if (cert.margin_min < -options.tol) {
        cert.decision = Decision::NotRobust;
        cert.rigorous = true;  // the witness direction certifies Theorem 2
        return cert;
    }
    if (cert.margin_min > options.tol && mesh_ok &&
        cert.margin_min_mesh - cert.lipschitz_total * eps > 0.0) {
        cert.decision = Decision::Robust;
        cert.rigorous = true;
        return cert;
    }
    cert.decision = Decision::Inconclusive;
    cert.rigorous = false;
    return cert;
}

std::vector<MarginPoint> margin_landscape(const Scenario& scenario,
                                          const std::vector<Eigen::VectorXd>& directions) {
    scenario.validate();
    std::vector<MarginPoint> result;
    result.reserve(directions.size());
    for (const auto& u : directions) {
        if (u.size() != scenario.model.state_dim()) {
            throw std::invalid_argument("margin_landscape: direction has wrong dimension");
        }
        if (std::abs(u.norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("margin_landscape: directions must be unit vectors");
        }
        auto [margin, worst] = subset_margin(gains_at(scenario, u), scenario.p);
        result.push_back({u, margin, std::move(worst)});
    }
    return result;
}

}  // namespace robest
