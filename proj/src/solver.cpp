#include "robest/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace robest {

std::string solve_method_name(SolveMethod method) {
    switch (method) {
        case SolveMethod::ClosedForm: return "closed_form";
        case SolveMethod::Weiszfeld: return "weiszfeld";
        case SolveMethod::FirstOrder: return "first_order";
    }
    throw std::logic_error("unknown solve method");
}

double objective_value(const Scenario& scenario, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& x) {
    const auto& model = scenario.model;
    double total = 0.0;
    for (int i = 0; i < model.sensor_count(); ++i) {
        const Eigen::VectorXd residual =
            y.segment(model.block_offset(i), model.block_rows(i)) - model.block(i) * x;
        total += cost_eval(scenario.costs[static_cast<size_t>(i)], residual);
    }
    return total;
}

Eigen::VectorXd estimate_least_squares(const MeasurementModel& model, const Eigen::VectorXd& y) {
    if (y.size() != model.total_rows()) {
        throw std::invalid_argument("estimate_least_squares: measurement length mismatch");
    }
    return model.stacked().householderQr().solve(y);
}

Eigen::VectorXd geometric_median(const std::vector<Eigen::VectorXd>& points,
                                 int* iterations_out) {
    if (points.empty()) throw std::invalid_argument("geometric_median: needs at least one point");
    const int dim = static_cast<int>(points.front().size());
    const size_t count = points.size();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (const auto& pt : points) {
        if (pt.size() != dim) throw std::invalid_argument("geometric_median: mixed point dimensions");
        x += pt;
    }
    x /= static_cast<double>(count);

    constexpr int kMaxIters = 100000;
    constexpr double kAnchorTol = 1e-12;
    int iters_done = 0;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        iters_done = iter + 1;
        // Split points into those coinciding with x and the rest.
        double inv_dist_sum = 0.0;
        int coincident = 0;
        Eigen::VectorXd weighted = Eigen::VectorXd::Zero(dim);
        Eigen::VectorXd pull = Eigen::VectorXd::Zero(dim);  // sum (p - x)/d over non-coincident
        for (const auto& pt : points) {
            const double dist = (pt - x).norm();
            if (dist <= kAnchorTol) {
                ++coincident;
                continue;
            }
            inv_dist_sum += 1.0 / dist;
            weighted += pt / dist;
            pull += (pt - x) / dist;
        }

        if (coincident == static_cast<int>(count)) break;  // all points identical

        Eigen::VectorXd x_next;
        if (coincident > 0) {
            // Subgradient optimality at a data point: the pull of the other
            // points must exceed the coincident multiplicity to move on.
            const double pull_norm = pull.norm();
            if (pull_norm <= static_cast<double>(coincident)) break;
            const double step = (pull_norm - coincident) / inv_dist_sum;
            x_next = x + step * (pull / pull_norm);
        } else {
            x_next = weighted / inv_dist_sum;
        }

        const double moved = (x_next - x).norm();
        x = x_next;
        if (moved <= 1e-14 * (1.0 + x.norm())) break;
    }
    if (iterations_out) *iterations_out = iters_done;
    return x;
}

namespace {

// Subgradient of the full objective at x.
Eigen::VectorXd objective_subgradient(const Scenario& scenario, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& x) {
    const auto& model = scenario.model;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.state_dim());
    for (int i = 0; i < model.sensor_count(); ++i) {
        const Eigen::VectorXd residual =
            y.segment(model.block_offset(i), model.block_rows(i)) - model.block(i) * x;
        g -= model.block(i).transpose() *
             cost_subgradient(scenario.costs[static_cast<size_t>(i)], residual);
    }
    return g;
}

// Per-sensor bound on subgradient contributions near the initial point. For
// finite-gain costs this is the exact gain Lipschitz constant; the quadratic
// cost gets a local estimate from its initial residual.
double local_subgradient_bound(const CostSpec& cost, const Eigen::MatrixXd& H_i,
                               const Eigen::VectorXd& initial_residual) {
    if (cost.gain_finite()) return gain_lipschitz(cost, H_i);
    const double sigma_max = H_i.jacobiSvd().singularValues()(0);
    return 2.0 * sigma_max * (initial_residual.norm() + 1.0);
}

// Exact 1-D refinement: bracket the minimum around the incumbent, then shrink
// by golden-section. Valid because the objective is convex.
void refine_1d(const Scenario& scenario, const Eigen::VectorXd& y, Eigen::VectorXd& x,
               double& fx) {
    const auto eval_at = [&](double s) {
        Eigen::VectorXd xs(1);
        xs[0] = s;
        return objective_value(scenario, y, xs);
    };

    double center = x[0];
    double width = 1.0 + std::abs(center);
    double lo = center - width, hi = center + width;
    double f_lo = eval_at(lo), f_hi = eval_at(hi), f_center = fx;
    for (int expand = 0; expand < 200 && (f_lo < f_center || f_hi < f_center); ++expand) {
        if (f_lo < f_center) {
            center = lo;
            f_center = f_lo;
        } else {
            center = hi;
            f_center = f_hi;
        }
        width *= 2.0;
        lo = center - width;
        hi = center + width;
        f_lo = eval_at(lo);
        f_hi = eval_at(hi);
    }

    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = eval_at(c), fd = eval_at(d);
    for (int k = 0; k < 300 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++k) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = eval_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = eval_at(d);
        }
    }
    const double s_best = fc <= fd ? c : d;
    const double f_best = std::min(fc, fd);
    if (f_best < fx) {
        x[0] = s_best;
        fx = f_best;
    }
}

// Descent polish from the incumbent: backtracking line search along the
// negative subgradient with a warm-started step length. Converges linearly on
// smooth pieces and stops harmlessly at nonsmooth points since only
// improvements are accepted.
void polish(const Scenario& scenario, const Eigen::VectorXd& y, Eigen::VectorXd& x, double& fx,
            double initial_step, int max_rounds) {
    double step = initial_step;
    for (int round = 0; round < max_rounds; ++round) {
        const Eigen::VectorXd g = objective_subgradient(scenario, y, x);
        const double g_norm = g.norm();
        if (g_norm <= 1e-15) return;

        double try_step = step;
        bool improved = false;
        for (int bt = 0; bt < 80; ++bt) {
            const Eigen::VectorXd candidate = x - (try_step / g_norm) * g;
            const double f_candidate = objective_value(scenario, y, candidate);
            if (f_candidate < fx - 1e-14 * std::abs(fx)) {
                x = candidate;
                fx = f_candidate;
                improved = true;
                step = std::min(try_step * 4.0, initial_step * 1024.0);
                break;
            }
            try_step *= 0.5;
        }
        if (!improved) return;
    }
}

}  // namespace

EstimateResult first_order_minimize(const Scenario& scenario, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x0, const SolverOptions& options) {
    const auto& model = scenario.model;
    EstimateResult result;
    result.method = SolveMethod::FirstOrder;

    double lipschitz_sum = 0.0;
    for (int i = 0; i < model.sensor_count(); ++i) {
        const Eigen::VectorXd residual0 =
            y.segment(model.block_offset(i), model.block_rows(i)) - model.block(i) * x0;
        lipschitz_sum +=
            local_subgradient_bound(scenario.costs[static_cast<size_t>(i)], model.block(i), residual0);
    }
    const double step_constant = 1.0 / std::max(lipschitz_sum, 1e-12);

    Eigen::VectorXd x = x0;
    Eigen::VectorXd best_x = x0;
    double best_f = objective_value(scenario, y, x0);

    // Stall detection: best objective must improve by tol (relative) at least
    // once per 200-iteration window.
    constexpr int kWindow = 200;
    double window_best = best_f;
    int window_start = 0;
    bool stalled = false;

    int iter = 0;
    for (; iter < options.max_iters; ++iter) {
        const Eigen::VectorXd g = objective_subgradient(scenario, y, x);
        const double g_norm = g.norm();
        if (g_norm <= 1e-15) {
            stalled = true;  // stationary point of a convex function: optimal
            break;
        }
        x -= (step_constant / std::sqrt(static_cast<double>(iter + 1))) * g;
        const double fx = objective_value(scenario, y, x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
        if (iter - window_start >= kWindow) {
            if (window_best - best_f <= options.tol * (1.0 + std::abs(window_best))) {
                stalled = true;
                break;
            }
            window_best = best_f;
            window_start = iter;
        }
    }

    polish(scenario, y, best_x, best_f, step_constant, options.polish_iters);
    if (model.state_dim() == 1) refine_1d(scenario, y, best_x, best_f);

    result.x_hat = best_x;
    result.objective = best_f;
    result.iterations = iter;
    result.converged = stalled || iter < options.max_iters;
    return result;
}

namespace {

bool all_costs_are(const Scenario& scenario, CostKind kind) {
    for (const auto& cost : scenario.costs) {
        if (cost.kind != kind) return false;
    }
    return true;
}

// Weiszfeld applies when every sensor uses the l2norm cost and shares one
// square invertible block A: substituting u = A x turns the objective into
// the plain geometric median of the measurement points.
bool weiszfeld_applicable(const Scenario& scenario) {
    const auto& model = scenario.model;
    if (!all_costs_are(scenario, CostKind::L2Norm)) return false;
    const auto& first = model.block(0);
    if (first.rows() != model.state_dim()) return false;
    for (int i = 1; i < model.sensor_count(); ++i) {
        if (model.block(i).rows() != first.rows() || model.block(i) != first) return false;
    }
    return true;
}

EstimateResult solve_closed_form(const Scenario& scenario, const Eigen::VectorXd& y) {
    EstimateResult result;
    result.method = SolveMethod::ClosedForm;
    result.x_hat = estimate_least_squares(scenario.model, y);
    result.objective = objective_value(scenario, y, result.x_hat);
    result.iterations = 0;
    result.converged = true;
    return result;
}

EstimateResult solve_weiszfeld(const Scenario& scenario, const Eigen::VectorXd& y) {
    const auto& model = scenario.model;
    std::vector<Eigen::VectorXd> points;
    points.reserve(static_cast<size_t>(model.sensor_count()));
    for (int i = 0; i < model.sensor_count(); ++i) {
        points.push_back(y.segment(model.block_offset(i), model.block_rows(i)));
    }
    int iters = 0;
    const Eigen::VectorXd median = geometric_median(points, &iters);

    EstimateResult result;
    result.method = SolveMethod::Weiszfeld;
    // Undo the u = A x substitution (A is square and invertible because the
    // stacked H has full column rank).
    result.x_hat = model.block(0).householderQr().solve(median);
    result.objective = objective_value(scenario, y, result.x_hat);
    result.iterations = iters;
    result.converged = true;
    return result;
}

}  // namespace

EstimateResult estimate(const Scenario& scenario, const Eigen::VectorXd& y,
                        const SolverOptions& options) {
    const auto& model = scenario.model;
    if (y.size() != model.total_rows()) {
        throw std::invalid_argument("estimate: measurement length " + std::to_string(y.size()) +
                                    " does not match model (" + std::to_string(model.total_rows()) +
                                    ")");
    }

    switch (options.method) {
        case MethodChoice::Closed:
            if (!all_costs_are(scenario, CostKind::SquaredL2)) {
                throw std::invalid_argument("method=closed requires all squared_l2 costs");
            }
            return solve_closed_form(scenario, y);
        case MethodChoice::Weiszfeld:
            if (!weiszfeld_applicable(scenario)) {
                throw std::invalid_argument(
                    "method=weiszfeld requires l2norm costs with identical square sensor blocks");
            }
            return solve_weiszfeld(scenario, y);
        case MethodChoice::Subgrad:
            return first_order_minimize(scenario, y, estimate_least_squares(model, y), options);
        case MethodChoice::Auto:
            break;
    }

    if (all_costs_are(scenario, CostKind::SquaredL2)) return solve_closed_form(scenario, y);
    if (weiszfeld_applicable(scenario)) return solve_weiszfeld(scenario, y);
    return first_order_minimize(scenario, y, estimate_least_squares(model, y), options);
}

}  // namespace robest
