#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "robest/model.hpp"

namespace robest {

enum class SolveMethod { ClosedForm, Weiszfeld, FirstOrder };

std::string solve_method_name(SolveMethod method);

// auto picks per the cost structure; the others force one path and throw if
// the scenario does not support it.
enum class MethodChoice { Auto, Closed, Weiszfeld, Subgrad };

struct SolverOptions {
    MethodChoice method = MethodChoice::Auto;
    int max_iters = 200000;
    // Relative objective improvement below which the subgradient loop is
    // considered stalled (over a 200-iteration window).
    double tol = 1e-10;
    int polish_iters = 5000;
};

struct EstimateResult {
    Eigen::VectorXd x_hat;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    SolveMethod method = SolveMethod::FirstOrder;
};

// Exact normal-equations solution via Householder QR.
Eigen::VectorXd estimate_least_squares(const MeasurementModel& model, const Eigen::VectorXd& y);

// Minimizes sum_i ||points[i] - x||_2 by the Weiszfeld iteration, with the
// Vardi-Zhang step when an iterate collides with a data point.
Eigen::VectorXd geometric_median(const std::vector<Eigen::VectorXd>& points,
                                 int* iterations_out = nullptr);

// Minimizes sum_i f_i(y_i - H_i x) by subgradient descent with best-iterate
// tracking, followed by a descent polish (and exact 1-D refinement for n=1).
EstimateResult first_order_minimize(const Scenario& scenario, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x0, const SolverOptions& options);

// Full estimator: dispatches to the closed form (all squared_l2), Weiszfeld
// (identical square blocks, all l2norm) or the first-order scheme.
EstimateResult estimate(const Scenario& scenario, const Eigen::VectorXd& y,
                        const SolverOptions& options = {});

// Objective value sum_i f_i(y_i - H_i x).
double objective_value(const Scenario& scenario, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& x);

}  // namespace robest
