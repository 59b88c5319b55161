#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace robest {

// Per-sensor convex cost kinds. All are symmetric, non-negative and vanish
// at zero. squared_l2 is the only kind whose radial growth is super-linear.
enum class CostKind { SquaredL2, L1, L2Norm, LassoEnvelope };

std::string cost_kind_name(CostKind kind);
CostKind cost_kind_from_name(const std::string& name);

struct CostSpec {
    CostKind kind = CostKind::SquaredL2;
    double lambda = 1.0;  // LassoEnvelope only
    int dim = 0;          // residual length m_i

    // False exactly for SquaredL2: its radial slope grows without bound.
    bool gain_finite() const { return kind != CostKind::SquaredL2; }
};

double cost_eval(const CostSpec& cost, const Eigen::VectorXd& v);

// Any element of the subdifferential; at kinks the zero selection is used.
Eigen::VectorXd cost_subgradient(const CostSpec& cost, const Eigen::VectorXd& v);

// Value of lim_{t->inf} f(t H u)/t, or unbounded when no finite limit exists.
struct AsymptoticGain {
    double value = 0.0;
    bool unbounded = false;

    static AsymptoticGain finite(double v) { return {v, false}; }
    static AsymptoticGain infinite() { return {0.0, true}; }
};

AsymptoticGain asymptotic_gain(const CostSpec& cost, const Eigen::MatrixXd& H_i,
                               const Eigen::VectorXd& u);

// K with C(u) <= K * ||u||; by the semi-norm triangle inequality the same K
// bounds |C(u) - C(v)| by K * ||u - v||. Throws for SquaredL2.
double gain_lipschitz(const CostSpec& cost, const Eigen::MatrixXd& H_i);

// h(u, v, t) = [f(v + t H u) - f(v)] / t, the finite-horizon slope that
// converges to the asymptotic gain as t grows. Requires t > 0.
double finite_horizon_gain(const CostSpec& cost, const Eigen::MatrixXd& H_i,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& v, double t);

// f(t w)/t for each t; nondecreasing in t for any convex f with f(0) = 0.
std::vector<double> radial_profile(const CostSpec& cost, const Eigen::VectorXd& direction,
                                   const std::vector<double>& ts);

// Bundles one sensor's cost and measurement block for gain queries.
class GainFn {
public:
    GainFn(CostSpec cost, Eigen::MatrixXd H_i)
        : cost_(std::move(cost)), H_(std::move(H_i)) {}

    AsymptoticGain operator()(const Eigen::VectorXd& u) const {
        return asymptotic_gain(cost_, H_, u);
    }
    double lipschitz() const { return gain_lipschitz(cost_, H_); }
    bool finite() const { return cost_.gain_finite(); }
    const CostSpec& cost() const { return cost_; }
    const Eigen::MatrixXd& block() const { return H_; }

private:
    CostSpec cost_;
    Eigen::MatrixXd H_;
};

}  // namespace robest
