#include "robest/costs.hpp"

#include <cmath>
#include <stdexcept>

namespace robest {

std::string cost_kind_name(CostKind kind) {
    switch (kind) {
        case CostKind::SquaredL2: return "squared_l2";
        case CostKind::L1: return "l1";
        case CostKind::L2Norm: return "l2norm";
        case CostKind::LassoEnvelope: return "lasso_envelope";
    }
    throw std::logic_error("unknown cost kind");
}

CostKind cost_kind_from_name(const std::string& name) {
    if (name == "squared_l2") return CostKind::SquaredL2;
    if (name == "l1") return CostKind::L1;
    if (name == "l2norm") return CostKind::L2Norm;
    if (name == "lasso_envelope") return CostKind::LassoEnvelope;
    throw std::invalid_argument("cost.kind: unknown value '" + name + "'");
}

namespace {

void check_dim(const CostSpec& cost, const Eigen::VectorXd& v) {
    if (cost.dim > 0 && v.size() != cost.dim) {
        throw std::invalid_argument("cost evaluation: residual length " +
                                    std::to_string(v.size()) + " does not match sensor dimension " +
                                    std::to_string(cost.dim));
    }
}

// Scalar envelope value: min_a (s - a)^2 + lambda |a|. The minimizer is the
// soft-threshold of s at lambda/2, which collapses to a Huber-type function.
double envelope_scalar(double s, double lambda) {
    const double as = std::abs(s);
    if (as <= 0.5 * lambda) return s * s;
    return lambda * as - 0.25 * lambda * lambda;
}

double envelope_scalar_derivative(double s, double lambda) {
    const double as = std::abs(s);
    if (as <= 0.5 * lambda) return 2.0 * s;
    return s > 0 ? lambda : -lambda;
}

}  // namespace

double cost_eval(const CostSpec& cost, const Eigen::VectorXd& v) {
    check_dim(cost, v);
    switch (cost.kind) {
        case CostKind::SquaredL2: return v.squaredNorm();
        case CostKind::L1: return v.lpNorm<1>();
        case CostKind::L2Norm: return v.norm();
        case CostKind::LassoEnvelope: {
            double total = 0.0;
            for (int j = 0; j < v.size(); ++j) total += envelope_scalar(v[j], cost.lambda);
            return total;
        }
    }
    throw std::logic_error("unknown cost kind");
}

Eigen::VectorXd cost_subgradient(const CostSpec& cost, const Eigen::VectorXd& v) {
    check_dim(cost, v);
    switch (cost.kind) {
        case CostKind::SquaredL2: return 2.0 * v;
        case CostKind::L1: {
            Eigen::VectorXd g(v.size());
            for (int j = 0; j < v.size(); ++j) g[j] = (v[j] > 0) - (v[j] < 0);
            return g;
        }
        case CostKind::L2Norm: {
            const double norm = v.norm();
            if (norm == 0.0) return Eigen::VectorXd::Zero(v.size());
            return v / norm;
        }
        case CostKind::LassoEnvelope: {
            Eigen::VectorXd g(v.size());
            for (int j = 0; j < v.size(); ++j) g[j] = envelope_scalar_derivative(v[j], cost.lambda);
            return g;
        }
    }
    throw std::logic_error("unknown cost kind");
}

AsymptoticGain asymptotic_gain(const CostSpec& cost, const Eigen::MatrixXd& H_i,
                               const Eigen::VectorXd& u) {
    if (u.size() != H_i.cols()) {
        throw std::invalid_argument("asymptotic_gain: direction length does not match state dimension");
    }
    const Eigen::VectorXd h = H_i * u;
    switch (cost.kind) {
        case CostKind::SquaredL2:
            // f(t h)/t = t ||h||^2 diverges unless h = 0.
            if (h.isZero(0.0)) return AsymptoticGain::finite(0.0);
            return AsymptoticGain::infinite();
        case CostKind::L1: return AsymptoticGain::finite(h.lpNorm<1>());
        case CostKind::L2Norm: return AsymptoticGain::finite(h.norm());
        case CostKind::LassoEnvelope: return AsymptoticGain::finite(cost.lambda * h.lpNorm<1>());
    }
    throw std::logic_error("unknown cost kind");
}

double gain_lipschitz(const CostSpec& cost, const Eigen::MatrixXd& H_i) {
    if (!cost.gain_finite()) {
        throw std::invalid_argument("gain_lipschitz: gain is unbounded for squared_l2 costs");
    }
    const double sigma_max = H_i.jacobiSvd().singularValues()(0);
    const double root_rows = std::sqrt(static_cast<double>(H_i.rows()));
    switch (cost.kind) {
        case CostKind::L1: return root_rows * sigma_max;
        case CostKind::L2Norm: return sigma_max;
        case CostKind::LassoEnvelope: return cost.lambda * root_rows * sigma_max;
        default: break;
    }
    throw std::logic_error("unknown cost kind");
}

double finite_horizon_gain(const CostSpec& cost, const Eigen::MatrixXd& H_i,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& v, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("finite_horizon_gain: t must be positive");
    return (cost_eval(cost, v + t * (H_i * u)) - cost_eval(cost, v)) / t;
}

std::vector<double> radial_profile(const CostSpec& cost, const Eigen::VectorXd& direction,
                                   const std::vector<double>& ts) {
    std::vector<double> slopes;
    slopes.reserve(ts.size());
    for (double t : ts) {
        if (!(t > 0.0)) throw std::invalid_argument("radial_profile: all t must be positive");
        slopes.push_back(cost_eval(cost, t * direction) / t);
    }
    return slopes;
}

}  // namespace robest
