#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "robest/model.hpp"

namespace robest {

enum class Decision { Robust, NotRobust, Inconclusive, UnboundedGain };

std::string decision_name(Decision decision);

struct Certificate {
    Decision decision = Decision::Inconclusive;
    // Minimum subset margin over every direction searched. +inf when p = 0
    // with unbounded sensor gains, -inf when an unbounded gain dooms p >= 1.
    double margin_min = 0.0;
    // Minimum over the covering mesh alone; feeds the rigorous lower bound.
    double margin_min_mesh = 0.0;
    Eigen::VectorXd witness_u;
    std::vector<int> witness_I;  // 0-based sensor indices
    // True when the decision holds over the whole sphere: NotRobust and
    // UnboundedGain by witness, Robust by mesh covering + Lipschitz bound.
    bool rigorous = false;
    double mesh_resolution = 0.0;  // covering radius of the mesh (0 = exact)
    double lipschitz_total = 0.0;  // margin Lipschitz constant 2 * sum K_i
    long directions_evaluated = 0;
    double tol = 1e-9;
};

struct CertifyOptions {
    double mesh_eps = 0.0;  // 0 = choose automatically within the budget
    int random_dirs = 64;
    double tol = 1e-9;
    int jobs = 1;
    long mesh_budget = 100000;
};

// Worst size-p subset of the per-sensor gains: the p largest entries (ties
// broken by lowest index). margin = sum over the complement minus sum over
// the subset; positive means Theorem 1's inequality holds at this direction
// for every subset.
std::pair<double, std::vector<int>> subset_margin(const std::vector<double>& gains, int p);

// Deterministic mesh on the unit sphere of R^n with covering radius <= eps
// (exact for n = 1). Product-of-angles construction, poles deduplicated.
std::vector<Eigen::VectorXd> sphere_mesh(int n, double eps);

// Predicted sphere_mesh size, for budget checks.
long sphere_mesh_size(int n, double eps);

Certificate certify(const Scenario& scenario, const CertifyOptions& options = {});

struct MarginPoint {
    Eigen::VectorXd u;
    double margin;
    std::vector<int> worst_I;
};

// Per-direction margins for diagnostics; directions must be unit vectors and
// every sensor gain must be finite.
std::vector<MarginPoint> margin_landscape(const Scenario& scenario,
                                          const std::vector<Eigen::VectorXd>& directions);

}  // namespace robest
