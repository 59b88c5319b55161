#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "robest/costs.hpp"

namespace robest {

// Multi-sensor linear measurement model. Sensor i observes z_i = H_i x + w_i
// with H_i of size m_i x n; the stacked matrix H must have full column rank.
class MeasurementModel {
public:
    MeasurementModel(int n, std::vector<Eigen::MatrixXd> sensor_blocks);

    int state_dim() const { return n_; }
    int sensor_count() const { return static_cast<int>(blocks_.size()); }
    const Eigen::MatrixXd& block(int i) const { return blocks_.at(static_cast<size_t>(i)); }
    const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }

    int block_rows(int i) const { return static_cast<int>(blocks_.at(static_cast<size_t>(i)).rows()); }
    int block_offset(int i) const { return offsets_.at(static_cast<size_t>(i)); }
    int total_rows() const { return total_rows_; }

    // All H_i stacked in sensor order.
    const Eigen::MatrixXd& stacked() const { return stacked_; }

    Eigen::VectorXd block_of(const Eigen::VectorXd& stacked_vec, int i) const;

private:
    int n_;
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<int> offsets_;
    int total_rows_ = 0;
    Eigen::MatrixXd stacked_;
};

// Attack supported on at most p sensors, arbitrary on the support.
struct SparseAttack {
    std::map<int, Eigen::VectorXd> blocks;  // sensor index (0-based) -> a_i

    std::vector<int> support() const;
    // Throws if the support exceeds p, an index is out of range, or a block
    // has the wrong length.
    void validate(const MeasurementModel& model, int p) const;
};

struct NoiseSpec {
    enum class Kind { None, Gaussian, Uniform };
    Kind kind = Kind::None;
    double scale = 0.0;
};

struct Scenario {
    MeasurementModel model;
    std::vector<CostSpec> costs;  // one per sensor
    int p = 0;
    NoiseSpec noise;
    std::uint64_t seed = 0;

    void validate() const;
    // Draws one stacked noise vector; deterministic in (noise, seed, stream).
    Eigen::VectorXd sample_noise(std::uint64_t stream) const;
};

// z_i = H_i x + w_i, stacked.
Eigen::VectorXd measure(const MeasurementModel& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& noise_sample);

// y_i = z_i + a_i on the support, y_i = z_i elsewhere.
Eigen::VectorXd apply_attack(const MeasurementModel& model, const Eigen::VectorXd& z,
                             const SparseAttack& attack);

// Lexicographic enumeration of all size-p subsets of {0, ..., m-1}.
class SubsetEnumerator {
public:
    SubsetEnumerator(int m, int p);
    // Writes the next subset into `out`; false once exhausted.
    bool next(std::vector<int>& out);

private:
    int m_;
    int p_;
    bool started_ = false;
    bool done_ = false;
    std::vector<int> current_;
};

std::vector<std::vector<int>> enumerate_subsets(int m, int p);

}  // namespace robest
