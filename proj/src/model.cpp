#include "robest/model.hpp"

#include <Eigen/SVD>
#include <stdexcept>

#include "robest/rng.hpp"

namespace robest {

MeasurementModel::MeasurementModel(int n, std::vector<Eigen::MatrixXd> sensor_blocks)
    : n_(n), blocks_(std::move(sensor_blocks)) {
    if (n_ <= 0) throw std::invalid_argument("n: state dimension must be positive");
    if (blocks_.empty()) throw std::invalid_argument("sensors: at least one sensor is required");

    offsets_.reserve(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& H_i = blocks_[i];
        if (H_i.cols() != n_) {
            throw std::invalid_argument("sensors[" + std::to_string(i) + "].H: expected " +
                                        std::to_string(n_) + " columns, got " +
                                        std::to_string(H_i.cols()));
        }
        if (H_i.rows() < 1) {
            throw std::invalid_argument("sensors[" + std::to_string(i) + "].H: needs at least one row");
        }
        offsets_.push_back(total_rows_);
        total_rows_ += static_cast<int>(H_i.rows());
    }

    stacked_.resize(total_rows_, n_);
    for (size_t i = 0; i < blocks_.size(); ++i) {
        stacked_.middleRows(offsets_[i], blocks_[i].rows()) = blocks_[i];
    }

    // Numerical rank check, scale invariant: sigma_min > 1e-10 * sigma_max.
    const Eigen::VectorXd sigma = stacked_.jacobiSvd().singularValues();
    if (sigma.size() < n_ || !(sigma(n_ - 1) > 1e-10 * sigma(0))) {
        throw std::invalid_argument("sensors: stacked measurement matrix H is not full column rank");
    }
}

Eigen::VectorXd MeasurementModel::block_of(const Eigen::VectorXd& stacked_vec, int i) const {
    if (stacked_vec.size() != total_rows_) {
        throw std::invalid_argument("block_of: stacked vector has wrong length");
    }
    return stacked_vec.segment(block_offset(i), block_rows(i));
}

std::vector<int> SparseAttack::support() const {
    std::vector<int> idx;
    idx.reserve(blocks.size());
    for (const auto& [i, a_i] : blocks) idx.push_back(i);
    return idx;
}

void SparseAttack::validate(const MeasurementModel& model, int p) const {
    if (static_cast<int>(blocks.size()) > p) {
        throw std::invalid_argument("attack.support: size " + std::to_string(blocks.size()) +
                                    " exceeds attack budget p = " + std::to_string(p));
    }
    for (const auto& [i, a_i] : blocks) {
        if (i < 0 || i >= model.sensor_count()) {
            throw std::invalid_argument("attack.support: sensor index " + std::to_string(i + 1) +
                                        " out of range 1.." + std::to_string(model.sensor_count()));
        }
        if (a_i.size() != model.block_rows(i)) {
            throw std::invalid_argument("attack.blocks: block for sensor " + std::to_string(i + 1) +
                                        " has length " + std::to_string(a_i.size()) + ", expected " +
                                        std::to_string(model.block_rows(i)));
        }
    }
}

void Scenario::validate() const {
    if (static_cast<int>(costs.size()) != model.sensor_count()) {
        throw std::invalid_argument("costs: expected one cost per sensor (" +
                                    std::to_string(model.sensor_count()) + "), got " +
                                    std::to_string(costs.size()));
    }
    for (size_t i = 0; i < costs.size(); ++i) {
        if (costs[i].dim != model.block_rows(static_cast<int>(i))) {
            throw std::invalid_argument("costs[" + std::to_string(i) + "]: dimension mismatch with sensor block");
        }
        if (costs[i].kind == CostKind::LassoEnvelope && !(costs[i].lambda > 0.0)) {
            throw std::invalid_argument("costs[" + std::to_string(i) + "].lambda: must be positive");
        }
    }
    if (p < 0 || p >= model.sensor_count()) {
        throw std::invalid_argument("p: attack budget must satisfy 0 <= p < m");
    }
    if (noise.scale < 0.0) throw std::invalid_argument("noise.scale: must be nonnegative");
}

Eigen::VectorXd Scenario::sample_noise(std::uint64_t stream) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(model.total_rows());
    if (noise.kind == NoiseSpec::Kind::None || noise.scale == 0.0) return w;
    Rng rng(derive_seed(seed, stream));
    for (int r = 0; r < w.size(); ++r) {
        w[r] = noise.kind == NoiseSpec::Kind::Gaussian ? noise.scale * rng.normal()
                                                       : rng.uniform(-noise.scale, noise.scale);
    }
    return w;
}

Eigen::VectorXd measure(const MeasurementModel& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& noise_sample) {
    if (x.size() != model.state_dim()) {
        throw std::invalid_argument("measure: state length " + std::to_string(x.size()) +
                                    " does not match n = " + std::to_string(model.state_dim()));
    }
    if (noise_sample.size() != model.total_rows()) {
        throw std::invalid_argument("measure: noise length " + std::to_string(noise_sample.size()) +
                                    " does not match total measurement length " +
                                    std::to_string(model.total_rows()));
    }
    return model.stacked() * x + noise_sample;
}

Eigen::VectorXd apply_attack(const MeasurementModel& model, const Eigen::VectorXd& z,
                             const SparseAttack& attack) {
    if (z.size() != model.total_rows()) {
        throw std::invalid_argument("apply_attack: measurement length mismatch");
    }
    Eigen::VectorXd y = z;
    for (const auto& [i, a_i] : attack.blocks) {
        if (i < 0 || i >= model.sensor_count()) {
            throw std::invalid_argument("apply_attack: sensor index " + std::to_string(i + 1) +
                                        " out of range");
        }
        if (a_i.size() != model.block_rows(i)) {
            throw std::invalid_argument("apply_attack: attack block for sensor " +
                                        std::to_string(i + 1) + " has wrong length");
        }
        y.segment(model.block_offset(i), model.block_rows(i)) += a_i;
    }
    return y;
}

SubsetEnumerator::SubsetEnumerator(int m, int p) : m_(m), p_(p) {
    if (p_ < 0 || p_ > m_) throw std::invalid_argument("enumerate_subsets: requires 0 <= p <= m");
}

bool SubsetEnumerator::next(std::vector<int>& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        current_.resize(p_);
        for (int i = 0; i < p_; ++i) current_[i] = i;
        out = current_;
        return true;
    }
    // Advance to the lexicographic successor.
    int i = p_ - 1;
    while (i >= 0 && current_[i] == m_ - p_ + i) --i;
    if (i < 0) {
        done_ = true;
        return false;
    }
    ++current_[i];
    for (int j = i + 1; j < p_; ++j) current_[j] = current_[j - 1] + 1;
    out = current_;
    return true;
}

std::vector<std::vector<int>> enumerate_subsets(int m, int p) {
    SubsetEnumerator it(m, p);
    std::vector<std::vector<int>> all;
    std::vector<int> subset;
    while (it.next(subset)) all.push_back(subset);
    return all;
}

}  // namespace robest
