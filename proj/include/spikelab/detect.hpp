#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spikelab/model.hpp"

namespace spikelab {

enum class DetectionMode { PlainThreshold, SignFiltered };

const char* to_string(DetectionMode mode);
DetectionMode parse_detection_mode(const std::string& text);

struct DetectionConfig {
    double constant = 5.0;   // C
    double exponent = 0.01;  // varpi
    int mpv_order = 20;
    DetectionMode mode = DetectionMode::SignFiltered;
};

void validate(const DetectionConfig& config);

struct DetectionReport {
    std::vector<Index> indices;        // 1-based increment indices, increasing
    std::vector<double> increments;    // Delta_i X at each flagged index
    Index count = 0;
    double sigma_hat = 0.0;
    double threshold_abs = 0.0;        // C sigma_hat Delta^{1/2 - varpi}
    DetectionMode mode = DetectionMode::SignFiltered;
};

// E|N(0,1)|^r = 2^{r/2} Gamma((r+1)/2) / Gamma(1/2).
double gaussian_abs_moment(double r);

// sqrt of (1 / mu_{2/m}^m) sum_{i=m}^{n} prod_{j=0}^{m-1} |Delta_{i-j}|^{2/m}
// over a vector of increments.
template <typename Derived>
double multipower_variation(const Eigen::MatrixBase<Derived>& increments, int order) {
    const Index n = increments.size();
    if (order < 2) throw std::invalid_argument("multipower order must be >= 2");
    if (n <= order) throw std::invalid_argument("multipower variation needs more increments than its order");
    const double power = 2.0 / order;
    const Eigen::ArrayXd powered = increments.derived().array().abs().pow(power);
    if ((powered == 0.0).all()) throw std::invalid_argument("degenerate path: all increments are zero");

    double total = 0.0;
    for (Index end = order - 1; end < n; ++end) total += powered.segment(end - order + 1, order).prod();
    const double norm = std::pow(gaussian_abs_moment(power), order);
    const double estimate = total / norm;
    if (!(estimate > 0.0))
        throw std::invalid_argument("degenerate path: multipower variation is zero");
    return std::sqrt(estimate);
}

double multipower_variation(const SampledPath& path, int order);

double compute_threshold(const DetectionConfig& config, double sigma_hat, const GridSpec& grid);

DetectionReport detect_jumps(const SampledPath& path, const DetectionConfig& config);

// Same as detect_jumps but with a caller-supplied volatility estimate.
DetectionReport detect_jumps_with_sigma(const SampledPath& path, const DetectionConfig& config, double sigma_hat);

// Optional post-filter: drops any flag closer than `min_gap` increments to the
// previously kept flag.
DetectionReport apply_min_gap(const DetectionReport& report, Index min_gap);

}  // namespace spikelab
