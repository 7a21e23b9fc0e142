#include "spikelab/detect.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikelab {

const char* to_string(DetectionMode mode) {
    return mode == DetectionMode::PlainThreshold ? "plain" : "signfiltered";
}

DetectionMode parse_detection_mode(const std::string& text) {
    if (text == "plain") return DetectionMode::PlainThreshold;
    if (text == "signfiltered") return DetectionMode::SignFiltered;
    throw std::invalid_argument("unknown detection mode '" + text + "' (expected plain or signfiltered)");
}

void validate(const DetectionConfig& c) {
    if (!(c.constant > 0.0)) throw std::invalid_argument("detection constant C must be > 0");
    if (!(c.exponent >= 0.0 && c.exponent < 0.5)) throw std::invalid_argument("detection exponent must lie in [0, 1/2)");
    if (c.mpv_order < 2) throw std::invalid_argument("multipower order must be >= 2");
}

double gaussian_abs_moment(double r) {
    return std::pow(2.0, r / 2.0) * std::tgamma((r + 1.0) / 2.0) / std::tgamma(0.5);
}

double multipower_variation(const SampledPath& path, int order) {
    return multipower_variation(path.increments(), order);
}

double compute_threshold(const DetectionConfig& config, double sigma_hat, const GridSpec& grid) {
    if (!(sigma_hat > 0.0)) throw std::invalid_argument("sigma_hat must be > 0");
    const double scale =
        config.exponent == 0.0 ? std::sqrt(grid.mesh()) : std::pow(grid.mesh(), 0.5 - config.exponent);
    return config.constant * sigma_hat * scale;
}

DetectionReport detect_jumps_with_sigma(const SampledPath& path, const DetectionConfig& config, double sigma_hat) {
    validate(config);
    const Index n = path.n();
    if (n < 3) throw std::invalid_argument("jump detection needs n >= 3");

    DetectionReport report;
    report.mode = config.mode;
    report.sigma_hat = sigma_hat;
    report.threshold_abs = compute_threshold(config, sigma_hat, path.grid());

    for (Index i = 1; i <= n; ++i) {
        const double d = path.increment(i);
        if (!(std::abs(d) > report.threshold_abs)) continue;
        if (config.mode == DetectionMode::SignFiltered) {
            // The last increment has no successor to check against.
            if (i == n || !(d * path.increment(i + 1) < 0.0)) continue;
        }
        report.indices.push_back(i);
        report.increments.push_back(d);
    }
    report.count = static_cast<Index>(report.indices.size());
    return report;
}

DetectionReport detect_jumps(const SampledPath& path, const DetectionConfig& config) {
    validate(config);
    return detect_jumps_with_sigma(path, config, multipower_variation(path, config.mpv_order));
}

DetectionReport apply_min_gap(const DetectionReport& report, Index min_gap) {
    DetectionReport out = report;
    out.indices.clear();
    out.increments.clear();
    for (std::size_t q = 0; q < report.indices.size(); ++q) {
        if (!out.indices.empty() && report.indices[q] - out.indices.back() < min_gap) continue;
        out.indices.push_back(report.indices[q]);
        out.increments.push_back(report.increments[q]);
    }
    out.count = static_cast<Index>(out.indices.size());
    return out;
}

}  // namespace spikelab
