#pragma once

#include <functional>

namespace spikelab {

struct QuadratureResult {
    double value = 0.0;
    int intervals = 0;  // accepted subintervals
};

// Adaptive Simpson with an absolute tolerance shared across subintervals.
// Throws std::runtime_error if more than `max_intervals` would be needed.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                                  int max_intervals = 10000);

}  // namespace spikelab
