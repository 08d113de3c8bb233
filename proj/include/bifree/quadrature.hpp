#pragma once

#include <cstddef>
#include <functional>

namespace bifree {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;          // estimated absolute error
    std::size_t evaluations = 0;
};

/// Adaptive Simpson with the usual (S2 - S1)/15 correction. Throws
/// ConvergenceError when an interval reaches max_depth without meeting its
/// share of the tolerance, or when the integrand is not finite.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_depth = 48);

}  // namespace bifree
