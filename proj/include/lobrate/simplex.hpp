#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lobrate::optimize {

struct SimplexOptions {
    /// Converged when the largest vertex distance from the best vertex
    /// drops below this.
    double diameter_tolerance = 1e-8;
    std::size_t max_iterations = 10'000;
    /// Edge length of the initial simplex along each axis.
    double initial_step = 0.5;
};

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead minimisation with standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Non-finite objective values
/// are treated as +infinity.
SimplexResult nelder_mead(const Objective& f, std::vector<double> start, const SimplexOptions& options = {});

}  // namespace lobrate::optimize
