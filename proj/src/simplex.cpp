#include "lobrate/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lobrate::optimize {

namespace {

double safe_eval(const Objective& f, const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> start, const SimplexOptions& options) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(f, simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto blend = [&](std::vector<double>& out, const std::vector<double>& from, double t) {
        // out = centroid + t * (from - centroid)
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
    };

    SimplexResult result;
    for (std::size_t iter = 0;; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        // Stable sort keeps tie-breaking deterministic.
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        const auto best = order.front();
        const auto worst = order.back();
        const auto second_worst = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = simplex[i][j] - simplex[best][j];
                d2 += d * d;
            }
            diameter = std::max(diameter, std::sqrt(d2));
        }
        if (diameter < options.diameter_tolerance || iter >= options.max_iterations) {
            result.point = simplex[best];
            result.value = values[best];
            result.iterations = iter;
            result.converged = diameter < options.diameter_tolerance;
            return result;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        blend(trial, simplex[worst], -1.0);
        const double fr = safe_eval(f, trial);
        if (fr < values[best]) {
            blend(trial2, simplex[worst], -2.0);
            const double fe = safe_eval(f, trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflection improved on the worst point.
        const bool outside = fr < values[worst];
        blend(trial2, outside ? trial : simplex[worst], 0.5);
        const double fc = safe_eval(f, trial2);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            values[i] = safe_eval(f, simplex[i]);
        }
    }
}

}  // namespace lobrate::optimize
