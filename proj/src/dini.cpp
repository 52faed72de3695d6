#include "invflow/dini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invflow::dini {

std::vector<double> geometric_steps(double T, double hi_fraction, double lo_fraction, double ratio) {
    if (!(T > 0.0) || !(hi_fraction > lo_fraction) || !(lo_fraction > 0.0) || !(ratio > 0.0 && ratio < 1.0))
        throw InvalidArgument("geometric_steps: invalid parameters");
    std::vector<double> steps;
    for (double h = hi_fraction * T; h >= lo_fraction * T * (1.0 - 1e-12); h *= ratio) steps.push_back(h);
    return steps;
}

double dini_upper(const SampledFunction& theta, double t, const std::vector<double>& steps) {
    if (steps.empty()) throw InvalidArgument("dini_upper: empty step grid");
    const double h_max = *std::max_element(steps.begin(), steps.end());
    const double h_min = *std::min_element(steps.begin(), steps.end());
    if (!(h_min > 0.0)) throw InvalidArgument("dini_upper: steps must be positive");
    if (h_min < 1e-9 * theta.T * (1.0 - 1e-12))
        throw InvalidArgument("dini_upper: smallest step below 1e-9*T");
    if (t < 0.0 || !(t + h_max < theta.T)) throw HorizonExceeded("dini_upper: t + max step reaches the horizon");

    const double base = theta(t);
    double best = -std::numeric_limits<double>::infinity();
    for (double h : steps) best = std::max(best, (theta(t + h) - base) / h);
    return best;
}

double dini_upper(const SampledFunction& theta, double t) {
    return dini_upper(theta, t, geometric_steps(theta.T));
}

LemmaPoint find_lemma_point(const SampledFunction& theta, double C, std::size_t t_grid) {
    return find_lemma_point(theta, C, t_grid, geometric_steps(theta.T));
}

LemmaPoint find_lemma_point(const SampledFunction& theta, double C, std::size_t t_grid,
                            const std::vector<double>& steps) {
    if (!(C > 0.0)) throw InvalidArgument("find_lemma_point: C must be positive");
    if (t_grid < 2) throw InvalidArgument("find_lemma_point: grid needs at least two points");
    if (steps.empty()) throw InvalidArgument("find_lemma_point: empty step grid");
    const double T = theta.T;
    const double h_max = *std::max_element(steps.begin(), steps.end());

    if (theta(0.0) != 0.0) throw PreconditionViolated("find_lemma_point: theta(0) must be 0");

    // grid t_i = i*T/t_grid, restricted so that t_i + h_max stays inside [0, T)
    std::vector<double> grid;
    for (std::size_t i = 1; i < t_grid; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(t_grid);
        if (t + h_max < T) grid.push_back(t);
    }

    bool nonzero = false;
    for (double t : grid) {
        const double v = theta(t);
        if (!std::isfinite(v)) throw PreconditionViolated("find_lemma_point: theta is not finite on the grid");
        if (v < 0.0) throw PreconditionViolated("find_lemma_point: theta is negative on the grid");
        nonzero = nonzero || v > 0.0;
    }
    if (!nonzero) throw PreconditionViolated("find_lemma_point: theta vanishes identically on the grid");

    LemmaPoint out;
    out.grid_points = grid.size();
    out.best_excess = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const double value = theta(t);
        if (!(value > 0.0)) continue;
        const double d = dini_upper(theta, t, steps);
        const double excess = d - C * value;
        out.best_excess = std::max(out.best_excess, excess);
        if (excess > 0.0) {
            out.found = true;
            out.t = t;
            out.theta = value;
            out.derivative = d;
            out.best_excess = excess;
            return out;
        }
    }
    return out;
}

}  // namespace invflow::dini
