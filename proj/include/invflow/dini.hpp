#pragma once

#include <functional>
#include <vector>

#include "invflow/common.hpp"

namespace invflow::dini {

/// Scalar function of time on [0, T).
struct SampledFunction {
    std::function<double(double)> eval;
    double T = 1.0;

    double operator()(double t) const { return eval(t); }
};

/// Decreasing geometric step sequence from hi_fraction*T down to lo_fraction*T.
std::vector<double> geometric_steps(double T, double hi_fraction = 1e-2, double lo_fraction = 1e-7,
                                    double ratio = 0.5);

/// Estimate of the upper right Dini derivative limsup_{h->0+} (theta(t+h) - theta(t)) / h
/// as the largest forward quotient over `steps`. An estimate, not the exact limsup.
double dini_upper(const SampledFunction& theta, double t, const std::vector<double>& steps);

/// dini_upper with the default geometric steps for theta.T.
double dini_upper(const SampledFunction& theta, double t);

struct LemmaPoint {
    bool found = false;
    double t = 0.0;           ///< t_C when found
    double theta = 0.0;       ///< theta(t_C)
    double derivative = 0.0;  ///< estimated upper Dini derivative at t_C
    /// Largest observed dini_upper - C*theta over grid points with theta > 0.
    double best_excess = 0.0;
    std::size_t grid_points = 0;
};

inline constexpr std::size_t kDefaultTimeGrid = 4096;

/// Scan a uniform grid of (0, T) for the first point with theta > 0 and
/// estimated upper Dini derivative > C*theta. Throws PreconditionViolated when
/// theta(0) != 0, theta < 0 somewhere on the grid, or theta vanishes on the
/// whole grid. A search that comes back empty returns found == false.
LemmaPoint find_lemma_point(const SampledFunction& theta, double C, std::size_t t_grid = kDefaultTimeGrid);

LemmaPoint find_lemma_point(const SampledFunction& theta, double C, std::size_t t_grid,
                            const std::vector<double>& steps);

}  // namespace invflow::dini
