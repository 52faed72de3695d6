#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "invflow/common.hpp"
#include "invflow/convex_set.hpp"

namespace invflow {

/// phi(t, x, v) written into `out` (size m). x has one entry per spatial axis.
using ReactionFn = std::function<void(double t, std::span<const double> x, std::span<const double> v,
                                      std::span<double> out)>;

/// Reaction term phi of the parabolic system. `eval` must be safe to call
/// concurrently.
class ReactionTerm {
public:
    ReactionTerm() = default;
    ReactionTerm(std::size_t dim, ReactionFn fn, std::optional<convex::Box> probe_box = std::nullopt);

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const std::optional<convex::Box>& lipschitz_probe_box() const { return probe_box_; }

    void operator()(double t, std::span<const double> x, std::span<const double> v,
                    std::span<double> out) const {
        fn_(t, x, v, out);
    }
    [[nodiscard]] Vector operator()(double t, std::span<const double> x, std::span<const double> v) const;

    [[nodiscard]] explicit operator bool() const { return static_cast<bool>(fn_); }

private:
    std::size_t dim_ = 0;
    ReactionFn fn_;
    std::optional<convex::Box> probe_box_;
};

/// Empirical Lipschitz constant of v -> phi(t, x, v) over the box U, from
/// random pairs with t drawn from [t_lo, t_hi] and x from `x_samples`.
double estimate_lipschitz(const ReactionTerm& phi, const convex::Box& probe, double t_lo, double t_hi,
                          const std::vector<Vector>& x_samples, std::size_t n_pairs = 2000,
                          std::uint64_t seed = 0);

}  // namespace invflow

namespace invflow::tangency {

inline constexpr double kDefaultMarginTol = 1e-9;
inline constexpr std::size_t kDefaultBoundaryDensity = 32;
inline constexpr std::size_t kHighDimBoundarySamples = 10000;

struct Witness {
    double t = 0.0;
    Vector x;
    Vector omega;
    Vector lambda;
};

struct TangencyReport {
    bool certified = false;
    double worst_margin = -std::numeric_limits<double>::infinity();
    Witness worst_witness;
    std::size_t samples_checked = 0;
    double margin_tol = kDefaultMarginTol;
    std::size_t boundary_density = kDefaultBoundaryDensity;
    std::size_t boundary_points = 0;
};

struct TangencyOptions {
    std::size_t boundary_density = kDefaultBoundaryDensity;
    double margin_tol = kDefaultMarginTol;
    std::uint64_t seed = 0;
};

/// A boundary point omega of W paired with one supporting direction lambda.
struct BoundarySample {
    Vector omega;
    Vector lambda;
};

/// Boundary points with the face normal each was sampled on (box/polytope)
/// or the outward sphere normal (ball). Every supporting vector at a sampled
/// point is a nonnegative combination of face normals checked at that point.
std::vector<BoundarySample> boundary_samples(const convex::ConvexSet& w, std::size_t boundary_density,
                                             std::uint64_t seed = 0);

/// Sampled falsifier/certifier for <lambda, phi(t, x, omega)> <= 0 on the boundary of W.
TangencyReport check_tangency(const ReactionTerm& phi, const convex::ConvexSet& w,
                              const std::vector<double>& t_samples, const std::vector<Vector>& x_samples,
                              const TangencyOptions& options = {});

struct TrajectoryPoint {
    double t = 0.0;
    Vector x;
    Vector f;
};

/// Max of <lambda(f)/|lambda(f)|, phi(t, x, omega(f))> over points outside W.
/// nullopt means no point lay outside W (the check is vacuous).
std::optional<double> tangency_margin_along_trajectory(const ReactionTerm& phi, const convex::ConvexSet& w,
                                                       const std::vector<TrajectoryPoint>& trajectory);

}  // namespace invflow::tangency
