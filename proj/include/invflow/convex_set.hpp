#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "invflow/common.hpp"

namespace invflow::convex {

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kActivityTol = 1e-8;
inline constexpr double kUnitNormTol = 1e-12;

struct Box {
    Vector lo;
    Vector hi;
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

/// Intersection of half-spaces <normals[i], x> <= offsets[i]; normals are unit.
struct Polytope {
    std::vector<Vector> normals;
    Vector offsets;
};

/// Nearest point omega(v), distance dist_W(v) and deviation lambda(v) = v - omega(v).
struct Projection {
    Vector omega;
    double dist = 0.0;
    Vector lambda;
};

/// Generators of the cone of supporting vectors at a point of W.
/// An empty list means the point is interior and no supporting vector exists.
struct NormalCone {
    std::vector<Vector> generators;
    bool is_singleton = false;

    [[nodiscard]] bool interior() const { return generators.empty(); }
};

struct HalfSpace {
    Vector normal;
    double offset = 0.0;
};

struct DykstraStats {
    std::size_t sweeps = 0;
    bool converged = false;
    double max_violation = 0.0;
};

/// Closed convex set W in R^m. Immutable after construction; every factory
/// validates the construction invariants and throws InvalidSet on failure.
class ConvexSet {
public:
    using Shape = std::variant<Box, Ball, Polytope>;

    static ConvexSet box(Vector lo, Vector hi);
    static ConvexSet ball(Vector center, double radius);
    static ConvexSet polytope(std::vector<Vector> normals, Vector offsets);
    static ConvexSet from_shape(Shape shape);

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] bool is_box() const { return std::holds_alternative<Box>(shape_); }
    [[nodiscard]] bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
    [[nodiscard]] bool is_polytope() const { return std::holds_alternative<Polytope>(shape_); }

    /// Box corners (m <= 12) or polytope vertices (m <= 3); empty otherwise.
    [[nodiscard]] const std::vector<Vector>& vertices() const { return vertices_; }

    /// Constraint form; a box contributes 2m half-spaces, a ball none.
    [[nodiscard]] std::vector<HalfSpace> half_spaces() const;

    [[nodiscard]] const std::pair<Vector, Vector>& bounding_box() const { return bbox_; }

    [[nodiscard]] Projection project(std::span<const double> v) const;

    /// Allocation-light nearest point; `omega` must have size dim().
    void nearest_point(std::span<const double> v, std::span<double> omega) const;

    [[nodiscard]] double distance(std::span<const double> v) const;

    [[nodiscard]] bool contains(std::span<const double> v, double tol = kMembershipTol) const;

    [[nodiscard]] NormalCone normal_cone(std::span<const double> omega,
                                         double activity_tol = kActivityTol) const;

    /// Largest sampled value of <lambda, sigma - omega> over sigma in W, also
    /// scanning every box corner / polytope vertex. A value <= tolerance
    /// certifies lambda as a supporting vector at sampling resolution.
    [[nodiscard]] double validate_supporting(std::span<const double> omega,
                                             std::span<const double> lambda,
                                             std::size_t n_samples,
                                             std::uint64_t seed = 0) const;

    /// Random point of W (uniform for box and ball).
    [[nodiscard]] Vector sample(std::mt19937_64& rng) const;

    /// Random point of the boundary of W.
    [[nodiscard]] Vector sample_boundary(std::mt19937_64& rng) const;

    /// Cyclic Dykstra projection onto the polytope; exposed for diagnostics.
    DykstraStats dykstra(std::span<const double> v, std::span<double> omega,
                         std::size_t max_sweeps = 100000) const;

private:
    explicit ConvexSet(Shape shape);
    void validate();
    [[nodiscard]] std::pair<Vector, Vector> compute_bounding_box() const;

    Shape shape_;
    std::size_t dim_ = 0;
    std::vector<Vector> vertices_;
    std::pair<Vector, Vector> bbox_;
};

inline Projection project(const ConvexSet& w, std::span<const double> v) { return w.project(v); }

inline bool contains(const ConvexSet& w, std::span<const double> v, double tol = kMembershipTol) {
    return w.contains(v, tol);
}

inline NormalCone normal_cone(const ConvexSet& w, std::span<const double> omega,
                              double activity_tol = kActivityTol) {
    return w.normal_cone(omega, activity_tol);
}

inline double validate_supporting(const ConvexSet& w, std::span<const double> omega,
                                  std::span<const double> lambda, std::size_t n_samples,
                                  std::uint64_t seed = 0) {
    return w.validate_supporting(omega, lambda, n_samples, seed);
}

/// Vertices of {x : <n_i, x> <= b_i} for m <= 3 by enumerating m-subsets of
/// constraints. Duplicates are merged.
std::vector<Vector> enumerate_vertices(const std::vector<Vector>& normals, const Vector& offsets);

}  // namespace invflow::convex
