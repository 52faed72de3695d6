#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "invflow/common.hpp"

namespace invflow {

/// (t, x) -> out; used for drift fields and Dirichlet data.
using SpaceTimeFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
/// x -> out; initial section.
using InitialFn = std::function<void(std::span<const double> x, std::span<double> out)>;
/// (t, x, f) -> out; prescribed normal derivative of oblique conditions.
using BoundaryFluxFn =
    std::function<void(double t, std::span<const double> x, std::span<const double> f, std::span<double> out)>;
/// f -> out; the lambda-bar map of oblique conditions.
using FiberMapFn = std::function<void(std::span<const double> f, std::span<double> out)>;

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t cells = 8;
};

/// Uniform grid on an interval or rectangle. Non-periodic axes carry cells+1
/// nodes including both endpoints; periodic axes carry `cells` nodes.
class Domain {
public:
    Domain() = default;
    Domain(std::vector<Axis> axes, bool periodic);

    [[nodiscard]] std::size_t dim() const { return axes_.size(); }
    [[nodiscard]] bool periodic() const { return periodic_; }
    [[nodiscard]] const Axis& axis(std::size_t j) const { return axes_[j]; }
    [[nodiscard]] double spacing(std::size_t j) const { return spacing_[j]; }
    [[nodiscard]] double min_spacing() const;
    [[nodiscard]] std::size_t nodes_along(std::size_t j) const { return extent_[j]; }
    [[nodiscard]] std::size_t node_count() const;

    [[nodiscard]] std::array<std::size_t, 2> index(std::size_t node) const;
    [[nodiscard]] std::size_t node(std::size_t i, std::size_t j = 0) const { return i + j * extent_[0]; }
    [[nodiscard]] double coordinate(std::size_t axis, std::size_t i) const {
        return axes_[axis].lo + static_cast<double>(i) * spacing_[axis];
    }
    /// Spatial point of a node (dim() entries).
    [[nodiscard]] Vector point(std::size_t node) const;
    [[nodiscard]] bool on_boundary(std::size_t node) const;

private:
    std::vector<Axis> axes_;
    bool periodic_ = false;
    std::vector<double> spacing_;
    std::vector<std::size_t> extent_;
};

/// Discretized section f(t, .): node-major values, `components` entries per node.
struct FieldState {
    double t = 0.0;
    std::size_t components = 0;
    std::vector<double> values;

    [[nodiscard]] std::size_t node_count() const { return components ? values.size() / components : 0; }
    [[nodiscard]] std::span<double> at(std::size_t node) {
        return {values.data() + node * components, components};
    }
    [[nodiscard]] std::span<const double> at(std::size_t node) const {
        return {values.data() + node * components, components};
    }
};

struct Trajectory {
    std::vector<FieldState> frames;
};

struct Dirichlet {
    SpaceTimeFn g;
};

struct NeumannZero {};

/// Normal derivative prescribed as h(t, x, f); lambda_bar must agree with the
/// deviation lambda(f) and be orthogonal to h whenever f lies outside W.
struct Oblique {
    BoundaryFluxFn h;
    FiberMapFn lambda_bar;
};

using BoundaryCondition = std::variant<Dirichlet, NeumannZero, Oblique>;

enum class Integrator { rk4, euler };

}  // namespace invflow
