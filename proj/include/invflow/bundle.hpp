#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "invflow/convex_set.hpp"
#include "invflow/diagnostics.hpp"
#include "invflow/field.hpp"
#include "invflow/tangency.hpp"

namespace invflow::bundle {

using MetricFn = std::function<double(double x)>;
using ConnectionFn = std::function<Eigen::MatrixXd(double x)>;
/// Scalar drift coefficient zeta(t, x) of the vector field zeta * d/dx.
using ScalarDriftFn = std::function<double(double t, double x)>;

/// Base manifold [0, L] with metric g(x) dx^2, sampled at `nodes` points.
struct BaseGeometry {
    double L = 1.0;
    MetricFn g;
    std::size_t nodes = 9;

    [[nodiscard]] double spacing() const { return L / static_cast<double>(nodes - 1); }
    [[nodiscard]] double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }
};

/// Connection coefficient A(x) in a trivialization of a rank-m bundle.
/// Metric compatibility means A(x) is skew-symmetric.
class Connection {
public:
    Connection() = default;
    Connection(std::size_t dim, ConnectionFn a);

    static Connection flat(std::size_t dim);
    /// A(x) = omega0 * J acting in the (e1, e2) plane.
    static Connection constant_rotation(std::size_t dim, double omega0);

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] Eigen::MatrixXd operator()(double x) const { return a_(x); }

    /// Throws InvalidScenario unless A + A^T = 0 within 1e-12 at every node.
    void validate(const BaseGeometry& geometry) const;

private:
    std::size_t dim_ = 0;
    ConnectionFn a_;
};

/// Solution operator P of dP/dx = -A(x) P from x0 to x1, integrated with RK4.
/// `max_step` bounds the substep; 0 picks one from the size of A along the path.
Eigen::MatrixXd transport_matrix(const Connection& connection, double x0, double x1, double max_step = 0.0);

/// Parallel transport of v along [x0, x1].
Vector parallel_transport(const Connection& connection, double x0, double x1, std::span<const double> v);

/// Precomputed covariant discretization: per-node metric, Christoffel symbol
/// g'/(2g) and transports between neighbouring nodes. Differences are taken
/// after transporting neighbours into the fiber of the node, so the stencil
/// is gauge covariant and reduces to the flat stencil when A = 0.
class BundleOperator {
public:
    BundleOperator(const BaseGeometry& geometry, const Connection& connection);

    [[nodiscard]] std::size_t nodes() const { return x_.size(); }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] double spacing() const { return h_; }
    [[nodiscard]] double x(std::size_t i) const { return x_[i]; }
    [[nodiscard]] double metric(std::size_t i) const { return g_[i]; }
    [[nodiscard]] double min_metric() const;
    [[nodiscard]] double christoffel(std::size_t i) const { return gamma_[i]; }
    /// Transport from node i+1 into the fiber over node i.
    [[nodiscard]] const Eigen::MatrixXd& from_right(std::size_t i) const { return right_[i]; }
    /// Transport from node i-1 into the fiber over node i.
    [[nodiscard]] const Eigen::MatrixXd& from_left(std::size_t i) const { return left_[i]; }

    /// Neighbour values transported into the fiber over node i. At the end
    /// nodes the missing neighbour is the covariant-Neumann ghost, i.e. the
    /// mirror of the interior neighbour, making D_x f vanish there.
    void neighbours(const FieldState& state, std::size_t i, std::span<double> left, std::span<double> right) const;

    /// Covariant Laplacian g^{-1} (D_x D_x f - Gamma D_x f) at every node,
    /// with covariant-Neumann ghosts at both ends.
    void laplacian(const FieldState& state, std::span<double> out) const;

    /// Covariant derivative D_x f at node i (central, transported).
    void covariant_derivative(const FieldState& state, std::size_t i, std::span<double> out) const;

    /// Covariant outward normal derivative at an end node, one-sided and
    /// second order: nu = -g^{-1/2} d/dx at x = 0 and +g^{-1/2} d/dx at x = L.
    [[nodiscard]] Vector normal_derivative(const FieldState& state, std::size_t end_node) const;

private:
    std::size_t dim_ = 0;
    double h_ = 0.0;
    std::vector<double> x_;
    std::vector<double> g_;
    std::vector<double> gamma_;
    std::vector<Eigen::MatrixXd> right_;
    std::vector<Eigen::MatrixXd> left_;
};

/// Covariant Laplacian of a sampled section.
std::vector<double> covariant_laplacian(const FieldState& state, const BaseGeometry& geometry,
                                        const Connection& connection);

struct BundleScenario {
    BaseGeometry geometry;
    Connection connection;
    convex::ConvexSet set = convex::ConvexSet::ball({0.0}, 1.0);
    ReactionTerm phi;
    ScalarDriftFn zeta;
    BoundaryCondition bc = NeumannZero{};
    InitialFn f0;
    double T = 1.0;
    std::optional<double> dt;
    Integrator integrator = Integrator::rk4;
    std::uint64_t seed = 0;
};

/// Check the bundle-mode contract: origin-centred ball, skew connection,
/// positive metric, Neumann or Dirichlet data, consistent dimensions.
void validate(const BundleScenario& scenario);

FieldState initial_state(const BundleScenario& scenario);

SolveResult solve_bundle(const BundleScenario& scenario, const SolveOptions& options = {});

}  // namespace invflow::bundle
