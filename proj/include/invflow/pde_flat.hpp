#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "invflow/convex_set.hpp"
#include "invflow/diagnostics.hpp"
#include "invflow/field.hpp"
#include "invflow/tangency.hpp"

namespace invflow::flat {

/// f_t = Laplacian f + zeta . grad f + phi(t, x, f) on an interval or rectangle.
struct Scenario {
    Domain domain;
    convex::ConvexSet set = convex::ConvexSet::box({0.0}, {1.0});
    ReactionTerm phi;
    SpaceTimeFn zeta;  ///< empty means no drift
    BoundaryCondition bc = NeumannZero{};  ///< ignored on periodic domains
    InitialFn f0;
    double T = 1.0;
    std::optional<double> dt;  ///< nullopt selects the automatic step
    Integrator integrator = Integrator::rk4;
    std::uint64_t seed = 0;
};

/// Ghost values one node outside each face. faces[axis][side] holds
/// (face node count) x m values; side 0 is the lower face.
struct GhostLayer {
    std::vector<std::array<std::vector<double>, 2>> faces;

    [[nodiscard]] std::span<const double> value(std::size_t axis, std::size_t side, std::size_t face_index,
                                                std::size_t m) const {
        return {faces[axis][side].data() + face_index * m, m};
    }
};

inline constexpr double kObliqueTol = 1e-9;
inline constexpr double kOverflowGuard = 1e12;

/// Fill the ghost layer (Neumann mirror, oblique flux) or pin boundary nodes
/// (Dirichlet). Oblique data are checked against the orthogonality
/// requirement and throw ObliqueViolation when it fails.
void apply_boundary(FieldState& state, const Domain& domain, const BoundaryCondition& bc,
                    const convex::ConvexSet& w, GhostLayer& ghost);

/// Largest stable explicit step for the diffusion stencil.
double cfl_bound(const Domain& domain, Integrator integrator);

/// 0.2 h^2 / (2 dim), reduced when the reaction term is stiff, then shrunk
/// so that it divides T.
double auto_time_step(const Scenario& scenario);

FieldState initial_state(const Scenario& scenario);

/// Right-hand side of the discretized system at `state` (boundary applied first).
std::vector<double> rhs(const FieldState& state, const Scenario& scenario);

/// One explicit step. Throws Instability on overflow or non-finite values.
FieldState step(const FieldState& state, const Scenario& scenario, double dt);

/// Integrate to T, monitoring every output step.
SolveResult solve(const Scenario& scenario, const SolveOptions& options = {});

/// Noise floor used for the exit threshold: max(1e-8, h^2 max|Laplacian_h f0| / 12).
double grid_noise_floor(const Scenario& scenario);

}  // namespace invflow::flat
