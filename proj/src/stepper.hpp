#pragma once

// Time integration shared by the flat and covariant solvers.

#include <functional>
#include <vector>

#include "invflow/convex_set.hpp"
#include "invflow/diagnostics.hpp"
#include "invflow/field.hpp"
#include "invflow/tangency.hpp"

namespace invflow::detail {

struct StepKernel {
    /// Overwrite pinned (Dirichlet) nodes for time y.t.
    std::function<void(FieldState& y)> pin;
    /// dy/dt at y (already pinned); pinned nodes must receive 0.
    std::function<void(FieldState& y, std::vector<double>& dydt)> rhs;
};

class Stepper {
public:
    explicit Stepper(std::size_t size);

    /// Advance `y` by dt. On Instability `y` is left at its last good value.
    void advance(FieldState& y, double dt, Integrator integrator, const StepKernel& kernel);

private:
    std::vector<double> k1_, k2_, k3_, k4_;
    FieldState stage_;
    FieldState next_;
};

void guard(const FieldState& y);

/// 0.2 h^2 g_min / (2 dim).
double diffusion_time_step(double h, std::size_t dim, double g_min);

/// Explicit stability bound of the diffusion stencil, eigenvalues in [-4 dim/(g h^2), 0].
double stability_bound(double h, std::size_t dim, double g_min, Integrator integrator);

/// Lower the diffusion step when the reaction term is stiffer, then make it divide T.
double finalize_time_step(double dt0, double lipschitz, double T);

/// Bounding box of W enlarged to contain the initial field, for Lipschitz probing.
convex::Box lipschitz_probe(const ReactionTerm& phi, const convex::ConvexSet& w, const FieldState& f0);

double estimate_step(const ReactionTerm& phi, const convex::ConvexSet& w, const FieldState& f0,
                     const std::vector<Vector>& x_samples, double h, std::size_t dim, double g_min, double T,
                     std::uint64_t seed);

/// Drive the integration to T, feeding the monitor every `cadence` steps.
SolveResult run(FieldState y, double T, double dt, Integrator integrator, const StepKernel& kernel,
                diag::Monitor& monitor, const SolveOptions& options);

/// Warning text when some node of f0 lies outside W.
std::vector<std::string> initial_value_warnings(const FieldState& f0, const convex::ConvexSet& w);

}  // namespace invflow::detail
