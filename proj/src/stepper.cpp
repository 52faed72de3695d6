#include "stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invflow::detail {

namespace {
constexpr double kOverflowGuard = 1e12;
constexpr double kRk4RealStability = 2.785;
}  // namespace

Stepper::Stepper(std::size_t size) : k1_(size), k2_(size), k3_(size), k4_(size) {}

void Stepper::advance(FieldState& y, double dt, Integrator integrator, const StepKernel& kernel) {
    const std::size_t n = y.values.size();
    stage_ = y;
    next_.components = y.components;
    next_.values.resize(n);

    if (integrator == Integrator::euler) {
        kernel.pin(stage_);
        kernel.rhs(stage_, k1_);
        for (std::size_t i = 0; i < n; ++i) next_.values[i] = stage_.values[i] + dt * k1_[i];
    } else {
        kernel.pin(stage_);
        kernel.rhs(stage_, k1_);
        auto stage_from = [&](const std::vector<double>& k, double frac) {
            stage_.t = y.t + frac * dt;
            for (std::size_t i = 0; i < n; ++i) stage_.values[i] = y.values[i] + frac * dt * k[i];
            kernel.pin(stage_);
        };
        stage_from(k1_, 0.5);
        kernel.rhs(stage_, k2_);
        stage_from(k2_, 0.5);
        kernel.rhs(stage_, k3_);
        stage_from(k3_, 1.0);
        kernel.rhs(stage_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            next_.values[i] = y.values[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    next_.t = y.t + dt;
    kernel.pin(next_);
    guard(next_);
    std::swap(y.values, next_.values);
    y.t = next_.t;
}

void guard(const FieldState& y) {
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        const double v = y.values[i];
        if (!std::isfinite(v) || std::abs(v) > kOverflowGuard) {
            std::ostringstream msg;
            msg << "instability at t=" << y.t << ": value " << v << " at node "
                << i / std::max<std::size_t>(1, y.components);
            throw Instability(msg.str());
        }
    }
}

double diffusion_time_step(double h, std::size_t dim, double g_min) {
    return 0.2 * h * h * g_min / (2.0 * static_cast<double>(dim));
}

double stability_bound(double h, std::size_t dim, double g_min, Integrator integrator) {
    const double spectral = 4.0 * static_cast<double>(dim) / (g_min * h * h);
    return (integrator == Integrator::rk4 ? kRk4RealStability : 2.0) / spectral;
}

double finalize_time_step(double dt0, double lipschitz, double T) {
    double dt = dt0;
    if (lipschitz > 0.0) dt = std::min(dt, 0.1 / lipschitz);
    const double steps = std::max(1.0, std::ceil(T / dt - 1e-9));
    return T / steps;
}

convex::Box lipschitz_probe(const ReactionTerm& phi, const convex::ConvexSet& w, const FieldState& f0) {
    if (phi.lipschitz_probe_box()) return *phi.lipschitz_probe_box();
    auto [lo, hi] = w.bounding_box();
    for (std::size_t n = 0; n < f0.node_count(); ++n) {
        const auto v = f0.at(n);
        for (std::size_t k = 0; k < lo.size(); ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
        }
    }
    return {lo, hi};
}

double estimate_step(const ReactionTerm& phi, const convex::ConvexSet& w, const FieldState& f0,
                     const std::vector<Vector>& x_samples, double h, std::size_t dim, double g_min, double T,
                     std::uint64_t seed) {
    const auto probe = lipschitz_probe(phi, w, f0);
    const double c = estimate_lipschitz(phi, probe, 0.0, T, x_samples, 2000, seed);
    return finalize_time_step(diffusion_time_step(h, dim, g_min), c, T);
}

SolveResult run(FieldState y, double T, double dt, Integrator integrator, const StepKernel& kernel,
                diag::Monitor& monitor, const SolveOptions& options) {
    SolveResult result;
    result.dt = dt;
    result.steps = static_cast<std::size_t>(std::llround(T / dt));
    if (result.steps == 0) result.steps = 1;
    result.cadence = options.cadence ? options.cadence : std::max<std::size_t>(1, result.steps / 1000);

    const double t0 = y.t;
    monitor.observe(y);
    if (options.keep_trajectory) result.trajectory.frames.push_back(y);

    Stepper stepper(y.values.size());
    for (std::size_t k = 1; k <= result.steps; ++k) {
        try {
            stepper.advance(y, dt, integrator, kernel);
        } catch (const Instability& e) {
            result.failed = true;
            result.failure = e.what();
            break;
        } catch (const ObliqueViolation& e) {
            result.failed = true;
            result.failure = e.what();
            break;
        }
        y.t = t0 + static_cast<double>(k) * dt;
        if (k % result.cadence == 0 || k == result.steps) {
            monitor.observe(y);
            if (options.keep_trajectory) result.trajectory.frames.push_back(y);
        }
    }
    result.verdict = monitor.verdict();
    result.final_state = std::move(y);
    return result;
}

std::vector<std::string> initial_value_warnings(const FieldState& f0, const convex::ConvexSet& w) {
    double worst = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < f0.node_count(); ++n) {
        const double d = w.distance(f0.at(n));
        if (d > convex::kMembershipTol) {
            ++count;
            worst = std::max(worst, d);
        }
    }
    if (count == 0) return {};
    std::ostringstream msg;
    msg << "initial value outside W at " << count << " node(s), max distance " << worst;
    return {msg.str()};
}

}  // namespace invflow::detail
