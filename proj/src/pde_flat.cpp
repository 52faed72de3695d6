#include "invflow/pde_flat.hpp"

#include <algorithm>
#include <cmath>

#include "stepper.hpp"

namespace invflow::flat {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t face_nodes(const Domain& d, std::size_t axis) {
    return d.dim() == 1 ? 1 : d.nodes_along(1 - axis);
}

// Node on face (axis, side) with tangential index q, stepped `inward` nodes into the domain.
std::size_t face_node(const Domain& d, std::size_t axis, std::size_t side, std::size_t q, std::size_t inward) {
    const std::size_t n = d.nodes_along(axis);
    const std::size_t along = side == 0 ? inward : n - 1 - inward;
    if (d.dim() == 1) return along;
    return axis == 0 ? d.node(along, q) : d.node(q, along);
}

void check_oblique(const convex::ConvexSet& w, const Oblique& bc, std::span<const double> f,
                   std::span<const double> h) {
    const auto proj = w.project(f);
    if (!(proj.dist > 0.0)) return;
    Vector lambda_bar(f.size());
    bc.lambda_bar(f, lambda_bar);
    const double scale = std::max(1.0, norm(proj.lambda));
    if (distance(lambda_bar, proj.lambda) > kObliqueTol * scale)
        throw ObliqueViolation("oblique boundary: lambda_bar(f) differs from the deviation lambda(f)");
    if (std::abs(dot(lambda_bar, h)) > kObliqueTol * std::max(1.0, norm(lambda_bar) * norm(h)))
        throw ObliqueViolation("oblique boundary: <lambda_bar(f), h> is not zero");
}

class FlatOperator {
public:
    explicit FlatOperator(const Scenario& sc)
        : sc_(sc), d_(sc.domain), m_(sc.phi.dim()), pinned_(d_.node_count(), 0) {
        points_.reserve(d_.node_count());
        for (std::size_t n = 0; n < d_.node_count(); ++n) points_.push_back(d_.point(n));
        if (std::holds_alternative<Dirichlet>(sc.bc) && !d_.periodic())
            for (std::size_t n = 0; n < d_.node_count(); ++n) pinned_[n] = d_.on_boundary(n) ? 1 : 0;
        zeta_.resize(d_.dim());
        phi_.resize(m_);
        lap_.resize(m_);
        drift_.resize(m_);
    }

    void pin(FieldState& y) const {
        if (!std::holds_alternative<Dirichlet>(sc_.bc) || d_.periodic()) return;
        const auto& g = std::get<Dirichlet>(sc_.bc).g;
        for (std::size_t n = 0; n < d_.node_count(); ++n)
            if (pinned_[n]) g(y.t, points_[n], y.at(n));
    }

    void rhs(FieldState& y, std::vector<double>& out) {
        apply_boundary(y, d_, sc_.bc, sc_.set, ghost_);
        out.assign(y.values.size(), 0.0);
        const std::size_t dim = d_.dim();
        for (std::size_t node = 0; node < d_.node_count(); ++node) {
            if (pinned_[node]) continue;
            const auto f = y.at(node);
            const auto idx = d_.index(node);
            std::fill(lap_.begin(), lap_.end(), 0.0);
            std::fill(drift_.begin(), drift_.end(), 0.0);
            if (sc_.zeta) sc_.zeta(y.t, points_[node], zeta_);
            for (std::size_t a = 0; a < dim; ++a) {
                const auto fm = neighbour(y, idx, a, 0);
                const auto fp = neighbour(y, idx, a, 1);
                const double h = d_.spacing(a);
                const double h2 = h * h;
                for (std::size_t c = 0; c < m_; ++c) {
                    lap_[c] += (fm[c] - 2.0 * f[c] + fp[c]) / h2;
                    if (sc_.zeta) drift_[c] += zeta_[a] * ((fp[c] - fm[c]) / (2.0 * h));
                }
            }
            sc_.phi(y.t, points_[node], f, phi_);
            double* o = out.data() + node * m_;
            for (std::size_t c = 0; c < m_; ++c) o[c] = lap_[c] + drift_[c] + phi_[c];
        }
    }

    std::span<const double> neighbour(const FieldState& y, const std::array<std::size_t, 2>& idx, std::size_t a,
                                      std::size_t side) const {
        const std::size_t n = d_.nodes_along(a);
        auto at = [&](std::size_t i_along) {
            std::array<std::size_t, 2> j = idx;
            j[a] = i_along;
            return y.at(d_.dim() == 1 ? j[0] : d_.node(j[0], j[1]));
        };
        if (side == 0) {
            if (idx[a] > 0) return at(idx[a] - 1);
            if (d_.periodic()) return at(n - 1);
        } else {
            if (idx[a] + 1 < n) return at(idx[a] + 1);
            if (d_.periodic()) return at(0);
        }
        const std::size_t q = d_.dim() == 1 ? 0 : idx[1 - a];
        return ghost_.value(a, side, q, m_);
    }

private:
    const Scenario& sc_;
    const Domain& d_;
    std::size_t m_;
    std::vector<Vector> points_;
    std::vector<char> pinned_;
    GhostLayer ghost_;
    Vector zeta_, phi_, lap_, drift_;
};

void validate(const Scenario& sc) {
    if (sc.domain.dim() == 0) throw InvalidScenario("scenario: domain is not set");
    if (!sc.phi) throw InvalidScenario("scenario: reaction term is not set");
    if (!sc.f0) throw InvalidScenario("scenario: initial value is not set");
    if (sc.phi.dim() != sc.set.dim()) throw InvalidScenario("scenario: reaction term and set dimensions differ");
    if (!(sc.T > 0.0)) throw InvalidScenario("scenario: horizon T must be positive");
    if (sc.dt && !(*sc.dt > 0.0)) throw InvalidScenario("scenario: dt must be positive");
    if (const auto* d = std::get_if<Dirichlet>(&sc.bc); d && !d->g)
        throw InvalidScenario("scenario: Dirichlet data missing");
    if (const auto* o = std::get_if<Oblique>(&sc.bc); o && (!o->h || !o->lambda_bar))
        throw InvalidScenario("scenario: oblique data missing");
}

}  // namespace

void apply_boundary(FieldState& state, const Domain& domain, const BoundaryCondition& bc,
                    const convex::ConvexSet& w, GhostLayer& ghost) {
    const std::size_t m = state.components;
    const std::size_t dim = domain.dim();
    if (!all_finite(state.values)) throw Instability("apply_boundary: non-finite state");
    if (ghost.faces.size() != dim) ghost.faces.assign(dim, {});
    for (std::size_t a = 0; a < dim; ++a)
        for (auto& face : ghost.faces[a]) face.resize(face_nodes(domain, a) * m);
    if (domain.periodic()) return;

    std::visit(Overloaded{
                   [&](const Dirichlet& d) {
                       for (std::size_t n = 0; n < domain.node_count(); ++n)
                           if (domain.on_boundary(n)) d.g(state.t, domain.point(n), state.at(n));
                   },
                   [&](const NeumannZero&) {
                       for (std::size_t a = 0; a < dim; ++a)
                           for (std::size_t side = 0; side < 2; ++side)
                               for (std::size_t q = 0; q < face_nodes(domain, a); ++q) {
                                   const auto inner = state.at(face_node(domain, a, side, q, 1));
                                   std::copy(inner.begin(), inner.end(), ghost.faces[a][side].begin() + q * m);
                               }
                   },
                   [&](const Oblique& o) {
                       Vector flux(m);
                       for (std::size_t a = 0; a < dim; ++a)
                           for (std::size_t side = 0; side < 2; ++side)
                               for (std::size_t q = 0; q < face_nodes(domain, a); ++q) {
                                   const std::size_t b = face_node(domain, a, side, q, 0);
                                   const auto fb = state.at(b);
                                   const auto inner = state.at(face_node(domain, a, side, q, 1));
                                   o.h(state.t, domain.point(b), fb, flux);
                                   check_oblique(w, o, fb, flux);
                                   const double two_h = 2.0 * domain.spacing(a);
                                   for (std::size_t c = 0; c < m; ++c)
                                       ghost.faces[a][side][q * m + c] = inner[c] + two_h * flux[c];
                               }
                   },
               },
               bc);
}

double cfl_bound(const Domain& domain, Integrator integrator) {
    return detail::stability_bound(domain.min_spacing(), domain.dim(), 1.0, integrator);
}

FieldState initial_state(const Scenario& sc) {
    FieldState s;
    s.t = 0.0;
    s.components = sc.phi.dim();
    s.values.assign(sc.domain.node_count() * s.components, 0.0);
    for (std::size_t n = 0; n < sc.domain.node_count(); ++n) sc.f0(sc.domain.point(n), s.at(n));
    return s;
}

double auto_time_step(const Scenario& sc) {
    validate(sc);
    const FieldState f0 = initial_state(sc);
    std::vector<Vector> xs;
    const std::size_t stride = std::max<std::size_t>(1, sc.domain.node_count() / 64);
    for (std::size_t n = 0; n < sc.domain.node_count(); n += stride) xs.push_back(sc.domain.point(n));
    return detail::estimate_step(sc.phi, sc.set, f0, xs, sc.domain.min_spacing(), sc.domain.dim(), 1.0, sc.T,
                                 sc.seed);
}

std::vector<double> rhs(const FieldState& state, const Scenario& sc) {
    validate(sc);
    FlatOperator op(sc);
    FieldState y = state;
    op.pin(y);
    std::vector<double> out;
    op.rhs(y, out);
    return out;
}

FieldState step(const FieldState& state, const Scenario& sc, double dt) {
    validate(sc);
    if (!(dt > 0.0) || dt > cfl_bound(sc.domain, sc.integrator) * (1.0 + 1e-12))
        throw InvalidArgument("step: dt must be positive and within the CFL bound");
    FlatOperator op(sc);
    detail::StepKernel kernel{[&](FieldState& y) { op.pin(y); },
                              [&](FieldState& y, std::vector<double>& out) { op.rhs(y, out); }};
    FieldState y = state;
    detail::Stepper stepper(y.values.size());
    stepper.advance(y, dt, sc.integrator, kernel);
    return y;
}

double grid_noise_floor(const Scenario& sc) {
    const FieldState f0 = initial_state(sc);
    const Domain& d = sc.domain;
    const std::size_t m = f0.components;
    double worst = 0.0;
    for (std::size_t n = 0; n < d.node_count(); ++n) {
        if (d.on_boundary(n)) continue;
        const auto idx = d.index(n);
        for (std::size_t c = 0; c < m; ++c) {
            double lap = 0.0;
            for (std::size_t a = 0; a < d.dim(); ++a) {
                const std::size_t len = d.nodes_along(a);
                auto at = [&](std::size_t i) {
                    std::array<std::size_t, 2> j = idx;
                    j[a] = (i + len) % len;
                    return f0.at(d.dim() == 1 ? j[0] : d.node(j[0], j[1]))[c];
                };
                const double h = d.spacing(a);
                lap += (at(idx[a] - 1) - 2.0 * at(idx[a]) + at(idx[a] + 1)) / (h * h);
            }
            worst = std::max(worst, std::abs(lap));
        }
    }
    const double h = d.min_spacing();
    return std::max(1e-8, h * h * worst / 12.0);
}

SolveResult solve(const Scenario& sc, const SolveOptions& options) {
    validate(sc);
    if (std::holds_alternative<Oblique>(sc.bc) && sc.domain.periodic())
        throw InvalidScenario("scenario: oblique data on a periodic domain");
    const double dt = sc.dt ? detail::finalize_time_step(*sc.dt, 0.0, sc.T) : auto_time_step(sc);
    if (dt > cfl_bound(sc.domain, sc.integrator) * (1.0 + 1e-12))
        throw InvalidScenario("scenario: dt exceeds the explicit stability bound");

    FlatOperator op(sc);
    detail::StepKernel kernel{[&](FieldState& y) { op.pin(y); },
                              [&](FieldState& y, std::vector<double>& out) { op.rhs(y, out); }};
    FieldState y = initial_state(sc);
    auto warnings = detail::initial_value_warnings(y, sc.set);

    const double noise = grid_noise_floor(sc);
    const double threshold = options.exit_threshold.value_or(10.0 * noise);
    diag::Monitor monitor(sc.set, threshold, diag::FlatGeometry{&sc.domain});
    SolveResult result = detail::run(std::move(y), sc.T, dt, sc.integrator, kernel, monitor, options);
    result.grid_noise = noise;
    result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
    return result;
}

}  // namespace invflow::flat
