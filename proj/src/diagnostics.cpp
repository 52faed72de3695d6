#include "invflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invflow/bundle.hpp"

namespace invflow::diag {
namespace {

// Ties within this relative band count as maximal pairs.
constexpr double kTieTol = 1e-12;

double flat_hopf(const FieldState& state, std::span<const double> lambda, std::size_t node, const Domain& d) {
    const auto idx = d.index(node);
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t m = state.components;
    for (std::size_t a = 0; a < d.dim(); ++a) {
        const std::size_t n = d.nodes_along(a);
        if (idx[a] != 0 && idx[a] + 1 != n) continue;
        const bool lower = idx[a] == 0;
        auto at = [&](std::size_t inward) {
            std::array<std::size_t, 2> j = idx;
            j[a] = lower ? inward : n - 1 - inward;
            return state.at(d.dim() == 1 ? j[0] : d.node(j[0], j[1]));
        };
        const auto f0 = at(0), f1 = at(1), f2 = at(2);
        const double h = d.spacing(a);
        double value = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            // derivative along the outward normal, one-sided second order
            const double dnu = (3.0 * f0[c] - 4.0 * f1[c] + f2[c]) / (2.0 * h);
            value += lambda[c] * dnu;
        }
        best = std::max(best, value);
    }
    return best;
}

}  // namespace

std::size_t node_count(const GeometryContext& ctx) {
    if (const auto* f = std::get_if<FlatGeometry>(&ctx)) return f->domain->node_count();
    return std::get<CovariantGeometry>(ctx).op->nodes();
}

Vector node_point(const GeometryContext& ctx, std::size_t node) {
    if (const auto* f = std::get_if<FlatGeometry>(&ctx)) return f->domain->point(node);
    return {std::get<CovariantGeometry>(ctx).op->x(node)};
}

bool node_on_boundary(const GeometryContext& ctx, std::size_t node) {
    if (const auto* f = std::get_if<FlatGeometry>(&ctx)) return f->domain->on_boundary(node);
    const auto* op = std::get<CovariantGeometry>(ctx).op;
    return node == 0 || node + 1 == op->nodes();
}

MaxDistance max_distance(const FieldState& state, const convex::ConvexSet& w) {
    MaxDistance out;
    Vector omega(state.components);
    for (std::size_t n = 0; n < state.node_count(); ++n) {
        const auto f = state.at(n);
        w.nearest_point(f, omega);
        const double d = invflow::distance(f, omega);
        if (d > out.s || n == 0) {
            out.s = d;
            out.node = n;
            out.lambda.resize(f.size());
            for (std::size_t k = 0; k < f.size(); ++k) out.lambda[k] = f[k] - omega[k];
        }
    }
    return out;
}

double hopf_functional(const FieldState& state, const convex::ConvexSet& w, std::size_t boundary_node,
                       const GeometryContext& ctx) {
    if (boundary_node >= node_count(ctx) || !node_on_boundary(ctx, boundary_node))
        throw InteriorPoint("hopf_functional: node is not on the boundary");
    const auto proj = w.project(state.at(boundary_node));
    if (!(proj.dist > 0.0)) throw InsideSet("hopf_functional: value at the node lies in W");
    if (const auto* f = std::get_if<FlatGeometry>(&ctx))
        return flat_hopf(state, proj.lambda, boundary_node, *f->domain);
    const Vector dnu = std::get<CovariantGeometry>(ctx).op->normal_derivative(state, boundary_node);
    return dot(proj.lambda, dnu);
}

Monitor::Monitor(const convex::ConvexSet& w, double exit_threshold, GeometryContext ctx)
    : w_(&w), ctx_(ctx) {
    v_.exit_threshold = exit_threshold;
}

void Monitor::observe(const FieldState& state) {
    const std::size_t n_nodes = state.node_count();
    std::vector<double> dist(n_nodes);
    std::vector<Vector> lambda(n_nodes, Vector(state.components));
    Vector omega(state.components);
    double s = 0.0;
    std::size_t argmax = 0;
    for (std::size_t n = 0; n < n_nodes; ++n) {
        const auto f = state.at(n);
        w_->nearest_point(f, omega);
        for (std::size_t k = 0; k < f.size(); ++k) lambda[n][k] = f[k] - omega[k];
        dist[n] = norm(lambda[n]);
        if (dist[n] > s) {
            s = dist[n];
            argmax = n;
        }
    }

    SeriesEntry entry;
    entry.t = state.t;
    entry.s = s;
    entry.x_argmax = node_point(ctx_, argmax);
    entry.on_boundary = node_on_boundary(ctx_, argmax);
    if (s > 0.0 && entry.on_boundary) entry.hopf_value = hopf_functional(state, *w_, argmax, ctx_);

    if (!v_.series.empty()) {
        const auto& prev = v_.series.back();
        if (state.t > prev.t) v_.max_s_rate = std::max(v_.max_s_rate, std::abs(s - prev.s) / (state.t - prev.t));
    }
    v_.series.push_back(entry);

    if (s > v_.worst_dist) v_.worst_dist = s;
    if (s > v_.exit_threshold) {
        if (!v_.first_exit_time) v_.first_exit_time = state.t;
        v_.status = Status::exited;
        for (std::size_t n = 0; n < n_nodes; ++n) {
            if (dist[n] < s * (1.0 - kTieTol)) continue;
            HopfRecord rec;
            rec.pair = {state.t, n, node_point(ctx_, n), node_on_boundary(ctx_, n), dist[n], lambda[n]};
            if (rec.pair.on_boundary) {
                rec.hopf_value = hopf_functional(state, *w_, n, ctx_);
                v_.max_hopf_value = v_.max_hopf_value ? std::max(*v_.max_hopf_value, *rec.hopf_value)
                                                      : *rec.hopf_value;
            }
            v_.hopf_records.push_back(std::move(rec));
        }
    }
}

InvarianceVerdict Monitor::verdict() const {
    InvarianceVerdict out = v_;
    if (!out.hopf_records.empty()) {
        bool all_boundary = true;
        for (const auto& r : out.hopf_records)
            if (r.pair.dist >= out.worst_dist * (1.0 - kTieTol) && !r.pair.on_boundary) all_boundary = false;
        out.global_max_pairs_on_boundary = all_boundary;
    }
    return out;
}

InvarianceVerdict monitor(const Trajectory& trajectory, const convex::ConvexSet& w, double exit_threshold,
                          const GeometryContext& ctx) {
    Monitor mon(w, exit_threshold, ctx);
    for (const auto& frame : trajectory.frames) mon.observe(frame);
    return mon.verdict();
}

}  // namespace invflow::diag
