#include "invflow/tangency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "invflow/parallel.hpp"

namespace invflow {

ReactionTerm::ReactionTerm(std::size_t dim, ReactionFn fn, std::optional<convex::Box> probe_box)
    : dim_(dim), fn_(std::move(fn)), probe_box_(std::move(probe_box)) {
    if (dim_ == 0) throw InvalidArgument("reaction term: state dimension must be positive");
    if (!fn_) throw InvalidArgument("reaction term: empty evaluator");
}

Vector ReactionTerm::operator()(double t, std::span<const double> x, std::span<const double> v) const {
    Vector out(dim_, 0.0);
    fn_(t, x, v, out);
    return out;
}

double estimate_lipschitz(const ReactionTerm& phi, const convex::Box& probe, double t_lo, double t_hi,
                          const std::vector<Vector>& x_samples, std::size_t n_pairs, std::uint64_t seed) {
    const std::size_t m = phi.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector v1(m), v2(m), p1(m), p2(m);
    const Vector no_x;
    double best = 0.0;
    for (std::size_t s = 0; s < n_pairs; ++s) {
        for (std::size_t k = 0; k < m; ++k) {
            v1[k] = probe.lo[k] + (probe.hi[k] - probe.lo[k]) * unit(rng);
            v2[k] = probe.lo[k] + (probe.hi[k] - probe.lo[k]) * unit(rng);
        }
        const double t = t_lo + (t_hi - t_lo) * unit(rng);
        const Vector& x = x_samples.empty()
                              ? no_x
                              : x_samples[std::min(x_samples.size() - 1,
                                                   static_cast<std::size_t>(unit(rng) * x_samples.size()))];
        phi(t, x, v1, p1);
        phi(t, x, v2, p2);
        const double dv = distance(v1, v2);
        if (dv > 1e-14) best = std::max(best, distance(p1, p2) / dv);
    }
    return best;
}

}  // namespace invflow

namespace invflow::tangency {
namespace {

bool on_face(const convex::HalfSpace& h, std::span<const double> v) {
    return std::abs(dot(h.normal, v) - h.offset) <= 1e-9 * (1.0 + std::abs(h.offset));
}

void push_segment(std::vector<BoundarySample>& out, const Vector& a, const Vector& b, std::size_t n,
                  const Vector& normal) {
    if (n < 2) n = 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        Vector p(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] + s * (b[k] - a[k]);
        out.push_back({std::move(p), normal});
    }
}

void push_triangle(std::vector<BoundarySample>& out, const Vector& a, const Vector& b, const Vector& c,
                   std::size_t n, const Vector& normal) {
    if (n < 2) n = 2;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) {
            Vector p(3);
            for (std::size_t k = 0; k < 3; ++k)
                p[k] = a[k] + (b[k] - a[k]) * static_cast<double>(i) / denom +
                       (c[k] - a[k]) * static_cast<double>(j) / denom;
            out.push_back({std::move(p), normal});
        }
}

// Sample the facet of W lying on half-space h, given the vertices of W.
void sample_facet(std::vector<BoundarySample>& out, const convex::HalfSpace& h,
                  const std::vector<Vector>& vertices, std::size_t density) {
    std::vector<Vector> face;
    for (const auto& v : vertices)
        if (on_face(h, v)) face.push_back(v);
    if (face.empty()) return;  // redundant constraint
    const std::size_t m = h.normal.size();
    if (face.size() == 1 || m == 1) {
        for (auto& p : face) out.push_back({std::move(p), h.normal});
        return;
    }
    if (m == 2 || face.size() == 2) {
        std::size_t ia = 0, ib = 1;
        double best = -1.0;
        for (std::size_t i = 0; i < face.size(); ++i)
            for (std::size_t j = i + 1; j < face.size(); ++j)
                if (const double d = distance(face[i], face[j]); d > best) {
                    best = d;
                    ia = i;
                    ib = j;
                }
        push_segment(out, face[ia], face[ib], density, h.normal);
        return;
    }
    // m == 3: order the facet polygon by angle in its plane, then fan-triangulate
    Vector centroid(3, 0.0);
    for (const auto& p : face)
        for (std::size_t k = 0; k < 3; ++k) centroid[k] += p[k] / static_cast<double>(face.size());
    Vector e1(3);
    for (std::size_t k = 0; k < 3; ++k) e1[k] = face[0][k] - centroid[k];
    const double e1n = norm(e1);
    if (e1n < 1e-14) return;
    for (auto& c : e1) c /= e1n;
    const auto& n = h.normal;
    const Vector e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]};
    auto angle = [&](const Vector& p) {
        Vector d(3);
        for (std::size_t k = 0; k < 3; ++k) d[k] = p[k] - centroid[k];
        return std::atan2(dot(d, e2), dot(d, e1));
    };
    std::sort(face.begin(), face.end(), [&](const Vector& a, const Vector& b) { return angle(a) < angle(b); });
    for (std::size_t i = 1; i + 1 < face.size(); ++i) push_triangle(out, face[0], face[i], face[i + 1], density, n);
}

std::vector<BoundarySample> random_boundary(const convex::ConvexSet& w, std::size_t count, std::uint64_t seed) {
    std::vector<BoundarySample> out;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        Vector omega = w.sample_boundary(rng);
        const auto cone = w.normal_cone(omega, convex::kActivityTol);
        for (const auto& g : cone.generators) out.push_back({omega, g});
    }
    return out;
}

}  // namespace

std::vector<BoundarySample> boundary_samples(const convex::ConvexSet& w, std::size_t density,
                                             std::uint64_t seed) {
    const std::size_t m = w.dim();
    std::vector<BoundarySample> out;
    if (m > 3) return random_boundary(w, kHighDimBoundarySamples, seed);

    if (const auto* ball = std::get_if<convex::Ball>(&w.shape())) {
        auto push_dir = [&](Vector dir) {
            Vector omega(m);
            for (std::size_t k = 0; k < m; ++k) omega[k] = ball->center[k] + ball->radius * dir[k];
            out.push_back({std::move(omega), std::move(dir)});
        };
        if (m == 1) {
            push_dir({1.0});
            push_dir({-1.0});
        } else if (m == 2) {
            for (std::size_t i = 0; i < density; ++i) {
                const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(density);
                push_dir({std::cos(a), std::sin(a)});
            }
        } else {
            // Fibonacci lattice on the sphere
            const std::size_t n = std::max<std::size_t>(2, density * density);
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (std::size_t i = 0; i < n; ++i) {
                const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double a = golden * static_cast<double>(i);
                push_dir({r * std::cos(a), r * std::sin(a), z});
            }
        }
        return out;
    }

    for (const auto& h : w.half_spaces()) sample_facet(out, h, w.vertices(), density);
    return out;
}

TangencyReport check_tangency(const ReactionTerm& phi, const convex::ConvexSet& w,
                              const std::vector<double>& t_samples, const std::vector<Vector>& x_samples,
                              const TangencyOptions& options) {
    if (t_samples.empty() || x_samples.empty())
        throw InvalidArgument("check_tangency: time and space sample lists must be nonempty");
    if (phi.dim() != w.dim()) throw InvalidArgument("check_tangency: reaction term and set dimensions differ");

    const auto samples = boundary_samples(w, options.boundary_density, options.seed);
    const std::size_t m = w.dim();

    struct Best {
        double margin = -std::numeric_limits<double>::infinity();
        std::size_t sample = 0, ti = 0, xi = 0;
        bool any = false;
    };
    const std::size_t chunks = std::min<std::size_t>(samples.size(), 64);
    std::vector<Best> partial(std::max<std::size_t>(chunks, 1));

    parallel_chunks(samples.size(), chunks, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Vector value(m);
        Best best;
        for (std::size_t s = begin; s < end; ++s)
            for (std::size_t ti = 0; ti < t_samples.size(); ++ti)
                for (std::size_t xi = 0; xi < x_samples.size(); ++xi) {
                    try {
                        phi(t_samples[ti], x_samples[xi], samples[s].omega, value);
                    } catch (const std::exception& e) {
                        throw EvalFailure(std::string("check_tangency: reaction term failed: ") + e.what());
                    }
                    if (!all_finite(value))
                        throw EvalFailure("check_tangency: reaction term returned a non-finite value");
                    const double margin = dot(samples[s].lambda, value);
                    if (!best.any || margin > best.margin) best = {margin, s, ti, xi, true};
                }
        partial[c] = best;
    });

    TangencyReport report;
    report.margin_tol = options.margin_tol;
    report.boundary_density = options.boundary_density;
    report.boundary_points = samples.size();
    report.samples_checked = samples.size() * t_samples.size() * x_samples.size();
    Best best;
    for (const auto& p : partial)
        if (p.any && (!best.any || p.margin > best.margin)) best = p;
    if (best.any) {
        report.worst_margin = best.margin;
        report.worst_witness = {t_samples[best.ti], x_samples[best.xi], samples[best.sample].omega,
                                samples[best.sample].lambda};
    }
    report.certified = report.worst_margin <= options.margin_tol;
    return report;
}

std::optional<double> tangency_margin_along_trajectory(const ReactionTerm& phi, const convex::ConvexSet& w,
                                                       const std::vector<TrajectoryPoint>& trajectory) {
    std::optional<double> worst;
    for (const auto& p : trajectory) {
        const auto proj = w.project(p.f);
        if (!(proj.dist > 0.0)) continue;
        const Vector value = phi(p.t, p.x, proj.omega);
        double margin = 0.0;
        for (std::size_t k = 0; k < value.size(); ++k) margin += proj.lambda[k] / proj.dist * value[k];
        worst = worst ? std::max(*worst, margin) : margin;
    }
    return worst;
}

}  // namespace invflow::tangency
