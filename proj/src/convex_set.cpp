#include "invflow/convex_set.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace invflow::convex {
namespace {

constexpr double kDykstraStepTol = 1e-12;
constexpr double kFeasibleTol = 1e-9;
constexpr std::size_t kMaxCornerDim = 12;
constexpr double kProbeRadius = 1e6;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_vector(const Vector& v) { return all_finite(v); }

Vector gaussian_direction(std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector d(m);
    double n = 0.0;
    while (n < 1e-12) {
        for (auto& c : d) c = gauss(rng);
        n = norm(d);
    }
    for (auto& c : d) c /= n;
    return d;
}

// Column-major m x m system from a subset of constraint rows.
bool solve_active(const std::vector<Vector>& normals, const Vector& offsets,
                  std::span<const std::size_t> rows, Vector& out) {
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) a(r, c) = normals[rows[r]][c];
        b(r) = offsets[rows[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() < m) return false;
    Eigen::VectorXd x = lu.solve(b);
    out.assign(x.data(), x.data() + m);
    return true;
}

bool feasible(const std::vector<Vector>& normals, const Vector& offsets,
              std::span<const double> x, double tol) {
    for (std::size_t i = 0; i < normals.size(); ++i)
        if (dot(normals[i], x) > offsets[i] + tol * (1.0 + std::abs(offsets[i]))) return false;
    return true;
}

// A nonzero d with <n_i, d> <= 0 for all i means the polyhedron is unbounded.
bool has_recession_ray(const std::vector<Vector>& normals, std::size_t m) {
    auto is_ray = [&](const Vector& d) {
        for (const auto& n : normals)
            if (dot(n, d) > 1e-12) return false;
        return true;
    };
    std::vector<Vector> candidates;
    if (m == 1) {
        candidates = {{1.0}, {-1.0}};
    } else if (m == 2) {
        for (const auto& n : normals) {
            candidates.push_back({-n[1], n[0]});
            candidates.push_back({n[1], -n[0]});
        }
    } else {
        for (std::size_t i = 0; i < normals.size(); ++i)
            for (std::size_t j = i + 1; j < normals.size(); ++j) {
                const auto& a = normals[i];
                const auto& b = normals[j];
                Vector d{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                         a[0] * b[1] - a[1] * b[0]};
                const double n = norm(d);
                if (n < 1e-12) continue;
                for (auto& c : d) c /= n;
                candidates.push_back(d);
                candidates.push_back({-d[0], -d[1], -d[2]});
            }
    }
    return std::any_of(candidates.begin(), candidates.end(), is_ray);
}

}  // namespace

std::vector<Vector> enumerate_vertices(const std::vector<Vector>& normals, const Vector& offsets) {
    std::vector<Vector> out;
    if (normals.empty()) return out;
    const std::size_t m = normals.front().size();
    const std::size_t k = normals.size();
    if (m == 0 || m > 3 || k < m) return out;

    std::vector<std::size_t> rows(m);
    std::iota(rows.begin(), rows.end(), 0);
    Vector x;
    while (true) {
        if (solve_active(normals, offsets, rows, x) && feasible(normals, offsets, x, kFeasibleTol)) {
            const bool dup = std::any_of(out.begin(), out.end(), [&](const Vector& p) {
                return distance(p, x) < 1e-9 * (1.0 + norm(x));
            });
            if (!dup) out.push_back(x);
        }
        // next m-combination of k in lexicographic order
        std::size_t i = m;
        while (i > 0 && rows[i - 1] == k - m + i - 1) --i;
        if (i == 0) break;
        ++rows[i - 1];
        for (std::size_t j = i; j < m; ++j) rows[j] = rows[j - 1] + 1;
    }
    return out;
}

ConvexSet::ConvexSet(Shape shape) : shape_(std::move(shape)) {
    validate();
    bbox_ = compute_bounding_box();
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) { return ConvexSet(Box{std::move(lo), std::move(hi)}); }

ConvexSet ConvexSet::ball(Vector center, double radius) {
    return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::polytope(std::vector<Vector> normals, Vector offsets) {
    return ConvexSet(Polytope{std::move(normals), std::move(offsets)});
}

ConvexSet ConvexSet::from_shape(Shape shape) { return ConvexSet(std::move(shape)); }

void ConvexSet::validate() {
    std::visit(
        Overloaded{
            [&](const Box& b) {
                if (b.lo.empty() || b.lo.size() != b.hi.size())
                    throw InvalidSet("box: lo and hi must be nonempty and of equal length");
                if (!finite_vector(b.lo) || !finite_vector(b.hi))
                    throw InvalidSet("box: non-finite bound");
                for (std::size_t k = 0; k < b.lo.size(); ++k)
                    if (!(b.lo[k] < b.hi[k])) throw InvalidSet("box: requires lo < hi in every coordinate");
                dim_ = b.lo.size();
                if (dim_ <= kMaxCornerDim) {
                    const std::size_t n = std::size_t{1} << dim_;
                    vertices_.reserve(n);
                    for (std::size_t mask = 0; mask < n; ++mask) {
                        Vector c(dim_);
                        for (std::size_t k = 0; k < dim_; ++k) c[k] = (mask >> k & 1U) ? b.hi[k] : b.lo[k];
                        vertices_.push_back(std::move(c));
                    }
                }
            },
            [&](const Ball& b) {
                if (b.center.empty()) throw InvalidSet("ball: empty center");
                if (!finite_vector(b.center)) throw InvalidSet("ball: non-finite center");
                if (!(b.radius > 0.0) || !std::isfinite(b.radius))
                    throw InvalidSet("ball: radius must be positive and finite");
                dim_ = b.center.size();
            },
            [&](const Polytope& p) {
                if (p.normals.empty() || p.normals.size() != p.offsets.size())
                    throw InvalidSet("polytope: normals and offsets must be nonempty and of equal count");
                dim_ = p.normals.front().size();
                if (dim_ == 0) throw InvalidSet("polytope: zero-dimensional normals");
                for (const auto& n : p.normals) {
                    if (n.size() != dim_) throw InvalidSet("polytope: inconsistent normal dimension");
                    if (!finite_vector(n)) throw InvalidSet("polytope: non-finite normal");
                    if (std::abs(norm(n) - 1.0) > kUnitNormTol)
                        throw InvalidSet("polytope: normals must have unit norm");
                }
                if (!finite_vector(p.offsets)) throw InvalidSet("polytope: non-finite offset");

                Eigen::MatrixXd nmat(static_cast<Eigen::Index>(p.normals.size()),
                                     static_cast<Eigen::Index>(dim_));
                for (std::size_t i = 0; i < p.normals.size(); ++i)
                    for (std::size_t k = 0; k < dim_; ++k)
                        nmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = p.normals[i][k];
                Eigen::FullPivLU<Eigen::MatrixXd> lu(nmat);
                if (static_cast<std::size_t>(lu.rank()) < dim_)
                    throw InvalidSet("polytope: unbounded (normals do not span the space)");

                if (dim_ <= 3) {
                    vertices_ = enumerate_vertices(p.normals, p.offsets);
                    if (vertices_.empty()) throw InvalidSet("polytope: empty (no feasible vertex)");
                    if (has_recession_ray(p.normals, dim_)) throw InvalidSet("polytope: unbounded");
                } else {
                    Vector origin(dim_, 0.0), omega(dim_);
                    const auto stats = dykstra(origin, omega);
                    if (!stats.converged || stats.max_violation > 1e-6)
                        throw InvalidSet("polytope: empty (Dykstra did not converge on probe point)");
                    for (std::size_t k = 0; k < dim_; ++k)
                        for (double sign : {1.0, -1.0}) {
                            Vector probe(dim_, 0.0);
                            probe[k] = sign * kProbeRadius;
                            const auto s = dykstra(probe, omega);
                            if (!s.converged || norm(omega) > 0.1 * kProbeRadius)
                                throw InvalidSet("polytope: unbounded along a probe direction");
                        }
                }
            },
        },
        shape_);
}

std::vector<HalfSpace> ConvexSet::half_spaces() const {
    std::vector<HalfSpace> out;
    if (const auto* b = std::get_if<Box>(&shape_)) {
        for (std::size_t k = 0; k < dim_; ++k) {
            Vector lo(dim_, 0.0), hi(dim_, 0.0);
            lo[k] = -1.0;
            hi[k] = 1.0;
            out.push_back({std::move(lo), -b->lo[k]});
            out.push_back({std::move(hi), b->hi[k]});
        }
    } else if (const auto* p = std::get_if<Polytope>(&shape_)) {
        for (std::size_t i = 0; i < p->normals.size(); ++i) out.push_back({p->normals[i], p->offsets[i]});
    }
    return out;
}

std::pair<Vector, Vector> ConvexSet::compute_bounding_box() const {
    return std::visit(
        Overloaded{
            [](const Box& b) { return std::pair{b.lo, b.hi}; },
            [](const Ball& b) {
                Vector lo = b.center, hi = b.center;
                for (std::size_t k = 0; k < lo.size(); ++k) {
                    lo[k] -= b.radius;
                    hi[k] += b.radius;
                }
                return std::pair{lo, hi};
            },
            [this](const Polytope&) {
                Vector lo(dim_, std::numeric_limits<double>::infinity());
                Vector hi(dim_, -std::numeric_limits<double>::infinity());
                if (!vertices_.empty()) {
                    for (const auto& v : vertices_)
                        for (std::size_t k = 0; k < dim_; ++k) {
                            lo[k] = std::min(lo[k], v[k]);
                            hi[k] = std::max(hi[k], v[k]);
                        }
                    return std::pair{lo, hi};
                }
                Vector omega(dim_);
                for (std::size_t k = 0; k < dim_; ++k) {
                    Vector probe(dim_, 0.0);
                    probe[k] = kProbeRadius;
                    dykstra(probe, omega);
                    hi[k] = omega[k];
                    probe[k] = -kProbeRadius;
                    dykstra(probe, omega);
                    lo[k] = omega[k];
                }
                return std::pair{lo, hi};
            },
        },
        shape_);
}

DykstraStats ConvexSet::dykstra(std::span<const double> v, std::span<double> omega,
                                std::size_t max_sweeps) const {
    const auto& p = std::get<Polytope>(shape_);
    const std::size_t k = p.normals.size();
    const std::size_t m = dim_;
    std::vector<double> incr(k * m, 0.0);
    Vector x(v.begin(), v.end()), y(m), sweep_start(m);
    const double scale = std::max(1.0, norm(v));

    DykstraStats stats;
    for (stats.sweeps = 1; stats.sweeps <= max_sweeps; ++stats.sweeps) {
        sweep_start = x;
        double incr_change = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto& n = p.normals[i];
            double* pi = incr.data() + i * m;
            for (std::size_t c = 0; c < m; ++c) y[c] = x[c] + pi[c];
            const double excess = dot(n, y) - p.offsets[i];
            double change2 = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                const double xc = excess > 0.0 ? y[c] - excess * n[c] : y[c];
                const double pc = y[c] - xc;
                change2 += (pc - pi[c]) * (pc - pi[c]);
                pi[c] = pc;
                x[c] = xc;
            }
            incr_change = std::max(incr_change, std::sqrt(change2));
        }
        if (std::max(invflow::distance(x, sweep_start), incr_change) < kDykstraStepTol * scale) {
            stats.converged = true;
            break;
        }
    }
    stats.sweeps = std::min(stats.sweeps, max_sweeps);
    for (std::size_t i = 0; i < k; ++i)
        stats.max_violation = std::max(stats.max_violation, dot(p.normals[i], x) - p.offsets[i]);
    std::copy(x.begin(), x.end(), omega.begin());
    return stats;
}

void ConvexSet::nearest_point(std::span<const double> v, std::span<double> omega) const {
    if (v.size() != dim_ || omega.size() != dim_) throw InvalidArgument("nearest_point: dimension mismatch");
    std::visit(Overloaded{
                   [&](const Box& b) {
                       for (std::size_t k = 0; k < dim_; ++k) omega[k] = std::clamp(v[k], b.lo[k], b.hi[k]);
                   },
                   [&](const Ball& b) {
                       double r2 = 0.0;
                       for (std::size_t k = 0; k < dim_; ++k) r2 += (v[k] - b.center[k]) * (v[k] - b.center[k]);
                       const double r = std::sqrt(r2);
                       if (r <= b.radius) {
                           std::copy(v.begin(), v.end(), omega.begin());
                       } else {
                           const double s = b.radius / r;
                           for (std::size_t k = 0; k < dim_; ++k)
                               omega[k] = b.center[k] + (v[k] - b.center[k]) * s;
                       }
                   },
                   [&](const Polytope&) { dykstra(v, omega); },
               },
               shape_);
}

Projection ConvexSet::project(std::span<const double> v) const {
    Projection out;
    out.omega.resize(dim_);
    nearest_point(v, out.omega);
    out.lambda.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) out.lambda[k] = v[k] - out.omega[k];
    out.dist = norm(out.lambda);
    return out;
}

double ConvexSet::distance(std::span<const double> v) const {
    if (const auto* b = std::get_if<Box>(&shape_)) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            const double d = v[k] - std::clamp(v[k], b->lo[k], b->hi[k]);
            s += d * d;
        }
        return std::sqrt(s);
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) return std::max(0.0, invflow::distance(v, b->center) - b->radius);
    Vector omega(dim_);
    nearest_point(v, omega);
    return invflow::distance(v, omega);
}

bool ConvexSet::contains(std::span<const double> v, double tol) const {
    if (tol < 0.0) throw InvalidArgument("contains: tolerance must be nonnegative");
    return distance(v) <= tol;
}

NormalCone ConvexSet::normal_cone(std::span<const double> omega, double activity_tol) const {
    if (distance(omega) > activity_tol) throw NotOnSet("normal_cone: point lies outside the set");
    NormalCone cone;
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        Vector d(dim_);
        for (std::size_t k = 0; k < dim_; ++k) d[k] = omega[k] - b->center[k];
        const double r = norm(d);
        if (r >= b->radius - activity_tol && r > 0.0) {
            for (auto& c : d) c /= r;
            cone.generators.push_back(std::move(d));
        }
    } else {
        for (auto& h : half_spaces())
            if (dot(h.normal, omega) >= h.offset - activity_tol) cone.generators.push_back(std::move(h.normal));
    }
    cone.is_singleton = cone.generators.size() == 1;
    return cone;
}

double ConvexSet::validate_supporting(std::span<const double> omega, std::span<const double> lambda,
                                      std::size_t n_samples, std::uint64_t seed) const {
    if (std::abs(norm(lambda) - 1.0) > kUnitNormTol)
        throw InvalidArgument("validate_supporting: lambda must have unit norm");
    const double base = dot(lambda, omega);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) worst = std::max(worst, dot(lambda, v) - base);
    if (const auto* b = std::get_if<Box>(&shape_); b && vertices_.empty()) {
        // max over all corners, coordinate by coordinate
        double best = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) best += std::max(lambda[k] * b->lo[k], lambda[k] * b->hi[k]);
        worst = std::max(worst, best - base);
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Vector sigma = is_ball() ? sample_boundary(rng) : sample(rng);
        worst = std::max(worst, dot(lambda, sigma) - base);
    }
    return worst;
}

Vector ConvexSet::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return std::visit(
        Overloaded{
            [&](const Box& b) {
                Vector s(dim_);
                for (std::size_t k = 0; k < dim_; ++k) s[k] = b.lo[k] + (b.hi[k] - b.lo[k]) * unit(rng);
                return s;
            },
            [&](const Ball& b) {
                Vector s = gaussian_direction(dim_, rng);
                const double r = b.radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim_));
                for (std::size_t k = 0; k < dim_; ++k) s[k] = b.center[k] + r * s[k];
                return s;
            },
            [&](const Polytope&) {
                if (!vertices_.empty()) {
                    std::exponential_distribution<double> expo(1.0);
                    Vector w(vertices_.size());
                    double total = 0.0;
                    for (auto& c : w) total += (c = expo(rng));
                    Vector s(dim_, 0.0);
                    for (std::size_t i = 0; i < vertices_.size(); ++i)
                        for (std::size_t k = 0; k < dim_; ++k) s[k] += w[i] / total * vertices_[i][k];
                    return s;
                }
                const auto [lo, hi] = bounding_box();
                Vector probe(dim_), omega(dim_);
                for (std::size_t k = 0; k < dim_; ++k) probe[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
                dykstra(probe, omega);
                return omega;
            },
        },
        shape_);
}

Vector ConvexSet::sample_boundary(std::mt19937_64& rng) const {
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        Vector s = gaussian_direction(dim_, rng);
        for (std::size_t k = 0; k < dim_; ++k) s[k] = b->center[k] + b->radius * s[k];
        return s;
    }
    if (const auto* b = std::get_if<Box>(&shape_)) {
        Vector s = sample(rng);
        std::uniform_int_distribution<std::size_t> axis(0, dim_ - 1);
        std::bernoulli_distribution upper(0.5);
        const std::size_t k = axis(rng);
        s[k] = upper(rng) ? b->hi[k] : b->lo[k];
        return s;
    }
    const auto [lo, hi] = bounding_box();
    const double diameter = std::max(invflow::distance(lo, hi), 1e-12);
    Vector s = sample(rng);
    const Vector d = gaussian_direction(dim_, rng);
    for (std::size_t k = 0; k < dim_; ++k) s[k] += 10.0 * diameter * d[k];
    Vector omega(dim_);
    nearest_point(s, omega);
    return omega;
}

}  // namespace invflow::convex
