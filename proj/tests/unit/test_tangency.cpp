#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invflow/tangency.hpp"

using namespace invflow;
using convex::ConvexSet;

namespace {

ReactionTerm linear(std::size_t m, double a) {
    return ReactionTerm(m, [a](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = a * v[k];
    });
}

ReactionTerm fitzhugh_nagumo() {
    return ReactionTerm(2, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0] - v[0] * v[0] * v[0] / 3.0 - v[1];
        out[1] = 0.08 * (v[0] + 0.7 - 0.8 * v[1]);
    });
}

const std::vector<double> kT = {0.0, 0.5, 1.0};
const std::vector<Vector> kX = {{0.0}, {0.5}};

}  // namespace

TEST_CASE("phi = -v is certified on the unit ball with margin -1") {
    const auto r = tangency::check_tangency(linear(2, -1.0), ConvexSet::ball({0.0, 0.0}, 1.0), kT, kX);
    CHECK(r.certified);
    CHECK(r.worst_margin == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.samples_checked > 0);
}

TEST_CASE("logistic term is tangent to [0, 1]") {
    const ReactionTerm logistic(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0] * (1.0 - v[0]);
    });
    const auto r = tangency::check_tangency(logistic, ConvexSet::box({0.0}, {1.0}), kT, kX);
    CHECK(r.certified);
    CHECK(r.worst_margin == 0.0);
}

TEST_CASE("constant outward field is refuted with the face witness") {
    const ReactionTerm push(2, [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 0.0;
    });
    const auto r = tangency::check_tangency(push, ConvexSet::box({0.0, 0.0}, {1.0, 1.0}), kT, kX);
    CHECK_FALSE(r.certified);
    CHECK(r.worst_margin == doctest::Approx(1.0));
    CHECK(r.worst_witness.lambda == Vector{1.0, 0.0});
    CHECK(r.worst_witness.omega[0] == doctest::Approx(1.0));
}

TEST_CASE("phi = +v on the ball is refuted") {
    const auto r = tangency::check_tangency(linear(2, 1.0), ConvexSet::ball({0.0, 0.0}, 1.0), kT, kX);
    CHECK_FALSE(r.certified);
    CHECK(r.worst_margin == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(r.worst_witness.omega) == doctest::Approx(1.0));
}

TEST_CASE("FitzHugh-Nagumo rectangle: per-face margins from the nullcline bounds") {
    // Independent evaluation of max over each edge of <n, phi>.
    const auto phi = fitzhugh_nagumo();
    const auto w = ConvexSet::box({-3.0, -3.0}, {3.0, 5.0});
    const auto r = tangency::check_tangency(phi, w, {0.0}, {{0.0}});
    CHECK(r.certified);
    CHECK(r.worst_margin == doctest::Approx(-0.008).epsilon(1e-9));

    // tight rectangle touches the nullclines at its corners
    const auto tight = ConvexSet::box({-3.0, -2.875}, {3.0, 4.625});
    const auto rt = tangency::check_tangency(phi, tight, {0.0}, {{0.0}});
    CHECK(rt.worst_margin == doctest::Approx(0.0).epsilon(1e-12));

    // a rectangle cutting through the limit cycle region is not invariant
    const auto small = ConvexSet::box({-1.0, -1.0}, {1.0, 1.0});
    CHECK_FALSE(tangency::check_tangency(phi, small, {0.0}, {{0.0}}).certified);
}

TEST_CASE("FitzHugh-Nagumo margin along points just outside the rectangle is nonpositive") {
    const auto phi = fitzhugh_nagumo();
    const auto w = ConvexSet::box({-3.0, -3.0}, {3.0, 5.0});
    std::vector<tangency::TrajectoryPoint> pts;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        Vector b = w.sample_boundary(rng);
        const auto cone = w.normal_cone(b);
        for (std::size_t k = 0; k < 2; ++k) b[k] += 1e-3 * cone.generators[0][k];
        pts.push_back({0.0, {0.0}, b});
    }
    const auto margin = tangency::tangency_margin_along_trajectory(phi, w, pts);
    REQUIRE(margin);
    CHECK(*margin <= 0.0);
}

TEST_CASE("margin along a trajectory") {
    const auto ball = ConvexSet::ball({0.0, 0.0}, 1.0);
    const auto phi = linear(2, -1.0);
    CHECK_FALSE(tangency::tangency_margin_along_trajectory(phi, ball, {{0.0, {0.0}, {0.2, 0.1}}}));
    const auto m = tangency::tangency_margin_along_trajectory(phi, ball, {{0.0, {0.0}, {2.0, 0.0}}});
    REQUIRE(m);
    CHECK(*m == doctest::Approx(-1.0));
}

TEST_CASE("per-face certification covers conic combinations at corners") {
    // phi pushes inward along both axes with different strengths
    const ReactionTerm phi(2, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = -v[0] + 0.3 * std::sin(v[1]);
        out[1] = -2.0 * v[1] + 0.1 * v[0] * v[0];
    });
    const auto w = ConvexSet::box({-1.0, -1.0}, {1.0, 1.0});
    const auto r = tangency::check_tangency(phi, w, {0.0}, {{0.0}});
    REQUIRE(r.certified);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Vector b = w.sample_boundary(rng);
        const auto cone = w.normal_cone(b);
        Vector lam(2, 0.0);
        for (const auto& g : cone.generators) {
            const double c = u(rng);
            for (std::size_t k = 0; k < 2; ++k) lam[k] += c * g[k];
        }
        const double n = norm(lam);
        if (n == 0.0) continue;
        const Vector f = phi(0.0, Vector{0.0}, b);
        CHECK(dot(lam, f) / n <= 1e-9);
    }
}

TEST_CASE("enlarging margin_tol never flips certified to refuted") {
    const ReactionTerm phi(2, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = 0.05 - v[0];
        out[1] = -v[1];
    });
    const auto w = ConvexSet::ball({0.0, 0.0}, 0.04);
    bool seen_certified = false;
    for (double tol : {0.0, 1e-6, 1e-3, 1e-2, 0.1}) {
        tangency::TangencyOptions opts;
        opts.margin_tol = tol;
        const bool c = tangency::check_tangency(phi, w, {0.0}, {{0.0}}, opts).certified;
        if (seen_certified) CHECK(c);
        seen_certified = seen_certified || c;
    }
    CHECK(seen_certified);
}

TEST_CASE("ball and circumscribed 64-gon agree on phi = -v") {
    std::vector<Vector> normals;
    for (int k = 0; k < 64; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 64.0;
        normals.push_back({std::cos(a), std::sin(a)});
    }
    const auto poly = ConvexSet::polytope(normals, Vector(64, 1.0));
    const auto ball = ConvexSet::ball({0.0, 0.0}, 1.0);
    for (double a : {-1.0, 1.0}) {
        const auto phi = linear(2, a);
        CHECK(tangency::check_tangency(phi, poly, {0.0}, {{0.0}}).certified ==
              tangency::check_tangency(phi, ball, {0.0}, {{0.0}}).certified);
    }
}

TEST_CASE("high-dimensional sets use random boundary sampling") {
    const auto w = ConvexSet::box(Vector(5, -1.0), Vector(5, 1.0));
    const auto r = tangency::check_tangency(linear(5, -1.0), w, {0.0}, {{0.0}});
    CHECK(r.certified);
    CHECK(r.boundary_points == tangency::kHighDimBoundarySamples);
    CHECK_FALSE(tangency::check_tangency(linear(5, 1.0), w, {0.0}, {{0.0}}).certified);
}

TEST_CASE("tangency report is deterministic for a fixed seed") {
    const auto w = ConvexSet::ball(Vector(4, 0.0), 1.0);
    tangency::TangencyOptions o;
    o.seed = 9;
    const auto a = tangency::check_tangency(linear(4, -0.5), w, kT, kX, o);
    const auto b = tangency::check_tangency(linear(4, -0.5), w, kT, kX, o);
    CHECK(a.worst_margin == b.worst_margin);
    CHECK(a.worst_witness.omega == b.worst_witness.omega);
}

TEST_CASE("tangency errors") {
    const auto w = ConvexSet::ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(tangency::check_tangency(linear(3, -1.0), w, kT, kX), InvalidArgument);
    CHECK_THROWS_AS(tangency::check_tangency(linear(2, -1.0), w, {}, kX), InvalidArgument);
    const ReactionTerm bad(2, [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = std::nan("");
        out[1] = 0.0;
    });
    CHECK_THROWS_AS(tangency::check_tangency(bad, w, kT, kX), EvalFailure);
}

TEST_CASE("empirical Lipschitz constant") {
    const double c = estimate_lipschitz(linear(2, -3.0), convex::Box{{-1.0, -1.0}, {1.0, 1.0}}, 0.0, 1.0, {{0.0}});
    CHECK(c == doctest::Approx(3.0));
    const ReactionTerm cubic(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0] * v[0] * v[0];
    });
    const double cc = estimate_lipschitz(cubic, convex::Box{{-2.0}, {2.0}}, 0.0, 1.0, {{0.0}});
    CHECK(std::isfinite(cc));
    CHECK(cc <= 12.0 + 1e-9);
    CHECK(cc > 6.0);
}
