#include <doctest.h>

#include <cmath>
#include <random>

#include "invflow/bundle.hpp"
#include "invflow/diagnostics.hpp"
#include "invflow/pde_flat.hpp"
#include "oracles.hpp"

using namespace invflow;
using convex::ConvexSet;

namespace {

FieldState sample_field(const Domain& d, std::size_t m, const std::function<Vector(const Vector&)>& f) {
    FieldState s{0.0, m, std::vector<double>(d.node_count() * m)};
    for (std::size_t n = 0; n < d.node_count(); ++n) {
        const Vector v = f(d.point(n));
        std::copy(v.begin(), v.end(), s.at(n).begin());
    }
    return s;
}

flat::Scenario exit_scenario(std::size_t cells) {
    flat::Scenario sc;
    sc.domain = Domain({{0.0, 1.0, cells}}, false);
    sc.set = ConvexSet::box({-1.0}, {1.0});
    sc.phi = ReactionTerm(1, [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    });
    sc.f0 = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    sc.bc = Dirichlet{[](double, std::span<const double>, std::span<double> out) { out[0] = 2.0; }};
    sc.T = 0.25;
    return sc;
}

}  // namespace

TEST_CASE("zero field has zero distance") {
    const Domain d({{0.0, 1.0, 16}}, false);
    const auto s = sample_field(d, 2, [](const Vector&) { return Vector{0.0, 0.0}; });
    CHECK(diag::max_distance(s, ConvexSet::ball({0.0, 0.0}, 1.0)).s == 0.0);
}

TEST_CASE("monotone profile peaks at the right end") {
    const double L = 2.0;
    const Domain d({{0.0, L, 16}}, false);
    const auto s = sample_field(d, 2, [L](const Vector& x) { return Vector{1.0 + x[0] / L, 0.0}; });
    const auto m = diag::max_distance(s, ConvexSet::ball({0.0, 0.0}, 1.0));
    CHECK(m.s == doctest::Approx(1.0));
    CHECK(m.node == 16);
    CHECK(m.lambda[0] == doctest::Approx(1.0));
    CHECK(m.lambda[1] == 0.0);
}

TEST_CASE("max distance agrees with a naive rescan") {
    const Domain d({{0.0, 1.0, 12}, {0.0, 1.0, 10}}, false);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = sample_field(d, 2, [&](const Vector&) { return Vector{u(rng), u(rng)}; });
        const auto m = diag::max_distance(s, ConvexSet::ball({0.1, 0.0}, 1.0));
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t n = 0; n < s.node_count(); ++n) {
            const oracle::Vec v(s.at(n).begin(), s.at(n).end());
            const auto p = oracle::ball_nearest({0.1, 0.0}, 1.0, v);
            const double dist = std::hypot(v[0] - p[0], v[1] - p[1]);
            if (dist > best) best = dist, arg = n;
        }
        CHECK(m.s == doctest::Approx(best).epsilon(1e-14));
        CHECK(m.node == arg);
    }
}

TEST_CASE("Hopf functional on a profile decreasing away from the left boundary") {
    const double L = 2.0;
    const Domain d({{0.0, L, 32}}, false);
    const auto s = sample_field(d, 2, [L](const Vector& x) { return Vector{1.0 + (L - x[0]) / L, 0.0}; });
    const auto w = ConvexSet::ball({0.0, 0.0}, 1.0);
    const diag::GeometryContext ctx = diag::FlatGeometry{&d};
    // lambda = (1, 0), d_nu f = -d_x f = (1/L) e1
    CHECK(diag::hopf_functional(s, w, 0, ctx) == doctest::Approx(1.0 / L));
    CHECK_THROWS_AS((void)diag::hopf_functional(s, w, 5, ctx), InteriorPoint);
    // at the right end f = (1, 0) lies on the sphere
    CHECK_THROWS_AS((void)diag::hopf_functional(s, w, 32, ctx), InsideSet);
}

TEST_CASE("Hopf functional of a constant exterior field is zero") {
    const Domain d({{0.0, 1.0, 16}, {0.0, 1.0, 16}}, false);
    const auto s = sample_field(d, 2, [](const Vector&) { return Vector{3.0, 1.0}; });
    const diag::GeometryContext ctx = diag::FlatGeometry{&d};
    CHECK(diag::hopf_functional(s, ConvexSet::ball({0.0, 0.0}, 1.0), 0, ctx) == doctest::Approx(0.0));
}

TEST_CASE("monitor over states inside W") {
    const Domain d({{0.0, 1.0, 16}}, false);
    Trajectory tr;
    for (int k = 0; k < 5; ++k) {
        auto s = sample_field(d, 1, [k](const Vector& x) { return Vector{0.1 * k * x[0]}; });
        s.t = 0.1 * k;
        tr.frames.push_back(s);
    }
    const auto v = diag::monitor(tr, ConvexSet::box({0.0}, {1.0}), 1e-8, diag::FlatGeometry{&d});
    CHECK(v.status == diag::Status::invariant);
    CHECK(v.hopf_records.empty());
    CHECK_FALSE(v.first_exit_time);
    CHECK(v.series.size() == 5);
}

TEST_CASE("Dirichlet-forced exit records positive Hopf values") {
    const auto r = flat::solve(exit_scenario(64));
    CHECK(r.verdict.status == diag::Status::exited);
    REQUIRE(r.verdict.max_hopf_value);
    CHECK(*r.verdict.max_hopf_value > 0.0);
    bool positive_boundary = false;
    for (const auto& rec : r.verdict.hopf_records)
        positive_boundary = positive_boundary || (rec.pair.on_boundary && rec.hopf_value && *rec.hopf_value > 0.0);
    CHECK(positive_boundary);
    REQUIRE(r.verdict.global_max_pairs_on_boundary);
    CHECK(*r.verdict.global_max_pairs_on_boundary);

    // final record against the series solution of the heat problem
    const auto& last = r.verdict.hopf_records.back();
    REQUIRE(last.hopf_value);
    CHECK(*last.hopf_value == doctest::Approx(oracle::dirichlet_heat_outward_slope(2.0, 0.25)).epsilon(0.02));
}

TEST_CASE("first exit time agrees with a finer run") {
    auto coarse_sc = exit_scenario(32);
    auto fine_sc = exit_scenario(64);
    // a slow ramp of the boundary value crosses W at t = 0.1
    const Dirichlet ramp{[](double t, std::span<const double>, std::span<double> out) { out[0] = 10.0 * t; }};
    coarse_sc.bc = ramp;
    fine_sc.bc = ramp;
    SolveOptions o;
    o.exit_threshold = 1e-3;
    const auto coarse = flat::solve(coarse_sc, o);
    const auto fine = flat::solve(fine_sc, o);
    REQUIRE(coarse.verdict.first_exit_time);
    REQUIRE(fine.verdict.first_exit_time);
    const double interval = coarse.dt * static_cast<double>(coarse.cadence);
    CHECK(std::abs(*coarse.verdict.first_exit_time - *fine.verdict.first_exit_time) <= interval + 1e-12);
    CHECK(*fine.verdict.first_exit_time == doctest::Approx(0.1001).epsilon(0.01));
}

TEST_CASE("raising the exit threshold never turns invariant into exited") {
    auto sc = exit_scenario(32);
    sc.T = 0.05;
    const Dirichlet bc{[](double, std::span<const double>, std::span<double> out) { out[0] = 1.001; }};
    sc.bc = bc;
    SolveOptions o;
    bool was_invariant = false;
    for (double thr : {1e-8, 1e-4, 1e-3, 1e-2, 1.0}) {
        o.exit_threshold = thr;
        const bool inv = flat::solve(sc, o).verdict.status == diag::Status::invariant;
        if (was_invariant) CHECK(inv);
        was_invariant = was_invariant || inv;
    }
    CHECK(was_invariant);
}

TEST_CASE("s(t) rate is bounded on a smooth run") {
    auto sc = exit_scenario(32);
    sc.bc = Dirichlet{[](double t, std::span<const double>, std::span<double> out) { out[0] = 1.0 + t; }};
    const auto r = flat::solve(sc);
    CHECK(r.verdict.max_s_rate <= 1.0 + 1e-9);
    CHECK(r.verdict.max_s_rate > 0.5);
}

TEST_CASE("covariant geometry context") {
    const bundle::BaseGeometry geo{1.0, [](double) { return 1.0; }, 17};
    const bundle::BundleOperator op(geo, bundle::Connection::flat(1));
    const diag::GeometryContext ctx = diag::CovariantGeometry{&op};
    CHECK(diag::node_count(ctx) == 17);
    CHECK(diag::node_on_boundary(ctx, 16));
    CHECK_FALSE(diag::node_on_boundary(ctx, 3));
    CHECK(diag::node_point(ctx, 16)[0] == doctest::Approx(1.0));
}
