#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "invflow/pde_flat.hpp"
#include "oracles.hpp"

using namespace invflow;
using convex::ConvexSet;
using flat::Scenario;

namespace {

ReactionTerm zero_phi(std::size_t m) {
    return ReactionTerm(m, [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    });
}

ReactionTerm logistic() {
    return ReactionTerm(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0] * (1.0 - v[0]);
    });
}

Scenario heat(double L, std::size_t cells) {
    Scenario sc;
    sc.domain = Domain({{0.0, L, cells}}, false);
    sc.set = ConvexSet::box({-2.0}, {2.0});
    sc.phi = zero_phi(1);
    sc.f0 = [L](std::span<const double> x, std::span<double> out) { out[0] = oracle::heat_mode(x[0], 0.0, L); };
    return sc;
}

Scenario logistic_scenario(double L, std::size_t cells, double T) {
    Scenario sc;
    sc.domain = Domain({{0.0, L, cells}}, false);
    sc.set = ConvexSet::box({0.0}, {1.0});
    sc.phi = logistic();
    sc.f0 = [L](std::span<const double> x, std::span<double> out) {
        out[0] = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * x[0] / L);
    };
    sc.T = T;
    return sc;
}

}  // namespace

TEST_CASE("domain layout") {
    const Domain d({{0.0, 1.0, 8}, {0.0, 2.0, 16}}, false);
    CHECK(d.node_count() == 9 * 17);
    CHECK(d.spacing(1) == doctest::Approx(0.125));
    CHECK(d.on_boundary(0));
    CHECK_FALSE(d.on_boundary(d.node(4, 8)));
    const Domain p({{0.0, 1.0, 8}}, true);
    CHECK(p.node_count() == 8);
    CHECK_FALSE(p.on_boundary(0));
    CHECK_THROWS_AS(Domain({{0.0, 1.0, 4}}, false), InvalidScenario);
    CHECK_THROWS_AS(Domain({{1.0, 0.0, 8}}, false), InvalidScenario);
}

TEST_CASE("Neumann ghost mirrors the interior neighbour") {
    const Domain d({{0.0, 1.0, 8}}, false);
    FieldState s{0.0, 1, std::vector<double>(9, 0.0)};
    s.values[1] = 0.7;
    s.values[7] = 0.3;
    flat::GhostLayer ghost;
    flat::apply_boundary(s, d, NeumannZero{}, ConvexSet::box({0.0}, {1.0}), ghost);
    CHECK(ghost.value(0, 0, 0, 1)[0] == 0.7);
    CHECK(ghost.value(0, 1, 0, 1)[0] == 0.3);
}

TEST_CASE("Dirichlet data overwrite boundary nodes") {
    const Domain d({{0.0, 1.0, 8}}, false);
    FieldState s{0.0, 1, std::vector<double>(9, -5.0)};
    flat::GhostLayer ghost;
    const Dirichlet bc{[](double, std::span<const double>, std::span<double> out) { out[0] = 2.0; }};
    flat::apply_boundary(s, d, bc, ConvexSet::box({0.0}, {1.0}), ghost);
    CHECK(s.values.front() == 2.0);
    CHECK(s.values.back() == 2.0);
    CHECK(s.values[4] == -5.0);
}

TEST_CASE("oblique ghost encodes the rotated deviation") {
    const Domain d({{0.0, 1.0, 8}}, false);
    const auto w = ConvexSet::ball({0.0, 0.0}, 1.0);
    FieldState s{0.0, 2, std::vector<double>(18, 0.0)};
    s.at(0)[0] = 2.0;  // f = (2, 0) at x = 0
    const Oblique bc{
        [w](double, std::span<const double>, std::span<const double> f, std::span<double> out) {
            const auto p = w.project(f);
            out[0] = -p.lambda[1] / std::max(p.dist, 1e-300);
            out[1] = p.lambda[0] / std::max(p.dist, 1e-300);
        },
        [w](std::span<const double> f, std::span<double> out) {
            const auto p = w.project(f);
            std::copy(p.lambda.begin(), p.lambda.end(), out.begin());
        }};
    flat::GhostLayer ghost;
    flat::apply_boundary(s, d, bc, w, ghost);
    // ghost = f_1 + 2h * d_nu f with d_nu f = (0, 1)
    const auto g = ghost.value(0, 0, 0, 2);
    const double h = d.spacing(0);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(2.0 * h));
    // lambda(f) = (1, 0), so <lambda, d_nu f> is the first component
    CHECK((g[0] - s.at(1)[0]) / (2.0 * h) == doctest::Approx(0.0));
    CHECK((g[1] - s.at(1)[1]) / (2.0 * h) == doctest::Approx(1.0));
}

TEST_CASE("oblique data violating orthogonality are rejected") {
    const Domain d({{0.0, 1.0, 8}}, false);
    const auto w = ConvexSet::ball({0.0, 0.0}, 1.0);
    FieldState s{0.0, 2, std::vector<double>(18, 0.0)};
    s.at(0)[0] = 2.0;
    const Oblique bc{[](double, std::span<const double>, std::span<const double>, std::span<double> out) {
                         out[0] = 1.0;
                         out[1] = 0.0;
                     },
                     [w](std::span<const double> f, std::span<double> out) {
                         const auto p = w.project(f);
                         std::copy(p.lambda.begin(), p.lambda.end(), out.begin());
                     }};
    flat::GhostLayer ghost;
    CHECK_THROWS_AS(flat::apply_boundary(s, d, bc, w, ghost), ObliqueViolation);
}

TEST_CASE("constants are equilibria") {
    Scenario sc = heat(1.0, 16);
    sc.f0 = [](std::span<const double>, std::span<double> out) { out[0] = 0.37; };
    const FieldState s0 = flat::initial_state(sc);
    const FieldState s1 = flat::step(s0, sc, 1e-4);
    for (double v : s1.values) CHECK(v == 0.37);
}

TEST_CASE("one heat step matches the separable solution") {
    const double L = 2.0;
    Scenario sc = heat(L, 64);
    const double h = L / 64.0, dt = 0.1 * h * h;
    const FieldState s1 = flat::step(flat::initial_state(sc), sc, dt);
    double err = 0.0;
    for (std::size_t i = 0; i < 65; ++i)
        err = std::max(err, std::abs(s1.values[i] - oracle::heat_mode(static_cast<double>(i) * h, dt, L)));
    CHECK(err <= 10.0 * (dt * dt + dt * h * h));
}

TEST_CASE("linear growth at a flat interior node") {
    Scenario sc = heat(1.0, 16);
    sc.phi = ReactionTerm(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0];
    });
    sc.f0 = [](std::span<const double>, std::span<double> out) { out[0] = 0.5; };
    const auto r = flat::rhs(flat::initial_state(sc), sc);
    CHECK(r[8] == 0.5);
    sc.integrator = Integrator::euler;
    const auto s1 = flat::step(flat::initial_state(sc), sc, 1e-3);
    CHECK(s1.values[8] == doctest::Approx(0.5 + 1e-3 * 0.5).epsilon(1e-15));
}

TEST_CASE("step rejects dt beyond the stability bound") {
    Scenario sc = heat(1.0, 16);
    CHECK_THROWS_AS(flat::step(flat::initial_state(sc), sc, 1.0), InvalidArgument);
}

TEST_CASE("logistic with Neumann data stays in [0, 1]") {
    for (std::size_t cells : {64, 128}) {
        const auto r = flat::solve(logistic_scenario(10.0, cells, 2.0));
        CHECK(r.verdict.status == diag::Status::invariant);
        CHECK(r.verdict.worst_dist <= 1e-8);
        CHECK_FALSE(r.failed);
    }
}

TEST_CASE("logistic with drift stays in [0, 1]") {
    Scenario sc = logistic_scenario(10.0, 128, 2.0);
    sc.zeta = [](double, std::span<const double>, std::span<double> out) { out[0] = 0.5; };
    const auto r = flat::solve(sc);
    CHECK(r.verdict.status == diag::Status::invariant);
    CHECK(r.verdict.worst_dist <= 1e-8);
}

TEST_CASE("Dirichlet value outside W forces an exit at the boundary") {
    Scenario sc = logistic_scenario(10.0, 64, 0.5);
    sc.bc = Dirichlet{[](double, std::span<const double>, std::span<double> out) { out[0] = 2.0; }};
    const auto r = flat::solve(sc);
    CHECK(r.verdict.status == diag::Status::exited);
    REQUIRE(r.verdict.first_exit_time);
    CHECK(*r.verdict.first_exit_time <= 10.0 * r.dt * r.cadence);
    REQUIRE(!r.verdict.hopf_records.empty());
    CHECK(r.verdict.hopf_records.front().pair.on_boundary);
}

TEST_CASE("zero data in the ball keep the solution at zero") {
    Scenario sc;
    sc.domain = Domain({{0.0, 1.0, 16}, {0.0, 1.0, 16}}, false);
    sc.set = ConvexSet::ball({0.0, 0.0}, 1.0);
    sc.phi = zero_phi(2);
    sc.f0 = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    sc.bc = Dirichlet{[](double, std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }};
    sc.T = 0.05;
    const auto r = flat::solve(sc);
    CHECK(r.verdict.status == diag::Status::invariant);
    for (const auto& frame : r.trajectory.frames)
        for (double v : frame.values) CHECK(v == 0.0);
}

TEST_CASE("periodic logistic stays in [0, 1]") {
    Scenario sc = logistic_scenario(2.0 * std::numbers::pi, 64, 1.0);
    sc.domain = Domain({{0.0, 2.0 * std::numbers::pi, 64}}, true);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> values(64);
    for (auto& v : values) v = u(rng);
    sc.f0 = [values](std::span<const double> x, std::span<double> out) {
        out[0] = values[static_cast<std::size_t>(std::lround(x[0] / (2.0 * std::numbers::pi / 64.0))) % 64];
    };
    const auto r = flat::solve(sc);
    CHECK(r.verdict.status == diag::Status::invariant);
    CHECK(r.verdict.worst_dist <= 1e-7);
}

TEST_CASE("two-dimensional Neumann heat preserves a box") {
    Scenario sc;
    sc.domain = Domain({{0.0, 1.0, 16}, {0.0, 1.0, 16}}, false);
    sc.set = ConvexSet::box({-1.0, -1.0}, {1.0, 1.0});
    sc.phi = zero_phi(2);
    sc.f0 = [](std::span<const double> x, std::span<double> out) {
        out[0] = std::cos(std::numbers::pi * x[0]);
        out[1] = std::cos(std::numbers::pi * x[1]) * std::cos(std::numbers::pi * x[0]);
    };
    sc.T = 0.05;
    const auto r = flat::solve(sc);
    CHECK(r.verdict.status == diag::Status::invariant);
    CHECK(r.verdict.worst_dist == 0.0);
}

TEST_CASE("automatic time step divides T and respects the reaction scale") {
    Scenario sc = heat(1.0, 32);
    sc.T = 0.1;
    const double dt = flat::auto_time_step(sc);
    const double steps = sc.T / dt;
    CHECK(std::abs(steps - std::round(steps)) <= 1e-9);
    CHECK(dt <= 0.2 / (32.0 * 32.0) / 2.0 * (1.0 + 1e-12));
    sc.phi = ReactionTerm(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = -5000.0 * v[0];
    });
    CHECK(flat::auto_time_step(sc) <= 0.1 / 5000.0 * (1.0 + 1e-9));
}

TEST_CASE("blow-up aborts with the last good state") {
    Scenario sc = heat(1.0, 16);
    sc.phi = ReactionTerm(1, [](double, std::span<const double>, std::span<const double> v, std::span<double> out) {
        out[0] = v[0] * v[0] * v[0];
    });
    sc.f0 = [](std::span<const double>, std::span<double> out) { out[0] = 10.0; };
    sc.set = ConvexSet::box({-1e20}, {1e20});
    sc.dt = 1e-3;
    sc.T = 1.0;
    const auto r = flat::solve(sc);
    CHECK(r.failed);
    CHECK(all_finite(r.final_state.values));
    CHECK(r.final_state.t < 1.0);
}

TEST_CASE("initial value outside W produces a warning") {
    Scenario sc = heat(1.0, 16);
    sc.set = ConvexSet::box({0.0}, {0.5});
    sc.T = 0.01;
    const auto r = flat::solve(sc);
    REQUIRE(!r.warnings.empty());
    CHECK(r.warnings.front().find("outside") != std::string::npos);
}

TEST_CASE("Neumann heat is second-order accurate in space") {
    const double L = 1.0, T = 0.05;
    std::vector<double> err;
    for (std::size_t cells : {32, 64, 128}) {
        Scenario sc = heat(L, cells);
        sc.T = T;
        SolveOptions o;
        o.keep_trajectory = false;
        const auto r = flat::solve(sc, o);
        double e = 0.0;
        for (std::size_t i = 0; i <= cells; ++i) {
            const double x = L * static_cast<double>(i) / static_cast<double>(cells);
            e = std::max(e, std::abs(r.final_state.values[i] - oracle::heat_mode(x, T, L)));
        }
        err.push_back(e);
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.7);
    CHECK(std::log2(err[1] / err[2]) >= 1.7);
}
