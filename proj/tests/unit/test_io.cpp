#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invflow/demos.hpp"
#include "invflow/expr.hpp"
#include "invflow/io.hpp"
#include "invflow/parallel.hpp"

using namespace invflow;
using io::json;

TEST_CASE("expression parser") {
    const expr::VariableLayout layout{2};
    auto eval = [&](const char* src, std::vector<double> slots) {
        slots.resize(layout.slot_count(), 0.0);
        return expr::Expression::parse(src, layout).evaluate(slots);
    };
    CHECK(eval("1 + 2*3", {}) == 7.0);
    CHECK(eval("-2^2", {}) == -4.0);
    CHECK(eval("2^3^2", {}) == 512.0);
    CHECK(eval("(1 - 4) / 2", {}) == -1.5);
    CHECK(eval("sin(pi/2) + cos(0) + exp(0) + sqrt(4) + abs(-1) + log(1)", {}) == doctest::Approx(6.0));
    CHECK(eval("min(3, 1, 2) + max(1, 5)", {}) == 6.0);
    CHECK(eval("t + x + 10*x2 + 100*v1 + 1000*v2", {1.0, 2.0, 3.0, 4.0, 5.0}) == 1.0 + 2.0 + 30.0 + 400.0 + 5000.0);
    CHECK(eval("1e-3 * 2.5E2", {}) == doctest::Approx(0.25));
    CHECK(expr::Expression::parse("v2*t", layout).uses_slot(4));
    CHECK_FALSE(expr::Expression::parse("v2*t", layout).uses_slot(1));
    CHECK_THROWS_AS(expr::Expression::parse("v3", layout), ParseError);
    CHECK_THROWS_AS(expr::Expression::parse("1 +", layout), ParseError);
    CHECK_THROWS_AS(expr::Expression::parse("foo(1)", layout), ParseError);
    CHECK_THROWS_AS(expr::Expression::parse("(1", layout), ParseError);
    CHECK_THROWS_AS(expr::Expression::parse("1 2", layout), ParseError);
}

TEST_CASE("set round trip through JSON") {
    for (const char* src : {R"({"type":"box","lo":[0,0],"hi":[1,2]})", R"({"type":"ball","center":[0,1],"radius":2})",
                            R"({"type":"polytope","normals":[[1,0],[0,1],[-1,0],[0,-1]],"offsets":[1,1,1,1]})"}) {
        const auto j = json::parse(src);
        const auto w = io::parse_set(j);
        CHECK(io::to_json(io::parse_set(io::to_json(w))) == io::to_json(w));
        CHECK(io::to_json(w)["type"] == j["type"]);
    }
    CHECK_THROWS_AS(io::parse_set(json::parse(R"({"type":"simplex"})")), ParseError);
    CHECK_THROWS_AS(io::parse_set(json::parse(R"({"type":"box","lo":[1],"hi":[0]})")), InvalidSet);
    CHECK_THROWS_AS(io::parse_set(json::parse(R"({"type":"box","lo":["a"],"hi":[0]})")), ParseError);
}

TEST_CASE("builtin reaction terms") {
    const auto fhn = io::parse_reaction(json::parse(R"({"builtin":"fitzhugh-nagumo"})"), 2);
    const Vector out = fhn(0.0, Vector{0.0}, Vector{1.0, 0.5});
    CHECK(out[0] == doctest::Approx(1.0 - 1.0 / 3.0 - 0.5));
    CHECK(out[1] == doctest::Approx(0.08 * (1.0 + 0.7 - 0.4)));
    const auto lin = io::parse_reaction(json::parse(R"({"builtin":"linear","params":{"rate":2}})"), 3);
    CHECK(lin(0.0, Vector{0.0}, Vector{1.0, 2.0, 3.0}) == Vector{2.0, 4.0, 6.0});
    const auto ex = io::parse_reaction(json::parse(R"({"expr":["v2 - t", "x1*v1"]})"), 2);
    CHECK(ex(1.0, Vector{3.0}, Vector{2.0, 5.0}) == Vector{4.0, 6.0});
    CHECK_THROWS_AS(io::parse_reaction(json::parse(R"({"builtin":"nope"})"), 1), ParseError);
    CHECK_THROWS_AS(io::parse_reaction(json::parse(R"({"expr":["v1"]})"), 2), ParseError);
}

TEST_CASE("scenario loading: flat and bundle") {
    const auto flat = io::load_scenario(*demos::scenario("logistic-neumann"));
    CHECK(flat.mode == io::Mode::flat);
    REQUIRE(flat.flat);
    CHECK(flat.flat->domain.node_count() == 257);
    CHECK(flat.tangency.x_samples.size() == 3);

    const auto b = io::load_scenario(*demos::scenario("bundle-rotation"));
    CHECK(b.mode == io::Mode::bundle);
    REQUIRE(b.bundle);
    CHECK(b.bundle->geometry.nodes == 129);
    CHECK(b.bundle->geometry.g(2.0) == doctest::Approx(1.3));

    json missing = *demos::scenario("logistic-neumann");
    missing.erase("set");
    CHECK_THROWS_AS(io::load_scenario(missing), ParseError);

    json bad_mode = *demos::scenario("logistic-neumann");
    CHECK_THROWS_AS(io::load_scenario(bad_mode, io::Mode::bundle), ParseError);  // no geometry
}

TEST_CASE("verdict JSON is deterministic") {
    auto j = *demos::scenario("dirichlet-exit");
    j["T"] = 0.02;
    const auto sc = io::load_scenario(j, std::nullopt, 5);
    const auto a = io::to_json(io::run_scenario(sc)).dump(2);
    const auto b = io::to_json(io::run_scenario(io::load_scenario(j, std::nullopt, 5))).dump(2);
    CHECK(a == b);
    const auto parsed = json::parse(a);
    CHECK(parsed["status"] == "exited");
    CHECK(parsed["hopf_records"].size() > 0);
}

TEST_CASE("random initial values depend only on the seed") {
    auto j = json::parse(R"({
      "domain": {"extent": [[0, 1]], "cells": 16},
      "set": {"type": "ball", "center": [0, 0], "radius": 1},
      "phi": {"builtin": "zero"},
      "f0": {"builtin": "random-in-set"},
      "T": 0.01})");
    const auto a = io::load_scenario(j, std::nullopt, 1);
    const auto b = io::load_scenario(j, std::nullopt, 1);
    const auto c = io::load_scenario(j, std::nullopt, 2);
    const auto fa = flat::initial_state(*a.flat), fb = flat::initial_state(*b.flat), fc = flat::initial_state(*c.flat);
    CHECK(fa.values == fb.values);
    CHECK(fa.values != fc.values);
    for (std::size_t n = 0; n < fa.node_count(); ++n) CHECK(a.flat->set.contains(fa.at(n)));
}

TEST_CASE("CSV writers") {
    auto j = *demos::scenario("dirichlet-exit");
    j["T"] = 0.001;
    const auto sc = io::load_scenario(j);
    const auto r = io::run_scenario(sc);
    std::ostringstream traj, diag_csv;
    io::write_trajectory_csv(traj, r.trajectory, io::node_points(sc));
    io::write_diagnostics_csv(diag_csv, r.verdict, 1);
    const std::string t = traj.str(), d = diag_csv.str();
    CHECK(t.rfind("t,x1,f1\n", 0) == 0);
    CHECK(d.rfind("t,s,x_argmax,on_boundary,hopf_value\n", 0) == 0);
    const auto lines = static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n'));
    CHECK(lines == 1 + r.trajectory.frames.size() * 65);
    CHECK(static_cast<std::size_t>(std::count(d.begin(), d.end(), '\n')) == 1 + r.verdict.series.size());
}

TEST_CASE("parallel chunks cover the range once") {
    std::vector<int> hits(1000, 0);
    parallel_chunks(hits.size(), 7, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_chunks(10, 3, [](std::size_t c, std::size_t, std::size_t) {
                        if (c == 1) throw InvalidArgument("boom");
                    }),
                    InvalidArgument);
    CHECK(worker_count() >= 1);
}

TEST_CASE("demo catalogue") {
    CHECK(demos::names().size() == 5);
    std::ostringstream out;
    CHECK(demos::run("dini-lemma", out) == 0);
    CHECK(out.str().find("t_C") != std::string::npos);
    CHECK_THROWS_AS(demos::run("nope", out), InvalidArgument);
}
