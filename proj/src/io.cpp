#include "invflow/io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "invflow/expr.hpp"

namespace invflow::io {
namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const json& require(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) fail(std::string(where) + ": missing key '" + key + "'");
    return j.at(key);
}

double number(const json& j, const char* where) {
    if (!j.is_number()) fail(std::string(where) + ": expected a number");
    return j.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const char* where) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number(j.at(key), where);
}

Vector vector_of(const json& j, const char* where) {
    if (!j.is_array()) fail(std::string(where) + ": expected an array of numbers");
    Vector out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(number(e, where));
    return out;
}

std::vector<std::string> strings_of(const json& j, const char* where) {
    if (j.is_string()) return {j.get<std::string>()};
    if (!j.is_array()) fail(std::string(where) + ": expected an array of expressions");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (e.is_string())
            out.push_back(e.get<std::string>());
        else if (e.is_number())
            out.push_back(e.dump());
        else
            fail(std::string(where) + ": expressions must be strings or numbers");
    }
    return out;
}

const json& params_of(const json& j) {
    static const json empty = json::object();
    if (j.contains("params")) return j.at("params");
    return empty;
}

std::size_t count_of(const json& j, const char* where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(std::string(where) + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

// Shared expression evaluator over (t, x) or (t, x, v).
std::shared_ptr<const expr::ExpressionVector> compile(const json& sources, std::size_t state_dim,
                                                      std::size_t expected, const char* where) {
    auto exprs = strings_of(sources, where);
    if (expected && exprs.size() != expected)
        fail(std::string(where) + ": expected " + std::to_string(expected) + " expressions, got " +
             std::to_string(exprs.size()));
    return std::make_shared<const expr::ExpressionVector>(exprs, expr::VariableLayout{state_dim});
}

SpaceTimeFn parse_space_time(const json& j, std::size_t m, const char* where) {
    if (j.contains("value")) {
        const Vector value = vector_of(j.at("value"), where);
        if (value.size() != m) fail(std::string(where) + ": value has the wrong length");
        return [value](double, std::span<const double>, std::span<double> out) {
            std::copy(value.begin(), value.end(), out.begin());
        };
    }
    auto e = compile(require(j, "expr", where), 0, m, where);
    return [e](double t, std::span<const double> x, std::span<double> out) { e->evaluate(t, x, {}, out); };
}

std::uint64_t mix(std::uint64_t seed, std::span<const double> x) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (double c : x) {
        h ^= std::bit_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

InitialFn parse_initial(const json& j, std::size_t m, const convex::ConvexSet& w, std::uint64_t seed) {
    if (j.contains("expr")) {
        auto e = compile(j.at("expr"), 0, m, "f0");
        return [e](std::span<const double> x, std::span<double> out) { e->evaluate(0.0, x, {}, out); };
    }
    const std::string name = require(j, "builtin", "f0").get<std::string>();
    const json& p = params_of(j);
    if (name == "constant") {
        const Vector value = vector_of(require(p, "value", "f0.params"), "f0.params.value");
        if (value.size() != m) fail("f0: constant value has the wrong length");
        return [value](std::span<const double>, std::span<double> out) {
            std::copy(value.begin(), value.end(), out.begin());
        };
    }
    if (name == "random-in-set") {
        // Seeded by the node coordinates so the draw does not depend on call order.
        const std::uint64_t s = p.contains("seed") ? p.at("seed").get<std::uint64_t>() : seed;
        return [w, s](std::span<const double> x, std::span<double> out) {
            std::mt19937_64 rng(mix(s, x));
            const Vector v = w.sample(rng);
            std::copy(v.begin(), v.end(), out.begin());
        };
    }
    fail("f0: unknown builtin '" + name + "'");
}

Integrator parse_integrator(const json& j) {
    if (!j.contains("integrator")) return Integrator::rk4;
    const auto name = j.at("integrator").get<std::string>();
    if (name == "rk4") return Integrator::rk4;
    if (name == "euler") return Integrator::euler;
    fail("integrator: expected 'rk4' or 'euler'");
}

std::optional<double> parse_dt(const json& j) {
    if (!j.contains("dt")) return std::nullopt;
    const auto& v = j.at("dt");
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return std::nullopt;
        fail("dt: expected \"auto\" or a number");
    }
    const double dt = number(v, "dt");
    if (!(dt > 0.0)) throw InvalidScenario("dt must be positive");
    return dt;
}

BoundaryCondition parse_bc(const json& j, std::size_t m, const convex::ConvexSet& w) {
    const std::string type = require(j, "type", "bc").get<std::string>();
    if (type == "neumann") return NeumannZero{};
    if (type == "dirichlet") return Dirichlet{parse_space_time(require(j, "g", "bc"), m, "bc.g")};
    if (type != "oblique") fail("bc: unknown type '" + type + "'");

    const std::string lb = j.contains("lambda_bar") ? j.at("lambda_bar").get<std::string>() : "deviation";
    if (lb != "deviation") fail("bc.lambda_bar: only \"deviation\" is supported");
    FiberMapFn lambda_bar = [w](std::span<const double> f, std::span<double> out) {
        const auto p = w.project(f);
        std::copy(p.lambda.begin(), p.lambda.end(), out.begin());
    };

    const json& hj = require(j, "h", "bc");
    BoundaryFluxFn h;
    if (hj.contains("expr")) {
        auto e = compile(hj.at("expr"), m, m, "bc.h");
        h = [e](double t, std::span<const double> x, std::span<const double> f, std::span<double> out) {
            e->evaluate(t, x, f, out);
        };
    } else {
        const std::string name = require(hj, "builtin", "bc.h").get<std::string>();
        if (name == "zero") {
            h = [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
                std::fill(out.begin(), out.end(), 0.0);
            };
        } else if (name == "rotated-deviation") {
            if (m != 2) fail("bc.h: rotated-deviation needs a 2-component state");
            const double scale = number_or(params_of(hj), "scale", 1.0, "bc.h.params.scale");
            h = [w, scale](double, std::span<const double>, std::span<const double> f, std::span<double> out) {
                const auto p = w.project(f);
                out[0] = -scale * p.lambda[1];
                out[1] = scale * p.lambda[0];
            };
        } else {
            fail("bc.h: unknown builtin '" + name + "'");
        }
    }
    return Oblique{std::move(h), std::move(lambda_bar)};
}

Domain parse_domain(const json& j) {
    const json& extent = require(j, "extent", "domain");
    if (!extent.is_array() || extent.empty()) fail("domain.extent: expected [[lo, hi], ...]");
    const std::size_t dim = extent.size();
    if (j.contains("dim") && count_of(j.at("dim"), "domain.dim") != dim)
        fail("domain.dim does not match domain.extent");
    std::vector<std::size_t> cells;
    const json& cj = require(j, "cells", "domain");
    if (cj.is_array()) {
        for (const auto& c : cj) cells.push_back(count_of(c, "domain.cells"));
    } else {
        cells.assign(dim, count_of(cj, "domain.cells"));
    }
    if (cells.size() != dim) fail("domain.cells: one entry per axis expected");
    std::vector<Axis> axes;
    for (std::size_t a = 0; a < dim; ++a) {
        const Vector lh = vector_of(extent[a], "domain.extent");
        if (lh.size() != 2) fail("domain.extent: each axis needs [lo, hi]");
        axes.push_back({lh[0], lh[1], cells[a]});
    }
    const bool periodic = j.contains("periodic") && j.at("periodic").get<bool>();
    return Domain(std::move(axes), periodic);
}

bundle::MetricFn parse_metric(const json& j) {
    const std::string type = require(j, "type", "geometry.metric").get<std::string>();
    if (type == "constant") {
        const double g = number_or(j, "value", 1.0, "geometry.metric.value");
        return [g](double) { return g; };
    }
    if (type == "gaussian-bump") {
        const double base = number_or(j, "base", 1.0, "metric.base");
        const double amp = number_or(j, "amplitude", 0.5, "metric.amplitude");
        const double c = number(require(j, "center", "geometry.metric"), "metric.center");
        const double width = number_or(j, "width", 1.0, "metric.width");
        return [=](double x) {
            const double u = (x - c) / width;
            return base + amp * std::exp(-u * u);
        };
    }
    if (type == "expr") {
        auto e = compile(require(j, "g", "geometry.metric"), 0, 1, "geometry.metric.g");
        return [e](double x) {
            double out = 0.0;
            const double xs[1] = {x};
            e->evaluate(0.0, xs, {}, {&out, 1});
            return out;
        };
    }
    fail("geometry.metric: unknown type '" + type + "'");
}

bundle::Connection parse_connection(const json& j, std::size_t m) {
    const std::string type = require(j, "type", "connection").get<std::string>();
    if (type == "flat") return bundle::Connection::flat(m);
    if (type == "constant-rotation") {
        if (m < 2) throw InvalidScenario("constant-rotation needs at least two fiber components");
        return bundle::Connection::constant_rotation(m, number(require(j, "omega", "connection"), "omega"));
    }
    if (type == "expr") {
        const json& rows = require(j, "entries", "connection");
        if (!rows.is_array() || rows.size() != m) fail("connection.entries: expected an m x m array");
        std::vector<std::string> flat;
        for (const auto& row : rows) {
            auto r = strings_of(row, "connection.entries");
            if (r.size() != m) fail("connection.entries: expected an m x m array");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        auto e = std::make_shared<const expr::ExpressionVector>(flat, expr::VariableLayout{0});
        return bundle::Connection(m, [e, m](double x) {
            Eigen::MatrixXd a(m, m);
            Vector out(m * m);
            const double xs[1] = {x};
            e->evaluate(0.0, xs, {}, out);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) a(r, c) = out[r * m + c];
            return a;
        });
    }
    fail("connection: unknown type '" + type + "'");
}

Vector linspace(double lo, double hi, std::size_t n) {
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

TangencySetup parse_tangency(const json& j, double T, std::vector<Vector> default_x, std::uint64_t seed) {
    TangencySetup out;
    out.options.seed = seed;
    out.t_samples = linspace(0.0, T, 5);
    out.x_samples = std::move(default_x);
    if (!j.contains("tangency")) return out;
    const json& tj = j.at("tangency");
    if (tj.contains("t_samples")) out.t_samples = vector_of(tj.at("t_samples"), "tangency.t_samples");
    if (tj.contains("x_samples")) {
        out.x_samples.clear();
        for (const auto& x : tj.at("x_samples")) out.x_samples.push_back(vector_of(x, "tangency.x_samples"));
    }
    if (tj.contains("boundary_density"))
        out.options.boundary_density = count_of(tj.at("boundary_density"), "tangency.boundary_density");
    out.options.margin_tol = number_or(tj, "margin_tol", out.options.margin_tol, "tangency.margin_tol");
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Mode parse_mode(const std::string& name) {
    if (name == "flat") return Mode::flat;
    if (name == "bundle") return Mode::bundle;
    throw InvalidArgument("mode must be 'flat' or 'bundle', got '" + name + "'");
}

const char* to_string(Mode mode) { return mode == Mode::flat ? "flat" : "bundle"; }

convex::ConvexSet parse_set(const json& j) {
    try {
        const std::string type = require(j, "type", "set").get<std::string>();
        if (type == "box")
            return convex::ConvexSet::box(vector_of(require(j, "lo", "set"), "set.lo"),
                                          vector_of(require(j, "hi", "set"), "set.hi"));
        if (type == "ball")
            return convex::ConvexSet::ball(vector_of(require(j, "center", "set"), "set.center"),
                                           number(require(j, "radius", "set"), "set.radius"));
        if (type == "polytope") {
            std::vector<Vector> normals;
            for (const auto& n : require(j, "normals", "set")) normals.push_back(vector_of(n, "set.normals"));
            return convex::ConvexSet::polytope(std::move(normals),
                                               vector_of(require(j, "offsets", "set"), "set.offsets"));
        }
        fail("set: unknown type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("set: ") + e.what());
    }
}

json to_json(const convex::ConvexSet& w) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, convex::Box>)
                return {{"type", "box"}, {"lo", s.lo}, {"hi", s.hi}};
            else if constexpr (std::is_same_v<S, convex::Ball>)
                return {{"type", "ball"}, {"center", s.center}, {"radius", s.radius}};
            else
                return {{"type", "polytope"}, {"normals", s.normals}, {"offsets", s.offsets}};
        },
        w.shape());
}

ReactionTerm parse_reaction(const json& j, std::size_t m) {
    try {
        if (j.contains("expr")) {
            auto e = compile(j.at("expr"), m, m, "phi");
            return ReactionTerm(m, [e](double t, std::span<const double> x, std::span<const double> v,
                                       std::span<double> out) { e->evaluate(t, x, v, out); });
        }
        const std::string name = require(j, "builtin", "phi").get<std::string>();
        const json& p = params_of(j);
        if (name == "zero")
            return ReactionTerm(m, [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
                std::fill(out.begin(), out.end(), 0.0);
            });
        if (name == "logistic") {
            const double r = number_or(p, "rate", 1.0, "phi.params.rate");
            return ReactionTerm(m, [r](double, std::span<const double>, std::span<const double> v,
                                       std::span<double> out) {
                for (std::size_t k = 0; k < v.size(); ++k) out[k] = r * v[k] * (1.0 - v[k]);
            });
        }
        if (name == "linear") {
            const double a = number_or(p, "rate", -1.0, "phi.params.rate");
            return ReactionTerm(m, [a](double, std::span<const double>, std::span<const double> v,
                                       std::span<double> out) {
                for (std::size_t k = 0; k < v.size(); ++k) out[k] = a * v[k];
            });
        }
        if (name == "constant") {
            const Vector value = vector_of(require(p, "value", "phi.params"), "phi.params.value");
            if (value.size() != m) fail("phi: constant value has the wrong length");
            return ReactionTerm(m, [value](double, std::span<const double>, std::span<const double>,
                                           std::span<double> out) { std::copy(value.begin(), value.end(), out.begin()); });
        }
        if (name == "fitzhugh-nagumo") {
            if (m != 2) throw InvalidScenario("fitzhugh-nagumo needs a 2-component state");
            const double a = number_or(p, "a", 0.7, "phi.params.a");
            const double b = number_or(p, "b", 0.8, "phi.params.b");
            const double eps = number_or(p, "epsilon", 0.08, "phi.params.epsilon");
            const double current = number_or(p, "current", 0.0, "phi.params.current");
            return ReactionTerm(2, [=](double, std::span<const double>, std::span<const double> v,
                                       std::span<double> out) {
                out[0] = v[0] - v[0] * v[0] * v[0] / 3.0 - v[1] + current;
                out[1] = eps * (v[0] + a - b * v[1]);
            });
        }
        fail("phi: unknown builtin '" + name + "'");
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("phi: ") + e.what());
    }
}

LoadedScenario load_scenario(const json& j, std::optional<Mode> mode_override,
                             std::optional<std::uint64_t> seed_override) {
    try {
        if (!j.is_object()) fail("scenario: expected a JSON object");
        LoadedScenario out;
        if (j.contains("mode"))
            out.mode = parse_mode(j.at("mode").get<std::string>());
        else if (j.contains("geometry"))
            out.mode = Mode::bundle;
        if (mode_override) out.mode = *mode_override;

        const std::uint64_t seed = seed_override ? *seed_override
                                                 : (j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0);
        convex::ConvexSet w = parse_set(require(j, "set", "scenario"));
        const std::size_t m = w.dim();
        const double T = number(require(j, "T", "scenario"), "T");
        if (!(T > 0.0)) throw InvalidScenario("T must be positive");
        ReactionTerm phi = parse_reaction(require(j, "phi", "scenario"), m);
        const BoundaryCondition bc =
            j.contains("bc") ? parse_bc(j.at("bc"), m, w) : BoundaryCondition{NeumannZero{}};
        InitialFn f0 = parse_initial(require(j, "f0", "scenario"), m, w, seed);

        if (out.mode == Mode::flat) {
            flat::Scenario sc;
            sc.domain = parse_domain(require(j, "domain", "scenario"));
            sc.set = w;
            const std::size_t dim = sc.domain.dim();
            if (j.contains("zeta")) sc.zeta = parse_space_time(j.at("zeta"), dim, "zeta");
            sc.phi = std::move(phi);
            sc.bc = bc;
            sc.f0 = std::move(f0);
            sc.T = T;
            sc.dt = parse_dt(j);
            sc.integrator = parse_integrator(j);
            sc.seed = seed;

            std::vector<Vector> xs;
            const auto& a0 = sc.domain.axis(0);
            if (dim == 1) {
                xs = {{a0.lo}, {0.5 * (a0.lo + a0.hi)}, {a0.hi}};
            } else {
                const auto& a1 = sc.domain.axis(1);
                xs = {{a0.lo, a1.lo}, {a0.hi, a1.lo}, {a0.lo, a1.hi}, {a0.hi, a1.hi},
                      {0.5 * (a0.lo + a0.hi), 0.5 * (a1.lo + a1.hi)}};
            }
            out.tangency = parse_tangency(j, T, std::move(xs), seed);
            out.flat = std::move(sc);
        } else {
            const json& gj = require(j, "geometry", "scenario");
            bundle::BundleScenario sc;
            sc.geometry.L = number(require(gj, "L", "geometry"), "geometry.L");
            sc.geometry.nodes = count_of(require(gj, "nodes", "geometry"), "geometry.nodes");
            sc.geometry.g = gj.contains("metric") ? parse_metric(gj.at("metric")) : bundle::MetricFn([](double) { return 1.0; });
            sc.connection = j.contains("connection") ? parse_connection(j.at("connection"), m)
                                                     : bundle::Connection::flat(m);
            sc.set = w;
            sc.phi = std::move(phi);
            if (j.contains("zeta")) {
                auto z = parse_space_time(j.at("zeta"), 1, "zeta");
                sc.zeta = [z](double t, double x) {
                    double out = 0.0;
                    const double xs[1] = {x};
                    z(t, xs, {&out, 1});
                    return out;
                };
            }
            sc.bc = bc;
            sc.f0 = std::move(f0);
            sc.T = T;
            sc.dt = parse_dt(j);
            sc.integrator = parse_integrator(j);
            sc.seed = seed;
            bundle::validate(sc);
            const double L = sc.geometry.L;
            out.tangency = parse_tangency(j, T, {{0.0}, {0.5 * L}, {L}}, seed);
            out.bundle = std::move(sc);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("scenario: ") + e.what());
    }
}

LoadedScenario load_scenario_file(const std::string& path, std::optional<Mode> mode_override,
                                  std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return load_scenario(j, mode_override, seed_override);
}

SolveResult run_scenario(const LoadedScenario& scenario, const SolveOptions& options) {
    if (scenario.flat) return flat::solve(*scenario.flat, options);
    return bundle::solve_bundle(*scenario.bundle, options);
}

tangency::TangencyReport check_scenario_tangency(const LoadedScenario& scenario) {
    const auto& ts = scenario.tangency;
    return tangency::check_tangency(scenario.phi(), scenario.set(), ts.t_samples, ts.x_samples, ts.options);
}

std::vector<Vector> node_points(const LoadedScenario& scenario) {
    std::vector<Vector> out;
    if (scenario.flat) {
        const auto& d = scenario.flat->domain;
        for (std::size_t n = 0; n < d.node_count(); ++n) out.push_back(d.point(n));
    } else {
        const auto& g = scenario.bundle->geometry;
        for (std::size_t i = 0; i < g.nodes; ++i) out.push_back({g.node(i)});
    }
    return out;
}

json to_json(const diag::InvarianceVerdict& v) {
    json records = json::array();
    for (const auto& r : v.hopf_records) {
        records.push_back({{"t", r.pair.t},
                           {"node", r.pair.node},
                           {"x", r.pair.x},
                           {"on_boundary", r.pair.on_boundary},
                           {"dist", r.pair.dist},
                           {"lambda", r.pair.lambda},
                           {"hopf_value", optional_number(r.hopf_value)}});
    }
    json out = {{"status", diag::to_string(v.status)},
                {"first_exit_time", optional_number(v.first_exit_time)},
                {"worst_dist", v.worst_dist},
                {"exit_threshold", v.exit_threshold},
                {"max_hopf_value", optional_number(v.max_hopf_value)},
                {"max_s_rate", v.max_s_rate},
                {"hopf_records", std::move(records)}};
    out["global_max_pairs_on_boundary"] =
        v.global_max_pairs_on_boundary ? json(*v.global_max_pairs_on_boundary) : json(nullptr);
    return out;
}

json to_json(const SolveResult& r) {
    json out = to_json(r.verdict);
    out["dt"] = r.dt;
    out["steps"] = r.steps;
    out["cadence"] = r.cadence;
    out["grid_noise"] = r.grid_noise;
    out["failed"] = r.failed;
    out["failure"] = r.failed ? json(r.failure) : json(nullptr);
    out["warnings"] = r.warnings;
    out["final_time"] = r.final_state.t;
    return out;
}

json to_json(const tangency::TangencyReport& r) {
    return {{"certified", r.certified},
            {"worst_margin", r.worst_margin},
            {"worst_witness",
             {{"t", r.worst_witness.t},
              {"x", r.worst_witness.x},
              {"omega", r.worst_witness.omega},
              {"lambda", r.worst_witness.lambda}}},
            {"samples_checked", r.samples_checked},
            {"margin_tol", r.margin_tol},
            {"boundary_density", r.boundary_density},
            {"boundary_points", r.boundary_points}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<Vector>& points) {
    const std::size_t dim = points.empty() ? 1 : points.front().size();
    const std::size_t m = trajectory.frames.empty() ? 0 : trajectory.frames.front().components;
    out << "t";
    for (std::size_t a = 0; a < dim; ++a) out << ",x" << a + 1;
    for (std::size_t c = 0; c < m; ++c) out << ",f" << c + 1;
    out << '\n';
    out << std::setprecision(17);
    for (const auto& frame : trajectory.frames) {
        for (std::size_t n = 0; n < frame.node_count(); ++n) {
            out << frame.t;
            for (double x : points[n]) out << ',' << x;
            for (double f : frame.at(n)) out << ',' << f;
            out << '\n';
        }
    }
}

void write_diagnostics_csv(std::ostream& out, const diag::InvarianceVerdict& verdict, std::size_t spatial_dim) {
    out << "t,s";
    if (spatial_dim == 1)
        out << ",x_argmax";
    else
        for (std::size_t a = 0; a < spatial_dim; ++a) out << ",x" << a + 1 << "_argmax";
    out << ",on_boundary,hopf_value\n";
    out << std::setprecision(17);
    for (const auto& e : verdict.series) {
        out << e.t << ',' << e.s;
        for (double x : e.x_argmax) out << ',' << x;
        out << ',' << (e.on_boundary ? 1 : 0) << ',';
        if (e.hopf_value) out << *e.hopf_value;
        out << '\n';
    }
}

}  // namespace invflow::io
