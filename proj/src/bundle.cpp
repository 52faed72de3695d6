#include "invflow/bundle.hpp"

#include <algorithm>
#include <cmath>

#include "stepper.hpp"

namespace invflow::bundle {
namespace {

constexpr double kSkewTol = 1e-12;
// Largest rotation angle per RK4 substep of the transport equation.
constexpr double kTransportAngle = 1e-2;

// out = P * v, accumulated in column order.
void apply(const Eigen::MatrixXd& p, std::span<const double> v, std::span<double> out) {
    const auto m = static_cast<Eigen::Index>(v.size());
    for (Eigen::Index r = 0; r < m; ++r) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < m; ++c) s += p(r, c) * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = s;
    }
}

}  // namespace

Connection::Connection(std::size_t dim, ConnectionFn a) : dim_(dim), a_(std::move(a)) {
    if (dim_ == 0) throw InvalidArgument("connection: fiber dimension must be positive");
    if (!a_) throw InvalidArgument("connection: empty coefficient function");
}

Connection Connection::flat(std::size_t dim) {
    return Connection(dim, [dim](double) {
        return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    });
}

Connection Connection::constant_rotation(std::size_t dim, double omega0) {
    if (dim < 2) throw InvalidArgument("connection: rotation needs fiber dimension >= 2");
    return Connection(dim, [dim, omega0](double) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        a(0, 1) = -omega0;
        a(1, 0) = omega0;
        return a;
    });
}

void Connection::validate(const BaseGeometry& geometry) const {
    for (std::size_t i = 0; i < geometry.nodes; ++i) {
        const Eigen::MatrixXd a = a_(geometry.node(i));
        if (a.rows() != static_cast<Eigen::Index>(dim_) || a.cols() != static_cast<Eigen::Index>(dim_))
            throw InvalidScenario("connection: coefficient has the wrong shape");
        if (!a.allFinite()) throw InvalidScenario("connection: non-finite coefficient");
        if ((a + a.transpose()).cwiseAbs().maxCoeff() > kSkewTol)
            throw InvalidScenario("connection: coefficient is not skew-symmetric");
    }
}

Eigen::MatrixXd transport_matrix(const Connection& connection, double x0, double x1, double max_step) {
    const auto m = static_cast<Eigen::Index>(connection.dim());
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
    const double length = std::abs(x1 - x0);
    if (length == 0.0) return p;

    double step = max_step > 0.0 ? max_step : length;
    double a_max = 0.0;
    constexpr int kProbe = 33;
    for (int i = 0; i < kProbe; ++i)
        a_max = std::max(a_max, connection(x0 + (x1 - x0) * i / (kProbe - 1)).norm());
    if (a_max > 0.0) step = std::min(step, kTransportAngle / a_max);
    const auto n = static_cast<std::size_t>(std::ceil(length / step - 1e-12));
    const double s = (x1 - x0) / static_cast<double>(std::max<std::size_t>(n, 1));

    for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
        const double x = x0 + static_cast<double>(k) * s;
        const Eigen::MatrixXd a0 = connection(x);
        const Eigen::MatrixXd am = connection(x + 0.5 * s);
        const Eigen::MatrixXd a1 = connection(x + s);
        const Eigen::MatrixXd k1 = -a0 * p;
        const Eigen::MatrixXd k2 = -am * (p + 0.5 * s * k1);
        const Eigen::MatrixXd k3 = -am * (p + 0.5 * s * k2);
        const Eigen::MatrixXd k4 = -a1 * (p + s * k3);
        p += s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

Vector parallel_transport(const Connection& connection, double x0, double x1, std::span<const double> v) {
    if (v.size() != connection.dim()) throw InvalidArgument("parallel_transport: dimension mismatch");
    const Eigen::MatrixXd p = transport_matrix(connection, x0, x1);
    Vector out(v.size());
    apply(p, v, out);
    return out;
}

BundleOperator::BundleOperator(const BaseGeometry& geometry, const Connection& connection)
    : dim_(connection.dim()) {
    if (geometry.nodes < 9) throw InvalidScenario("bundle: need at least 9 nodes (8 cells)");
    if (!(geometry.L > 0.0)) throw InvalidScenario("bundle: base length must be positive");
    if (!geometry.g) throw InvalidScenario("bundle: metric is not set");
    const std::size_t n = geometry.nodes;
    h_ = geometry.spacing();
    x_.resize(n);
    g_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x_[i] = geometry.node(i);
        g_[i] = geometry.g(x_[i]);
        if (!(g_[i] > 0.0) || !std::isfinite(g_[i])) throw InvalidScenario("bundle: metric must be positive");
    }
    gamma_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dg = 0.0;
        if (i == 0) dg = (-3.0 * g_[0] + 4.0 * g_[1] - g_[2]) / (2.0 * h_);
        else if (i + 1 == n) dg = (3.0 * g_[n - 1] - 4.0 * g_[n - 2] + g_[n - 3]) / (2.0 * h_);
        else dg = (g_[i + 1] - g_[i - 1]) / (2.0 * h_);
        gamma_[i] = dg / (2.0 * g_[i]);
    }
    const auto m = static_cast<Eigen::Index>(dim_);
    right_.assign(n, Eigen::MatrixXd::Identity(m, m));
    left_.assign(n, Eigen::MatrixXd::Identity(m, m));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_[i + 1] = transport_matrix(connection, x_[i], x_[i + 1], h_);
        right_[i] = transport_matrix(connection, x_[i + 1], x_[i], h_);
    }
}

double BundleOperator::min_metric() const { return *std::min_element(g_.begin(), g_.end()); }

void BundleOperator::neighbours(const FieldState& state, std::size_t i, std::span<double> left,
                                std::span<double> right) const {
    const std::size_t n = nodes();
    if (i == 0) {
        apply(right_[0], state.at(1), right);
        std::copy(right.begin(), right.end(), left.begin());
    } else if (i + 1 == n) {
        apply(left_[i], state.at(i - 1), left);
        std::copy(left.begin(), left.end(), right.begin());
    } else {
        apply(left_[i], state.at(i - 1), left);
        apply(right_[i], state.at(i + 1), right);
    }
}

void BundleOperator::covariant_derivative(const FieldState& state, std::size_t i, std::span<double> out) const {
    Vector left(dim_), right(dim_);
    neighbours(state, i, left, right);
    for (std::size_t c = 0; c < dim_; ++c) out[c] = (right[c] - left[c]) / (2.0 * h_);
}

void BundleOperator::laplacian(const FieldState& state, std::span<double> out) const {
    Vector left(dim_), right(dim_);
    const double h2 = h_ * h_;
    for (std::size_t i = 0; i < nodes(); ++i) {
        neighbours(state, i, left, right);
        const auto f = state.at(i);
        const double inv_g = 1.0 / g_[i];
        for (std::size_t c = 0; c < dim_; ++c) {
            const double second = (left[c] - 2.0 * f[c] + right[c]) / h2;
            const double first = (right[c] - left[c]) / (2.0 * h_);
            out[i * dim_ + c] = inv_g * second - inv_g * gamma_[i] * first;
        }
    }
}

Vector BundleOperator::normal_derivative(const FieldState& state, std::size_t end_node) const {
    const std::size_t n = nodes();
    if (end_node != 0 && end_node + 1 != n) throw InteriorPoint("normal_derivative: node is not an end point");
    const bool lower = end_node == 0;
    Vector f1(dim_), f2(dim_), tmp(dim_);
    if (lower) {
        apply(right_[1], state.at(2), tmp);
        apply(right_[0], tmp, f2);
        apply(right_[0], state.at(1), f1);
    } else {
        apply(left_[n - 2], state.at(n - 3), tmp);
        apply(left_[n - 1], tmp, f2);
        apply(left_[n - 1], state.at(n - 2), f1);
    }
    const auto f0 = state.at(end_node);
    const double scale = 1.0 / std::sqrt(g_[end_node]);
    Vector out(dim_);
    for (std::size_t c = 0; c < dim_; ++c) out[c] = scale * (3.0 * f0[c] - 4.0 * f1[c] + f2[c]) / (2.0 * h_);
    return out;
}

std::vector<double> covariant_laplacian(const FieldState& state, const BaseGeometry& geometry,
                                        const Connection& connection) {
    const BundleOperator op(geometry, connection);
    if (state.components != op.dim() || state.node_count() != op.nodes())
        throw InvalidArgument("covariant_laplacian: state does not match the geometry");
    std::vector<double> out(state.values.size());
    op.laplacian(state, out);
    return out;
}

void validate(const BundleScenario& sc) {
    const auto* ball = std::get_if<convex::Ball>(&sc.set.shape());
    if (!ball) throw InvalidScenario("bundle: W must be a ball centred at the origin");
    if (std::any_of(ball->center.begin(), ball->center.end(), [](double c) { return c != 0.0; }))
        throw InvalidScenario("bundle: W must be a ball centred at the origin");
    if (!sc.phi) throw InvalidScenario("bundle: reaction term is not set");
    if (!sc.f0) throw InvalidScenario("bundle: initial value is not set");
    if (sc.phi.dim() != sc.set.dim() || sc.connection.dim() != sc.set.dim())
        throw InvalidScenario("bundle: fiber dimensions of phi, W and the connection differ");
    if (std::holds_alternative<Oblique>(sc.bc)) throw InvalidScenario("bundle: only Neumann or Dirichlet data");
    if (const auto* d = std::get_if<Dirichlet>(&sc.bc); d && !d->g)
        throw InvalidScenario("bundle: Dirichlet data missing");
    if (!(sc.T > 0.0)) throw InvalidScenario("bundle: horizon T must be positive");
    if (sc.dt && !(*sc.dt > 0.0)) throw InvalidScenario("bundle: dt must be positive");
    sc.connection.validate(sc.geometry);
}

FieldState initial_state(const BundleScenario& sc) {
    FieldState s;
    s.components = sc.set.dim();
    s.values.assign(sc.geometry.nodes * s.components, 0.0);
    for (std::size_t i = 0; i < sc.geometry.nodes; ++i) {
        const double x = sc.geometry.node(i);
        sc.f0(std::span<const double>(&x, 1), s.at(i));
    }
    return s;
}

SolveResult solve_bundle(const BundleScenario& sc, const SolveOptions& options) {
    validate(sc);
    const BundleOperator op(sc.geometry, sc.connection);
    const std::size_t n = op.nodes();
    const std::size_t m = op.dim();
    const double h = op.spacing();
    const bool dirichlet = std::holds_alternative<Dirichlet>(sc.bc);

    FieldState y = initial_state(sc);
    auto warnings = detail::initial_value_warnings(y, sc.set);

    std::vector<Vector> xs;
    const std::size_t stride = std::max<std::size_t>(1, n / 64);
    for (std::size_t i = 0; i < n; i += stride) xs.push_back({op.x(i)});
    double dt = 0.0;
    if (sc.dt) {
        dt = detail::finalize_time_step(*sc.dt, 0.0, sc.T);
    } else {
        dt = detail::estimate_step(sc.phi, sc.set, y, xs, h, 1, op.min_metric(), sc.T, sc.seed);
    }
    if (dt > detail::stability_bound(h, 1, op.min_metric(), sc.integrator) * (1.0 + 1e-12))
        throw InvalidScenario("bundle: dt exceeds the explicit stability bound");

    auto pin = [&](FieldState& s) {
        if (!dirichlet) return;
        const auto& g = std::get<Dirichlet>(sc.bc).g;
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double x = op.x(i);
            g(s.t, std::span<const double>(&x, 1), s.at(i));
        }
    };
    Vector left(m), right(m), phi(m);
    auto rhs = [&](FieldState& s, std::vector<double>& out) {
        out.assign(s.values.size(), 0.0);
        const double h2 = h * h;
        for (std::size_t i = 0; i < n; ++i) {
            if (dirichlet && (i == 0 || i + 1 == n)) continue;
            op.neighbours(s, i, left, right);
            const auto f = s.at(i);
            const double x = op.x(i);
            const double inv_g = 1.0 / op.metric(i);
            const double zeta = sc.zeta ? sc.zeta(s.t, x) : 0.0;
            sc.phi(s.t, std::span<const double>(&x, 1), f, phi);
            double* o = out.data() + i * m;
            for (std::size_t c = 0; c < m; ++c) {
                const double first = (right[c] - left[c]) / (2.0 * h);
                const double lap = inv_g * ((left[c] - 2.0 * f[c] + right[c]) / h2) - inv_g * op.christoffel(i) * first;
                const double drift = sc.zeta ? zeta * first : 0.0;
                o[c] = lap + drift + phi[c];
            }
        }
    };
    detail::StepKernel kernel{pin, rhs};

    std::vector<double> lap0(y.values.size());
    op.laplacian(y, lap0);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        for (std::size_t c = 0; c < m; ++c) worst = std::max(worst, std::abs(lap0[i * m + c]));
    const double noise = std::max(1e-8, h * h * worst / 12.0);

    const double threshold = options.exit_threshold.value_or(10.0 * noise);
    diag::Monitor monitor(sc.set, threshold, diag::CovariantGeometry{&op});
    SolveResult result = detail::run(std::move(y), sc.T, dt, sc.integrator, kernel, monitor, options);
    result.grid_noise = noise;
    result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
    return result;
}

}  // namespace invflow::bundle
