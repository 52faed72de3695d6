#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "invflow/convex_set.hpp"
#include "invflow/field.hpp"

namespace invflow::bundle {
class BundleOperator;
}

namespace invflow::diag {

struct MaximalDistancePair {
    double t = 0.0;
    std::size_t node = 0;
    Vector x;
    bool on_boundary = false;
    double dist = 0.0;
    Vector lambda;
};

struct HopfRecord {
    MaximalDistancePair pair;
    std::optional<double> hopf_value;  ///< set for boundary pairs only
};

/// One monitored output step: s(t), its lexicographically first argmax and
/// the Hopf functional there when that node is on the boundary.
struct SeriesEntry {
    double t = 0.0;
    double s = 0.0;
    Vector x_argmax;
    bool on_boundary = false;
    std::optional<double> hopf_value;
};

enum class Status { invariant, exited };

struct InvarianceVerdict {
    Status status = Status::invariant;
    std::optional<double> first_exit_time;
    double worst_dist = 0.0;
    double exit_threshold = 0.0;
    std::vector<HopfRecord> hopf_records;
    /// Whether every recorded pair attaining the run-wide maximum lies on the
    /// boundary; empty when nothing was recorded.
    std::optional<bool> global_max_pairs_on_boundary;
    std::optional<double> max_hopf_value;
    /// max |s(t_{k+1}) - s(t_k)| / (t_{k+1} - t_k) over monitored steps.
    double max_s_rate = 0.0;
    std::vector<SeriesEntry> series;
};

struct FlatGeometry {
    const Domain* domain = nullptr;
};

struct CovariantGeometry {
    const bundle::BundleOperator* op = nullptr;
};

using GeometryContext = std::variant<FlatGeometry, CovariantGeometry>;

std::size_t node_count(const GeometryContext& ctx);
Vector node_point(const GeometryContext& ctx, std::size_t node);
bool node_on_boundary(const GeometryContext& ctx, std::size_t node);

struct MaxDistance {
    double s = 0.0;
    std::size_t node = 0;
    Vector lambda;
};

/// Exact maximum of dist_W over grid nodes; ties go to the lowest node index.
MaxDistance max_distance(const FieldState& state, const convex::ConvexSet& w);

/// <lambda(f), nabla_nu f> at a boundary node. Flat geometry uses a one-sided
/// second-order difference along the outward normal (the largest value over
/// incident faces at a rectangle corner); covariant geometry uses the
/// covariant normal derivative. Throws InteriorPoint / InsideSet.
double hopf_functional(const FieldState& state, const convex::ConvexSet& w, std::size_t boundary_node,
                       const GeometryContext& ctx);

/// Streaming invariance monitor fed one output state at a time, in t order.
class Monitor {
public:
    Monitor(const convex::ConvexSet& w, double exit_threshold, GeometryContext ctx);

    void observe(const FieldState& state);

    [[nodiscard]] InvarianceVerdict verdict() const;

private:
    const convex::ConvexSet* w_;
    GeometryContext ctx_;
    InvarianceVerdict v_;
};

/// Batch form of Monitor over a stored trajectory.
InvarianceVerdict monitor(const Trajectory& trajectory, const convex::ConvexSet& w, double exit_threshold,
                          const GeometryContext& ctx);

[[nodiscard]] inline const char* to_string(Status s) { return s == Status::invariant ? "invariant" : "exited"; }

}  // namespace invflow::diag

namespace invflow {

struct SolveOptions {
    /// Monitor (and store) every `cadence` steps; 0 selects max(1, floor(steps/1000)).
    std::size_t cadence = 0;
    std::optional<double> exit_threshold;
    bool keep_trajectory = true;
};

struct SolveResult {
    Trajectory trajectory;
    diag::InvarianceVerdict verdict;
    FieldState final_state;
    bool failed = false;
    std::string failure;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t cadence = 1;
    double grid_noise = 0.0;
    std::vector<std::string> warnings;
};

}  // namespace invflow
