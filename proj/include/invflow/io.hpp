#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invflow/bundle.hpp"
#include "invflow/convex_set.hpp"
#include "invflow/diagnostics.hpp"
#include "invflow/pde_flat.hpp"
#include "invflow/tangency.hpp"

namespace invflow::io {

using json = nlohmann::json;

enum class Mode { flat, bundle };

Mode parse_mode(const std::string& name);
const char* to_string(Mode mode);

/// {"type":"box","lo":[..],"hi":[..]} | {"type":"ball","center":[..],"radius":r}
/// | {"type":"polytope","normals":[[..]],"offsets":[..]}
convex::ConvexSet parse_set(const json& j);
json to_json(const convex::ConvexSet& w);

/// {"builtin": name, "params": {...}} or {"expr": ["...", ...]} with one
/// expression per state component over t, x1[, x2], v1..vm.
ReactionTerm parse_reaction(const json& j, std::size_t state_dim);

struct TangencySetup {
    std::vector<double> t_samples;
    std::vector<Vector> x_samples;
    tangency::TangencyOptions options;
};

struct LoadedScenario {
    Mode mode = Mode::flat;
    std::optional<flat::Scenario> flat;
    std::optional<bundle::BundleScenario> bundle;
    TangencySetup tangency;

    [[nodiscard]] const convex::ConvexSet& set() const { return flat ? flat->set : bundle->set; }
    [[nodiscard]] const ReactionTerm& phi() const { return flat ? flat->phi : bundle->phi; }
};

/// Build a scenario from its JSON description. Throws ParseError for
/// malformed input and InvalidScenario / InvalidSet for invalid content.
LoadedScenario load_scenario(const json& j, std::optional<Mode> mode_override = std::nullopt,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

LoadedScenario load_scenario_file(const std::string& path, std::optional<Mode> mode_override = std::nullopt,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);

SolveResult run_scenario(const LoadedScenario& scenario, const SolveOptions& options = {});

tangency::TangencyReport check_scenario_tangency(const LoadedScenario& scenario);

/// Spatial point of every node of the scenario grid.
std::vector<Vector> node_points(const LoadedScenario& scenario);

json to_json(const diag::InvarianceVerdict& verdict);
json to_json(const SolveResult& result);
json to_json(const tangency::TangencyReport& report);

/// Columns t, x1[, x2], f1..fm; one row per node and stored frame.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<Vector>& points);

/// Columns t, s, x_argmax (x1_argmax, x2_argmax in 2-D), on_boundary, hopf_value.
void write_diagnostics_csv(std::ostream& out, const diag::InvarianceVerdict& verdict, std::size_t spatial_dim);

}  // namespace invflow::io
