#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "invflow/io.hpp"

namespace invflow::demos {

/// Canonical demo names, in display order.
std::vector<std::string> names();

/// Packaged scenario behind a demo; nullopt for demos without one (dini-lemma).
/// bundle-rotation returns the untransformed run.
std::optional<io::json> scenario(const std::string& name);

/// Same scenario in the gauge x -> rot(alpha(x)) used by the bundle-rotation demo.
io::json gauge_transformed_rotation_scenario();

struct GaugeReport {
    double max_difference = 0.0;  ///< max over nodes of |R(x) f(T, x) - f~(T, x)|
    double tolerance = 1e-6;
    bool passed = false;
    SolveResult base;
    SolveResult transformed;
};

GaugeReport gauge_covariance_check();

/// Run a demo, writing its report and interpretation to `out`. Returns the
/// process exit code. Throws InvalidArgument for an unknown name.
int run(const std::string& name, std::ostream& out);

}  // namespace invflow::demos
