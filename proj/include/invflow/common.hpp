#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace invflow {

/// Fiber vector in R^m. Dimension is a runtime quantity.
using Vector = std::vector<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define INVFLOW_ERROR(Name)                 \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

INVFLOW_ERROR(InvalidArgument);
INVFLOW_ERROR(InvalidSet);
INVFLOW_ERROR(NotOnSet);
INVFLOW_ERROR(EvalFailure);
INVFLOW_ERROR(HorizonExceeded);
INVFLOW_ERROR(PreconditionViolated);
INVFLOW_ERROR(ObliqueViolation);
INVFLOW_ERROR(Instability);
INVFLOW_ERROR(InteriorPoint);
INVFLOW_ERROR(InsideSet);
INVFLOW_ERROR(InvalidScenario);
INVFLOW_ERROR(ParseError);

#undef INVFLOW_ERROR

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace invflow
