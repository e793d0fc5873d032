#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vessel_lab {

/// Base class of every failure raised by the library. `kind()` is a short
/// machine-readable tag that the CLI copies into its error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& m) : Error("argument", m) {}
};

struct IntegrationError : Error {
    explicit IntegrationError(const std::string& m) : Error("integration", m) {}
};

/// LU found a pivot below tolerance.
struct SingularityError : Error {
    SingularityError(const std::string& m, double pivot)
        : Error("singularity", m), smallest_pivot(pivot) {}
    double smallest_pivot;
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain", m) {}
};

struct PreconditionError : Error {
    PreconditionError(const std::string& m, double r = 0.0)
        : Error("precondition", m), residual(r) {}
    double residual;
};

/// Spectral parameter too close to spec(A).
struct ResolventError : Error {
    ResolventError(const std::string& m, double d)
        : Error("resolvent", m), distance(d) {}
    double distance;
};

/// X(x) not invertible at the requested point.
struct IntervalError : Error {
    explicit IntervalError(const std::string& m) : Error("interval", m) {}
};

struct FamilyError : Error {
    explicit FamilyError(const std::string& m) : Error("family", m) {}
};

struct ConvergenceError : Error {
    ConvergenceError(const std::string& m, double delta)
        : Error("convergence", m), last_delta(delta) {}
    double last_delta;
};

struct DiscretizationError : Error {
    explicit DiscretizationError(const std::string& m) : Error("discretization", m) {}
};

struct PhaseError : Error {
    explicit PhaseError(const std::string& m) : Error("phase", m) {}
};

}  // namespace vessel_lab
