#pragma once

#include <stdexcept>

namespace newtres {

// Bracketing failures: f(lo) and f(hi) have the same sign.
struct NoSignChange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative routine hit its iteration / subdivision cap.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Problem-level precondition violated (e.g. high-profile condition 2M >= qR^2).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Optimizer configuration invariant violated.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation point outside the mesh footprint.
struct OutsideDomain : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature over a triangle of (near-)zero area.
struct DegenerateTriangle : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Hull input is coplanar-degenerate (no 3D volume to enclose).
struct DegenerateHull : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace newtres
