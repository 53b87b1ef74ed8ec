#pragma once

#include <stdexcept>
#include <string>

namespace helium {

/// An electron came closer than the collision floor to the nucleus or to the
/// other electron.
class CollisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap.
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bound-orbit quantity was requested for an orbit with E >= 0.
class UnboundOrbit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Radial (M = 0) orbit where an ellipse is required.
class DegenerateOrbit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The tangent face of the hypercube has collapsed (lambda_3 <= 0).
class DegenerateFace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace helium
