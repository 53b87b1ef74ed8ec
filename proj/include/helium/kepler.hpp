#pragma once

#include "helium/dynamics.hpp"

#include <cstdint>
#include <vector>

namespace helium {

/// A point of the zero-dipole manifold xcm = vcm = acm = 0.
struct ManifoldPoint {
    Vec2 r;
    Vec2 v;

    PhaseState lift() const noexcept { return {r, v, {}, {}, {}}; }
    friend bool operator==(const ManifoldPoint&, const ManifoldPoint&) = default;
};

/// On the manifold the relative motion is a Kepler problem mu r'' = -k r/|r|^3.
struct ReductionConstants {
    double mu; ///< m / 2
    double k;  ///< 7 e^2
};

ReductionConstants manifold_reduction_constants(const Params& p) noexcept;

/// Orbit invariants of the reduced two-body problem. The semi-major axis and
/// period exist only for bound orbits and throw UnboundOrbit otherwise.
class OrbitElements {
public:
    OrbitElements(double energy, double angular_momentum, double eccentricity,
                  ReductionConstants c) noexcept;

    double energy() const noexcept { return energy_; }
    double angular_momentum() const noexcept { return angular_momentum_; }
    double eccentricity() const noexcept { return eccentricity_; }
    bool bound() const noexcept { return energy_ < 0.0; }
    double semi_major_axis() const;
    double period() const;

private:
    double energy_;
    double angular_momentum_;
    double eccentricity_;
    ReductionConstants constants_;
};

/// E = (mu/2)|v|^2 - k/|r|, M = mu (r x v).
OrbitElements elements_from_state(const ManifoldPoint& pt, const Params& p);

/// Propagates a bound, non-radial orbit by time t (either sign) by solving
/// Kepler's equation for the eccentric-anomaly increment.
ManifoldPoint analytic_orbit(const ManifoldPoint& pt, double t, const Params& p);

/// Sampling box for initial conditions: both components of r in [r_lo, r_hi],
/// both components of dr/dt in [v_lo, v_hi].
struct SamplingBox {
    double r_lo = 0.5;
    double r_hi = 4.0;
    double v_lo = -1.5;
    double v_hi = 1.5;

    void validate() const;
};

/// Sample `index` of the ensemble with the given seed: uniform in the box,
/// rejected until the mechanical energy is negative (at most 100 attempts).
ManifoldPoint sample_point(std::uint64_t seed, std::uint64_t index, const Params& p,
                           const SamplingBox& box = {});

std::vector<ManifoldPoint> sample_initial_conditions(std::size_t n, std::uint64_t seed,
                                                     const Params& p,
                                                     const SamplingBox& box = {});

} // namespace helium
