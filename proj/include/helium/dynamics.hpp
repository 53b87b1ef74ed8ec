#pragma once

#include "helium/errors.hpp"
#include "helium/params.hpp"
#include "helium/vec2.hpp"

#include <array>

namespace helium {

inline constexpr std::size_t kStateDim = 10;
using StateVector = std::array<double, kStateDim>;

/// Axis indices of the flattened state, in the fixed order (r, v, xcm, vcm, acm).
namespace axis {
inline constexpr std::size_t r_x = 0, r_y = 1;
inline constexpr std::size_t v_x = 2, v_y = 3;
inline constexpr std::size_t xcm_x = 4, xcm_y = 5;
inline constexpr std::size_t vcm_x = 6, vcm_y = 7;
inline constexpr std::size_t acm_x = 8, acm_y = 9;
} // namespace axis

/// Planar phase-space point in center-of-mass / relative coordinates.
/// r = x2 - x1, v = dr/dt, xcm = (x1 + x2)/2 and its first two derivatives.
struct PhaseState {
    Vec2 r;
    Vec2 v;
    Vec2 xcm;
    Vec2 vcm;
    Vec2 acm;

    StateVector flatten() const noexcept;
    static PhaseState from_vector(const StateVector& s) noexcept;

    /// True when xcm = vcm = acm = 0 exactly.
    bool on_zero_dipole() const noexcept;
    bool is_finite() const noexcept;

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

/// Electron positions and velocities relative to the fixed nucleus.
struct LabState {
    Vec2 x1, v1, x2, v2;
};

struct CmCoordinates {
    Vec2 r, v, xcm, vcm;
};

CmCoordinates cm_from_lab(const LabState& ls) noexcept;
/// The acceleration block of `s` is not part of the lab description.
LabState lab_from_cm(const PhaseState& s) noexcept;

struct PairTerms {
    Vec2 g_minus; ///< h(xcm - r/2) - h(xcm + r/2), h(x) = x/|x|^3
    Vec2 g_plus;  ///< h(xcm - r/2) + h(xcm + r/2)
};

/// Nucleus-attraction brackets of the center-of-mass / relative equations.
/// Throws CollisionError if an electron is within `collision_floor` of the nucleus.
PairTerms coulomb_pair_terms(Vec2 xcm, Vec2 r, double collision_floor = 1e-6);

/// Time derivative of the flattened state:
///   dr/dt = v,   dv/dt = (2e^2/m) [r/|r|^3 + g_minus],
///   dxcm/dt = vcm,   dvcm/dt = acm,   dacm/dt = [acm + (e^2/m) g_plus] / (2 eps).
StateVector vector_field(const StateVector& s, const Params& p);
StateVector vector_field(const PhaseState& s, const Params& p);

/// E = T + V in lab coordinates.
double mechanical_energy(const PhaseState& s, const Params& p);
/// Energy including the Schott term: E - 4 m eps acm . vcm.
double total_energy(const PhaseState& s, const Params& p);
/// M = m (x1 x v1 + x2 x v2).
double angular_momentum(const PhaseState& s, const Params& p) noexcept;

} // namespace helium
