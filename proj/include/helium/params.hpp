#pragma once

#include <string_view>

namespace helium {

/// How the hypercube is rebuilt once an edge outgrows renorm_threshold.
enum class Renormalization {
    /// Eight edges of length cube_side along the principal directions of the
    /// tangent face; the two transverse edges are set to zero so the banked
    /// area ratio carries over without re-squeezing.
    tangent_face,
    /// All ten edges of length cube_side along the principal directions.
    full_cube,
};

std::string_view to_string(Renormalization r) noexcept;
Renormalization renormalization_from_string(std::string_view s);

/// Physical constants and numerical controls. Defaults are the production
/// values: eps = 1e-2 (instead of the physical 1/137^3), h0 = 1e-4, step
/// factors in [1e-3, 1], hypercube side 1e-4 renormalized above 1e-3.
struct Params {
    double m = 1.0;    ///< electron mass
    double e = 1.0;    ///< electron charge magnitude
    double eps = 1e-2; ///< radiation-reaction time scale, 2e^2/(3mc^3)

    double h0 = 1e-4;
    double r_min = 1e-3;
    double r_max = 1.0;

    double cube_side = 1e-4;
    double renorm_threshold = 1e-3;
    Renormalization renormalization = Renormalization::tangent_face;

    /// Minimum admitted distance between any two of the three charges.
    double collision_floor = 1e-6;

    /// When false the Coulomb terms are dropped and only the free
    /// radiation-reaction dynamics of the center of mass remains.
    bool coulomb = true;

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

} // namespace helium
