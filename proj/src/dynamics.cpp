#include "helium/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace helium {

std::string_view to_string(Renormalization r) noexcept
{
    return r == Renormalization::full_cube ? "full_cube" : "tangent_face";
}

Renormalization renormalization_from_string(std::string_view s)
{
    if (s == "tangent_face") return Renormalization::tangent_face;
    if (s == "full_cube") return Renormalization::full_cube;
    throw std::invalid_argument("unknown renormalization '" + std::string(s) + "'");
}

void Params::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("invalid parameters: ") + what);
        }
    };
    require(m > 0.0 && std::isfinite(m), "m must be positive");
    require(e > 0.0 && std::isfinite(e), "e must be positive");
    require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
    require(h0 > 0.0 && std::isfinite(h0), "h0 must be positive");
    require(r_min > 0.0 && r_min < r_max, "need 0 < r_min < r_max");
    require(cube_side > 0.0 && cube_side < renorm_threshold,
            "need 0 < cube_side < renorm_threshold");
    require(collision_floor >= 0.0, "collision_floor must be non-negative");
}

StateVector PhaseState::flatten() const noexcept
{
    return {r.x, r.y, v.x, v.y, xcm.x, xcm.y, vcm.x, vcm.y, acm.x, acm.y};
}

PhaseState PhaseState::from_vector(const StateVector& s) noexcept
{
    return {{s[0], s[1]}, {s[2], s[3]}, {s[4], s[5]}, {s[6], s[7]}, {s[8], s[9]}};
}

bool PhaseState::on_zero_dipole() const noexcept
{
    return xcm.x == 0.0 && xcm.y == 0.0 && vcm.x == 0.0 && vcm.y == 0.0 &&
           acm.x == 0.0 && acm.y == 0.0;
}

bool PhaseState::is_finite() const noexcept
{
    return helium::is_finite(r) && helium::is_finite(v) && helium::is_finite(xcm) &&
           helium::is_finite(vcm) && helium::is_finite(acm);
}

CmCoordinates cm_from_lab(const LabState& ls) noexcept
{
    return {ls.x2 - ls.x1, ls.v2 - ls.v1, 0.5 * (ls.x1 + ls.x2), 0.5 * (ls.v1 + ls.v2)};
}

LabState lab_from_cm(const PhaseState& s) noexcept
{
    const Vec2 half_r = 0.5 * s.r;
    const Vec2 half_v = 0.5 * s.v;
    return {s.xcm - half_r, s.vcm - half_v, s.xcm + half_r, s.vcm + half_v};
}

namespace {

struct Field {
    Vec2 h;
    double dist;
};

// h(x) = x / |x|^3
inline Field inverse_square(Vec2 x)
{
    const double d2 = norm2(x);
    const double d = std::sqrt(d2);
    return {x / (d2 * d), d};
}

[[noreturn]] void collision(const char* which, double d)
{
    throw CollisionError(std::string("collision: ") + which + " distance " + std::to_string(d));
}

} // namespace

PairTerms coulomb_pair_terms(Vec2 xcm, Vec2 r, double collision_floor)
{
    const Vec2 half_r = 0.5 * r;
    // Electron 1 sits at xcm - r/2, electron 2 at xcm + r/2. With xcm = 0 the
    // two arguments are exact negatives of each other, so g_plus cancels to 0.
    const Field f1 = inverse_square(xcm - half_r);
    const Field f2 = inverse_square(xcm + half_r);
    if (!(f1.dist >= collision_floor)) {
        collision("electron 1 - nucleus", f1.dist);
    }
    if (!(f2.dist >= collision_floor)) {
        collision("electron 2 - nucleus", f2.dist);
    }
    return {f1.h - f2.h, f1.h + f2.h};
}

StateVector vector_field(const PhaseState& s, const Params& p)
{
    Vec2 dv{};
    Vec2 dacm = s.acm;
    if (p.coulomb) {
        const Field rel = inverse_square(s.r);
        if (!(rel.dist >= p.collision_floor)) {
            collision("electron - electron", rel.dist);
        }
        const PairTerms g = coulomb_pair_terms(s.xcm, s.r, p.collision_floor);
        const double coupling = p.e * p.e / p.m;
        dv = (2.0 * coupling) * (rel.h + g.g_minus);
        dacm += coupling * g.g_plus;
    }
    dacm = dacm / (2.0 * p.eps);
    return {s.v.x, s.v.y, dv.x, dv.y, s.vcm.x, s.vcm.y, s.acm.x, s.acm.y, dacm.x, dacm.y};
}

StateVector vector_field(const StateVector& s, const Params& p)
{
    return vector_field(PhaseState::from_vector(s), p);
}

double mechanical_energy(const PhaseState& s, const Params& p)
{
    const LabState lab = lab_from_cm(s);
    const double kinetic = 0.5 * p.m * (norm2(lab.v1) + norm2(lab.v2));
    if (!p.coulomb) {
        return kinetic;
    }
    const double r1 = norm(lab.x1);
    const double r2 = norm(lab.x2);
    const double r12 = norm(s.r);
    if (!(r1 >= p.collision_floor) || !(r2 >= p.collision_floor) ||
        !(r12 >= p.collision_floor)) {
        collision("energy evaluation", std::fmin(r1, std::fmin(r2, r12)));
    }
    const double e2 = p.e * p.e;
    const double potential = e2 * (-2.0 / r1 - 2.0 / r2 + 1.0 / r12);
    return kinetic + potential;
}

double total_energy(const PhaseState& s, const Params& p)
{
    return mechanical_energy(s, p) - 4.0 * p.m * p.eps * dot(s.acm, s.vcm);
}

double angular_momentum(const PhaseState& s, const Params& p) noexcept
{
    const LabState lab = lab_from_cm(s);
    return p.m * (cross(lab.x1, lab.v1) + cross(lab.x2, lab.v2));
}

} // namespace helium
