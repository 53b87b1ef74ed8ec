#include "helium/kepler.hpp"

#include "helium/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace helium {

namespace {
constexpr int kRejectionAttempts = 100;
constexpr int kKeplerIterations = 60;
constexpr double kKeplerTolerance = 1e-14;
} // namespace

ReductionConstants manifold_reduction_constants(const Params& p) noexcept
{
    // x1 = -r/2, x2 = r/2: the relative equation becomes r'' = -(14 e^2/m) r/|r|^3.
    return {0.5 * p.m, 7.0 * p.e * p.e};
}

OrbitElements::OrbitElements(double energy, double angular_momentum, double eccentricity,
                             ReductionConstants c) noexcept
    : energy_(energy), angular_momentum_(angular_momentum), eccentricity_(eccentricity),
      constants_(c)
{
}

double OrbitElements::semi_major_axis() const
{
    if (!bound()) throw UnboundOrbit("semi-major axis of an unbound orbit");
    return constants_.k / (2.0 * -energy_);
}

double OrbitElements::period() const
{
    const double a = semi_major_axis();
    return 2.0 * std::numbers::pi * std::sqrt(constants_.mu * a * a * a / constants_.k);
}

OrbitElements elements_from_state(const ManifoldPoint& pt, const Params& p)
{
    const ReductionConstants c = manifold_reduction_constants(p);
    const double rn = norm(pt.r);
    if (!(rn > 0.0)) throw CollisionError("elements_from_state: r = 0");
    const double energy = 0.5 * c.mu * norm2(pt.v) - c.k / rn;
    const double m = c.mu * cross(pt.r, pt.v);
    const double e2 = 1.0 + 2.0 * energy * m * m / (c.mu * c.k * c.k);
    return {energy, m, std::sqrt(std::fmax(e2, 0.0)), c};
}

ManifoldPoint analytic_orbit(const ManifoldPoint& pt, double t, const Params& p)
{
    const OrbitElements el = elements_from_state(pt, p);
    if (el.angular_momentum() == 0.0) throw DegenerateOrbit("analytic_orbit: radial orbit");
    const double a = el.semi_major_axis();
    const double period = el.period();
    const ReductionConstants c = manifold_reduction_constants(p);
    const double gm = c.k / c.mu;

    // Only the phase within the period matters.
    const double tau = t - period * std::floor(t / period);
    const double mean_motion = 2.0 * std::numbers::pi / period;
    const double n_tau = mean_motion * tau;

    const double r0 = norm(pt.r);
    const double sqrt_a = std::sqrt(a);
    const double sigma0 = dot(pt.r, pt.v) / std::sqrt(gm);
    const double cos_coef = 1.0 - r0 / a;
    const double sin_coef = sigma0 / sqrt_a;

    // n tau = dE - (1 - r0/a) sin dE + (sigma0/sqrt(a)) (1 - cos dE), monotone in dE
    // with root in [0, 2 pi]. Newton, falling back to bisection outside the bracket.
    double lo = 0.0;
    double hi = 2.0 * std::numbers::pi;
    double de = n_tau;
    bool converged = false;
    for (int it = 0; it < kKeplerIterations; ++it) {
        const double s = std::sin(de);
        const double co = std::cos(de);
        const double f = de - cos_coef * s + sin_coef * (1.0 - co) - n_tau;
        const double df = 1.0 - cos_coef * co + sin_coef * s; // = r / a > 0
        if (f == 0.0) {
            converged = true;
            break;
        }
        if (f < 0.0) lo = de; else hi = de;
        double next = de - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - de;
        de = next;
        if (std::fabs(step) <= kKeplerTolerance * std::fmax(1.0, std::fabs(de))) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NoConvergence("analytic_orbit: Kepler equation did not converge");

    const double s = std::sin(de);
    const double co = std::cos(de);
    const double r = a + (r0 - a) * co + sigma0 * sqrt_a * s;
    const double f = 1.0 - (a / r0) * (1.0 - co);
    const double g = tau + std::sqrt(a * a * a / gm) * (s - de);
    const double fdot = -std::sqrt(gm * a) * s / (r * r0);
    const double gdot = 1.0 - (a / r) * (1.0 - co);
    return {f * pt.r + g * pt.v, fdot * pt.r + gdot * pt.v};
}

void SamplingBox::validate() const
{
    if (!(r_lo < r_hi) || !(v_lo < v_hi) || !std::isfinite(r_lo) || !std::isfinite(r_hi) ||
        !std::isfinite(v_lo) || !std::isfinite(v_hi)) {
        throw std::invalid_argument("sampling box ranges must be finite and non-empty");
    }
}

ManifoldPoint sample_point(std::uint64_t seed, std::uint64_t index, const Params& p,
                           const SamplingBox& box)
{
    const ReductionConstants c = manifold_reduction_constants(p);
    CounterStream rng(seed, index);
    for (int attempt = 0; attempt < kRejectionAttempts; ++attempt) {
        ManifoldPoint pt;
        pt.r.x = rng.uniform(box.r_lo, box.r_hi);
        pt.r.y = rng.uniform(box.r_lo, box.r_hi);
        pt.v.x = rng.uniform(box.v_lo, box.v_hi);
        pt.v.y = rng.uniform(box.v_lo, box.v_hi);
        const double rn = norm(pt.r);
        if (rn > 0.0 && 0.5 * c.mu * norm2(pt.v) - c.k / rn < 0.0) {
            return pt;
        }
    }
    throw std::runtime_error("sample_point: no bound state found after 100 attempts; "
                             "the sampling box is almost entirely unbound");
}

std::vector<ManifoldPoint> sample_initial_conditions(std::size_t n, std::uint64_t seed,
                                                     const Params& p, const SamplingBox& box)
{
    box.validate();
    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(sample_point(seed, i, p, box));
    }
    return out;
}

} // namespace helium
