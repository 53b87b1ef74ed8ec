#pragma once

#include "helium/integrator.hpp"
#include "helium/jacobi.hpp"
#include "helium/kepler.hpp"
#include "helium/log_sum.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string_view>

namespace helium {

using Matrix10 = SquareMatrix<kStateDim>;
using SpectralResult = SymmetricEigen<kStateDim>;

/// A base point x and ten edge vectors dx_j; the vertices x + dx_j are
/// evolved alongside x. `log_area_accum` carries the log area ratio banked
/// by earlier renormalizations.
struct Hypercube {
    StateVector center{};
    std::array<StateVector, kStateDim> offsets{};
    double log_area_accum = 0.0;
    double initial_side = 0.0;
};

/// Axis-aligned cube with edges cube_side * e_j in the flattened state order.
Hypercube make_cube(const PhaseState& x, const Params& p);

/// B_ij = dx_i . dx_j
Matrix10 gram_matrix(const Hypercube& c) noexcept;
/// S = sum_j dx_j dx_j^T. Same spectrum as the Gram matrix; its eigenvectors
/// are directions in phase space rather than combinations of edge indices.
Matrix10 scatter_matrix(const Hypercube& c) noexcept;

/// Full spectrum of a symmetric 10x10 matrix by cyclic Jacobi.
SpectralResult symmetric_eigen(const Matrix10& b, bool want_vectors = true);

/// log sqrt(lambda_3 ... lambda_10): the log 8-area of the face spanned by
/// the eight largest principal directions. Throws DegenerateFace when
/// lambda_3 is zero within round-off.
double face_log_area(const std::array<double, kStateDim>& ascending_eigenvalues);
double face_log_area(const SpectralResult& sr);

inline double max_edge_length(const Hypercube& c) noexcept
{
    double m = 0.0;
    for (const auto& d : c.offsets) {
        double s = 0.0;
        for (double x : d) s += x * x;
        m = std::fmax(m, s);
    }
    return std::sqrt(m);
}

inline bool needs_renormalization(const Hypercube& c, const Params& p) noexcept
{
    return max_edge_length(c) > p.renorm_threshold;
}

/// Replaces the edges with cube_side times the principal directions of the
/// current edge set and banks the current face-area ratio in log_area_accum.
/// In tangent_face mode the two smallest directions get null edges; a cube
/// that already has exactly two null edges is re-seated through a QR
/// factorization of the other eight, which never squares their spread.
Hypercube renormalize(const Hypercube& c, const Params& p);

/// Log of the current face area relative to the initial face cube_side^8,
/// including the ratios banked by renormalizations.
double log_area_ratio(const Hypercube& c, const SpectralResult& sr);

/// Face log-area computed from the cube alone. When exactly two edges are
/// null (tangent-face renormalization) the face is the parallelotope of the
/// other eight and its area is the product of the diagonal of their QR
/// factor; otherwise the full Gram spectrum is used.
double cube_face_log_area(const Hypercube& c);
double log_area_ratio(const Hypercube& c);

/// One backward RK4 step of size h for the center and all ten vertices on a
/// common step. Edges are recomputed as vertex - center.
template <class Field>
Hypercube evolve_cube(const Hypercube& c, double h, const Field& field)
{
    Hypercube out = c;
    out.center = rk4_step(c.center, h, -1.0, field);
    for (std::size_t j = 0; j < kStateDim; ++j) {
        StateVector vertex;
        for (std::size_t i = 0; i < kStateDim; ++i) vertex[i] = c.center[i] + c.offsets[j][i];
        const StateVector moved = rk4_step(vertex, h, -1.0, field);
        for (std::size_t i = 0; i < kStateDim; ++i) out.offsets[j][i] = moved[i] - out.center[i];
    }
    return out;
}

Hypercube evolve_cube(const Hypercube& c, double h, const Params& p);

enum class DensityStatus { ok, collision, degenerate, failed };

std::string_view to_string(DensityStatus s) noexcept;
/// Throws std::invalid_argument on unknown names.
DensityStatus density_status_from_string(std::string_view s);

/// Density estimate at one manifold point. log10_rho is NaN unless status is ok.
struct DensityRecord {
    std::size_t index = 0;
    Vec2 r0;
    Vec2 v0;
    double E = 0.0;
    double M = 0.0;
    double log10_rho = 0.0;
    DensityStatus status = DensityStatus::failed;
};

struct DensityRunConfig {
    /// Backward transient before averaging, in units of the runaway time 2 eps.
    double transient_efolds = 10.0;
    /// Averaging horizon in Kepler periods of the central orbit.
    double horizon_periods = 1.0;
};

struct DensityDiagnostics {
    std::size_t steps = 0;
    std::size_t renormalizations = 0;
    double averaged_time = 0.0;
    /// Gram spectrum at the end of the transient.
    std::array<double, kStateDim> transient_eigenvalues{};
    bool center_on_manifold = true;
    double min_log_ratio = 0.0;
    double max_log_ratio = 0.0;
};

struct DensityEstimate {
    double log_rho = 0.0; ///< natural log of the time-averaged area ratio
    DensityDiagnostics diagnostics;
};

enum class CubePhase { transient, averaging };
using CubeObserver = std::function<void(const Hypercube&, double elapsed, CubePhase)>;

/// Backward evolution of a hypercube from `start`: a transient of length
/// `transient` without averaging, then `horizon` of time during which the
/// log area ratio is averaged with per-step weights h. The step size is
/// `step_rule(center)`, shared by all eleven trajectories. Exceptions from
/// the field (CollisionError) and from the face computation propagate.
template <class Field, class StepRule>
DensityEstimate estimate_log_density(const PhaseState& start, const Params& p, double transient,
                                     double horizon, const Field& field,
                                     const StepRule& step_rule,
                                     const CubeObserver& observer = {})
{
    DensityEstimate est;
    DensityDiagnostics& diag = est.diagnostics;
    Hypercube cube = make_cube(start, p);
    LogSumAccumulator weighted;
    bool first_ratio = true;

    auto advance = [&](double duration, CubePhase phase) {
        double elapsed = 0.0;
        while (elapsed < duration) {
            double h = step_rule(PhaseState::from_vector(cube.center));
            bool last = false;
            if (duration - elapsed <= h) {
                h = duration - elapsed;
                last = true;
            }
            cube = evolve_cube(cube, h, field);
            elapsed = last ? duration : elapsed + h;
            ++diag.steps;
            if (diag.center_on_manifold &&
                !PhaseState::from_vector(cube.center).on_zero_dipole()) {
                diag.center_on_manifold = false;
            }
            if (needs_renormalization(cube, p)) {
                cube = renormalize(cube, p);
                ++diag.renormalizations;
            }
            if (phase == CubePhase::averaging) {
                const double ratio = log_area_ratio(cube);
                if (!std::isfinite(ratio)) {
                    throw DegenerateFace("non-finite area ratio");
                }
                if (first_ratio) {
                    diag.min_log_ratio = diag.max_log_ratio = ratio;
                    first_ratio = false;
                } else {
                    diag.min_log_ratio = std::fmin(diag.min_log_ratio, ratio);
                    diag.max_log_ratio = std::fmax(diag.max_log_ratio, ratio);
                }
                weighted.add(ratio + std::log(h));
                diag.averaged_time += h;
            }
            if (observer) observer(cube, elapsed, phase);
        }
    };

    if (transient > 0.0) advance(transient, CubePhase::transient);
    diag.transient_eigenvalues = symmetric_eigen(gram_matrix(cube), false).values;
    if (p.renormalization == Renormalization::tangent_face) {
        // Seat the squeezed cube on its tangent face before averaging.
        cube = renormalize(cube, p);
        ++diag.renormalizations;
    }
    if (horizon > 0.0) advance(horizon, CubePhase::averaging);

    if (diag.averaged_time > 0.0) {
        est.log_rho = weighted.value() - std::log(diag.averaged_time);
    } else {
        est.log_rho = log_area_ratio(cube);
    }
    return est;
}

struct DensityResult {
    DensityRecord record;
    DensityDiagnostics diagnostics;
};

/// Density at a zero-dipole point: lift, squeeze onto the nonrunaway manifold
/// with a backward transient of transient_efolds * 2 eps, then average the
/// face-area ratio over horizon_periods analytic periods of the central
/// orbit. Failures are reported in the record status, never thrown.
DensityResult point_density_detailed(const ManifoldPoint& pt, const Params& p,
                                     const DensityRunConfig& cfg = {}, std::size_t index = 0);

DensityRecord point_density(const ManifoldPoint& pt, const Params& p,
                            const DensityRunConfig& cfg = {}, std::size_t index = 0);

} // namespace helium
