#include "helium/measure.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace helium {

Hypercube make_cube(const PhaseState& x, const Params& p)
{
    Hypercube c;
    c.center = x.flatten();
    for (std::size_t j = 0; j < kStateDim; ++j) {
        c.offsets[j].fill(0.0);
        c.offsets[j][j] = p.cube_side;
    }
    c.initial_side = p.cube_side;
    return c;
}

Matrix10 gram_matrix(const Hypercube& c) noexcept
{
    Matrix10 b{};
    for (std::size_t i = 0; i < kStateDim; ++i) {
        for (std::size_t j = i; j < kStateDim; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < kStateDim; ++k) s += c.offsets[i][k] * c.offsets[j][k];
            b[i][j] = b[j][i] = s;
        }
    }
    return b;
}

Matrix10 scatter_matrix(const Hypercube& c) noexcept
{
    Matrix10 s{};
    for (std::size_t a = 0; a < kStateDim; ++a) {
        for (std::size_t b = a; b < kStateDim; ++b) {
            double acc = 0.0;
            for (const auto& d : c.offsets) acc += d[a] * d[b];
            s[a][b] = s[b][a] = acc;
        }
    }
    return s;
}

SpectralResult symmetric_eigen(const Matrix10& b, bool want_vectors)
{
    JacobiOptions opt;
    opt.want_vectors = want_vectors;
    return jacobi_eigen<kStateDim>(b, opt);
}

double face_log_area(const std::array<double, kStateDim>& ev)
{
    const double largest = std::fmax(std::fabs(ev.front()), std::fabs(ev.back()));
    if (!(ev[2] > 16.0 * DBL_EPSILON * largest)) {
        throw DegenerateFace(fmt::format("tangent face collapsed: lambda_3 = {:.3g}", ev[2]));
    }
    double s = 0.0;
    for (std::size_t i = 2; i < kStateDim; ++i) s += std::log(ev[i]);
    return 0.5 * s;
}

double face_log_area(const SpectralResult& sr)
{
    return face_log_area(sr.values);
}

double log_area_ratio(const Hypercube& c, const SpectralResult& sr)
{
    return c.log_area_accum + face_log_area(sr) - 8.0 * std::log(c.initial_side);
}

namespace {

constexpr std::size_t kFaceDim = kStateDim - 2;

/// Householder QR of the eight non-null edges of a tangent-face cube.
struct FaceFactor {
    std::array<StateVector, kFaceDim> q{}; ///< orthonormal basis of the face
    SquareMatrix<kFaceDim> r{};            ///< upper triangular, edges = Q R
    double log_area = 0.0;                 ///< sum of ln |R_jj|
};

/// Indices of the edges that are not identically zero.
std::size_t live_edges(const Hypercube& c, std::array<std::size_t, kStateDim>& live)
{
    std::size_t n = 0;
    for (std::size_t j = 0; j < kStateDim; ++j) {
        const auto& d = c.offsets[j];
        if (std::any_of(d.begin(), d.end(), [](double x) { return x != 0.0; })) live[n++] = j;
    }
    return n;
}

FaceFactor factor_face(const Hypercube& c, const std::array<std::size_t, kStateDim>& live,
                       bool want_q)
{
    // a[j] is column j of the 10x8 edge matrix
    std::array<StateVector, kFaceDim> a{};
    double scale = 0.0;
    for (std::size_t j = 0; j < kFaceDim; ++j) {
        a[j] = c.offsets[live[j]];
        double n2 = 0.0;
        for (double x : a[j]) n2 += x * x;
        scale = std::fmax(scale, std::sqrt(n2));
    }

    FaceFactor f;
    std::array<StateVector, kFaceDim> v{};
    std::array<double, kFaceDim> beta{};
    for (std::size_t j = 0; j < kFaceDim; ++j) {
        double xn2 = 0.0;
        for (std::size_t k = j; k < kStateDim; ++k) xn2 += a[j][k] * a[j][k];
        const double alpha = -std::copysign(std::sqrt(xn2), a[j][j]);
        v[j].fill(0.0);
        for (std::size_t k = j; k < kStateDim; ++k) v[j][k] = a[j][k];
        v[j][j] -= alpha;
        double vn2 = 0.0;
        for (std::size_t k = j; k < kStateDim; ++k) vn2 += v[j][k] * v[j][k];
        beta[j] = vn2 > 0.0 ? 2.0 / vn2 : 0.0;
        for (std::size_t col = j; col < kFaceDim; ++col) {
            double d = 0.0;
            for (std::size_t k = j; k < kStateDim; ++k) d += v[j][k] * a[col][k];
            d *= beta[j];
            for (std::size_t k = j; k < kStateDim; ++k) a[col][k] -= d * v[j][k];
        }
        for (std::size_t i = 0; i <= j; ++i) f.r[i][j] = a[j][i];
        const double rjj = std::fabs(f.r[j][j]);
        if (!(rjj > 8.0 * DBL_EPSILON * scale) || !std::isfinite(rjj)) {
            throw DegenerateFace(fmt::format("tangent face collapsed: |R_jj| = {:.3g}", rjj));
        }
        f.log_area += std::log(rjj);
    }

    if (want_q) {
        for (std::size_t j = 0; j < kFaceDim; ++j) {
            StateVector e{};
            e[j] = 1.0;
            for (std::size_t h = kFaceDim; h-- > 0;) {
                double d = 0.0;
                for (std::size_t k = h; k < kStateDim; ++k) d += v[h][k] * e[k];
                d *= beta[h];
                for (std::size_t k = h; k < kStateDim; ++k) e[k] -= d * v[h][k];
            }
            f.q[j] = e;
        }
    }
    return f;
}

} // namespace

double cube_face_log_area(const Hypercube& c)
{
    std::array<std::size_t, kStateDim> live{};
    const std::size_t n = live_edges(c, live);
    if (n < kFaceDim) throw DegenerateFace("fewer than eight non-zero edges");
    if (n > kFaceDim) return face_log_area(symmetric_eigen(gram_matrix(c), false));
    return factor_face(c, live, false).log_area;
}

double log_area_ratio(const Hypercube& c)
{
    return c.log_area_accum + cube_face_log_area(c) - 8.0 * std::log(c.initial_side);
}

Hypercube renormalize(const Hypercube& c, const Params& p)
{
    Hypercube out = c;
    out.initial_side = p.cube_side;
    std::array<std::size_t, kStateDim> live{};
    if (p.renormalization == Renormalization::tangent_face && live_edges(c, live) == kFaceDim) {
        // Principal axes of the face from R R^T, expressed through Q.
        const FaceFactor f = factor_face(c, live, true);
        SquareMatrix<kFaceDim> rrt{};
        for (std::size_t i = 0; i < kFaceDim; ++i) {
            for (std::size_t j = i; j < kFaceDim; ++j) {
                double s = 0.0;
                for (std::size_t k = std::max(i, j); k < kFaceDim; ++k) s += f.r[i][k] * f.r[j][k];
                rrt[i][j] = rrt[j][i] = s;
            }
        }
        const auto eig = jacobi_eigen<kFaceDim>(rrt, {});
        out.log_area_accum = c.log_area_accum + f.log_area - 8.0 * std::log(c.initial_side);
        out.offsets[0].fill(0.0);
        out.offsets[1].fill(0.0);
        for (std::size_t j = 0; j < kFaceDim; ++j) {
            StateVector& d = out.offsets[j + 2];
            d.fill(0.0);
            for (std::size_t i = 0; i < kFaceDim; ++i) {
                const double w = p.cube_side * eig.vectors[j][i];
                for (std::size_t k = 0; k < kStateDim; ++k) d[k] += w * f.q[i][k];
            }
        }
        return out;
    }

    const SpectralResult sr = symmetric_eigen(scatter_matrix(c), true);
    out.log_area_accum = log_area_ratio(c, sr);
    const std::size_t dropped = p.renormalization == Renormalization::tangent_face ? 2 : 0;
    for (std::size_t j = 0; j < kStateDim; ++j) {
        for (std::size_t i = 0; i < kStateDim; ++i) {
            out.offsets[j][i] = j < dropped ? 0.0 : p.cube_side * sr.vectors[j][i];
        }
    }
    return out;
}

Hypercube evolve_cube(const Hypercube& c, double h, const Params& p)
{
    return evolve_cube(c, h, [&p](const StateVector& x) { return vector_field(x, p); });
}

std::string_view to_string(DensityStatus s) noexcept
{
    switch (s) {
    case DensityStatus::ok: return "ok";
    case DensityStatus::collision: return "collision";
    case DensityStatus::degenerate: return "degenerate";
    case DensityStatus::failed: return "failed";
    }
    return "failed";
}

DensityStatus density_status_from_string(std::string_view s)
{
    if (s == "ok") return DensityStatus::ok;
    if (s == "collision") return DensityStatus::collision;
    if (s == "degenerate") return DensityStatus::degenerate;
    if (s == "failed") return DensityStatus::failed;
    throw std::invalid_argument("unknown density status: " + std::string(s));
}

DensityResult point_density_detailed(const ManifoldPoint& pt, const Params& p,
                                     const DensityRunConfig& cfg, std::size_t index)
{
    DensityResult res;
    DensityRecord& rec = res.record;
    rec.index = index;
    rec.r0 = pt.r;
    rec.v0 = pt.v;
    rec.log10_rho = std::numeric_limits<double>::quiet_NaN();

    double period = 0.0;
    try {
        const OrbitElements el = elements_from_state(pt, p);
        rec.E = el.energy();
        rec.M = el.angular_momentum();
        const double scale = 0.5 * p.m * norm(pt.r) * norm(pt.v);
        if (!el.bound() || !(std::fabs(rec.M) > 1e-14 * scale)) {
            rec.status = DensityStatus::degenerate;
            return res;
        }
        period = el.period();
    } catch (const CollisionError&) {
        rec.status = DensityStatus::collision;
        return res;
    }

    const auto field = [&p](const StateVector& x) { return vector_field(x, p); };
    const auto step = [&p](const PhaseState& s) { return adaptive_step(s, p); };
    try {
        const DensityEstimate est =
            estimate_log_density(pt.lift(), p, cfg.transient_efolds * 2.0 * p.eps,
                                 cfg.horizon_periods * period, field, step);
        res.diagnostics = est.diagnostics;
        rec.log10_rho = est.log_rho / std::log(10.0);
        rec.status = std::isfinite(rec.log10_rho) ? DensityStatus::ok : DensityStatus::failed;
    } catch (const CollisionError&) {
        rec.status = DensityStatus::collision;
    } catch (const std::exception&) {
        rec.status = DensityStatus::failed;
    }
    if (rec.status != DensityStatus::ok) {
        rec.log10_rho = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

DensityRecord point_density(const ManifoldPoint& pt, const Params& p,
                            const DensityRunConfig& cfg, std::size_t index)
{
    return point_density_detailed(pt, p, cfg, index).record;
}

} // namespace helium
