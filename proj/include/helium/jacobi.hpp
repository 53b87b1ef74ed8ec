#pragma once

#include "helium/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace helium {

template <std::size_t N>
using SquareMatrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
struct SymmetricEigen {
    std::array<double, N> values{};  ///< ascending
    SquareMatrix<N> vectors{};       ///< vectors[j] is the unit eigenvector of values[j]
    int sweeps = 0;
};

struct JacobiOptions {
    double tolerance = 1e-14; ///< stop when off-diagonal norm <= tolerance * ||A||_F
    int max_sweeps = 100;
    bool want_vectors = true;
};

template <std::size_t N>
double frobenius_norm(const SquareMatrix<N>& a) noexcept
{
    double s = 0.0;
    for (const auto& row : a)
        for (double x : row) s += x * x;
    return std::sqrt(s);
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. Only the upper
/// triangle is trusted to be symmetric with the lower one; both are read.
/// Throws NoConvergence after `max_sweeps` sweeps.
template <std::size_t N>
SymmetricEigen<N> jacobi_eigen(SquareMatrix<N> a, const JacobiOptions& opt = {})
{
    const double scale = frobenius_norm(a);
    SquareMatrix<N> v{};
    if (opt.want_vectors) {
        for (std::size_t i = 0; i < N; ++i) v[i][i] = 1.0;
    }

    SymmetricEigen<N> out;
    bool converged = false;
    for (int sweep = 0; sweep <= opt.max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (std::sqrt(2.0 * off) <= opt.tolerance * scale) {
            out.sweeps = sweep;
            converged = true;
            break;
        }
        if (sweep == opt.max_sweeps) break;

        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (std::size_t r = 0; r < N; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
                    a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
                }
                if (opt.want_vectors) {
                    for (std::size_t r = 0; r < N; ++r) {
                        const double vrp = v[r][p];
                        const double vrq = v[r][q];
                        v[r][p] = vrp - s * (vrq + tau * vrp);
                        v[r][q] = vrq + s * (vrp - tau * vrq);
                    }
                }
            }
        }
    }
    if (!converged) throw NoConvergence("jacobi_eigen: no convergence");

    std::array<std::size_t, N> order;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a[i][i] < a[j][j]; });
    for (std::size_t j = 0; j < N; ++j) {
        out.values[j] = a[order[j]][order[j]];
        if (opt.want_vectors) {
            for (std::size_t r = 0; r < N; ++r) out.vectors[j][r] = v[r][order[j]];
        }
    }
    return out;
}

} // namespace helium
