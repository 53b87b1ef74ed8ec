#include <doctest.h>

#include "eigen_oracle.hpp"
#include "helium/jacobi.hpp"
#include "helium/measure.hpp"
#include "helium/random.hpp"

#include <cmath>

using namespace helium;

namespace {

template <std::size_t N>
SquareMatrix<N> random_symmetric(CounterStream& rng)
{
    SquareMatrix<N> a{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) a[i][j] = a[j][i] = rng.uniform(-1.0, 1.0);
    return a;
}

template <std::size_t N>
SquareMatrix<N> random_orthogonal(CounterStream& rng)
{
    SquareMatrix<N> q = random_symmetric<N>(rng);
    // Gram-Schmidt on the rows
    for (std::size_t i = 0; i < N; ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < i; ++j) {
                double d = 0.0;
                for (std::size_t k = 0; k < N; ++k) d += q[i][k] * q[j][k];
                for (std::size_t k = 0; k < N; ++k) q[i][k] -= d * q[j][k];
            }
        double n = 0.0;
        for (double x : q[i]) n += x * x;
        for (double& x : q[i]) x /= std::sqrt(n);
    }
    return q;
}

template <std::size_t N>
double reconstruction_error(const SquareMatrix<N>& a, const SymmetricEigen<N>& eig)
{
    SquareMatrix<N> diff = a;
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c)
                diff[r][c] -= eig.values[j] * eig.vectors[j][r] * eig.vectors[j][c];
    return frobenius_norm(diff) / frobenius_norm(a);
}

} // namespace

TEST_CASE("diagonal input")
{
    Matrix10 a{};
    for (std::size_t i = 0; i < 10; ++i) a[i][i] = double(10 - i);
    const SpectralResult sr = symmetric_eigen(a, true);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(sr.values[i] == double(i + 1));
        CHECK(std::fabs(sr.vectors[i][9 - i]) == 1.0);
    }
    CHECK(sr.sweeps <= 1);
}

TEST_CASE("similarity transforms keep the spectrum")
{
    CounterStream rng(31, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix10 q = random_orthogonal<10>(rng);
        Matrix10 a{};
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 10; ++c)
                for (std::size_t k = 0; k < 10; ++k) a[r][c] += q[k][r] * double(k + 1) * q[k][c];
        const SpectralResult sr = symmetric_eigen(a, false);
        for (std::size_t i = 0; i < 10; ++i) CHECK(sr.values[i] == doctest::Approx(double(i + 1)).epsilon(1e-12));
    }
}

TEST_CASE("spectrum agrees with the bisection oracle")
{
    CounterStream rng(32, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const Matrix10 a = random_symmetric<10>(rng);
        const auto ref = oracle::eigenvalues<10>(a);
        const SpectralResult sr = symmetric_eigen(a, false);
        const double scale = frobenius_norm(a);
        for (std::size_t i = 0; i < 10; ++i) REQUIRE(std::fabs(sr.values[i] - ref[i]) <= 1e-10 * scale);
    }
}

TEST_CASE("eigenvectors are orthonormal and reconstruct the input")
{
    CounterStream rng(33, 0);
    for (int trial = 0; trial < 500; ++trial) {
        Matrix10 g = random_symmetric<10>(rng);
        Matrix10 a{};
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 10; ++c)
                for (std::size_t k = 0; k < 10; ++k) a[r][c] += g[r][k] * g[c][k];
        const SpectralResult sr = symmetric_eigen(a, true);
        REQUIRE(reconstruction_error(a, sr) <= 1e-10);
        for (std::size_t i = 0; i < 10; ++i) {
            REQUIRE(sr.values[i] >= -1e-12 * frobenius_norm(a));
            if (i > 0) REQUIRE(sr.values[i] >= sr.values[i - 1]);
            for (std::size_t j = 0; j < 10; ++j) {
                double d = 0.0;
                for (std::size_t k = 0; k < 10; ++k) d += sr.vectors[i][k] * sr.vectors[j][k];
                REQUIRE(std::fabs(d - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("other sizes")
{
    CounterStream rng(34, 0);
    const auto a = random_symmetric<3>(rng);
    const auto ref = oracle::eigenvalues<3>(a);
    const auto eig = jacobi_eigen<3>(a, {});
    for (std::size_t i = 0; i < 3; ++i) CHECK(eig.values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(reconstruction_error(a, eig) < 1e-13);

    SquareMatrix<1> one{{{4.0}}};
    CHECK(jacobi_eigen<1>(one, {}).values[0] == 4.0);
}

TEST_CASE("sweep budget is enforced")
{
    CounterStream rng(35, 0);
    const Matrix10 a = random_symmetric<10>(rng);
    JacobiOptions opt;
    opt.max_sweeps = 1;
    CHECK_THROWS_AS(jacobi_eigen<10>(a, opt), NoConvergence);
    CHECK(symmetric_eigen(Matrix10{}, true).values[9] == 0.0);
}
