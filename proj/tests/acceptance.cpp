// Acceptance checks. One PASS/FAIL line per criterion; all tolerances are
// fixed below. Exit status is 0 once every check has been evaluated, or the
// number of failures with --strict.

#include "cli.hpp"
#include "helium/ensemble.hpp"
#include "helium/integrator.hpp"
#include "helium/kepler.hpp"
#include "helium/measure.hpp"
#include "helium/random.hpp"
#include "helium/record_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace helium;
namespace fs = std::filesystem;

namespace {

// Kepler oracle
constexpr double kKeplerTol = 1e-6;
constexpr double kKeplerSeconds = 1.0;
// Runaway oracle
constexpr double kRunawayTol = 1e-6;
// Energy theorem, relative to the radiated energy, per unit time
constexpr double kEnergyTol = 1e-6;
// Dirac squeeze
constexpr std::size_t kSqueezePoints = 100;
constexpr std::size_t kSqueezeRequired = 95;
constexpr double kSqueezeRatio = 1e-6;
// Manifold conservation
constexpr std::size_t kConservationOrbits = 100;
constexpr double kConservationTol = 1e-8;
// Eigen-solver
constexpr int kEigenTrials = 10000;
constexpr double kEigenTol = 1e-10;
// Determinism and desk scale
constexpr std::size_t kDeskPoints = 1000;
constexpr std::uint64_t kDeskSeed = 1;
constexpr double kDeskMinutes = 30.0;
// Frozen from the pilot run (seed 1, n = 1000): spread 36.76 decades,
// top 1% of cells holding 1.000000 of the mass.
constexpr double kSpreadDecades = 30.0;
constexpr double kTopShare = 0.90;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool pass, std::string_view name, const std::string& detail)
{
    if (!pass) ++failures;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

void info(std::string_view name, const std::string& detail)
{
    std::cout << "INFO " << name << ": " << detail << std::endl;
}

void kepler_oracle()
{
    Params p;
    const PhaseState s{{2.0, 0.0}, {0.0, std::sqrt(7.0)}, {}, {}, {}};
    const double period = 4.0 * M_PI / std::sqrt(7.0);
    const auto t0 = Clock::now();
    const IntegrationResult res = integrate(s, period, Direction::forward, p);
    const double secs = seconds_since(t0);
    const double err = norm(res.final_state.r - s.r) / norm(s.r);
    const bool pass = res.reason == StopReason::completed && err <= kKeplerTol && secs < kKeplerSeconds;
    report(pass, "Kepler oracle",
           fmt::format("relative position error {:.3e} (tol {:.0e}), {} steps in {:.3f} s (limit {:.0f} s)",
                       err, kKeplerTol, res.steps, secs, kKeplerSeconds));
}

void runaway_oracle()
{
    Params p;
    p.coulomb = false;
    const PhaseState s{{1.0, 0.0}, {}, {}, {}, {0.6, -0.8}};
    double worst_fwd = 0.0, worst_bwd = 0.0;
    bool completed = true;
    for (Direction dir : {Direction::forward, Direction::backward}) {
        const double sign = direction_sign(dir);
        double& worst = dir == Direction::forward ? worst_fwd : worst_bwd;
        const IntegrationResult res =
            integrate(s, 10.0 * p.eps, dir, p, [&](const TrajectorySample& smp) {
                const double expected = std::exp(sign * std::fabs(smp.t) / (2.0 * p.eps));
                worst = std::fmax(worst, std::fabs(norm(smp.state.acm) / expected - 1.0));
            });
        completed = completed && res.reason == StopReason::completed;
    }
    report(completed && worst_fwd <= kRunawayTol && worst_bwd <= kRunawayTol, "Runaway oracle",
           fmt::format("max relative deviation from exp(t/2eps): forward {:.3e}, backward {:.3e} (tol {:.0e})",
                       worst_fwd, worst_bwd, kRunawayTol));
}

/// Integral of samples f over t on a non-uniform grid, piecewise quadratic.
double simpson(const std::vector<double>& t, const std::vector<double>& f)
{
    const std::size_t n = t.size();
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = t[i + 1] - t[i], h1 = t[i + 2] - t[i + 1];
        s += (h0 + h1) / 6.0 *
             ((2.0 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < n) {
        // last single interval from the quadratic through the last three points
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        s += f[i + 1] * h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1)) + f[i] * h1 * (h1 + 3.0 * h0) / (6.0 * h0) -
             f[i - 1] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    return s;
}

void energy_theorem()
{
    Params p;
    struct Case {
        const char* name;
        PhaseState s;
        double duration;
        Direction dir;
    };
    const Case cases[] = {
        {"forward", {{1.7, -0.3}, {0.4, 2.1}, {0.05, -0.02}, {0.1, 0.05}, {0.3, -0.2}}, 0.15, Direction::forward},
        {"backward", {{1.2, 0.8}, {-1.1, 0.9}, {-0.03, 0.04}, {0.2, -0.1}, {0.5, 0.4}}, 0.5, Direction::backward},
    };
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        std::vector<double> t, rate;
        const IntegrationResult res = integrate(c.s, c.duration, c.dir, p, [&](const TrajectorySample& smp) {
            t.push_back(smp.t);
            rate.push_back(-4.0 * p.m * p.eps * norm2(smp.state.acm));
        });
        const double change = total_energy(res.final_state, p) - total_energy(c.s, p);
        const double quad = simpson(t, rate);
        const double rel = std::fabs(change - quad) / std::fabs(quad) / c.duration;
        const bool ok = res.reason == StopReason::completed && rel <= kEnergyTol;
        pass = pass && ok;
        detail += fmt::format("{}{} over {}: dE {:.6e} vs quadrature {:.6e}, relative error per unit time {:.2e}",
                              detail.empty() ? "" : "; ", c.name, c.duration, change, quad, rel);
    }
    report(pass, "Energy theorem", detail + fmt::format(" (tol {:.0e})", kEnergyTol));
}

void dirac_squeeze()
{
    Params p;
    const auto field = [&p](const StateVector& x) { return vector_field(x, p); };
    const auto step = [&p](const PhaseState& s) { return adaptive_step(s, p); };
    std::size_t squeezed = 0;
    double worst_ok = 0.0;
    for (std::size_t i = 0; i < kSqueezePoints; ++i) {
        const ManifoldPoint pt = sample_point(kDeskSeed, i, p);
        try {
            const DensityEstimate est = estimate_log_density(pt.lift(), p, 10.0 * 2.0 * p.eps, 0.0, field, step);
            const auto& ev = est.diagnostics.transient_eigenvalues;
            const double ratio = std::fmax(ev[0], ev[1]) / ev[2];
            if (ratio <= kSqueezeRatio) {
                ++squeezed;
                worst_ok = std::fmax(worst_ok, ratio);
            }
        } catch (const std::exception&) {
        }
    }
    report(squeezed >= kSqueezeRequired, "Dirac squeeze",
           fmt::format("{}/{} points with max(l1, l2) <= {:.0e} l3 after the transient (need {}), "
                       "largest passing ratio {:.2e}",
                       squeezed, kSqueezePoints, kSqueezeRatio, kSqueezeRequired, worst_ok));
}

void manifold_conservation()
{
    Params p;
    std::vector<ManifoldPoint> orbits{{{2.0, 0.0}, {0.0, std::sqrt(7.0)}}};
    for (std::size_t i = 0; i < kConservationOrbits; ++i) orbits.push_back(sample_point(kDeskSeed, i, p));

    std::size_t within = 0, resolved = 0, resolved_within = 0;
    double worst_e = 0.0, worst_m = 0.0;
    bool cm_zero = true;
    std::string offenders;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const ManifoldPoint& pt = orbits[i];
        const OrbitElements el = elements_from_state(pt, p);
        const IntegrationResult res =
            integrate(pt.lift(), el.period(), Direction::forward, p, [&](const TrajectorySample& smp) {
                const StateVector x = smp.state.flatten();
                for (std::size_t k = axis::xcm_x; k < kStateDim; ++k)
                    if (std::bit_cast<std::uint64_t>(x[k]) != 0) cm_zero = false;
            });
        const double de = std::fabs(mechanical_energy(res.final_state, p) - el.energy()) / std::fabs(el.energy());
        const double dm = std::fabs(angular_momentum(res.final_state, p) - el.angular_momentum()) /
                          std::fabs(el.angular_momentum());
        worst_e = std::fmax(worst_e, de);
        worst_m = std::fmax(worst_m, dm);
        const bool ok = res.reason == StopReason::completed && de <= kConservationTol && dm <= kConservationTol;
        const double peri = el.semi_major_axis() * (1.0 - el.eccentricity());
        if (ok) ++within;
        else offenders += fmt::format(" [pericenter {:.2e}: dE {:.1e}, dM {:.1e}]", peri, de, dm);
        if (peri >= p.r_min) {
            ++resolved;
            if (ok) ++resolved_within;
        }
    }
    report(within == orbits.size() && cm_zero, "Manifold conservation",
           fmt::format("{}/{} orbits within {:.0e} over one period, worst |dE/E| {:.2e}, worst |dM/M| {:.2e}, "
                       "cm block bitwise zero: {}{}",
                       within, orbits.size(), kConservationTol, worst_e, worst_m, cm_zero ? "yes" : "no",
                       offenders.empty() ? "" : ";" + offenders));
    info("Manifold conservation",
         fmt::format("{}/{} orbits with pericenter >= r_min = {} are within tolerance", resolved_within, resolved,
                     p.r_min));
}

void eigen_solver()
{
    CounterStream rng(2024, 0);
    double worst = 0.0;
    bool threw = false;
    for (int trial = 0; trial < kEigenTrials; ++trial) {
        Matrix10 g{};
        for (auto& row : g)
            for (double& x : row) x = rng.uniform(-1.0, 1.0);
        Matrix10 b{};
        for (std::size_t r = 0; r < kStateDim; ++r)
            for (std::size_t c = 0; c < kStateDim; ++c)
                for (std::size_t k = 0; k < kStateDim; ++k) b[r][c] += g[r][k] * g[c][k];
        try {
            const SpectralResult sr = symmetric_eigen(b, true);
            Matrix10 d = b;
            for (std::size_t j = 0; j < kStateDim; ++j)
                for (std::size_t r = 0; r < kStateDim; ++r)
                    for (std::size_t c = 0; c < kStateDim; ++c)
                        d[r][c] -= sr.values[j] * sr.vectors[j][r] * sr.vectors[j][c];
            worst = std::fmax(worst, frobenius_norm(d) / frobenius_norm(b));
        } catch (const std::exception&) {
            threw = true;
        }
    }
    report(!threw && worst <= kEigenTol, "Eigen-solver",
           fmt::format("worst ||B - Q L Q^T|| / ||B|| over {} PSD trials: {:.2e} (tol {:.0e})", kEigenTrials, worst,
                       kEigenTol));
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void desk_scale(const fs::path& dir)
{
    fs::create_directories(dir);
    const fs::path one = dir / "records_w1.csv";
    const fs::path eight = dir / "records_w8.csv";
    double minutes = 0.0;
    int codes[2] = {0, 0};
    int k = 0;
    for (const auto& [path, workers] : {std::pair{one, "1"}, std::pair{eight, "8"}}) {
        std::ostringstream out, err;
        const auto t0 = Clock::now();
        codes[k++] = cli::run({"ensemble", "--seed", std::to_string(kDeskSeed), "--n-points", std::to_string(kDeskPoints),
                               "--workers", workers, "--out", path.string(), "--quiet"},
                              out, err);
        const double m = seconds_since(t0) / 60.0;
        minutes += m;
        info("Determinism", fmt::format("workers {}: {:.2f} min, {}", workers, m, err.str().substr(0, err.str().find('\n'))));
    }
    const bool ran = codes[0] == 0 && codes[1] == 0;
    const bool identical = ran && slurp(one) == slurp(eight);
    report(identical && minutes < kDeskMinutes, "Determinism",
           fmt::format("n = {} record files at workers 1 and 8 are {}, total {:.2f} min (limit {:.0f} min)",
                       kDeskPoints, identical ? "bitwise identical" : "DIFFERENT", minutes, kDeskMinutes));

    if (!ran) {
        report(false, "Desk-scale reproduction", "ensemble run failed");
        return;
    }
    const std::vector<DensityRecord> records = read_record_file(one);
    double lo = INFINITY, hi = -INFINITY;
    std::size_t ok = 0;
    for (const auto& r : records) {
        if (r.status != DensityStatus::ok) continue;
        ++ok;
        lo = std::fmin(lo, r.log10_rho);
        hi = std::fmax(hi, r.log10_rho);
    }
    info("Desk-scale reproduction", fmt::format("{}/{} records ok", ok, records.size()));
    EnsembleConfig cfg;
    const Histogram2D h = reduce_histogram(records, cfg);
    const double share = mass_concentration(h, 0.01);
    const double spread = hi - lo;
    report(spread >= kSpreadDecades && share > kTopShare, "Desk-scale reproduction",
           fmt::format("log10_rho spans [{:.3f}, {:.3f}] = {:.2f} decades (need >= {:.0f}); top 1% of {} occupied "
                       "cells hold {:.6f} of the mass (need > {:.2f})",
                       lo, hi, spread, kSpreadDecades, h.occupied_cells(), share, kTopShare));
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    fs::path dir = "acceptance_out";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;
        else dir = argv[i];
    }
    const auto t0 = Clock::now();
    kepler_oracle();
    runaway_oracle();
    energy_theorem();
    dirac_squeeze();
    manifold_conservation();
    eigen_solver();
    desk_scale(dir);
    std::cout << fmt::format("acceptance: {} of 8 criteria failed, {:.1f} min\n", failures, seconds_since(t0) / 60.0);
    return strict ? failures : 0;
}
