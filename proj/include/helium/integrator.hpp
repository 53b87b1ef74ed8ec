#pragma once

#include "helium/dynamics.hpp"

#include <cstddef>
#include <functional>
#include <string_view>

namespace helium {

enum class Direction { forward, backward };

constexpr double direction_sign(Direction d) noexcept
{
    return d == Direction::forward ? 1.0 : -1.0;
}

enum class StopReason { completed, collision, runaway_overflow, step_underflow };

std::string_view to_string(StopReason r) noexcept;
std::string_view to_string(Direction d) noexcept;

struct TrajectorySample {
    double t; ///< physical time; negative when integrating backward
    PhaseState state;
};

/// Classical RK4 step of size h > 0 for dx/dt = sign * field(x). Backward
/// evolution uses sign = -1, i.e. the negated vector field.
template <class Field>
StateVector rk4_step(const StateVector& s, double h, double sign, const Field& field)
{
    const double hs = h * sign;
    const double half = 0.5 * hs;
    StateVector stage;

    const StateVector k1 = field(s);
    for (std::size_t i = 0; i < kStateDim; ++i) stage[i] = s[i] + half * k1[i];
    const StateVector k2 = field(stage);
    for (std::size_t i = 0; i < kStateDim; ++i) stage[i] = s[i] + half * k2[i];
    const StateVector k3 = field(stage);
    for (std::size_t i = 0; i < kStateDim; ++i) stage[i] = s[i] + hs * k3[i];
    const StateVector k4 = field(stage);

    StateVector out;
    const double sixth = hs / 6.0;
    for (std::size_t i = 0; i < kStateDim; ++i) {
        out[i] = s[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    return out;
}

/// Step size h0 * max(min(r1, r2, r12, r_max), r_min), distances taken in
/// lab coordinates (nucleus at the origin).
double adaptive_step(const PhaseState& s, const Params& p) noexcept;

PhaseState rk4_step(const PhaseState& s, double h, Direction dir, const Params& p);

struct IntegrationLimits {
    double runaway_acm = 1e8; ///< abort once |acm| exceeds this
    double min_step = 1e-12;  ///< abort once the adaptive step drops below this
};

struct IntegrationResult {
    PhaseState final_state;
    StopReason reason = StopReason::completed;
    double elapsed = 0.0; ///< integrated time, always >= 0
    std::size_t steps = 0;
};

using SampleSink = std::function<void(const TrajectorySample&)>;

/// Integrates for `duration` (> 0) in the given direction with the adaptive
/// step. The last step is truncated to land exactly on `duration`. The sink,
/// if set, receives the initial state and the state after every step.
IntegrationResult integrate(const PhaseState& s0, double duration, Direction dir,
                            const Params& p, const SampleSink& sink = {},
                            const IntegrationLimits& limits = {});

} // namespace helium
