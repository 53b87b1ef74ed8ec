#include "helium/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helium {

std::string_view to_string(StopReason r) noexcept
{
    switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::collision: return "collision";
    case StopReason::runaway_overflow: return "runaway_overflow";
    case StopReason::step_underflow: return "step_underflow";
    }
    return "unknown";
}

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::forward ? "forward" : "backward";
}

double adaptive_step(const PhaseState& s, const Params& p) noexcept
{
    const LabState lab = lab_from_cm(s);
    const double closest = std::min({norm(lab.x1), norm(lab.x2), norm(s.r), p.r_max});
    return p.h0 * std::max(closest, p.r_min);
}

PhaseState rk4_step(const PhaseState& s, double h, Direction dir, const Params& p)
{
    const auto field = [&p](const StateVector& x) { return vector_field(x, p); };
    return PhaseState::from_vector(rk4_step(s.flatten(), h, direction_sign(dir), field));
}

IntegrationResult integrate(const PhaseState& s0, double duration, Direction dir,
                            const Params& p, const SampleSink& sink,
                            const IntegrationLimits& limits)
{
    if (!(duration > 0.0)) {
        throw std::invalid_argument("integrate: duration must be positive");
    }
    const double sign = direction_sign(dir);
    const auto field = [&p](const StateVector& x) { return vector_field(x, p); };

    IntegrationResult res;
    res.final_state = s0;
    if (sink) sink({0.0, s0});

    StateVector x = s0.flatten();
    while (res.elapsed < duration) {
        const PhaseState current = PhaseState::from_vector(x);
        double h = adaptive_step(current, p);
        if (!(h >= limits.min_step)) {
            res.reason = StopReason::step_underflow;
            return res;
        }
        bool last = false;
        if (duration - res.elapsed <= h) {
            h = duration - res.elapsed;
            last = true;
        }
        try {
            x = rk4_step(x, h, sign, field);
        } catch (const CollisionError&) {
            res.reason = StopReason::collision;
            return res;
        }
        res.elapsed = last ? duration : res.elapsed + h;
        ++res.steps;
        res.final_state = PhaseState::from_vector(x);
        if (sink) sink({sign * res.elapsed, res.final_state});

        const double acm = norm(res.final_state.acm);
        if (!(acm <= limits.runaway_acm)) {
            res.reason = StopReason::runaway_overflow;
            return res;
        }
    }
    return res;
}

} // namespace helium
