#pragma once

#include "tmas/common.hpp"
#include "tmas/error.hpp"
#include "tmas/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tmas {

/// Infinite timed sequence in lasso form: steps[0..loop_start) is the stem,
/// steps[loop_start..) repeats forever, each repetition shifted by `period`.
template <class T>
struct Lasso {
    struct Step {
        T value;
        Rational time;
    };

    std::vector<Step> steps;
    std::size_t loop_start = 0;
    Rational period{0};

    std::size_t size() const { return steps.size(); }
    std::size_t cycle_length() const { return steps.size() - loop_start; }

    /// Position in [0, size()) holding the same value as unrolled position k.
    std::size_t canonical(std::size_t k) const
    {
        if (k < steps.size()) return k;
        return loop_start + (k - loop_start) % cycle_length();
    }

    const T& value(std::size_t k) const { return steps[canonical(k)].value; }

    Rational time(std::size_t k) const
    {
        if (k < steps.size()) return steps[k].time;
        const std::size_t off = k - loop_start;
        const auto laps = static_cast<std::int64_t>(off / cycle_length());
        return steps[loop_start + off % cycle_length()].time + period * Rational(laps);
    }

    /// Throws InvalidArgument unless the timing invariants hold.
    void validate() const
    {
        if (steps.empty()) fail(ErrorCode::InvalidArgument, "lasso has no steps");
        if (loop_start >= steps.size()) fail(ErrorCode::InvalidArgument, "lasso cycle is empty");
        if (steps.front().time != Rational(0)) fail(ErrorCode::InvalidArgument, "lasso must start at time 0");
        for (std::size_t k = 1; k < steps.size(); ++k) {
            if (!(steps[k].time > steps[k - 1].time)) fail(ErrorCode::InvalidArgument, "lasso times must strictly increase");
        }
        if (!(steps[loop_start].time + period > steps.back().time)) {
            fail(ErrorCode::InvalidArgument, "lasso period too short for its cycle");
        }
    }

    bool operator==(const Lasso& o) const
    {
        if (loop_start != o.loop_start || period != o.period || steps.size() != o.steps.size()) return false;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            if (!(steps[k].value == o.steps[k].value) || steps[k].time != o.steps[k].time) return false;
        }
        return true;
    }
};

using TimedWord = Lasso<PropSet>;
template <class S>
using TimedRun = Lasso<S>;

/// Builds a lasso from values with times k*dt; the cycle closes back onto loop_start.
template <class T>
Lasso<T> uniform_lasso(const std::vector<T>& values, std::size_t loop_start, const Rational& dt)
{
    Lasso<T> out;
    for (std::size_t k = 0; k < values.size(); ++k) out.steps.push_back({values[k], dt * Rational(static_cast<std::int64_t>(k))});
    out.loop_start = loop_start;
    out.period = dt * Rational(static_cast<std::int64_t>(values.size() - loop_start));
    out.validate();
    return out;
}

}  // namespace tmas
