// Richardson extrapolation of mesh sequences with an empirical order.
#pragma once

#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mixed_spectra {

struct LevelValue {
    double h;
    double value;
};

struct Extrapolation {
    double value = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();
    double error_bar = 0.0;
    bool reliable = true;
    std::string note; // empty, or why the estimate is flagged
};

/// Uses the three finest levels (h, 2h, 4h). Orders outside [0.5, 2] are
/// clamped; a non-monotone sequence uses order 0.5. Both are flagged
/// "extrapolation unreliable". A constant tail has no defined order.
inline Extrapolation extrapolate(std::vector<LevelValue> levels) {
    if (levels.size() < 3) throw InsufficientLevels("extrapolation needs at least 3 levels, got " +
                                                    std::to_string(levels.size()));
    std::sort(levels.begin(), levels.end(), [](const LevelValue& a, const LevelValue& b) { return a.h > b.h; });
    const std::size_t n = levels.size();
    const LevelValue &coarse = levels[n - 3], &mid = levels[n - 2], &fine = levels[n - 1];
    for (const auto& [a, b] : {std::pair{coarse, mid}, std::pair{mid, fine}})
        if (std::abs(a.h / b.h - 2.0) > 1e-6) throw Error("extrapolate: mesh sizes must halve between levels");

    Extrapolation e;
    const double d_coarse = mid.value - coarse.value;
    const double d_fine = fine.value - mid.value;
    if (d_fine == 0.0 && d_coarse == 0.0) {
        e.value = fine.value;
        e.reliable = false;
        e.note = "constant sequence, order undefined";
        return e;
    }
    const double ratio = d_coarse / d_fine;
    double s;
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        s = 0.5;
        e.reliable = false;
        e.note = "extrapolation unreliable: non-monotone sequence";
    } else {
        s = std::log2(ratio);
        if (s < 0.5 || s > 2.0) {
            s = std::clamp(s, 0.5, 2.0);
            e.reliable = false;
            e.note = "extrapolation unreliable: order clamped";
        }
    }
    e.order = s;
    e.value = fine.value + d_fine / (std::pow(2.0, s) - 1.0);
    e.error_bar = 2.0 * std::abs(e.value - fine.value);
    return e;
}

} // namespace mixed_spectra
