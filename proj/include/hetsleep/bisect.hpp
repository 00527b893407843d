#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "hetsleep/errors.hpp"

namespace hetsleep {

struct BisectOptions {
    double abs_tol = 0.0;     // stop when the bracket width falls below this
    double rel_tol = 1e-12;   // or below rel_tol * |midpoint|
    int max_iter = 200;
};

// Root of fn on [lo, hi]; fn(lo) and fn(hi) must have opposite signs
// (zero endpoints count as roots). Returns the bracket midpoint.
template <class Fn>
double bisect(Fn&& fn, double lo, double hi, const BisectOptions& opt = {}) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw BracketError("bisect: no sign change on the initial bracket");
    }
    for (int it = 0; it < opt.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double width = hi - lo;
        if (width <= opt.abs_tol || width <= opt.rel_tol * std::fabs(mid)) return mid;
        const double fmid = fn(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Root of an increasing function that starts below zero at lo. The upper
// bracket end is grown by doubling from hi_start until fn turns positive.
// NaN probes count as positive: for the increasing curves solved here they
// only arise past floating-point overflow, which lies above the root.
template <class Fn>
double bisect_increasing_from(Fn&& fn, double lo, double hi_start,
                              double hi_cap = 1e30, const BisectOptions& opt = {}) {
    const auto guarded = [&fn](double x) {
        const double v = fn(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    if (guarded(lo) >= 0.0) {
        // Root sits below lo; fall back to [0, lo].
        return bisect(guarded, 0.0, lo, opt);
    }
    double hi = hi_start;
    while (guarded(hi) < 0.0) {
        hi *= 2.0;
        if (hi > hi_cap) {
            throw BracketError("bisect_increasing_from: no sign change up to the bracket cap");
        }
    }
    return bisect(guarded, lo, hi, opt);
}

}  // namespace hetsleep
