#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qkd {

/// Outcome of a bracketing root search.
struct ThresholdResult {
    double root = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    double achieved_tolerance = 0.0;
    /// Sign changes seen by the grid pre-scan that produced the bracket.
    /// 1 for a plain bisect call; > 1 flags a non-monotone curve.
    int sign_changes = 1;
};

inline constexpr int kDefaultScanPoints = 512;

/// Bisection on [lo, hi]. f(lo) and f(hi) must have opposite signs (an exact
/// zero at an endpoint counts). Stops once the bracket width is <= tol.
template <typename F>
ThresholdResult bisect(F&& f, double lo, double hi, double tol = 1e-9, int max_iter = 200) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("bisect: tol must be positive");
    }
    if (lo > hi) {
        std::swap(lo, hi);
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return {lo, lo, lo, 0, 0.0, 1};
    }
    if (fhi == 0.0) {
        return {hi, hi, hi, 0, 0.0, 1};
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw std::invalid_argument("bisect: f(lo) and f(hi) have the same sign");
    }
    int iter = 0;
    while (hi - lo > tol) {
        if (iter >= max_iter) {
            throw std::runtime_error("bisect: no convergence after max_iter iterations");
        }
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return {mid, mid, mid, iter + 1, 0.0, 1};
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
        ++iter;
    }
    return {0.5 * (lo + hi), lo, hi, iter, hi - lo, 1};
}

/// Uniform grid scan of f over [lo, hi]; returns every adjacent pair of grid
/// points across which f changes sign (an exact zero at a grid point counts
/// towards both neighbouring pairs). Used to locate brackets for bisect.
template <typename F>
std::vector<std::pair<double, double>> scan_sign_changes(F&& f, double lo, double hi,
                                                         int points = kDefaultScanPoints) {
    if (points < 2 || !(hi > lo)) {
        throw std::invalid_argument("scan_sign_changes: bad grid");
    }
    std::vector<std::pair<double, double>> brackets;
    const double step = (hi - lo) / (points - 1);
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i < points; ++i) {
        const double x = (i == points - 1) ? hi : lo + i * step;
        const double fx = f(x);
        if (f_prev == 0.0 || fx == 0.0 || (f_prev > 0.0) != (fx > 0.0)) {
            brackets.emplace_back(x_prev, x);
        }
        x_prev = x;
        f_prev = fx;
    }
    return brackets;
}

} // namespace qkd
