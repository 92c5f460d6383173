#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qkd/rates.hpp"
#include "qkd/root_finding.hpp"

namespace qkd {

/// One grid point of a transmittance sweep. `eta` is the swept knob: the
/// single-click fraction for bb84, the transmissivity for ddi, the per-link
/// transmittance (symmetric, eta_a = eta_b) for di. `s` is present for di
/// only. i_pa_coarse applies to both modes for di; for bb84/ddi it is h[e_c].
struct SweepRow {
    double eta = 0.0;
    double rate_coarse = 0.0;
    double rate_refined = 0.0;
    std::optional<double> s;
    double e_c = 0.0;
    double h_a = 0.0;
    double i_pa_coarse = 0.0;
};

/// Tolerable-region boundary at one error rate. Thresholds are absent when
/// the rate is non-positive over the whole transmittance range.
struct TradeoffPoint {
    double e_s = 0.0;
    std::optional<double> eta_threshold_coarse;
    std::optional<double> eta_threshold_refined;
};

/// Rate of (scheme, mode) on the symmetric line: eta is p_single for bb84,
/// the transmissivity for ddi, and the per-link transmittance for di.
inline RateBreakdown scheme_rate(Scheme scheme, Mode mode, double eta, double e_s,
                                 EcParams ec = {}) {
    switch (scheme) {
        case Scheme::bb84: {
            const Bb84Params p(eta, e_s);
            return mode == Mode::coarse ? bb84_coarse_rate(p, ec) : bb84_refined_rate(p, ec);
        }
        case Scheme::ddi: {
            const DdiParams p(eta, e_s);
            return mode == Mode::coarse ? ddi_coarse_rate(p, ec) : ddi_refined_rate(p, ec);
        }
        case Scheme::di: {
            const DiParams p(eta, eta, e_s);
            return mode == Mode::coarse ? di_coarse_rate(p, ec) : di_refined_rate(p, ec);
        }
    }
    throw std::logic_error("scheme_rate: unknown scheme");
}

/// Lowest transmittance above which the rate is positive, located by a grid
/// pre-scan over [0, 1] followed by bisection. Returns nullopt when the rate
/// is non-positive everywhere. When the scan sees several sign changes the
/// smallest boundary is returned, with the count in `sign_changes`.
inline std::optional<ThresholdResult> find_eta_threshold(Scheme scheme, Mode mode, double e_s,
                                                         double tol, EcParams ec = {}) {
    const auto rate = [&](double eta) { return scheme_rate(scheme, mode, eta, e_s, ec).rate; };
    const auto brackets = scan_sign_changes(rate, 0.0, 1.0);
    if (brackets.empty()) {
        if (rate(0.0) > 0.0) {
            return ThresholdResult{0.0, 0.0, 0.0, 0, 0.0, 0};
        }
        return std::nullopt;
    }
    ThresholdResult r = bisect(rate, brackets.front().first, brackets.front().second, tol);
    r.sign_changes = static_cast<int>(brackets.size());
    return r;
}

/// Largest single-click error rate in [0, 1/2] that still gives a positive
/// rate at the given transmittance. Returns nullopt when the rate is already
/// non-positive at e_s = 0.
inline std::optional<ThresholdResult> find_es_threshold(Scheme scheme, Mode mode, double eta,
                                                        double tol, EcParams ec = {}) {
    const auto rate = [&](double e_s) { return scheme_rate(scheme, mode, eta, e_s, ec).rate; };
    if (!(rate(0.0) > 0.0)) {
        return std::nullopt;
    }
    const auto brackets = scan_sign_changes(rate, 0.0, 0.5);
    if (brackets.empty()) {
        // positive over the whole range; the cap is the domain edge
        return ThresholdResult{0.5, 0.5, 0.5, 0, 0.0, 0};
    }
    ThresholdResult r = bisect(rate, brackets.front().first, brackets.front().second, tol);
    r.sign_changes = static_cast<int>(brackets.size());
    return r;
}

/// Evenly spaced transmittance sweep, endpoints included. Rows are emitted in
/// ascending eta order and are pure functions of the grid point.
inline std::vector<SweepRow> sweep(Scheme scheme, double e_s, double eta_min, double eta_max,
                                   int steps, EcParams ec = {}) {
    if (!(eta_min >= 0.0 && eta_min < eta_max && eta_max <= 1.0)) {
        throw std::invalid_argument("sweep: need 0 <= eta_min < eta_max <= 1");
    }
    if (steps < 2) {
        throw std::invalid_argument("sweep: need steps >= 2");
    }
    std::vector<SweepRow> rows;
    rows.reserve(steps);
    const double step = (eta_max - eta_min) / (steps - 1);
    for (int i = 0; i < steps; ++i) {
        const double eta = (i == steps - 1) ? eta_max : eta_min + i * step;
        SweepRow row;
        row.eta = eta;
        row.rate_coarse = scheme_rate(scheme, Mode::coarse, eta, e_s, ec).rate;
        row.rate_refined = scheme_rate(scheme, Mode::refined, eta, e_s, ec).rate;
        if (scheme == Scheme::di) {
            const DiParams p(eta, eta, e_s);
            row.s = di_bell_parameter(p);
            row.e_c = di_coarse_error(p).value();
            row.h_a = di_alice_entropy(p.eta_a);
            row.i_pa_coarse = di_ipa(*row.s);
        } else {
            const Probability ps(eta), es(e_s);
            row.e_c = coarse_error_rate(ps, es).value();
            row.h_a = 1.0;
            row.i_pa_coarse = binary_entropy(Probability(row.e_c));
        }
        rows.push_back(row);
    }
    return rows;
}

/// Tolerable (e_s, eta) boundary for both processing modes over an e_s grid.
/// steps == 1 emits the single point es_min.
inline std::vector<TradeoffPoint> tradeoff_curve(Scheme scheme, double es_min, double es_max,
                                                 int steps, double tol, EcParams ec = {}) {
    if (!(es_min >= 0.0 && es_min <= es_max && es_max <= 0.5)) {
        throw std::invalid_argument("tradeoff_curve: need 0 <= es_min <= es_max <= 1/2");
    }
    if (steps < 1 || (steps > 1 && !(es_min < es_max))) {
        throw std::invalid_argument("tradeoff_curve: bad grid");
    }
    std::vector<TradeoffPoint> points;
    points.reserve(steps);
    const double step = steps > 1 ? (es_max - es_min) / (steps - 1) : 0.0;
    for (int i = 0; i < steps; ++i) {
        const double e_s = (i == steps - 1 && steps > 1) ? es_max : es_min + i * step;
        TradeoffPoint pt;
        pt.e_s = e_s;
        if (auto r = find_eta_threshold(scheme, Mode::coarse, e_s, tol, ec)) {
            pt.eta_threshold_coarse = r->root;
        }
        if (auto r = find_eta_threshold(scheme, Mode::refined, e_s, tol, ec)) {
            pt.eta_threshold_refined = r->root;
        }
        points.push_back(pt);
    }
    return points;
}

} // namespace qkd
