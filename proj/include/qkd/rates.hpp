#pragma once

#include <cmath>
#include <stdexcept>

#include "qkd/entropy.hpp"
#include "qkd/scenarios.hpp"

namespace qkd {

/// Error-correction inefficiency: actual leakage is f times the Shannon
/// limit H(A|B). f = 1 is the Shannon limit; practical codes sit around
/// 1.1 - 1.25.
struct EcParams {
    double f = 1.0;
    EcParams() = default;
    explicit EcParams(double f_) : f(f_) {
        if (!(f >= 1.0)) {
            throw std::domain_error("EcParams: f must be >= 1");
        }
    }
};

/// One key-rate evaluation, split into its three terms:
/// rate = h_a - f * h_a_given_b - i_pa (bits per retained signal).
/// The rate is reported signed; negative means no key.
struct RateBreakdown {
    double h_a = 0.0;
    double h_a_given_b = 0.0;
    double i_pa = 0.0;
    double f = 1.0;
    double rate = 0.0;

    /// Clamped-at-zero rate, for threshold bookkeeping.
    double positive_rate() const { return rate > 0.0 ? rate : 0.0; }
};

inline RateBreakdown generic_rate(double h_a, double h_a_given_b, double i_pa,
                                  EcParams ec = {}) {
    if (h_a < 0.0 || h_a_given_b < 0.0 || i_pa < 0.0) {
        throw std::domain_error("generic_rate: entropies must be non-negative");
    }
    return {h_a, h_a_given_b, i_pa, ec.f, h_a - ec.f * h_a_given_b - i_pa};
}

/// Coarse processing: both error correction and privacy amplification pay
/// h[e_c], giving 1 - 2*h[e_c] at f = 1.
inline RateBreakdown bb84_coarse_rate(const Bb84Params& p, EcParams ec = {}) {
    const double hec = binary_entropy(coarse_error_rate(p.p_single, p.e_single));
    return generic_rate(1.0, hec, hec, ec);
}

/// Refined processing: error correction drops to the erasure-channel cost
/// while privacy amplification still pays h[e_c].
inline RateBreakdown bb84_refined_rate(const Bb84Params& p, EcParams ec = {}) {
    const double hec = binary_entropy(coarse_error_rate(p.p_single, p.e_single));
    return generic_rate(1.0, refined_cond_entropy_erasure(p.p_single, p.e_single), hec, ec);
}

// The DDI scheme follows the BB84 formulas with p_single = eta.
inline RateBreakdown ddi_coarse_rate(const DdiParams& p, EcParams ec = {}) {
    return bb84_coarse_rate(p.as_bb84(), ec);
}

inline RateBreakdown ddi_refined_rate(const DdiParams& p, EcParams ec = {}) {
    return bb84_refined_rate(p.as_bb84(), ec);
}

/// Privacy-amplification term from the CHSH value:
/// I_pa = h[(1 + sqrt((S/2)^2 - 1)) / 2] for S in [2, 2*sqrt(2)].
/// Below S = 2 there is no Bell violation and Eve is unconstrained, so the
/// term saturates at 1; at and above 2*sqrt(2) it is 0. Continuous at S = 2.
inline double di_ipa(double s) {
    if (s <= 2.0) {
        return 1.0;
    }
    const double half = 0.5 * s;
    const double arg = 0.5 * (1.0 + std::sqrt(half * half - 1.0));
    if (arg >= 1.0) {
        return 0.0;
    }
    return binary_entropy(Probability(arg));
}

/// Coarse device-independent rate. The error-correction term uses the closed
/// form h[e_c] even though Alice's marginal is biased, so it can exceed the
/// exact table entropy H(A|B); see di_coarse_entropy_gap.
inline RateBreakdown di_coarse_rate(const DiParams& p, EcParams ec = {}) {
    return generic_rate(di_alice_entropy(p.eta_a),
                        binary_entropy(di_coarse_error(p)),
                        di_ipa(di_bell_parameter(p)), ec);
}

/// Refined device-independent rate: Bob corrects errors with his loss
/// positions known. Eve's side is untouched, so I_pa matches the coarse mode.
inline RateBreakdown di_refined_rate(const DiParams& p, EcParams ec = {}) {
    return generic_rate(di_alice_entropy(p.eta_a),
                        conditional_entropy(di_joint(p, Mode::refined)),
                        di_ipa(di_bell_parameter(p)), ec);
}

/// Diagnostic: h[e_c] minus the exact conditional entropy of the coarse
/// table. Non-negative; zero when Alice's marginal is uniform (eta_a = 1).
/// Measures how much the closed-form coarse rate undercounts.
inline double di_coarse_entropy_gap(const DiParams& p) {
    return binary_entropy(di_coarse_error(p)) - conditional_entropy(di_joint(p, Mode::coarse));
}

} // namespace qkd
