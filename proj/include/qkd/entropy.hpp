#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "qkd/probability.hpp"

namespace qkd {

/// -p*log2(p) with the continuity convention 0*log2(0) = 0.
inline double neg_p_log2_p(double p) {
    return p > 0.0 ? -p * std::log2(p) : 0.0;
}

/// Binary entropy h[x] in bits. h[0] = h[1] = 0 exactly; symmetric about 1/2.
inline double binary_entropy(Probability x) {
    const double p = x.value();
    if (p == 0.0 || p == 1.0) {
        return 0.0;
    }
    return neg_p_log2_p(p) + neg_p_log2_p(1.0 - p);
}

/// Shannon entropy of a discrete distribution, in bits.
/// Entries must be non-negative (tiny negatives are clamped) and sum to 1
/// within 1e-12.
inline double shannon_entropy(std::span<const double> dist) {
    double sum = 0.0;
    double h = 0.0;
    for (double p : dist) {
        if (p < 0.0) {
            if (p < -Probability::kClampTol) {
                throw std::domain_error("shannon_entropy: negative probability");
            }
            p = 0.0;
        }
        sum += p;
        h += neg_p_log2_p(p);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::domain_error("shannon_entropy: distribution does not sum to 1");
    }
    return h;
}

} // namespace qkd
