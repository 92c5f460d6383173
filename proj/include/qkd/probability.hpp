#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkd {

/// A real value constrained to [0,1]. Inputs within kClampTol outside the
/// range are clamped to the nearest bound; anything further out throws.
/// The slack absorbs floating-point dust from table sums while still
/// rejecting genuinely invalid inputs.
class Probability {
public:
    static constexpr double kClampTol = 1e-12;

    Probability() = default;
    explicit Probability(double v) : value_(checked(v)) {}

    double value() const { return value_; }
    operator double() const { return value_; }

private:
    static double checked(double v) {
        if (std::isnan(v)) {
            throw std::domain_error("probability is NaN");
        }
        if (v < 0.0) {
            if (v < -kClampTol) {
                throw std::domain_error("probability out of range: " + std::to_string(v));
            }
            return 0.0;
        }
        if (v > 1.0) {
            if (v > 1.0 + kClampTol) {
                throw std::domain_error("probability out of range: " + std::to_string(v));
            }
            return 1.0;
        }
        return v;
    }

    double value_ = 0.0;
};

} // namespace qkd
