#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkd/entropy.hpp"

namespace qkd {

/// Finite joint distribution over Alice's symbols (rows) and Bob's symbols
/// (columns). Entries are stored row-major, must be non-negative and sum to 1
/// within 1e-12. Tiny negatives from floating-point arithmetic are clamped to
/// zero on construction.
class JointTable {
public:
    JointTable(std::vector<std::string> alphabet_a,
               std::vector<std::string> alphabet_b,
               std::vector<double> probs)
        : alphabet_a_(std::move(alphabet_a)),
          alphabet_b_(std::move(alphabet_b)),
          probs_(std::move(probs)) {
        if (alphabet_a_.empty() || alphabet_b_.empty()) {
            throw std::invalid_argument("JointTable: empty alphabet");
        }
        if (probs_.size() != alphabet_a_.size() * alphabet_b_.size()) {
            throw std::invalid_argument("JointTable: size mismatch");
        }
        double sum = 0.0;
        for (double& p : probs_) {
            if (std::isnan(p)) {
                throw std::invalid_argument("JointTable: NaN entry");
            }
            if (p < 0.0) {
                if (p < -1e-12) {
                    throw std::invalid_argument("JointTable: negative entry");
                }
                p = 0.0;
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("JointTable: entries sum to " + std::to_string(sum));
        }
    }

    std::size_t a_size() const { return alphabet_a_.size(); }
    std::size_t b_size() const { return alphabet_b_.size(); }

    double at(std::size_t a, std::size_t b) const { return probs_[a * b_size() + b]; }

    const std::vector<std::string>& alphabet_a() const { return alphabet_a_; }
    const std::vector<std::string>& alphabet_b() const { return alphabet_b_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    std::vector<std::string> alphabet_a_;
    std::vector<std::string> alphabet_b_;
    std::vector<double> probs_;
};

/// Row sums: P(a).
inline std::vector<double> marginal_a(const JointTable& t) {
    std::vector<double> m(t.a_size(), 0.0);
    for (std::size_t a = 0; a < t.a_size(); ++a) {
        for (std::size_t b = 0; b < t.b_size(); ++b) {
            m[a] += t.at(a, b);
        }
    }
    return m;
}

/// Column sums: P(b).
inline std::vector<double> marginal_b(const JointTable& t) {
    std::vector<double> m(t.b_size(), 0.0);
    for (std::size_t a = 0; a < t.a_size(); ++a) {
        for (std::size_t b = 0; b < t.b_size(); ++b) {
            m[b] += t.at(a, b);
        }
    }
    return m;
}

/// H(A|B) = sum_b P(b) H(A|B=b) in bits. Columns with P(b) = 0 contribute 0.
inline double conditional_entropy(const JointTable& t) {
    double h = 0.0;
    for (std::size_t b = 0; b < t.b_size(); ++b) {
        double pb = 0.0;
        for (std::size_t a = 0; a < t.a_size(); ++a) {
            pb += t.at(a, b);
        }
        if (pb <= 0.0) {
            continue;
        }
        double hb = 0.0;
        for (std::size_t a = 0; a < t.a_size(); ++a) {
            hb += neg_p_log2_p(t.at(a, b) / pb);
        }
        h += pb * hb;
    }
    return h;
}

/// Merge Bob's column `absorb` into column `keep` (coarser Bob alphabet).
inline JointTable merge_b(const JointTable& t, std::size_t keep, std::size_t absorb) {
    if (keep >= t.b_size() || absorb >= t.b_size() || keep == absorb) {
        throw std::invalid_argument("merge_b: bad column indices");
    }
    std::vector<std::string> bl;
    std::vector<double> probs;
    for (std::size_t b = 0; b < t.b_size(); ++b) {
        if (b != absorb) {
            bl.push_back(t.alphabet_b()[b]);
        }
    }
    for (std::size_t a = 0; a < t.a_size(); ++a) {
        for (std::size_t b = 0; b < t.b_size(); ++b) {
            if (b == absorb) {
                continue;
            }
            probs.push_back(b == keep ? t.at(a, keep) + t.at(a, absorb) : t.at(a, b));
        }
    }
    return JointTable(t.alphabet_a(), std::move(bl), std::move(probs));
}

} // namespace qkd
