#pragma once

#include <cmath>
#include <stdexcept>

#include "qkd/entropy.hpp"
#include "qkd/joint_table.hpp"
#include "qkd/probability.hpp"

namespace qkd {

enum class Scheme { bb84, ddi, di };

/// Bob's data-processing mode: coarse keeps only the assigned bits, refined
/// keeps the positions at which the assignment happened as side information.
enum class Mode { coarse, refined };

/// BB84 with threshold detectors: double clicks are randomly assigned.
/// p_single is the fraction of single clicks among retained signals,
/// e_single the error rate within those single clicks.
struct Bb84Params {
    Probability p_single;
    Probability e_single;
    Bb84Params(double ps, double es) : p_single(ps), e_single(es) {}
};

/// Detection-device-independent scheme: uncharacterized detectors, losses and
/// double clicks randomly assigned. With a perfect single-photon source the
/// single-click fraction equals the overall transmissivity eta.
struct DdiParams {
    Probability eta;
    Probability e_single;
    DdiParams(double eta_, double es) : eta(eta_), e_single(es) {}
    Bb84Params as_bb84() const { return Bb84Params(eta.value(), e_single.value()); }
};

/// Fully device-independent scheme: a pair source between Alice and Bob with
/// per-link transmittances eta_a, eta_b; lost signals get a pre-agreed fixed
/// bit. e_single <= 1/2 is the error rate within both-detected events (the
/// depolarizing parametrization requires 1 - 2*e_single >= 0).
struct DiParams {
    Probability eta_a;
    Probability eta_b;
    Probability e_single;
    DiParams(double ea, double eb, double es) : eta_a(ea), eta_b(eb), e_single(es) {
        if (e_single.value() > 0.5) {
            throw std::domain_error("DiParams: e_single must be <= 1/2");
        }
    }
};

/// Detection pattern probabilities for the two-link scheme; sums to 1.
struct EventClassWeights {
    double both_detected;
    double only_a;
    double only_b;
    double neither;
};

inline EventClassWeights event_class_weights(const DiParams& p) {
    const double ea = p.eta_a.value();
    const double eb = p.eta_b.value();
    return {ea * eb, ea * (1.0 - eb), (1.0 - ea) * eb, (1.0 - ea) * (1.0 - eb)};
}

/// Effective error rate after random bit assignment:
/// e_c = p_single * e_single + (1 - p_single) / 2.
inline Probability coarse_error_rate(Probability p_single, Probability e_single) {
    const double ps = p_single.value();
    return Probability(ps * e_single.value() + (1.0 - ps) * 0.5);
}

/// Conditional entropy of Alice's bit given the refined record, which is an
/// erasure channel: H = p_single * h[e_single] + (1 - p_single).
inline double refined_cond_entropy_erasure(Probability p_single, Probability e_single) {
    const double ps = p_single.value();
    return ps * binary_entropy(e_single) + (1.0 - ps);
}

/// Joint distribution of Alice's key bit and Bob's record for BB84/DDI.
/// Coarse: Bob's alphabet {0,1}, assignments drawn uniformly at random.
/// Refined: Bob's alphabet {click0, click1, erased}; the erased symbol keeps
/// no residual information about Alice's bit.
inline JointTable bb84_joint(const Bb84Params& p, Mode mode) {
    const double ps = p.p_single.value();
    const double es = p.e_single.value();
    const double agree = 0.5 * ps * (1.0 - es);
    const double differ = 0.5 * ps * es;
    if (mode == Mode::refined) {
        return JointTable({"0", "1"}, {"click0", "click1", "erased"},
                          {agree, differ, 0.5 * (1.0 - ps),
                           differ, agree, 0.5 * (1.0 - ps)});
    }
    const double mix = 0.25 * (1.0 - ps);
    return JointTable({"0", "1"}, {"0", "1"},
                      {agree + mix, differ + mix,
                       differ + mix, agree + mix});
}

/// CHSH parameter predicted by the event-class mixture:
/// S = 2*sqrt(2)*(1-2*e_single)*eta_a*eta_b + 2*(1-eta_a)*(1-eta_b).
/// Both-sided detections contribute the depolarized quantum value, double
/// losses the perfectly correlated fixed bits (S = 2), one-sided losses
/// uncorrelated data (S = 0).
inline double di_bell_parameter(const DiParams& p) {
    const EventClassWeights w = event_class_weights(p);
    return 2.0 * std::sqrt(2.0) * (1.0 - 2.0 * p.e_single.value()) * w.both_detected +
           2.0 * w.neither;
}

/// Error rate of the coarse-grained two-link data. Double losses carry the
/// same fixed bit on both sides, so they never disagree:
/// e_c = eta_a*eta_b*e_single + (eta_a*(1-eta_b) + (1-eta_a)*eta_b) / 2.
inline Probability di_coarse_error(const DiParams& p) {
    const EventClassWeights w = event_class_weights(p);
    return Probability(w.both_detected * p.e_single.value() + 0.5 * (w.only_a + w.only_b));
}

/// Entropy of Alice's key string with fixed-bit assignment of her losses:
/// H(A) = h[eta_a/2 + (1 - eta_a)] = h[eta_a/2].
inline double di_alice_entropy(Probability eta_a) {
    return binary_entropy(Probability(0.5 * eta_a.value()));
}

/// Joint distribution for the device-independent scheme. Alice always holds
/// coarse bits (they define the key); lost signals carry the fixed bit 0 on
/// both sides. Refined mode keeps Bob's loss positions as a third symbol.
inline JointTable di_joint(const DiParams& p, Mode mode) {
    const EventClassWeights w = event_class_weights(p);
    const double es = p.e_single.value();
    // rows: Alice 0/1; refined columns: det0, det1, lost
    const double r00 = 0.5 * w.both_detected * (1.0 - es) + 0.5 * w.only_b;
    const double r01 = 0.5 * w.both_detected * es + 0.5 * w.only_b;
    const double r0l = 0.5 * w.only_a + w.neither;
    const double r10 = 0.5 * w.both_detected * es;
    const double r11 = 0.5 * w.both_detected * (1.0 - es);
    const double r1l = 0.5 * w.only_a;
    if (mode == Mode::refined) {
        return JointTable({"0", "1"}, {"det0", "det1", "lost"},
                          {r00, r01, r0l, r10, r11, r1l});
    }
    return JointTable({"0", "1"}, {"0", "1"},
                      {r00 + r0l, r01, r10 + r1l, r11});
}

} // namespace qkd
