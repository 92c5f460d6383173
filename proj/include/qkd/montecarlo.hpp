#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/joint_table.hpp"
#include "qkd/scenarios.hpp"

namespace qkd {

/// Name of the pseudo-random generator backing the simulations. The engine is
/// fully specified by the C++ standard and all derived draws below use fixed
/// bit manipulations, so a (params, n, seed) triple yields bit-identical
/// results on any conforming platform.
inline constexpr const char* kGeneratorName = "mt19937_64";

namespace detail {

class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1): top 53 bits of the engine output.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    int bit() { return static_cast<int>(eng_() & 1u); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

inline double se_binomial(double p_hat, long long n, double floor_scale) {
    const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
    return std::max(se, floor_scale / static_cast<double>(n));
}

/// Delta-method standard error of the plug-in conditional entropy H(A|B):
/// the influence of one sample at cell (a,b) is -log2 p(a|b), so the
/// asymptotic variance is (E[l^2] - H^2) / n.
inline double se_cond_entropy(const JointTable& t, long long n) {
    double h = 0.0;
    double m2 = 0.0;
    const auto pb = marginal_b(t);
    for (std::size_t a = 0; a < t.a_size(); ++a) {
        for (std::size_t b = 0; b < t.b_size(); ++b) {
            const double p = t.at(a, b);
            if (p <= 0.0 || pb[b] <= 0.0) {
                continue;
            }
            const double l = -std::log2(p / pb[b]);
            h += p * l;
            m2 += p * l * l;
        }
    }
    const double var = std::max(m2 - h * h, 0.0);
    return std::max(std::sqrt(var / static_cast<double>(n)), 1.0 / static_cast<double>(n));
}

} // namespace detail

/// Empirical estimates from one seeded simulation run, plus enough context
/// (scheme, parameters, seed) to validate them against the analytic model.
struct MonteCarloEstimate {
    Scheme scheme;
    long long n = 0;
    std::uint64_t seed = 0;
    double eta_a = 0.0;   // ddi stores its eta in both eta_a and eta_b
    double eta_b = 0.0;
    double e_single = 0.0;

    std::map<std::string, long long> class_counts;
    double e_c_hat = 0.0;
    std::optional<double> s_hat;
    JointTable joint_coarse_hat;
    JointTable joint_refined_hat;
    /// Realized random/fixed bit assignments at erased or lost positions,
    /// indexed [alice][assigned bob bit]. Merging these into the refined
    /// counts reproduces the coarse counts exactly.
    std::array<std::array<long long, 2>, 2> assigned_counts{};
    std::map<std::string, double> std_errors;
};

/// Per-signal simulation of the detection-device-independent model: Alice's
/// bit uniform, detection with probability eta, errors within detected
/// signals with probability e_single, undetected signals randomly assigned.
inline MonteCarloEstimate simulate_ddi(const DdiParams& params, long long n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("simulate_ddi: n must be >= 1");
    }
    detail::SampleStream rng(seed);
    const double eta = params.eta.value();
    const double es = params.e_single.value();

    std::array<std::array<long long, 2>, 2> coarse{};
    std::array<std::array<long long, 3>, 2> refined{};
    std::array<std::array<long long, 2>, 2> assigned{};
    long long detected = 0;
    long long disagreements = 0;

    for (long long i = 0; i < n; ++i) {
        const int a = rng.bit();
        if (rng.bernoulli(eta)) {
            ++detected;
            const int b = rng.bernoulli(es) ? 1 - a : a;
            ++coarse[a][b];
            ++refined[a][b];
            if (a != b) {
                ++disagreements;
            }
        } else {
            const int b = rng.bit();
            ++coarse[a][b];
            ++refined[a][2];
            ++assigned[a][b];
            if (a != b) {
                ++disagreements;
            }
        }
    }

    const double dn = static_cast<double>(n);
    MonteCarloEstimate est{
        Scheme::ddi,
        n,
        seed,
        eta,
        eta,
        es,
        {{"detected", detected}, {"lost", n - detected}},
        static_cast<double>(disagreements) / dn,
        std::nullopt,
        JointTable({"0", "1"}, {"0", "1"},
                   {coarse[0][0] / dn, coarse[0][1] / dn,
                    coarse[1][0] / dn, coarse[1][1] / dn}),
        JointTable({"0", "1"}, {"click0", "click1", "erased"},
                   {refined[0][0] / dn, refined[0][1] / dn, refined[0][2] / dn,
                    refined[1][0] / dn, refined[1][1] / dn, refined[1][2] / dn}),
        assigned,
        {}};
    const double p_det = static_cast<double>(detected) / dn;
    est.std_errors = {
        {"class_freq_detected", detail::se_binomial(p_det, n, 1.0)},
        {"class_freq_lost", detail::se_binomial(1.0 - p_det, n, 1.0)},
        {"e_c", detail::se_binomial(est.e_c_hat, n, 1.0)},
        {"h_cond_coarse", detail::se_cond_entropy(est.joint_coarse_hat, n)},
        {"h_cond_refined", detail::se_cond_entropy(est.joint_refined_hat, n)},
    };
    return est;
}

/// Per-signal simulation of the device-independent event-class model:
/// independent link detections, correlated bits within both-detected events,
/// fixed bit 0 for losses. The Bell estimate is the event-class mixture
/// s_hat = sum_k (count_k / n) * S_k with per-class values
/// {2*sqrt(2)*(1-2*e_single), 0, 0, 2}.
inline MonteCarloEstimate simulate_di(const DiParams& params, long long n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("simulate_di: n must be >= 1");
    }
    detail::SampleStream rng(seed);
    const double ea = params.eta_a.value();
    const double eb = params.eta_b.value();
    const double es = params.e_single.value();

    std::array<std::array<long long, 2>, 2> coarse{};
    std::array<std::array<long long, 3>, 2> refined{};
    std::array<std::array<long long, 2>, 2> assigned{};
    long long n_both = 0, n_only_a = 0, n_only_b = 0, n_neither = 0;
    long long disagreements = 0;

    for (long long i = 0; i < n; ++i) {
        const bool det_a = rng.bernoulli(ea);
        const bool det_b = rng.bernoulli(eb);
        const int a = det_a ? rng.bit() : 0;
        int b_coarse = 0;
        if (det_a && det_b) {
            ++n_both;
            b_coarse = rng.bernoulli(es) ? 1 - a : a;
            ++refined[a][b_coarse];
        } else if (det_a) {
            ++n_only_a;
            ++refined[a][2];
            ++assigned[a][0];
        } else if (det_b) {
            ++n_only_b;
            b_coarse = rng.bit();
            ++refined[a][b_coarse];
        } else {
            ++n_neither;
            ++refined[a][2];
            ++assigned[a][0];
        }
        ++coarse[a][b_coarse];
        if (a != b_coarse) {
            ++disagreements;
        }
    }

    const double dn = static_cast<double>(n);
    const double s_both = 2.0 * std::sqrt(2.0) * (1.0 - 2.0 * es);
    const double s_hat = (n_both / dn) * s_both + (n_neither / dn) * 2.0;

    MonteCarloEstimate est{
        Scheme::di,
        n,
        seed,
        ea,
        eb,
        es,
        {{"both", n_both}, {"neither", n_neither}, {"only_a", n_only_a}, {"only_b", n_only_b}},
        static_cast<double>(disagreements) / dn,
        s_hat,
        JointTable({"0", "1"}, {"0", "1"},
                   {coarse[0][0] / dn, coarse[0][1] / dn,
                    coarse[1][0] / dn, coarse[1][1] / dn}),
        JointTable({"0", "1"}, {"det0", "det1", "lost"},
                   {refined[0][0] / dn, refined[0][1] / dn, refined[0][2] / dn,
                    refined[1][0] / dn, refined[1][1] / dn, refined[1][2] / dn}),
        assigned,
        {}};

    // multinomial propagation for the class-mixture Bell estimate
    const double w_both = n_both / dn;
    const double w_neither = n_neither / dn;
    const double second_moment = w_both * s_both * s_both + w_neither * 4.0;
    const double var_s = std::max(second_moment - s_hat * s_hat, 0.0);
    const double se_s = std::max(std::sqrt(var_s / dn), 2.0 * std::sqrt(2.0) / dn);

    est.std_errors = {
        {"class_freq_both", detail::se_binomial(w_both, n, 1.0)},
        {"class_freq_neither", detail::se_binomial(w_neither, n, 1.0)},
        {"class_freq_only_a", detail::se_binomial(n_only_a / dn, n, 1.0)},
        {"class_freq_only_b", detail::se_binomial(n_only_b / dn, n, 1.0)},
        {"e_c", detail::se_binomial(est.e_c_hat, n, 1.0)},
        {"s", se_s},
        {"h_cond_coarse", detail::se_cond_entropy(est.joint_coarse_hat, n)},
        {"h_cond_refined", detail::se_cond_entropy(est.joint_refined_hat, n)},
    };
    return est;
}

/// One line of the oracle-vs-analytic report. For entropy quantities the
/// plug-in estimator carries an O(cells/n) bias, so the z-score is computed
/// on the bias-adjusted difference max(0, |diff| - allowance); for everything
/// else allowance is 0 and z is the plain standardized difference.
struct ComparisonRow {
    std::string quantity;
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    double allowance = 0.0;
    bool ok = true;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    bool all_ok = true;
};

namespace detail {

inline ComparisonRow make_row(const std::string& quantity, double analytic, double empirical,
                              double se, double allowance = 0.0) {
    const double diff = empirical - analytic;
    double adjusted = std::abs(diff) - allowance;
    if (adjusted < 0.0) {
        adjusted = 0.0;
    }
    const double z = diff == 0.0 ? 0.0 : std::copysign(adjusted / se, diff);
    return {quantity, analytic, empirical, se, z, allowance, std::abs(z) <= 5.0};
}

inline double entropy_allowance(const JointTable& t, long long n) {
    const double cells = static_cast<double>(t.a_size() * t.b_size());
    return cells / (2.0 * static_cast<double>(n) * std::log(2.0));
}

} // namespace detail

/// Validate a DDI estimate against the closed-form model it was drawn from.
/// Throws if the estimate was generated with different parameters.
inline ComparisonReport compare(const MonteCarloEstimate& est, const DdiParams& params) {
    if (est.scheme != Scheme::ddi || est.eta_a != params.eta.value() ||
        est.e_single != params.e_single.value()) {
        throw std::invalid_argument("compare: estimate was generated from different parameters");
    }
    const double eta = params.eta.value();
    const double dn = static_cast<double>(est.n);
    const Bb84Params as_bb84 = params.as_bb84();

    ComparisonReport report;
    auto add = [&](ComparisonRow row) {
        report.all_ok = report.all_ok && row.ok;
        report.rows.push_back(std::move(row));
    };
    add(detail::make_row("class_freq_detected", eta,
                         est.class_counts.at("detected") / dn,
                         est.std_errors.at("class_freq_detected")));
    add(detail::make_row("class_freq_lost", 1.0 - eta,
                         est.class_counts.at("lost") / dn,
                         est.std_errors.at("class_freq_lost")));
    add(detail::make_row("e_c", coarse_error_rate(params.eta, params.e_single).value(),
                         est.e_c_hat, est.std_errors.at("e_c")));
    add(detail::make_row("h_cond_coarse",
                         conditional_entropy(bb84_joint(as_bb84, Mode::coarse)),
                         conditional_entropy(est.joint_coarse_hat),
                         est.std_errors.at("h_cond_coarse"),
                         detail::entropy_allowance(est.joint_coarse_hat, est.n)));
    add(detail::make_row("h_cond_refined",
                         refined_cond_entropy_erasure(params.eta, params.e_single),
                         conditional_entropy(est.joint_refined_hat),
                         est.std_errors.at("h_cond_refined"),
                         detail::entropy_allowance(est.joint_refined_hat, est.n)));
    return report;
}

/// Validate a DI estimate against the event-class model it was drawn from.
inline ComparisonReport compare(const MonteCarloEstimate& est, const DiParams& params) {
    if (est.scheme != Scheme::di || est.eta_a != params.eta_a.value() ||
        est.eta_b != params.eta_b.value() || est.e_single != params.e_single.value()) {
        throw std::invalid_argument("compare: estimate was generated from different parameters");
    }
    const EventClassWeights w = event_class_weights(params);
    const double dn = static_cast<double>(est.n);

    ComparisonReport report;
    auto add = [&](ComparisonRow row) {
        report.all_ok = report.all_ok && row.ok;
        report.rows.push_back(std::move(row));
    };
    add(detail::make_row("class_freq_both", w.both_detected,
                         est.class_counts.at("both") / dn,
                         est.std_errors.at("class_freq_both")));
    add(detail::make_row("class_freq_only_a", w.only_a,
                         est.class_counts.at("only_a") / dn,
                         est.std_errors.at("class_freq_only_a")));
    add(detail::make_row("class_freq_only_b", w.only_b,
                         est.class_counts.at("only_b") / dn,
                         est.std_errors.at("class_freq_only_b")));
    add(detail::make_row("class_freq_neither", w.neither,
                         est.class_counts.at("neither") / dn,
                         est.std_errors.at("class_freq_neither")));
    add(detail::make_row("e_c", di_coarse_error(params).value(), est.e_c_hat,
                         est.std_errors.at("e_c")));
    add(detail::make_row("s", di_bell_parameter(params), est.s_hat.value(),
                         est.std_errors.at("s")));
    add(detail::make_row("h_cond_coarse",
                         conditional_entropy(di_joint(params, Mode::coarse)),
                         conditional_entropy(est.joint_coarse_hat),
                         est.std_errors.at("h_cond_coarse"),
                         detail::entropy_allowance(est.joint_coarse_hat, est.n)));
    add(detail::make_row("h_cond_refined",
                         conditional_entropy(di_joint(params, Mode::refined)),
                         conditional_entropy(est.joint_refined_hat),
                         est.std_errors.at("h_cond_refined"),
                         detail::entropy_allowance(est.joint_refined_hat, est.n)));
    return report;
}

} // namespace qkd
