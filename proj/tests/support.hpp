// Shared test helpers: reference implementations kept independent of the
// library code paths they check, frozen high-precision expected values, and
// small utilities (random tables, CLI runner).
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace testref {

// ---------------------------------------------------------------------------
// Reference implementations (extended precision, written from the definitions)

inline long double h2_ref(long double x) {
    if (x <= 0.0L || x >= 1.0L) {
        return 0.0L;
    }
    return (-x * std::log(x) - (1.0L - x) * std::log(1.0L - x)) / std::log(2.0L);
}

// H(A|B) straight from the definition, on a dense matrix.
inline long double cond_entropy_ref(const std::vector<std::vector<long double>>& table) {
    long double h = 0.0L;
    const std::size_t cols = table[0].size();
    for (std::size_t b = 0; b < cols; ++b) {
        long double pb = 0.0L;
        for (const auto& row : table) {
            pb += row[b];
        }
        if (pb <= 0.0L) {
            continue;
        }
        for (const auto& row : table) {
            const long double p = row[b];
            if (p > 0.0L) {
                h += -p * std::log(p / pb) / std::log(2.0L);
            }
        }
    }
    return h;
}

// Two-link event-class enumeration: accumulates the joint distribution of
// Alice's coarse bit and Bob's record class by class, with fixed bit 0 for
// losses. Independent of the library's table builder.
struct DiEnumeration {
    std::vector<std::vector<long double>> refined; // 2 x {det0, det1, lost}
    std::vector<std::vector<long double>> coarse;  // 2 x {0, 1}
};

inline DiEnumeration enumerate_di(long double eta_a, long double eta_b, long double e_s) {
    DiEnumeration out;
    out.refined.assign(2, std::vector<long double>(3, 0.0L));
    out.coarse.assign(2, std::vector<long double>(2, 0.0L));
    const long double classes[4] = {
        eta_a * eta_b,                 // both detected
        eta_a * (1.0L - eta_b),        // Alice only
        (1.0L - eta_a) * eta_b,        // Bob only
        (1.0L - eta_a) * (1.0L - eta_b) // neither
    };
    for (int k = 0; k < 4; ++k) {
        const long double w = classes[k];
        for (int a = 0; a < 2; ++a) {
            for (int br = 0; br < 3; ++br) { // Bob refined: det0, det1, lost
                long double p = 0.0L;
                switch (k) {
                    case 0: // both: Alice uniform, Bob = a flipped w.p. e_s
                        if (br < 2) {
                            p = 0.5L * (br == a ? 1.0L - e_s : e_s);
                        }
                        break;
                    case 1: // Alice only: Alice uniform, Bob lost
                        p = (br == 2) ? 0.5L : 0.0L;
                        break;
                    case 2: // Bob only: Alice fixed 0, Bob uniform detected bit
                        p = (a == 0 && br < 2) ? 0.5L : 0.0L;
                        break;
                    case 3: // neither: both fixed
                        p = (a == 0 && br == 2) ? 1.0L : 0.0L;
                        break;
                }
                out.refined[a][br] += w * p;
                const int bc = (br == 2) ? 0 : br; // lost carries the fixed bit 0
                out.coarse[a][bc] += w * p;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frozen expected values (high-precision evaluation of the definitions above)

inline constexpr double kH_011 = 0.499915958164528;        // h(0.11)
inline constexpr double kH_005 = 0.28639695711595613;      // h(0.05)
inline constexpr double kH_0059 = 0.32346243587218532;     // h(0.059)
inline constexpr double kH_01 = 0.46899559358928122;       // h(0.1)
inline constexpr double kH_045 = 0.99277445398780829;      // h(0.45)
inline constexpr double kH_0462 = 0.99582947647240467;     // h(0.462)
inline constexpr double kH_009 = 0.43646981706410298;      // h(0.09)
inline constexpr double kH_01705 = 0.6588472899555771;     // h(0.1705)

inline constexpr double kIpa_24266 = 0.6257571980848361;   // ipa at S = 2.4266
inline constexpr double kDiRefinedH_0909 = 0.2903442645008518; // H(A|B_r), eta 0.909, es 0
inline constexpr double kDiCoarseHTable_09 = 0.43575243569917893; // table H(A|B_c), eta 0.9
inline constexpr double kDiGap_09 = 0.00071738136492404615; // h[e_c] - table entropy, eta 0.9

inline constexpr double kEsCap = 0.11002786443835955;       // h(e) = 1/2
inline constexpr double kDdiCoarseThr = 0.7799442711232809; // 1 - 2 h[(1-eta)/2] = 0
inline constexpr double kDdiRefinedThr = 0.6589286782993979; // eta - h[(1-eta)/2] = 0
inline constexpr double kDiCoarseThr = 0.92363778872999964;
inline constexpr double kDiRefinedThr = 0.90863211401701601;

inline const double kTwoSqrtTwo = 2.0 * std::sqrt(2.0);

// ---------------------------------------------------------------------------
// Random joint tables for property tests

struct RandomTable {
    std::vector<std::string> la, lb;
    std::vector<double> probs; // row-major
};

inline RandomTable random_table(std::mt19937_64& rng, int max_dim = 4) {
    std::uniform_int_distribution<int> dim(2, max_dim);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int na = dim(rng);
    const int nb = dim(rng);
    RandomTable t;
    for (int i = 0; i < na; ++i) {
        t.la.push_back("a" + std::to_string(i));
    }
    for (int j = 0; j < nb; ++j) {
        t.lb.push_back("b" + std::to_string(j));
    }
    t.probs.resize(static_cast<std::size_t>(na) * nb);
    double sum = 0.0;
    for (auto& p : t.probs) {
        p = u(rng);
        sum += p;
    }
    for (auto& p : t.probs) {
        p /= sum;
    }
    return t;
}

// ---------------------------------------------------------------------------
// CLI runner

struct CliResult {
    int exit_code = -1;
    std::string out;
};

inline CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + QKDRATE_CLI_PATH + "' " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, got);
    }
    const int status = pclose(pipe);
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : s) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        lines.push_back(cur);
    }
    return lines;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace testref
