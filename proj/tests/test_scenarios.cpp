#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qkd/scenarios.hpp"
#include "support.hpp"

using namespace qkd;

namespace {

// entry-by-entry comparison against the test-side enumeration
void check_di_tables(double ea, double eb, double es) {
    const DiParams p(ea, eb, es);
    const auto ref = testref::enumerate_di(ea, eb, es);
    const JointTable refined = di_joint(p, Mode::refined);
    const JointTable coarse = di_joint(p, Mode::coarse);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
            REQUIRE(refined.at(a, b) ==
                    Catch::Approx(static_cast<double>(ref.refined[a][b])).margin(1e-15));
        }
        for (int b = 0; b < 2; ++b) {
            REQUIRE(coarse.at(a, b) ==
                    Catch::Approx(static_cast<double>(ref.coarse[a][b])).margin(1e-15));
        }
    }
}

} // namespace

TEST_CASE("coarse error rate") {
    for (double e : {0.0, 0.11, 0.37, 0.5}) {
        CHECK(coarse_error_rate(Probability(1.0), Probability(e)).value() == e);
    }
    CHECK(coarse_error_rate(Probability(0.0), Probability(0.9)).value() == 0.5);
    CHECK(coarse_error_rate(Probability(0.8), Probability(0.05)).value() ==
          Catch::Approx(0.14).margin(1e-15));
}

TEST_CASE("refined conditional entropy is an erasure channel") {
    for (double e : {0.0, 0.05, 0.3}) {
        CHECK(refined_cond_entropy_erasure(Probability(1.0), Probability(e)) ==
              binary_entropy(Probability(e)));
    }
    CHECK(refined_cond_entropy_erasure(Probability(0.0), Probability(0.23)) == 1.0);
    CHECK(refined_cond_entropy_erasure(Probability(0.659), Probability(0.0)) ==
          Catch::Approx(0.341).margin(1e-15));
}

TEST_CASE("bb84 joint tables: canonical points") {
    const JointTable perfect = bb84_joint(Bb84Params(1.0, 0.0), Mode::coarse);
    CHECK(perfect.at(0, 0) == 0.5);
    CHECK(perfect.at(0, 1) == 0.0);
    CHECK(perfect.at(1, 0) == 0.0);
    CHECK(perfect.at(1, 1) == 0.5);

    const JointTable random = bb84_joint(Bb84Params(0.0, 0.3), Mode::coarse);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            REQUIRE(random.at(a, b) == 0.25);
        }
    }
}

TEST_CASE("bb84 joint tables agree with the closed forms") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Bb84Params p(u(rng), u(rng));
        const JointTable coarse = bb84_joint(p, Mode::coarse);
        const JointTable refined = bb84_joint(p, Mode::refined);

        const double ec = coarse_error_rate(p.p_single, p.e_single).value();
        const double disagree = coarse.at(0, 1) + coarse.at(1, 0);
        REQUIRE(std::abs(disagree - ec) <= 1e-12);
        REQUIRE(std::abs(conditional_entropy(coarse) - binary_entropy(Probability(ec))) <= 1e-12);
        REQUIRE(std::abs(conditional_entropy(refined) -
                         refined_cond_entropy_erasure(p.p_single, p.e_single)) <= 1e-12);

        const auto ma = marginal_a(coarse);
        REQUIRE(std::abs(ma[0] - 0.5) <= 1e-12);
        REQUIRE(std::abs(marginal_a(refined)[1] - 0.5) <= 1e-12);
    }
}

TEST_CASE("refined bb84 table coarsens onto the coarse table") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Bb84Params p(u(rng), u(rng));
        const JointTable coarse = bb84_joint(p, Mode::coarse);
        const JointTable refined = bb84_joint(p, Mode::refined);
        // erased positions are reassigned uniformly
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double merged = refined.at(a, b) + 0.5 * refined.at(a, 2);
                REQUIRE(std::abs(merged - coarse.at(a, b)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("bell parameter endpoints") {
    CHECK(di_bell_parameter(DiParams(1.0, 1.0, 0.0)) == testref::kTwoSqrtTwo);
    CHECK(di_bell_parameter(DiParams(0.0, 0.0, 0.2)) == 2.0);
    CHECK(di_bell_parameter(DiParams(1.0, 0.0, 0.2)) == 0.0);
}

TEST_CASE("bell parameter is the event-class mixture") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const DiParams p(u(rng), u(rng), 0.5 * u(rng));
        const EventClassWeights w = event_class_weights(p);
        const double mixture =
            w.both_detected * 2.0 * std::sqrt(2.0) * (1.0 - 2.0 * p.e_single.value()) +
            w.only_a * 0.0 + w.only_b * 0.0 + w.neither * 2.0;
        REQUIRE(std::abs(di_bell_parameter(p) - mixture) <= 1e-12);
        REQUIRE(di_bell_parameter(p) >= 0.0);
        REQUIRE(di_bell_parameter(p) <= testref::kTwoSqrtTwo);
    }
}

TEST_CASE("bell parameter monotone in each transmittance for small errors") {
    // dS/d(eta_a) = 2*sqrt(2)*(1-2*es)*eta_b - 2*(1-eta_b), which is
    // non-negative for every eta_b >= 1/2 exactly when es <= (1-1/sqrt(2))/2.
    const double es_limit = (1.0 - 1.0 / std::sqrt(2.0)) / 2.0;
    for (double es : {0.0, 0.05, 0.14}) {
        REQUIRE(es < es_limit);
        for (double other : {0.5, 0.6, 0.8, 1.0}) {
            double prev = di_bell_parameter(DiParams(0.0, other, es));
            for (int i = 1; i <= 50; ++i) {
                const double eta = i / 50.0;
                const double cur = di_bell_parameter(DiParams(eta, other, es));
                REQUIRE(cur >= prev - 1e-12);
                prev = cur;
            }
            // symmetric argument: swap the roles of the two links
            REQUIRE(di_bell_parameter(DiParams(other, 0.9, es)) <=
                    di_bell_parameter(DiParams(other, 1.0, es)) + 1e-12);
        }
        // symmetric line, detection regime
        double prev = di_bell_parameter(DiParams(0.5, 0.5, es));
        for (int i = 1; i <= 50; ++i) {
            const double eta = 0.5 + 0.5 * i / 50.0;
            const double cur = di_bell_parameter(DiParams(eta, eta, es));
            REQUIRE(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("di coarse error") {
    CHECK(di_coarse_error(DiParams(1.0, 1.0, 0.13)).value() == 0.13);
    CHECK(di_coarse_error(DiParams(0.0, 0.0, 0.4)).value() == 0.0);
    CHECK(di_coarse_error(DiParams(0.9, 0.9, 0.0)).value() == Catch::Approx(0.09).margin(1e-15));
}

TEST_CASE("di alice entropy") {
    CHECK(di_alice_entropy(Probability(1.0)) == 1.0);
    CHECK(di_alice_entropy(Probability(0.0)) == 0.0);
    CHECK(di_alice_entropy(Probability(0.924)) == Catch::Approx(testref::kH_0462).margin(1e-15));
    for (double eta : {0.1, 0.5, 0.83}) {
        CHECK(di_alice_entropy(Probability(eta)) == binary_entropy(Probability(eta / 2.0)));
    }
}

TEST_CASE("event class weights") {
    const EventClassWeights unit = event_class_weights(DiParams(1.0, 1.0, 0.0));
    CHECK(unit.both_detected == 1.0);
    CHECK(unit.only_a + unit.only_b + unit.neither == 0.0);
    const EventClassWeights dark = event_class_weights(DiParams(0.0, 0.0, 0.0));
    CHECK(dark.neither == 1.0);
    const EventClassWeights w = event_class_weights(DiParams(0.9, 0.8, 0.0));
    CHECK(w.both_detected == Catch::Approx(0.72).margin(1e-15));
    CHECK(w.only_a == Catch::Approx(0.18).margin(1e-15));
    CHECK(w.only_b == Catch::Approx(0.08).margin(1e-15));
    CHECK(w.neither == Catch::Approx(0.02).margin(1e-15));

    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const EventClassWeights ww = event_class_weights(DiParams(u(rng), u(rng), 0.0));
        REQUIRE(std::abs(ww.both_detected + ww.only_a + ww.only_b + ww.neither - 1.0) <= 1e-12);
    }
}

TEST_CASE("di joint tables: canonical points") {
    const JointTable perfect = di_joint(DiParams(1.0, 1.0, 0.0), Mode::coarse);
    CHECK(perfect.at(0, 0) == 0.5);
    CHECK(perfect.at(1, 1) == 0.5);
    CHECK(perfect.at(0, 1) == 0.0);

    const JointTable dark = di_joint(DiParams(0.0, 0.0, 0.3), Mode::coarse);
    CHECK(dark.at(0, 0) == 1.0);
}

TEST_CASE("di joint tables match the event-class enumeration") {
    check_di_tables(0.909, 0.909, 0.0);
    check_di_tables(0.9, 0.8, 0.1);
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        check_di_tables(u(rng), u(rng), 0.5 * u(rng));
    }
}

TEST_CASE("di refined conditional entropy at the loss boundary point") {
    const JointTable refined = di_joint(DiParams(0.909, 0.909, 0.0), Mode::refined);
    CHECK(conditional_entropy(refined) ==
          Catch::Approx(testref::kDiRefinedH_0909).margin(1e-12));
}

TEST_CASE("di joint invariants over random parameters") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const DiParams p(u(rng), u(rng), 0.5 * u(rng));
        const JointTable coarse = di_joint(p, Mode::coarse);
        const JointTable refined = di_joint(p, Mode::refined);

        const double disagree = coarse.at(0, 1) + coarse.at(1, 0);
        REQUIRE(std::abs(disagree - di_coarse_error(p).value()) <= 1e-12);

        const auto ma = marginal_a(coarse);
        const double ea = p.eta_a.value();
        REQUIRE(std::abs(ma[0] - (0.5 * ea + (1.0 - ea))) <= 1e-12);
        REQUIRE(std::abs(ma[1] - 0.5 * ea) <= 1e-12);
        REQUIRE(std::abs(shannon_entropy(ma) - di_alice_entropy(p.eta_a)) <= 1e-12);

        // merging the lost column onto the fixed bit reproduces the coarse table
        const JointTable merged = merge_b(refined, 0, 2);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                REQUIRE(std::abs(merged.at(a, b) - coarse.at(a, b)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("refinement never hurts: table-level inequality on a dense grid") {
    for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 20; ++j) {
            const double eta = i / 40.0;
            const double es = j / 40.0; // up to 1/2
            const Bb84Params bp(eta, es);
            REQUIRE(conditional_entropy(bb84_joint(bp, Mode::coarse)) -
                        conditional_entropy(bb84_joint(bp, Mode::refined)) >= -1e-12);
            const DiParams dp(eta, eta, es);
            REQUIRE(conditional_entropy(di_joint(dp, Mode::coarse)) -
                        conditional_entropy(di_joint(dp, Mode::refined)) >= -1e-12);
        }
    }
}

TEST_CASE("entropies are invariant under relabeling the bit values") {
    // swap 0<->1 on both sides of the coarse table and on Bob's detected bits
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const DiParams p(u(rng), u(rng), 0.5 * u(rng));
        const JointTable c = di_joint(p, Mode::coarse);
        const JointTable swapped({"1", "0"}, {"1", "0"},
                                 {c.at(1, 1), c.at(1, 0), c.at(0, 1), c.at(0, 0)});
        REQUIRE(std::abs(conditional_entropy(swapped) - conditional_entropy(c)) <= 1e-15);
        const JointTable r = di_joint(p, Mode::refined);
        const JointTable rswapped({"1", "0"}, {"det1", "det0", "lost"},
                                  {r.at(1, 1), r.at(1, 0), r.at(1, 2),
                                   r.at(0, 1), r.at(0, 0), r.at(0, 2)});
        REQUIRE(std::abs(conditional_entropy(rswapped) - conditional_entropy(r)) <= 1e-15);
    }
}

TEST_CASE("di params reject error rates beyond one half") {
    CHECK_THROWS_AS(DiParams(0.5, 0.5, 0.51), std::domain_error);
    CHECK_NOTHROW(DiParams(0.5, 0.5, 0.5));
}
