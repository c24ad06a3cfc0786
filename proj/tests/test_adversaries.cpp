#include "doctest.h"

#include <cmath>

#include "qbc/adversaries.hpp"

using namespace qbc;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct photon_tally {
    std::int64_t cheated = 0, detected = 0, guessed = 0;
    std::int64_t trials = 0, trial_detections = 0;

    void add(const cheat_outcome& out) {
        ++trials;
        trial_detections += out.detected;
        for (const auto& f : out.per_photon) {
            if (f.cheated) {
                ++cheated;
                detected += f.detected;
                guessed += f.guessed_correctly;
            }
        }
        // detected must mirror the embedded verdict
        REQUIRE(out.detected == !out.record.result.accepted);
    }

    double detection_rate() const { return detected / double(cheated); }
    double guess_rate() const { return guessed / double(cheated); }
    double trial_detection_rate() const { return trial_detections / double(trials); }
};

}  // namespace

TEST_CASE("theta alice at pi/8 with one cheated photon") {
    const linear_code code = linear_code::hamming74();
    photon_tally tally;
    for (int i = 0; i < 100000; ++i) {
        rng_stream rng = rng_stream::derive(101, i);
        tally.add(theta_alice_trial(kPi / 8, 1, code, rng));
    }
    CHECK(tally.cheated == 100000);
    const double expected = (2.0 - std::sqrt(2.0)) / 8.0;  // ~0.0732
    CHECK(std::abs(tally.detection_rate() - expected) < 0.005);
    // Set-distinguishing success sits at its maximum (2+sqrt(2))/4.
    CHECK(std::abs(tally.guess_rate() - (2.0 + std::sqrt(2.0)) / 4.0) < 0.01);
}

TEST_CASE("theta alice with zero flips is honest") {
    const linear_code code = linear_code::hamming74();
    for (int i = 0; i < 2000; ++i) {
        rng_stream rng = rng_stream::derive(103, i);
        const cheat_outcome out = theta_alice_trial(kPi / 8, 0, code, rng);
        CHECK(out.record.result.accepted);
        CHECK_FALSE(out.detected);
        CHECK(out.cheat_succeeded);
    }
}

TEST_CASE("theta alice aggregate detection follows 1-((6+sqrt2)/8)^m") {
    const linear_code code = linear_code::repetition(12);
    photon_tally tally;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        rng_stream rng = rng_stream::derive(105, i);
        tally.add(theta_alice_trial(kPi / 8, 10, code, rng));
    }
    const double expected = 1.0 - std::pow((6.0 + std::sqrt(2.0)) / 8.0, 10);  // ~0.5325
    const double se = std::sqrt(expected * (1 - expected) / trials);
    CHECK(std::abs(tally.trial_detection_rate() - expected) <= 4 * se);
    CHECK(tally.cheated == std::int64_t{10} * trials);
}

TEST_CASE("theta alice rejects more flips than photons") {
    const linear_code code = linear_code::hamming74();
    rng_stream rng(107);
    CHECK_THROWS_AS(theta_alice_trial(kPi / 8, 8, code, rng), std::invalid_argument);
    CHECK_THROWS_AS(theta_alice_trial(kPi / 8, -1, code, rng), std::invalid_argument);
}

TEST_CASE("theta sweep matches (1 - P(theta))/2 pointwise") {
    const linear_code code = linear_code::hamming74();
    const int trials = 3000;  // 21000 cheated photons per point
    double minimum_rate = 1.0;
    double rate_at_pi8 = 1.0;
    for (int g = 0; g < 8; ++g) {
        const double theta = kPi * g / 8.0;
        photon_tally tally;
        for (int i = 0; i < trials; ++i) {
            rng_stream rng = rng_stream::derive(109 + g, i);
            tally.add(theta_alice_trial(theta, code.length(), code, rng));
        }
        const double expected = (1.0 - distinguish_probability(theta)) / 2.0;
        const double se = std::sqrt(std::max(expected * (1 - expected), 1e-9) /
                                    double(tally.cheated));
        CHECK(std::abs(tally.detection_rate() - expected) <= 4 * se);
        if (tally.detection_rate() < minimum_rate) minimum_rate = tally.detection_rate();
        if (g == 1) rate_at_pi8 = tally.detection_rate();
    }
    CHECK(rate_at_pi8 == minimum_rate);  // grid point pi/8 is the sweet spot
}

TEST_CASE("sly alice on repetition(3): one flip toward 0, two toward 1") {
    const linear_code code = linear_code::repetition(3);

    // The partition is {000} vs {111} for every accepted r, so the flip
    // counts are the sly distances 1 and 2.
    photon_tally toward0, toward1;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        rng_stream rng0 = rng_stream::derive(111, i);
        const cheat_outcome o0 = sly_alice_trial(code, 0, rng0);
        int flips0 = 0;
        for (const auto& f : o0.per_photon) flips0 += f.cheated;
        CHECK(flips0 == 1);
        toward0.add(o0);

        rng_stream rng1 = rng_stream::derive(112, i);
        const cheat_outcome o1 = sly_alice_trial(code, 1, rng1);
        int flips1 = 0;
        for (const auto& f : o1.per_photon) flips1 += f.cheated;
        CHECK(flips1 == 2);
        toward1.add(o1);
    }

    // Per-flip detection is 1/4: conjugate-basis announcement is wrong half
    // the time, and Bob's basis matches the opened one half the time.
    CHECK(std::abs(toward0.detection_rate() - 0.25) < 0.01);
    CHECK(std::abs(toward1.detection_rate() - 0.25) < 0.01);

    // Independence across flips: trial detection tracks 1 - (1-q)^f for the
    // measured per-flip rate q.
    const double q = toward1.detection_rate();
    const double expected = 1.0 - (1.0 - q) * (1.0 - q);
    const double se = std::sqrt(expected * (1 - expected) / trials);
    CHECK(std::abs(toward1.trial_detection_rate() - expected) <= 4 * se);
    CHECK(std::abs(toward0.trial_detection_rate() - q) <= 4 * se);
}

TEST_CASE("sly alice with a zero-distance target is undetectable") {
    // Identity code on two bits: the whole space is the code, so the sly
    // string itself is a codeword of one half.
    const linear_code code = linear_code::from_generator(
        {bits_from_string("10"), bits_from_string("01")});
    for (int i = 0; i < 500; ++i) {
        rng_stream rng = rng_stream::derive(113, i);
        const cheat_outcome out = sly_alice_trial(code, 0, rng);
        int flips = 0;
        for (const auto& f : out.per_photon) flips += f.cheated;
        if (flips == 0) {
            CHECK_FALSE(out.detected);
            CHECK(out.record.result.accepted);
        }
    }
}

TEST_CASE("curious bob inference table") {
    CHECK(curious_bob_infer(bb84_label::zero, 0) == 0);   // Z
    CHECK(curious_bob_infer(bb84_label::zero, 1) == 1);   // X
    CHECK(curious_bob_infer(bb84_label::one, 1) == 0);    // Z
    CHECK(curious_bob_infer(bb84_label::one, 0) == 1);    // X
    CHECK(curious_bob_infer(bb84_label::plus, 0) == 1);   // X
    CHECK(curious_bob_infer(bb84_label::plus, 1) == 0);   // Z
    CHECK(curious_bob_infer(bb84_label::minus, 1) == 1);  // X
    CHECK(curious_bob_infer(bb84_label::minus, 0) == 0);  // Z
    CHECK_THROWS_AS(curious_bob_infer(bb84_label::zero, 2), std::invalid_argument);
}

TEST_CASE("curious bob guesses the basis with frequency 3/4") {
    const linear_code code = linear_code::hamming74();
    photon_tally tally;
    for (int i = 0; i < 15000; ++i) {  // 105000 photons
        rng_stream rng = rng_stream::derive(115, i);
        const cheat_outcome out = curious_bob_trial(code, rng);
        CHECK(out.record.result.accepted);  // passive attack, run stays honest
        tally.add(out);
    }
    CHECK(std::abs(tally.guess_rate() - 0.75) < 0.01);
}

TEST_CASE("entangling bob attains the helstrom rate per photon") {
    const linear_code code = linear_code::hamming74();
    const double bound = helstrom_probability(density_of(make_bb84(bb84_label::zero)),
                                              density_of(make_bb84(bb84_label::plus)));
    photon_tally tally;
    std::int64_t full_recoveries = 0;
    const int trials = 15000;  // 105000 photons
    for (int i = 0; i < trials; ++i) {
        rng_stream rng = rng_stream::derive(117, i);
        const cheat_outcome out = entangling_bob_trial(code, rng);
        CHECK(out.record.result.accepted);
        tally.add(out);
        full_recoveries += out.cheat_succeeded;
    }
    CHECK(std::abs(tally.guess_rate() - 0.8535533905932737) < 0.01);

    // Sealed: the empirical rate never exceeds the helstrom bound materially.
    const double se = std::sqrt(bound * (1 - bound) / double(tally.cheated));
    CHECK(tally.guess_rate() <= bound + 4 * se);

    // Full-codeword recovery is the per-photon rate to the n-th power.
    const double recovery_cf = std::pow(bound, code.length());
    const double rec_se = std::sqrt(recovery_cf * (1 - recovery_cf) / trials);
    CHECK(full_recoveries / double(trials) <= recovery_cf + 4 * rec_se);
}

TEST_CASE("entangling bob with random guessing drops to 1/2") {
    const linear_code code = linear_code::hamming74();
    photon_tally tally;
    for (int i = 0; i < 15000; ++i) {
        rng_stream rng = rng_stream::derive(119, i);
        tally.add(entangling_bob_trial(code, rng, bob_guess_rule::random_guess));
    }
    CHECK(std::abs(tally.guess_rate() - 0.5) < 0.01);
}

TEST_CASE("multiphoton: dual pulses are free with probability 1/2") {
    const linear_code code = linear_code::hamming74();
    std::int64_t duals = 0, free = 0;
    for (int i = 0; i < 15000; ++i) {  // ~105000 dual pulses at eta_m = 1
        rng_stream rng = rng_stream::derive(121, i);
        const cheat_outcome out =
            multiphoton_alice_trial(code, channel_params{1.0, 0.0, 0.0}, 2, rng);
        duals += out.dual_pulses;
        free += out.free_positions;
    }
    CHECK(duals == 15000 * 7);
    CHECK(std::abs(free / double(duals) - 0.5) < 0.01);
}

TEST_CASE("multiphoton: no dual pulses means no free positions") {
    const linear_code code = linear_code::hamming74();
    for (int i = 0; i < 300; ++i) {
        rng_stream rng = rng_stream::derive(123, i);
        const cheat_outcome out =
            multiphoton_alice_trial(code, channel_params{0.0, 0.0, 0.0}, 2, rng);
        CHECK(out.dual_pulses == 0);
        CHECK(out.free_positions == 0);
        CHECK_FALSE(out.cheat_succeeded);
    }
}

TEST_CASE("multiphoton with zeroed cheat parameters reproduces honest runs") {
    const linear_code code = linear_code::hamming74();
    for (int i = 0; i < 2000; ++i) {
        rng_stream rng = rng_stream::derive(125, i);
        const cheat_outcome out =
            multiphoton_alice_trial(code, channel_params{0.0, 0.0, 0.0}, 0, rng);
        CHECK(out.record.result.accepted);
        CHECK_FALSE(out.detected);
        CHECK(out.cheat_succeeded);  // nothing to cheat
        for (const auto& f : out.per_photon) CHECK_FALSE(f.cheated);
    }
}

TEST_CASE("multiphoton success follows the binomial free-count law") {
    // Below the eta_m < 2m/n threshold success stays under 1/2 and falls
    // with n. Free positions ~ Binomial(n, eta_m / 2).
    const double eta_m = 0.5;
    double previous = 1.0;
    for (int n : {4, 8, 12}) {
        const linear_code code = linear_code::repetition(n);
        const int m = n / 2;
        const int trials = 20000;
        std::int64_t wins = 0;
        for (int i = 0; i < trials; ++i) {
            rng_stream rng = rng_stream::derive(127 + n, i);
            wins += multiphoton_alice_trial(code, channel_params{eta_m, 0.0, 0.0}, m, rng)
                        .cheat_succeeded;
        }
        const double rate = wins / double(trials);
        double cf = 0.0;  // P(Binomial(n, 1/4) >= n/2)
        double coeff = 1.0;
        for (int j = 0; j <= n; ++j) {
            if (j >= m) cf += coeff * std::pow(0.25, j) * std::pow(0.75, n - j);
            coeff = coeff * (n - j) / (j + 1);
        }
        const double se = std::sqrt(cf * (1 - cf) / trials);
        CHECK(std::abs(rate - cf) <= 4 * se);
        CHECK(rate < 0.5);
        CHECK(rate < previous);
        previous = rate;
    }
}

TEST_CASE("multiphoton detections mirror the embedded verdict") {
    const linear_code code = linear_code::hamming74();
    int detected_trials = 0;
    for (int i = 0; i < 4000; ++i) {
        rng_stream rng = rng_stream::derive(131, i);
        const cheat_outcome out =
            multiphoton_alice_trial(code, channel_params{0.3, 0.1, 0.0}, 2, rng);
        bool any = false;
        for (const auto& f : out.per_photon) any = any || f.detected;
        CHECK(any == out.detected);
        CHECK(out.detected == !out.record.result.accepted);
        detected_trials += out.detected;
    }
    CHECK(detected_trials > 0);  // the deferred-bit attack does get caught
}

TEST_CASE("practicality check reproduces the hand-computed cases") {
    const linear_code code = linear_code::hamming74();

    const practicality_result clean = practicality_check(code, channel_params{});
    CHECK(clean.pass);
    CHECK(clean.ratio == 0.0);

    const practicality_result ok =
        practicality_check(code, channel_params{0.0, 0.02, 0.0});
    CHECK(ok.rhs == doctest::Approx(3.0 / 14.0).epsilon(1e-12));
    CHECK(ok.ratio == doctest::Approx(0.02 * 14.0 / 3.0).epsilon(1e-9));  // ~0.0933
    CHECK(ok.pass);

    const practicality_result edge =
        practicality_check(code, channel_params{0.0, 3.0 / 14.0, 0.0});
    CHECK(edge.ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(edge.pass);
}
