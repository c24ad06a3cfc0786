#pragma once

#include <cstdint>
#include <vector>

#include "qbc/codes.hpp"
#include "qbc/protocol.hpp"
#include "qbc/quantum.hpp"
#include "qbc/rng.hpp"

namespace qbc {

struct photon_flags {
    bool cheated = false;
    bool detected = false;
    bool guessed_correctly = false;
};

// Result of one adversarial protocol run. `detected` mirrors the embedded
// transcript's verdict; `cheat_succeeded` is the per-strategy success notion.
struct cheat_outcome {
    bool detected = false;
    bool cheat_succeeded = false;
    std::vector<photon_flags> per_photon;
    int free_positions = 0;  // multiphoton strategy only
    int dual_pulses = 0;     // multiphoton strategy only
    transcript record;
};

// Alice measures `flips` randomly chosen positions in Rotated(theta) and
// announces the set named by the rotated outcome (r0 -> {Zero,Plus},
// r1 -> {One,Minus}); at opening she claims, on those positions, the state of
// her codeword's basis that matches the announcement. A cheated photon is
// detected exactly when her set claim is wrong about s_i and Bob prepared in
// the basis she announced. Remaining positions are honest.
cheat_outcome theta_alice_trial(double theta, int flips, const linear_code& code,
                                rng_stream& rng);

// Alice defers her bit: she measures along the sly intermediate string,
// announces honestly, then opens the nearest codeword of the target half,
// flipping her basis claim on the differing positions.
cheat_outcome sly_alice_trial(const linear_code& code, int target_bit, rng_stream& rng);

// Passive inference rule for a curious Bob: guess the basis under which the
// state he sent belongs to the announced set. Returns the basis bit
// (0 = Z, 1 = X).
int curious_bob_infer(bb84_label sent, int announced);

// Honest protocol run in which Bob applies curious_bob_infer to every
// announcement; guessed_correctly marks positions where the inferred basis
// equals the basis Alice actually used (equivalently, where Bob learned c_i).
cheat_outcome curious_bob_trial(const linear_code& code, rng_stream& rng);

enum class bob_guess_rule : std::uint8_t { helstrom, random_guess };

// Bob sends halves of Bell pairs instead of single photons, keeps the other
// halves, and after the announcement discriminates the two residuals
// consistent with o'_i (|0> vs |+>, or |1> vs |->) to guess c_i.
// cheat_succeeded means the full codeword was recovered.
cheat_outcome entangling_bob_trial(const linear_code& code, rng_stream& rng,
                                   bob_guess_rule rule = bob_guess_rule::helstrom);

// Multi-photon attack: on each dual pulse Alice measures one photon in Z and
// one in X; when both outcomes fall in the same announced set the position is
// free (openable in either basis, undetectably). She needs `target_flips`
// flexible positions, so cheat_succeeded = (free positions >= target_flips).
// With target_flips > 0 the embedded transcript realizes the deferred-bit
// attack: commit along the sly intermediate string, open the nearest codeword
// of a late-chosen bit, with non-free flipped positions risking detection
// under the same rule as theta_alice_trial.
cheat_outcome multiphoton_alice_trial(const linear_code& code, const channel_params& params,
                                      int target_flips, rng_stream& rng);

struct practicality_result {
    bool pass = false;
    double ratio = 0.0;  // lhs / rhs
    double lhs = 0.0;    // eta_m/2 + eta_l + eta_e
    double rhs = 0.0;    // d / (2n)
    double margin = 0.0;
};

// Checks the operating-point inequality eta_m/2 + eta_l + eta_e << d/(2n);
// Pass iff lhs <= margin * rhs.
practicality_result practicality_check(const linear_code& code, const channel_params& params,
                                       double margin = 0.1);

}  // namespace qbc
