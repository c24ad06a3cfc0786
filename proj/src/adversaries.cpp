#include "qbc/adversaries.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qbc {

namespace {

// m distinct positions out of n, as a mask; partial Fisher-Yates.
std::vector<std::uint8_t> pick_positions(int n, int m, rng_stream& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(n - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::uint8_t> mask(n, 0);
    for (int i = 0; i < m; ++i) mask[idx[i]] = 1;
    return mask;
}

const bit_string& nearest_in(const std::vector<bit_string>& side, const bit_string& w) {
    const bit_string* best = &side.front();
    int best_d = hamming_distance(w, *best);
    for (const auto& c : side) {
        const int d = hamming_distance(w, c);
        if (d < best_d) {
            best_d = d;
            best = &c;
        }
    }
    return *best;
}

transcript base_transcript(const linear_code& code, const partition& p,
                           const std::vector<bb84_label>& sent) {
    transcript t;
    t.code = code.name();
    t.r = p.r;
    t.sent = sent;
    return t;
}

}  // namespace

cheat_outcome theta_alice_trial(double theta, int flips, const linear_code& code,
                                rng_stream& rng) {
    const int n = code.length();
    if (flips < 0 || flips > n) {
        throw std::invalid_argument("theta_alice_trial: flips must lie in [0, n]");
    }
    const partition p = make_partition(code, sample_r(code, rng));
    const auto sent = bob_prepare(n, rng);
    const int b = rng.bit();
    const auto& half = p.side(b);

    cheat_outcome out;
    out.record = base_transcript(code, p, sent);
    out.record.b = b;
    out.record.c = half[rng.uniform_int(half.size())];
    out.record.o.assign(n, bb84_label::zero);
    out.record.o_prime.assign(n, 0);
    out.per_photon.assign(n, {});

    const auto cheat_mask = pick_positions(n, flips, rng);
    const basis probe = rotated_basis(theta);
    for (int i = 0; i < n; ++i) {
        const int ci = out.record.c[i];
        pure_state photon = make_bb84(sent[i]);
        if (cheat_mask[i]) {
            // Outcome r0 claims the set {Zero,Plus}, r1 claims {One,Minus};
            // the opened state is the one of basis c_i matching that claim.
            const int set_claim = measure(photon, probe, rng).outcome;
            out.record.o_prime[i] = static_cast<std::uint8_t>(set_claim);
            out.record.o[i] = label_for(ci, set_claim);
            auto& f = out.per_photon[i];
            f.cheated = true;
            f.guessed_correctly = announced_bit(sent[i]) == set_claim;
            f.detected = !f.guessed_correctly && basis_bit(sent[i]) == ci;
        } else {
            const auto m = measure(photon, basis_named(ci), rng);
            out.record.o[i] = label_for(ci, m.outcome);
            out.record.o_prime[i] = static_cast<std::uint8_t>(m.outcome);
            out.per_photon[i].guessed_correctly = true;
        }
    }
    out.record.result = bob_verify(code, out.record);
    out.detected = !out.record.result.accepted;
    out.cheat_succeeded = out.record.result.accepted;
    return out;
}

cheat_outcome sly_alice_trial(const linear_code& code, int target_bit, rng_stream& rng) {
    if (target_bit != 0 && target_bit != 1) {
        throw std::invalid_argument("sly_alice_trial: target bit must be 0 or 1");
    }
    const int n = code.length();
    const partition p = make_partition(code, sample_r(code, rng));
    const sly_split sly = sly_intermediate(p);
    const bit_string& target = nearest_in(p.side(target_bit), sly.w);
    const auto sent = bob_prepare(n, rng);

    cheat_outcome out;
    out.record = base_transcript(code, p, sent);
    out.record.b = target_bit;
    out.record.c = target;
    out.record.o.assign(n, bb84_label::zero);
    out.record.o_prime.assign(n, 0);
    out.per_photon.assign(n, {});

    for (int i = 0; i < n; ++i) {
        // Commitment-time measurement follows the intermediate string.
        pure_state photon = make_bb84(sent[i]);
        const int plan_basis = sly.w[i];
        const auto m = measure(photon, basis_named(plan_basis), rng);
        const int announced = m.outcome;
        out.record.o_prime[i] = static_cast<std::uint8_t>(announced);
        if (target[i] == plan_basis) {
            out.record.o[i] = label_for(plan_basis, m.outcome);
            out.per_photon[i].guessed_correctly = true;
        } else {
            // Wrong-basis position: claim the target-basis state that matches
            // the announcement made from the intermediate-string measurement.
            out.record.o[i] = label_for(target[i], announced);
            auto& f = out.per_photon[i];
            f.cheated = true;
            f.guessed_correctly = announced_bit(sent[i]) == announced;
            f.detected = !f.guessed_correctly && basis_bit(sent[i]) == target[i];
        }
    }
    out.record.result = bob_verify(code, out.record);
    out.detected = !out.record.result.accepted;
    out.cheat_succeeded = out.record.result.accepted;
    return out;
}

int curious_bob_infer(bb84_label sent, int announced) {
    if (announced != 0 && announced != 1) {
        throw std::invalid_argument("curious_bob_infer: announcement must be a bit");
    }
    // The sent state sits in the announced set only under its own basis; an
    // announcement naming the other set points at the conjugate basis.
    return announced == announced_bit(sent) ? basis_bit(sent) : 1 - basis_bit(sent);
}

cheat_outcome curious_bob_trial(const linear_code& code, rng_stream& rng) {
    const int b = rng.bit();
    session s(code, rng);
    s.commit(b, rng);
    s.open();

    cheat_outcome out;
    out.record = s.finish(code);
    const int n = code.length();
    out.per_photon.assign(n, {});
    bool all = true;
    for (int i = 0; i < n; ++i) {
        const int guess = curious_bob_infer(out.record.sent[i], out.record.o_prime[i]);
        auto& f = out.per_photon[i];
        f.cheated = true;
        f.guessed_correctly = guess == out.record.c[i];
        all = all && f.guessed_correctly;
    }
    out.detected = !out.record.result.accepted;
    out.cheat_succeeded = all;
    return out;
}

cheat_outcome entangling_bob_trial(const linear_code& code, rng_stream& rng,
                                   bob_guess_rule rule) {
    // Discrimination pairs conditioned on the announcement: guessing the
    // first operator on outcome 0 decodes c_i = 0.
    static const basis kDiscriminate[2] = {
        helstrom_measurement(density_of(make_bb84(bb84_label::zero)),
                             density_of(make_bb84(bb84_label::plus))),
        helstrom_measurement(density_of(make_bb84(bb84_label::one)),
                             density_of(make_bb84(bb84_label::minus))),
    };

    const int n = code.length();
    const partition p = make_partition(code, sample_r(code, rng));
    const int b = rng.bit();
    const auto& half = p.side(b);

    cheat_outcome out;
    out.per_photon.assign(n, {});
    bit_string c = half[rng.uniform_int(half.size())];
    std::vector<bb84_label> sent(n, bb84_label::zero);
    std::vector<bb84_label> outcomes(n, bb84_label::zero);
    bit_string o_prime(n, 0);

    bool all = true;
    for (int i = 0; i < n; ++i) {
        const pure_state pair = bell_pair();
        const auto alice = measure_qubit(pair, 0, basis_named(c[i]), rng);
        outcomes[i] = label_for(c[i], alice.outcome);
        o_prime[i] = static_cast<std::uint8_t>(announced_bit(outcomes[i]));

        int guess;
        if (rule == bob_guess_rule::random_guess) {
            guess = rng.bit();
        } else {
            guess = measure(alice.residual, kDiscriminate[o_prime[i]], rng).outcome;
        }
        auto& f = out.per_photon[i];
        f.cheated = true;
        f.guessed_correctly = guess == c[i];
        all = all && f.guessed_correctly;
    }

    // Bob kept no reference preparation, so the transcript records the
    // post-measurement states as the sent sequence; Alice is honest and the
    // run verifies cleanly.
    transcript t;
    t.code = code.name();
    t.r = p.r;
    t.sent = outcomes;
    t.b = b;
    t.c = std::move(c);
    t.o = std::move(outcomes);
    t.o_prime = std::move(o_prime);
    t.result = bob_verify(code, t);
    out.record = std::move(t);
    out.detected = !out.record.result.accepted;
    out.cheat_succeeded = all;
    return out;
}

cheat_outcome multiphoton_alice_trial(const linear_code& code, const channel_params& params,
                                      int target_flips, rng_stream& rng) {
    if (target_flips < 0) {
        throw std::invalid_argument("multiphoton_alice_trial: target_flips must be >= 0");
    }
    params.validate();
    const int n = code.length();
    const partition p = make_partition(code, sample_r(code, rng));
    const auto sent = bob_prepare(n, rng);
    const auto pulses = apply_channel(sent, params, rng);

    // Measurement plan: the sly intermediate string when deferring the bit,
    // otherwise an honestly committed codeword.
    bit_string plan;
    int opened_bit;
    bit_string opened;
    if (target_flips > 0) {
        plan = sly_intermediate(p).w;
        opened_bit = rng.bit();
        opened = nearest_in(p.side(opened_bit), plan);
    } else {
        opened_bit = rng.bit();
        const auto& half = p.side(opened_bit);
        opened = half[rng.uniform_int(half.size())];
        plan = opened;
    }

    cheat_outcome out;
    out.record = base_transcript(code, p, sent);
    out.record.b = opened_bit;
    out.record.c = opened;
    out.record.o.assign(n, bb84_label::zero);
    out.record.o_prime.assign(n, 0);
    out.record.lost.assign(n, 0);
    out.per_photon.assign(n, {});

    for (int i = 0; i < n; ++i) {
        if (pulses[i].k == pulse::kind::empty) {
            out.record.lost[i] = 1;
            continue;
        }
        int jz = -1, jx = -1;  // outcome bits per basis, -1 = not measured
        bool free_position = false;
        if (pulses[i].k == pulse::kind::dual) {
            ++out.dual_pulses;
            jz = measure(make_bb84(sent[i]), z_basis(), rng).outcome;
            jx = measure(make_bb84(sent[i]), x_basis(), rng).outcome;
            free_position = jz == jx;
            out.free_positions += free_position;
        } else {
            const int jp = measure(make_bb84(sent[i]), basis_named(plan[i]), rng).outcome;
            (plan[i] == 0 ? jz : jx) = jp;
        }

        // Announcement: free duals announce the common bit; everything else
        // announces the plan-basis outcome (duals measured both).
        int announced = plan[i] == 0 ? jz : jx;
        if (pulses[i].error_flagged) announced ^= 1;
        out.record.o_prime[i] = static_cast<std::uint8_t>(announced);

        const int oi = opened[i];
        if (oi == plan[i]) {
            out.record.o[i] = label_for(oi, plan[i] == 0 ? jz : jx);
            out.per_photon[i].guessed_correctly = true;
            continue;
        }
        // Flipped position: open the target basis. A measured target-basis
        // outcome matching the announcement is a clean open (free dual);
        // otherwise the claim follows the announcement and risks detection.
        auto& f = out.per_photon[i];
        f.cheated = true;
        const int target_outcome = oi == 0 ? jz : jx;
        if (target_outcome == announced) {
            out.record.o[i] = label_for(oi, target_outcome);
            f.guessed_correctly = true;
        } else {
            out.record.o[i] = label_for(oi, announced);
            f.guessed_correctly = announced_bit(sent[i]) == announced;
            f.detected = !f.guessed_correctly && basis_bit(sent[i]) == oi;
        }
    }

    out.record.result = bob_verify(code, out.record);
    out.detected = !out.record.result.accepted;
    out.cheat_succeeded = out.free_positions >= target_flips;
    return out;
}

practicality_result practicality_check(const linear_code& code, const channel_params& params,
                                       double margin) {
    params.validate();
    practicality_result r;
    r.margin = margin;
    r.lhs = params.eta_m / 2.0 + params.eta_l + params.eta_e;
    r.rhs = static_cast<double>(code.min_distance()) / (2.0 * code.length());
    r.ratio = r.lhs / r.rhs;
    r.pass = r.lhs <= margin * r.rhs;
    return r;
}

}  // namespace qbc
