#include "qbc/protocol.hpp"

#include "json.hpp"

#include <stdexcept>
#include <utility>

namespace qbc {

const char* check_name(check c) {
    switch (c) {
        case check::announcement:        return "announcement";
        case check::basis_membership:    return "basis_membership";
        case check::same_basis_outcome:  return "same_basis_outcome";
        case check::commitment_parity:   return "commitment_parity";
    }
    return "unknown";
}

std::string transcript_json_line(const transcript& t) {
    nlohmann::ordered_json j;
    j["code"] = t.code;
    j["r"] = bits_to_string(t.r);
    std::string sent, o, o_prime;
    for (std::size_t i = 0; i < t.sent.size(); ++i) {
        const bool lost = t.is_lost(i);
        sent.push_back(label_char(t.sent[i]));
        o.push_back(lost ? '.' : label_char(t.o[i]));
        o_prime.push_back(lost ? '.' : static_cast<char>('0' + t.o_prime[i]));
    }
    j["sent"] = sent;
    j["b"] = t.b;
    j["c"] = bits_to_string(t.c);
    j["o"] = o;
    j["o_prime"] = o_prime;
    j["verdict"] = t.result.accepted ? "accept" : "reject";
    if (t.result.accepted) {
        j["reject_reason"] = nullptr;
        j["reject_index"] = nullptr;
    } else {
        j["reject_reason"] = check_name(t.result.failed);
        j["reject_index"] = t.result.index;
    }
    return j.dump();
}

std::vector<bb84_label> bob_prepare(int n, rng_stream& rng) {
    if (n < 1) {
        throw std::invalid_argument("bob_prepare: n must be at least 1");
    }
    std::vector<bb84_label> labels(n);
    for (auto& l : labels) {
        l = static_cast<bb84_label>(rng.uniform_int(4));
    }
    return labels;
}

commit_record alice_commit(int b, const partition& p,
                           const std::vector<pure_state>& photons, rng_stream& rng) {
    const auto& half = p.side(b);
    if (half.empty()) {
        throw std::invalid_argument("alice_commit: committed half of the partition is empty");
    }
    const std::size_t n = p.r.size();
    if (photons.size() != n) {
        throw std::invalid_argument("alice_commit: photon count must equal n");
    }
    commit_record rec;
    rec.codeword = half[rng.uniform_int(half.size())];
    rec.outcomes.reserve(n);
    rec.announcement.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int ci = rec.codeword[i];
        const auto m = measure(photons[i], basis_named(ci), rng);
        rec.outcomes.push_back(label_for(ci, m.outcome));
        rec.announcement[i] = static_cast<std::uint8_t>(announced_bit(rec.outcomes[i]));
    }
    return rec;
}

verdict bob_verify(const linear_code& code, const transcript& t,
                   int tolerated_mismatches) {
    const std::size_t n = t.sent.size();
    if (t.c.size() != n || t.o.size() != n || t.o_prime.size() != n ||
        t.r.size() != n || static_cast<int>(n) != code.length() ||
        (!t.lost.empty() && t.lost.size() != n)) {
        throw std::invalid_argument("bob_verify: malformed transcript (length mismatch)");
    }
    if (t.b != 0 && t.b != 1) {
        throw std::invalid_argument("bob_verify: malformed transcript (bad committed bit)");
    }
    if (!code.contains(t.c)) {
        throw std::invalid_argument("bob_verify: malformed transcript (opened c is not a codeword)");
    }

    int mismatches = 0;
    verdict first_failure = verdict::accept();
    auto note = [&](check which, std::size_t i) {
        ++mismatches;
        if (mismatches == tolerated_mismatches + 1) {
            first_failure = verdict::reject(which, static_cast<int>(i));
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (t.is_lost(i)) continue;
        if (announced_bit(t.o[i]) != t.o_prime[i]) note(check::announcement, i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.is_lost(i)) continue;
        if (basis_bit(t.o[i]) != t.c[i]) note(check::basis_membership, i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.is_lost(i)) continue;
        if (basis_bit(t.sent[i]) == t.c[i] && t.o[i] != t.sent[i]) {
            note(check::same_basis_outcome, i);
        }
    }
    if (!first_failure.accepted) return first_failure;
    if (dot_and_xor(t.c, t.r) != t.b) {
        return verdict::reject(check::commitment_parity, -1);
    }
    return verdict::accept();
}

session::session(const linear_code& code, rng_stream& rng)
    : code_name_(code.name()) {
    part_ = make_partition(code, sample_r(code, rng));
    sent_ = bob_prepare(code.length(), rng);
    photons_.reserve(sent_.size());
    for (auto l : sent_) photons_.push_back(make_bb84(l));
}

void session::commit(int b, rng_stream& rng) {
    if (stage_ != stage::prepared) {
        throw std::logic_error("session: commit called twice");
    }
    if (b != 0 && b != 1) {
        throw std::invalid_argument("session: committed bit must be 0 or 1");
    }
    record_ = alice_commit(b, part_, photons_, rng);
    b_ = b;
    stage_ = stage::committed;
}

session::opening session::open() {
    if (stage_ == stage::prepared) {
        throw std::logic_error("session: open called before commit");
    }
    if (stage_ == stage::opened) {
        throw std::logic_error("session: double open");
    }
    stage_ = stage::opened;
    return {b_, record_.outcomes, record_.codeword};
}

transcript session::finish(const linear_code& code) {
    if (stage_ != stage::opened) {
        throw std::logic_error("session: finish requires an opened commitment");
    }
    transcript t;
    t.code = code_name_;
    t.r = part_.r;
    t.sent = sent_;
    t.b = b_;
    t.c = record_.codeword;
    t.o = record_.outcomes;
    t.o_prime = record_.announcement;
    t.result = bob_verify(code, t);
    return t;
}

transcript run_honest_trial(const linear_code& code, int b, rng_stream& rng) {
    session s(code, rng);
    s.commit(b, rng);
    s.open();
    return s.finish(code);
}

std::vector<transcript> run_honest(const linear_code& code, int b, int trials,
                                   std::uint64_t seed) {
    std::vector<transcript> out;
    out.reserve(trials);
    for (int i = 0; i < trials; ++i) {
        rng_stream rng = rng_stream::derive(seed, static_cast<std::uint64_t>(i));
        out.push_back(run_honest_trial(code, b, rng));
    }
    return out;
}

void channel_params::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(eta_m) || !in_unit(eta_l) || !in_unit(eta_e)) {
        throw std::invalid_argument("channel_params: rates must lie in [0, 1]");
    }
    if (eta_m + eta_l > 1.0) {
        throw std::invalid_argument("channel_params: eta_m + eta_l must not exceed 1");
    }
}

std::vector<pulse> apply_channel(const std::vector<bb84_label>& labels,
                                 const channel_params& params, rng_stream& rng) {
    params.validate();
    std::vector<pulse> out;
    out.reserve(labels.size());
    for (auto l : labels) {
        pulse p;
        p.label = l;
        const double u = rng.uniform();
        if (u < params.eta_m) {
            p.k = pulse::kind::dual;
        } else if (u < params.eta_m + params.eta_l) {
            p.k = pulse::kind::empty;
        } else {
            p.k = pulse::kind::single;
            p.error_flagged = rng.bernoulli(params.eta_e);
        }
        out.push_back(p);
    }
    return out;
}

transcript run_noisy_trial(const linear_code& code, int b, const channel_params& params,
                           int tolerated_mismatches, rng_stream& rng) {
    const int n = code.length();
    partition part = make_partition(code, sample_r(code, rng));
    const auto sent = bob_prepare(n, rng);
    const auto pulses = apply_channel(sent, params, rng);

    transcript t;
    t.code = code.name();
    t.r = part.r;
    t.sent = sent;
    t.b = b;
    t.lost.assign(n, 0);

    const auto& half = part.side(b);
    t.c = half[rng.uniform_int(half.size())];
    t.o.assign(n, bb84_label::zero);
    t.o_prime.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        if (pulses[i].k == pulse::kind::empty) {
            t.lost[i] = 1;  // reported lost before the announcement
            continue;
        }
        // A dual pulse carries identical photons; honest Alice measures one.
        const int ci = t.c[i];
        pure_state photon = make_bb84(sent[i]);
        const auto m = measure(photon, basis_named(ci), rng);
        t.o[i] = label_for(ci, m.outcome);
        int bit = announced_bit(t.o[i]);
        if (pulses[i].error_flagged) bit ^= 1;
        t.o_prime[i] = static_cast<std::uint8_t>(bit);
    }
    t.result = bob_verify(code, t, tolerated_mismatches);
    return t;
}

}  // namespace qbc
