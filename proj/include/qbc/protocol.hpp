#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbc/codes.hpp"
#include "qbc/quantum.hpp"
#include "qbc/rng.hpp"

namespace qbc {

// Verification checks, in the order Bob applies them.
enum class check : std::uint8_t {
    announcement,        // o'_i must match the announced set of o_i
    basis_membership,    // o_i must be a state of the basis named by c_i
    same_basis_outcome,  // where Bob prepared in the basis named by c_i, o_i = s_i
    commitment_parity,   // c . r must equal the opened bit
};

const char* check_name(check c);

struct verdict {
    bool accepted = false;
    check failed = check::announcement;  // meaningful only when !accepted
    int index = -1;                      // position of the first failure, -1 for parity

    static verdict accept() { return {true, check::announcement, -1}; }
    static verdict reject(check c, int index) { return {false, c, index}; }
};

// Full record of one protocol run. `lost` marks positions excluded from the
// announcement in noisy mode (empty vector means noiseless, nothing lost).
struct transcript {
    std::string code;
    bit_string r;
    std::vector<bb84_label> sent;
    int b = 0;
    bit_string c;
    std::vector<bb84_label> o;
    bit_string o_prime;
    std::vector<std::uint8_t> lost;
    verdict result;

    bool is_lost(std::size_t i) const { return !lost.empty() && lost[i]; }
};

// One JSON object per trial; stable field names
// code, r, sent, b, c, o, o_prime, verdict, reject_reason, reject_index.
std::string transcript_json_line(const transcript& t);

std::vector<bb84_label> bob_prepare(int n, rng_stream& rng);

struct commit_record {
    bit_string codeword;
    std::vector<bb84_label> outcomes;
    bit_string announcement;
};

// Steps (4)-(6): draw c from the committed half, measure photon i in the
// basis named by c_i, announce the set bit of each outcome.
commit_record alice_commit(int b, const partition& p,
                           const std::vector<pure_state>& photons, rng_stream& rng);

// Step (8), strengthened with the basis-membership and same-basis checks the
// detection analysis relies on. Checks run in declaration order and the
// verdict reports the first failure. `tolerated_mismatches` is the noisy-run
// budget: up to that many positions may fail checks i-iii before rejection;
// the parity check is never waived. Lost positions are skipped.
// A transcript whose opened c is not a codeword is malformed and throws.
verdict bob_verify(const linear_code& code, const transcript& t,
                   int tolerated_mismatches = 0);

// Single-session state machine: construction runs the pre-commitment phase
// (fresh r and photons), then commit -> open -> verified transcript.
class session {
public:
    session(const linear_code& code, rng_stream& rng);

    const bit_string& r() const { return part_.r; }
    const partition& split() const { return part_; }
    const std::vector<bb84_label>& sent() const { return sent_; }
    const std::vector<pure_state>& photons() const { return photons_; }

    void commit(int b, rng_stream& rng);

    struct opening {
        int b;
        std::vector<bb84_label> o;
        bit_string c;
    };
    // Reveals the values recorded at commitment. Throws std::logic_error when
    // called before commit or a second time.
    opening open();

    // Builds the transcript and runs Bob's verification.
    transcript finish(const linear_code& code);

private:
    enum class stage { prepared, committed, opened };

    std::string code_name_;
    partition part_;
    std::vector<bb84_label> sent_;
    std::vector<pure_state> photons_;
    commit_record record_;
    int b_ = -1;
    stage stage_ = stage::prepared;
};

transcript run_honest_trial(const linear_code& code, int b, rng_stream& rng);

// Independent sessions, trial i driven by the stream derived from (seed, i).
std::vector<transcript> run_honest(const linear_code& code, int b, int trials,
                                   std::uint64_t seed);

// Imperfect-source and channel model.
struct channel_params {
    double eta_m = 0.0;  // multi-photon (double-pulse) rate
    double eta_l = 0.0;  // loss rate
    double eta_e = 0.0;  // announcement-error rate on surviving photons

    bool is_noiseless() const { return eta_m == 0.0 && eta_l == 0.0 && eta_e == 0.0; }
    void validate() const;
};

struct pulse {
    enum class kind : std::uint8_t { single, dual, empty };
    kind k = kind::single;
    bb84_label label = bb84_label::zero;
    bool error_flagged = false;  // announcement of this photon gets corrupted
};

// Each pulse independently: dual with probability eta_m, lost with
// probability eta_l, otherwise a single photon whose announcement is flagged
// erroneous with probability eta_e.
std::vector<pulse> apply_channel(const std::vector<bb84_label>& labels,
                                 const channel_params& params, rng_stream& rng);

// Honest run through a noisy channel: lost positions are reported before the
// announcement and excluded, error-flagged positions have o'_i flipped.
// Verification uses the tolerated-mismatch budget.
transcript run_noisy_trial(const linear_code& code, int b, const channel_params& params,
                           int tolerated_mismatches, rng_stream& rng);

}  // namespace qbc
