#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qbc/adversaries.hpp"
#include "qbc/codes.hpp"
#include "qbc/protocol.hpp"

namespace qbc {

struct wilson_interval {
    double low = 0.0;
    double high = 1.0;
};

// 95% Wilson score interval for a binomial proportion; stable near 0 and 1.
wilson_interval wilson_score(std::int64_t successes, std::int64_t trials,
                             double z = 1.959963984540054);

// Probability that altering the committed bit is caught when m photons are
// cheated at the optimal angle: 1 - ((6 + sqrt(2)) / 8)^m.
double detection_formula(int m);

struct sealing_bounds {
    double curious;  // (3/4)^(n-d)
    double optimal;  // (1/2 + sqrt(2)/4)^(n-d)
};

sealing_bounds sealing_formulas(int n, int d);

// P(Binomial(n, p) >= m), summed exactly.
double binomial_tail_at_least(int n, double p, int m);

// |estimate - closed_form| <= 4 * sqrt(cf * (1 - cf) / trials).
bool within_four_sigma(double estimate, double closed_form, std::int64_t trials);

enum class strategy_kind : std::uint8_t {
    honest,
    theta_alice,
    sly_alice,
    multiphoton_alice,
    curious_bob,
    entangling_bob,
};

strategy_kind strategy_from_name(const std::string& name);
const char* strategy_name(strategy_kind k);

struct strategy_config {
    strategy_kind kind = strategy_kind::honest;
    std::string code_name = "hamming74";
    int committed_bit = 0;   // honest commit bit / sly target bit
    double theta = 0.39269908169872414;  // pi/8
    int flips = 1;
    channel_params channel;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    int budget = 0;  // tolerated mismatches in noisy honest verification
};

enum class metric : std::uint8_t {
    accepted,
    detected,
    cheat_succeeded,
    per_photon_detected,
    per_photon_guess,
    free_position,
};

metric metric_from_name(const std::string& name);
const char* metric_name(metric m);

struct trial_stats {
    std::string param;  // grid value for sweeps, metric name otherwise
    std::int64_t trials = 0;     // counted opportunities (runs or photons)
    std::int64_t successes = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<double> closed_form;
    bool within_tolerance = true;
};

// Monte Carlo estimate of one metric under one strategy. Trials fan out over
// `config.workers` threads; trial i always uses the stream derived from
// (seed, i), so the result is identical for any worker count. Requires
// trials >= 100. Attaches the matching closed form when one exists.
trial_stats estimate(const strategy_config& config, const linear_code& code, metric m);

enum class sweep_param : std::uint8_t { theta, flips, n_minus_d, eta_m };

sweep_param sweep_param_from_name(const std::string& name);
const char* sweep_param_name(sweep_param p);

// One estimate per grid value. Defaults when no metric is given:
// theta -> per_photon_guess, flips -> detected, eta_m -> cheat_succeeded.
// n_minus_d measures full recovery of the first g announced positions by a
// curious or entangling Bob against the matching power law, and ignores the
// metric argument.
std::vector<trial_stats> sweep(sweep_param param, const std::vector<double>& grid,
                               const strategy_config& base, const linear_code& code,
                               std::optional<metric> m = std::nullopt);

// Report emission; column order is fixed:
// param,trials,successes,estimate,ci_low,ci_high,closed_form,within_tolerance
std::string stats_to_csv(const std::vector<trial_stats>& rows);
// The same rows as a JSON array (objects keyed like the CSV columns).
nlohmann::ordered_json stats_to_json(const std::vector<trial_stats>& rows);
std::string format_double(double v);

}  // namespace qbc
