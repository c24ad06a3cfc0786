#include "qbc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

namespace qbc {

wilson_interval wilson_score(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0 || successes < 0 || successes > trials) {
        throw std::invalid_argument("wilson_score: need 0 <= successes <= trials, trials > 0");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double detection_formula(int m) {
    if (m < 0) {
        throw std::invalid_argument("detection_formula: m must be >= 0");
    }
    return 1.0 - std::pow((6.0 + std::sqrt(2.0)) / 8.0, m);
}

sealing_bounds sealing_formulas(int n, int d) {
    if (d < 0 || d > n) {
        throw std::invalid_argument("sealing_formulas: need 0 <= d <= n");
    }
    const int e = n - d;
    return {std::pow(0.75, e), std::pow(0.5 + std::sqrt(2.0) / 4.0, e)};
}

double binomial_tail_at_least(int n, double p, int m) {
    if (n < 0 || p < 0.0 || p > 1.0) {
        throw std::invalid_argument("binomial_tail_at_least: bad arguments");
    }
    if (m <= 0) return 1.0;
    if (m > n) return 0.0;
    double tail = 0.0;
    double coeff = 1.0;  // C(n, j), exact in double for n <= 24
    for (int j = 0; j <= n; ++j) {
        if (j >= m) {
            tail += coeff * std::pow(p, j) * std::pow(1.0 - p, n - j);
        }
        coeff = coeff * (n - j) / (j + 1);
    }
    return std::min(1.0, tail);
}

bool within_four_sigma(double estimate, double closed_form, std::int64_t trials) {
    const double se = std::sqrt(closed_form * (1.0 - closed_form) /
                                static_cast<double>(trials));
    return std::abs(estimate - closed_form) <= 4.0 * se;
}

strategy_kind strategy_from_name(const std::string& name) {
    if (name == "honest") return strategy_kind::honest;
    if (name == "theta-alice") return strategy_kind::theta_alice;
    if (name == "sly-alice") return strategy_kind::sly_alice;
    if (name == "multiphoton-alice") return strategy_kind::multiphoton_alice;
    if (name == "curious-bob") return strategy_kind::curious_bob;
    if (name == "entangling-bob") return strategy_kind::entangling_bob;
    throw std::invalid_argument("unknown strategy: " + name);
}

const char* strategy_name(strategy_kind k) {
    switch (k) {
        case strategy_kind::honest:            return "honest";
        case strategy_kind::theta_alice:       return "theta-alice";
        case strategy_kind::sly_alice:         return "sly-alice";
        case strategy_kind::multiphoton_alice: return "multiphoton-alice";
        case strategy_kind::curious_bob:       return "curious-bob";
        case strategy_kind::entangling_bob:    return "entangling-bob";
    }
    return "unknown";
}

metric metric_from_name(const std::string& name) {
    if (name == "accepted") return metric::accepted;
    if (name == "detected") return metric::detected;
    if (name == "cheat_succeeded") return metric::cheat_succeeded;
    if (name == "per_photon_detected") return metric::per_photon_detected;
    if (name == "per_photon_guess") return metric::per_photon_guess;
    if (name == "free_position") return metric::free_position;
    throw std::invalid_argument("unknown metric: " + name);
}

const char* metric_name(metric m) {
    switch (m) {
        case metric::accepted:            return "accepted";
        case metric::detected:            return "detected";
        case metric::cheat_succeeded:     return "cheat_succeeded";
        case metric::per_photon_detected: return "per_photon_detected";
        case metric::per_photon_guess:    return "per_photon_guess";
        case metric::free_position:       return "free_position";
    }
    return "unknown";
}

namespace {

struct counts {
    std::int64_t num = 0;
    std::int64_t den = 0;

    void operator+=(const counts& o) {
        num += o.num;
        den += o.den;
    }
};

counts extract(const cheat_outcome& out, metric m) {
    counts c;
    switch (m) {
        case metric::accepted:
            c = {out.record.result.accepted ? 1 : 0, 1};
            break;
        case metric::detected:
            c = {out.detected ? 1 : 0, 1};
            break;
        case metric::cheat_succeeded:
            c = {out.cheat_succeeded ? 1 : 0, 1};
            break;
        case metric::per_photon_detected:
            for (const auto& f : out.per_photon) {
                if (f.cheated) {
                    ++c.den;
                    c.num += f.detected;
                }
            }
            break;
        case metric::per_photon_guess:
            for (const auto& f : out.per_photon) {
                if (f.cheated) {
                    ++c.den;
                    c.num += f.guessed_correctly;
                }
            }
            break;
        case metric::free_position:
            c = {out.free_positions, out.dual_pulses};
            break;
    }
    return c;
}

counts run_one(const strategy_config& cfg, const linear_code& code, metric m,
               rng_stream& rng) {
    switch (cfg.kind) {
        case strategy_kind::honest: {
            if (m != metric::accepted) {
                throw std::invalid_argument("honest runs only count the accepted metric");
            }
            const transcript t =
                cfg.channel.is_noiseless()
                    ? run_honest_trial(code, cfg.committed_bit, rng)
                    : run_noisy_trial(code, cfg.committed_bit, cfg.channel, cfg.budget, rng);
            return {t.result.accepted ? 1 : 0, 1};
        }
        case strategy_kind::theta_alice:
            return extract(theta_alice_trial(cfg.theta, cfg.flips, code, rng), m);
        case strategy_kind::sly_alice:
            return extract(sly_alice_trial(code, cfg.committed_bit, rng), m);
        case strategy_kind::multiphoton_alice:
            return extract(multiphoton_alice_trial(code, cfg.channel, cfg.flips, rng), m);
        case strategy_kind::curious_bob:
            return extract(curious_bob_trial(code, rng), m);
        case strategy_kind::entangling_bob:
            return extract(entangling_bob_trial(code, rng), m);
    }
    throw std::invalid_argument("run_one: bad strategy kind");
}

counts accumulate(const strategy_config& cfg, const linear_code& code, metric m) {
    const std::int64_t trials = cfg.trials;
    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        counts total;
        for (std::int64_t i = 0; i < trials; ++i) {
            rng_stream rng = rng_stream::derive(cfg.seed, static_cast<std::uint64_t>(i));
            total += run_one(cfg, code, m, rng);
        }
        return total;
    }

    std::vector<counts> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::int64_t lo = w * chunk;
                const std::int64_t hi = std::min(trials, lo + chunk);
                for (std::int64_t i = lo; i < hi; ++i) {
                    rng_stream rng =
                        rng_stream::derive(cfg.seed, static_cast<std::uint64_t>(i));
                    partial[w] += run_one(cfg, code, m, rng);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    counts total;
    for (const auto& c : partial) total += c;
    return total;
}

std::optional<double> closed_form_for(const strategy_config& cfg, const linear_code& code,
                                      metric m) {
    const double per_flip_q = (1.0 - distinguish_probability(cfg.theta)) / 2.0;
    const double helstrom = 0.5 + std::sqrt(2.0) / 4.0;
    const int n = code.length();
    switch (cfg.kind) {
        case strategy_kind::honest:
            if (m == metric::accepted && cfg.channel.is_noiseless()) return 1.0;
            return std::nullopt;
        case strategy_kind::theta_alice:
            switch (m) {
                case metric::per_photon_detected: return per_flip_q;
                case metric::per_photon_guess:    return distinguish_probability(cfg.theta);
                case metric::detected:            return 1.0 - std::pow(1.0 - per_flip_q, cfg.flips);
                case metric::accepted:
                case metric::cheat_succeeded:     return std::pow(1.0 - per_flip_q, cfg.flips);
                default:                          return std::nullopt;
            }
        case strategy_kind::curious_bob:
            switch (m) {
                case metric::per_photon_guess: return 0.75;
                case metric::cheat_succeeded:  return std::pow(0.75, n);
                case metric::accepted:         return 1.0;
                default:                       return std::nullopt;
            }
        case strategy_kind::entangling_bob:
            switch (m) {
                case metric::per_photon_guess: return helstrom;
                case metric::cheat_succeeded:  return std::pow(helstrom, n);
                case metric::accepted:         return 1.0;
                default:                       return std::nullopt;
            }
        case strategy_kind::multiphoton_alice:
            switch (m) {
                case metric::free_position:   return 0.5;
                case metric::cheat_succeeded:
                    return binomial_tail_at_least(n, cfg.channel.eta_m / 2.0, cfg.flips);
                default:                      return std::nullopt;
            }
        case strategy_kind::sly_alice:
            return std::nullopt;
    }
    return std::nullopt;
}

trial_stats finish_stats(std::string param, counts c, std::optional<double> cf) {
    if (c.den <= 0) {
        throw std::invalid_argument("estimate: metric counted no opportunities");
    }
    trial_stats s;
    s.param = std::move(param);
    s.trials = c.den;
    s.successes = c.num;
    s.estimate = static_cast<double>(c.num) / static_cast<double>(c.den);
    const auto ci = wilson_score(c.num, c.den);
    s.ci_low = ci.low;
    s.ci_high = ci.high;
    s.closed_form = cf;
    s.within_tolerance = !cf || within_four_sigma(s.estimate, *cf, c.den);
    return s;
}

}  // namespace

trial_stats estimate(const strategy_config& config, const linear_code& code, metric m) {
    if (config.trials < 100) {
        throw std::invalid_argument("estimate: need at least 100 trials");
    }
    const counts c = accumulate(config, code, m);
    return finish_stats(metric_name(m), c, closed_form_for(config, code, m));
}

sweep_param sweep_param_from_name(const std::string& name) {
    if (name == "theta") return sweep_param::theta;
    if (name == "m" || name == "flips") return sweep_param::flips;
    if (name == "n-minus-d" || name == "n_minus_d") return sweep_param::n_minus_d;
    if (name == "eta-m" || name == "eta_m") return sweep_param::eta_m;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

const char* sweep_param_name(sweep_param p) {
    switch (p) {
        case sweep_param::theta:     return "theta";
        case sweep_param::flips:     return "m";
        case sweep_param::n_minus_d: return "n-minus-d";
        case sweep_param::eta_m:     return "eta-m";
    }
    return "unknown";
}

namespace {

// Frequency of recovering the first `g` announced positions, paired with the
// per-photon power law p^g.
trial_stats prefix_recovery_point(const strategy_config& base, const linear_code& code,
                                  int g, std::uint64_t point_seed) {
    if (base.kind != strategy_kind::curious_bob &&
        base.kind != strategy_kind::entangling_bob) {
        throw std::invalid_argument(
            "n-minus-d sweep requires the curious-bob or entangling-bob strategy");
    }
    if (g < 0 || g > code.length()) {
        throw std::invalid_argument("n-minus-d sweep: grid value outside [0, n]");
    }
    const double per_photon = base.kind == strategy_kind::curious_bob
                                  ? 0.75
                                  : 0.5 + std::sqrt(2.0) / 4.0;
    counts c;
    for (std::int64_t i = 0; i < base.trials; ++i) {
        rng_stream rng = rng_stream::derive(point_seed, static_cast<std::uint64_t>(i));
        const cheat_outcome out = base.kind == strategy_kind::curious_bob
                                      ? curious_bob_trial(code, rng)
                                      : entangling_bob_trial(code, rng);
        bool all = true;
        for (int j = 0; j < g; ++j) all = all && out.per_photon[j].guessed_correctly;
        c.num += all;
        ++c.den;
    }
    return finish_stats(std::to_string(g), c, std::pow(per_photon, g));
}

}  // namespace

std::vector<trial_stats> sweep(sweep_param param, const std::vector<double>& grid,
                               const strategy_config& base, const linear_code& code,
                               std::optional<metric> m) {
    if (grid.empty()) {
        throw std::invalid_argument("sweep: grid must be nonempty");
    }
    std::vector<trial_stats> rows;
    rows.reserve(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double v = grid[p];
        strategy_config cfg = base;
        cfg.seed = derive_seed(base.seed, p);
        switch (param) {
            case sweep_param::theta: {
                cfg.kind = strategy_kind::theta_alice;
                cfg.theta = v;
                if (cfg.flips < 1) cfg.flips = code.length();
                trial_stats s = estimate(cfg, code, m.value_or(metric::per_photon_guess));
                s.param = format_double(v);
                rows.push_back(std::move(s));
                break;
            }
            case sweep_param::flips: {
                const int f = static_cast<int>(std::llround(v));
                if (f < 0 || f > code.length()) {
                    throw std::invalid_argument("sweep: m outside [0, n]");
                }
                cfg.flips = f;
                if (cfg.kind != strategy_kind::multiphoton_alice) {
                    cfg.kind = strategy_kind::theta_alice;
                }
                trial_stats s = estimate(cfg, code, m.value_or(metric::detected));
                s.param = std::to_string(f);
                rows.push_back(std::move(s));
                break;
            }
            case sweep_param::n_minus_d:
                rows.push_back(prefix_recovery_point(
                    base, code, static_cast<int>(std::llround(v)), cfg.seed));
                break;
            case sweep_param::eta_m: {
                cfg.kind = strategy_kind::multiphoton_alice;
                cfg.channel.eta_m = v;
                trial_stats s = estimate(cfg, code, m.value_or(metric::cheat_succeeded));
                s.param = format_double(v);
                rows.push_back(std::move(s));
                break;
            }
        }
    }
    return rows;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

nlohmann::ordered_json stats_to_json(const std::vector<trial_stats>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["param"] = r.param;
        j["trials"] = r.trials;
        j["successes"] = r.successes;
        j["estimate"] = r.estimate;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        if (r.closed_form) {
            j["closed_form"] = *r.closed_form;
        } else {
            j["closed_form"] = nullptr;
        }
        j["within_tolerance"] = r.within_tolerance;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string stats_to_csv(const std::vector<trial_stats>& rows) {
    std::string out =
        "param,trials,successes,estimate,ci_low,ci_high,closed_form,within_tolerance\n";
    for (const auto& r : rows) {
        out += r.param;
        out += ',' + std::to_string(r.trials);
        out += ',' + std::to_string(r.successes);
        out += ',' + format_double(r.estimate);
        out += ',' + format_double(r.ci_low);
        out += ',' + format_double(r.ci_high);
        out += ',';
        if (r.closed_form) out += format_double(*r.closed_form);
        out += ',';
        out += r.within_tolerance ? "true" : "false";
        out += '\n';
    }
    return out;
}

}  // namespace qbc
