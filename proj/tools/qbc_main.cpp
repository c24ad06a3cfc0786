// Command-line front end: honest sessions, attack experiments, parameter
// sweeps, and the channel practicality check, all reproducible from a seed.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qbc/analysis.hpp"

namespace {

using nlohmann::ordered_json;

struct common_options {
    std::string code = "hamming74";
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string out;
    std::string format = "json";
    double eta_m = 0.0, eta_l = 0.0, eta_e = 0.0;
};

void add_common(CLI::App* cmd, common_options& opt) {
    auto take_last = [](CLI::Option* o) {
        return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    take_last(cmd->add_option("--code", opt.code, "Built-in code name or generator file path"))
        ->capture_default_str();
    take_last(cmd->add_option("--trials", opt.trials, "Monte Carlo trials (>= 100)"))
        ->capture_default_str();
    take_last(cmd->add_option("--seed", opt.seed,
                              "RNG seed; QBC_SEED env is the fallback, generated if absent"))
        ->envname("QBC_SEED");
    take_last(cmd->add_option("--workers", opt.workers, "Worker threads for trial execution"))
        ->capture_default_str();
    take_last(cmd->add_option("--out", opt.out, "Report file path"));
    take_last(cmd->add_option("--format", opt.format, "Report format: json or csv")
                  ->check(CLI::IsMember({"json", "csv"})))
        ->capture_default_str();
    take_last(cmd->add_option("--eta-m", opt.eta_m, "Multi-photon rate"))->capture_default_str();
    take_last(cmd->add_option("--eta-l", opt.eta_l, "Loss rate"))->capture_default_str();
    take_last(cmd->add_option("--eta-e", opt.eta_e, "Announcement error rate"))
        ->capture_default_str();
}

std::uint64_t resolve_seed(CLI::App* cmd, common_options& opt) {
    if (cmd->count("--seed") > 0 || !cmd->get_option("--seed")->empty()) {
        opt.seed_given = true;
        return opt.seed;
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ordered_json config_json(const std::string& command, const common_options& opt,
                         const qbc::linear_code& code) {
    ordered_json j;
    j["command"] = command;
    j["code"] = opt.code;
    j["n"] = code.length();
    j["k"] = code.dimension();
    j["d"] = code.min_distance();
    j["trials"] = opt.trials;
    j["seed"] = opt.seed;
    j["workers"] = opt.workers;
    j["eta_m"] = opt.eta_m;
    j["eta_l"] = opt.eta_l;
    j["eta_e"] = opt.eta_e;
    j["format"] = opt.format;
    return j;
}

std::string csv_report(const ordered_json& config, const std::vector<qbc::trial_stats>& rows) {
    std::string out;
    for (const auto& [key, value] : config.items()) {
        out += "# " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
    }
    out += qbc::stats_to_csv(rows);
    return out;
}

void write_report(const common_options& opt, const ordered_json& config,
                  const std::vector<qbc::trial_stats>& rows) {
    if (opt.out.empty()) return;
    std::ofstream f(opt.out);
    if (!f) throw std::runtime_error("cannot write report file: " + opt.out);
    if (opt.format == "csv") {
        f << csv_report(config, rows);
    } else {
        ordered_json j;
        j["config"] = config;
        j["results"] = qbc::stats_to_json(rows);
        f << j.dump(2) << "\n";
    }
}

void print_rows(const std::vector<qbc::trial_stats>& rows) {
    for (const auto& r : rows) {
        std::cout << "param=" << r.param << " estimate=" << qbc::format_double(r.estimate)
                  << " [" << r.successes << "/" << r.trials << "]"
                  << " ci=[" << qbc::format_double(r.ci_low) << ", "
                  << qbc::format_double(r.ci_high) << "]";
        if (r.closed_form) {
            std::cout << " closed_form=" << qbc::format_double(*r.closed_form)
                      << " within_tolerance=" << (r.within_tolerance ? "yes" : "no");
        }
        std::cout << "\n";
    }
}

int tolerance_exit(const std::vector<qbc::trial_stats>& rows) {
    for (const auto& r : rows) {
        if (!r.within_tolerance) return 1;
    }
    return 0;
}

std::vector<double> linspace(double from, double to, int points) {
    if (points < 1) throw std::invalid_argument("sweep needs at least one grid point");
    std::vector<double> grid;
    grid.reserve(points);
    if (points == 1) {
        grid.push_back(from);
        return grid;
    }
    for (int i = 0; i < points; ++i) {
        grid.push_back(from + (to - from) * static_cast<double>(i) / (points - 1));
    }
    return grid;
}

// Flat key=value config file; values are injected as --key=value tokens ahead
// of the explicit flags, which therefore win.
std::vector<std::string> config_file_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(f, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config file line is not key=value: " + line);
        }
        std::string key = line.substr(first, eq - first);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = line.substr(eq + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t' ||
                                  value.back() == '\r')) {
            value.pop_back();
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

int run_honest(CLI::App* cmd, common_options& opt, int bit, int budget,
               const std::string& transcripts_path) {
    opt.seed = resolve_seed(cmd, opt);
    const qbc::linear_code code = qbc::linear_code::resolve(opt.code);

    qbc::strategy_config cfg;
    cfg.kind = qbc::strategy_kind::honest;
    cfg.code_name = opt.code;
    cfg.committed_bit = bit;
    cfg.channel = {opt.eta_m, opt.eta_l, opt.eta_e};
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;
    cfg.budget = budget;

    std::vector<qbc::trial_stats> rows{qbc::estimate(cfg, code, qbc::metric::accepted)};

    if (!transcripts_path.empty()) {
        std::ofstream f(transcripts_path);
        if (!f) throw std::runtime_error("cannot write transcripts file: " + transcripts_path);
        for (std::int64_t i = 0; i < cfg.trials; ++i) {
            qbc::rng_stream rng = qbc::rng_stream::derive(cfg.seed, i);
            const qbc::transcript t =
                cfg.channel.is_noiseless()
                    ? qbc::run_honest_trial(code, bit, rng)
                    : qbc::run_noisy_trial(code, bit, cfg.channel, budget, rng);
            f << qbc::transcript_json_line(t) << "\n";
        }
    }

    ordered_json config = config_json("honest", opt, code);
    config["bit"] = bit;
    config["budget"] = budget;
    config["transcripts"] = transcripts_path;
    print_rows(rows);
    write_report(opt, config, rows);
    return tolerance_exit(rows);
}

int run_attack(CLI::App* cmd, common_options& opt, const std::string& strategy,
               double theta, int flips, int target_bit) {
    opt.seed = resolve_seed(cmd, opt);
    const qbc::linear_code code = qbc::linear_code::resolve(opt.code);
    const qbc::strategy_kind kind = qbc::strategy_from_name(strategy);
    if (kind == qbc::strategy_kind::honest) {
        throw CLI::ValidationError("--strategy", "use the honest subcommand for honest runs");
    }

    qbc::strategy_config cfg;
    cfg.kind = kind;
    cfg.code_name = opt.code;
    cfg.committed_bit = target_bit;
    cfg.theta = theta;
    cfg.flips = flips >= 0 ? flips
                           : (kind == qbc::strategy_kind::multiphoton_alice
                                  ? (code.min_distance() + 1) / 2
                                  : 1);
    cfg.channel = {opt.eta_m, opt.eta_l, opt.eta_e};
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;

    std::vector<qbc::metric> metrics;
    switch (kind) {
        case qbc::strategy_kind::theta_alice:
            metrics = {qbc::metric::per_photon_detected, qbc::metric::per_photon_guess,
                       qbc::metric::detected, qbc::metric::cheat_succeeded};
            break;
        case qbc::strategy_kind::sly_alice:
            metrics = {qbc::metric::detected, qbc::metric::cheat_succeeded,
                       qbc::metric::per_photon_detected};
            break;
        case qbc::strategy_kind::multiphoton_alice:
            metrics = {qbc::metric::free_position, qbc::metric::cheat_succeeded,
                       qbc::metric::detected};
            break;
        default:
            metrics = {qbc::metric::per_photon_guess, qbc::metric::cheat_succeeded};
            break;
    }

    std::vector<qbc::trial_stats> rows;
    for (auto m : metrics) {
        try {
            rows.push_back(qbc::estimate(cfg, code, m));
        } catch (const std::invalid_argument& e) {
            // A strategy instance can legitimately produce no opportunities
            // for a per-photon metric (for example zero flipped positions).
            std::cout << "skipping metric " << qbc::metric_name(m) << ": " << e.what() << "\n";
        }
    }

    ordered_json config = config_json("attack", opt, code);
    config["strategy"] = strategy;
    config["theta"] = cfg.theta;
    config["flips"] = cfg.flips;
    config["target_bit"] = target_bit;
    print_rows(rows);
    write_report(opt, config, rows);
    return tolerance_exit(rows);
}

int run_sweep(CLI::App* cmd, common_options& opt, const std::string& param_name,
              double from, double to, int points, const std::string& strategy,
              const std::string& metric_name_opt, double theta, int flips,
              int target_bit) {
    opt.seed = resolve_seed(cmd, opt);
    const qbc::linear_code code = qbc::linear_code::resolve(opt.code);
    const qbc::sweep_param param = qbc::sweep_param_from_name(param_name);

    qbc::strategy_config base;
    base.code_name = opt.code;
    base.committed_bit = target_bit;
    base.theta = theta;
    base.flips = flips;
    base.channel = {opt.eta_m, opt.eta_l, opt.eta_e};
    base.trials = opt.trials;
    base.seed = opt.seed;
    base.workers = opt.workers;

    if (!strategy.empty()) {
        base.kind = qbc::strategy_from_name(strategy);
    } else {
        switch (param) {
            case qbc::sweep_param::theta:
            case qbc::sweep_param::flips:     base.kind = qbc::strategy_kind::theta_alice; break;
            case qbc::sweep_param::n_minus_d: base.kind = qbc::strategy_kind::curious_bob; break;
            case qbc::sweep_param::eta_m:     base.kind = qbc::strategy_kind::multiphoton_alice; break;
        }
    }
    if (base.flips < 0) {
        switch (param) {
            case qbc::sweep_param::theta:
                base.flips = 0;  // the sweep widens this to every position
                break;
            case qbc::sweep_param::eta_m:
                base.flips = (code.min_distance() + 1) / 2;
                break;
            default:
                base.flips = 1;
                break;
        }
    }

    std::optional<qbc::metric> m;
    if (!metric_name_opt.empty()) m = qbc::metric_from_name(metric_name_opt);

    const std::vector<double> grid = linspace(from, to, points);
    const std::vector<qbc::trial_stats> rows = qbc::sweep(param, grid, base, code, m);

    ordered_json config = config_json("sweep", opt, code);
    config["param"] = param_name;
    config["from"] = from;
    config["to"] = to;
    config["points"] = points;
    config["strategy"] = strategy_name(base.kind);
    config["metric"] = metric_name_opt.empty() ? "default" : metric_name_opt;
    config["theta"] = theta;
    config["flips"] = base.flips;
    config["target_bit"] = target_bit;
    print_rows(rows);
    write_report(opt, config, rows);
    return tolerance_exit(rows);
}

int run_practicality(CLI::App* cmd, common_options& opt, double margin) {
    opt.seed = resolve_seed(cmd, opt);
    const qbc::linear_code code = qbc::linear_code::resolve(opt.code);
    const qbc::channel_params channel{opt.eta_m, opt.eta_l, opt.eta_e};
    const qbc::practicality_result r = qbc::practicality_check(code, channel, margin);

    std::cout << (r.pass ? "PASS" : "FAIL") << " ratio=" << qbc::format_double(r.ratio)
              << " lhs=" << qbc::format_double(r.lhs) << " rhs=" << qbc::format_double(r.rhs)
              << " margin=" << qbc::format_double(r.margin) << "\n";

    if (!opt.out.empty()) {
        ordered_json config = config_json("practicality", opt, code);
        config["margin"] = margin;
        std::ofstream f(opt.out);
        if (!f) throw std::runtime_error("cannot write report file: " + opt.out);
        if (opt.format == "csv") {
            for (const auto& [key, value] : config.items()) {
                f << "# " << key << "="
                  << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
            }
            f << "lhs,rhs,ratio,margin,pass\n"
              << qbc::format_double(r.lhs) << ',' << qbc::format_double(r.rhs) << ','
              << qbc::format_double(r.ratio) << ',' << qbc::format_double(r.margin) << ','
              << (r.pass ? "true" : "false") << "\n";
        } else {
            ordered_json j;
            j["config"] = config;
            j["practicality"] = {{"lhs", r.lhs},
                                 {"rhs", r.rhs},
                                 {"ratio", r.ratio},
                                 {"margin", r.margin},
                                 {"pass", r.pass}};
            f << j.dump(2) << "\n";
        }
    }
    return 0;  // Fail is a result, not an error
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation laboratory for a cheat-sensitive quantum bit commitment protocol"};
    app.require_subcommand(1);

    common_options honest_opt, attack_opt, sweep_opt, pract_opt;

    auto* honest = app.add_subcommand("honest", "Run honest protocol sessions");
    add_common(honest, honest_opt);
    int bit = 0, budget = 0;
    std::string transcripts_path;
    honest->add_option("--bit", bit, "Committed bit")->check(CLI::Range(0, 1));
    honest->add_option("--budget", budget, "Tolerated per-photon mismatches (noisy runs)");
    honest->add_option("--transcripts", transcripts_path, "Write one JSON transcript per line");

    auto* attack = app.add_subcommand("attack", "Run a cheating strategy");
    add_common(attack, attack_opt);
    std::string strategy;
    double theta = 0.39269908169872414;
    int flips = -1, target_bit = 0;
    attack->add_option("--strategy", strategy,
                       "theta-alice | sly-alice | multiphoton-alice | curious-bob | entangling-bob")
        ->required();
    attack->add_option("--theta", theta, "Rotated measurement angle (radians)");
    attack->add_option("--flips", flips, "Cheated positions (default 1, multiphoton ceil(d/2))");
    attack->add_option("--target-bit", target_bit, "Bit the cheater opens")->check(CLI::Range(0, 1));

    auto* sweepcmd = app.add_subcommand("sweep", "Estimate over a parameter grid");
    add_common(sweepcmd, sweep_opt);
    std::string param_name, sweep_strategy, sweep_metric;
    double from = 0.0, to = 0.0;
    int points = 0;
    double sweep_theta = 0.39269908169872414;
    int sweep_flips = -1, sweep_target = 0;
    sweepcmd->add_option("--param", param_name, "theta | m | n-minus-d | eta-m")->required();
    sweepcmd->add_option("--from", from, "Grid start")->required();
    sweepcmd->add_option("--to", to, "Grid end")->required();
    sweepcmd->add_option("--points", points, "Grid size")->required();
    sweepcmd->add_option("--strategy", sweep_strategy, "Strategy override for the sweep");
    sweepcmd->add_option("--metric", sweep_metric, "Metric override for the sweep");
    sweepcmd->add_option("--theta", sweep_theta, "Fixed angle for non-theta sweeps");
    sweepcmd->add_option("--flips", sweep_flips, "Fixed flip count for non-m sweeps");
    sweepcmd->add_option("--target-bit", sweep_target, "Target bit")->check(CLI::Range(0, 1));

    auto* pract = app.add_subcommand("practicality", "Check eta_m/2 + eta_l + eta_e vs d/(2n)");
    add_common(pract, pract_opt);
    double margin = 0.1;
    pract->add_option("--margin", margin, "Pass threshold as a fraction of d/(2n)");

    // Manual --config handling so the file stays flat key=value with keys
    // matching flag names; explicit flags override file values.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
    }
    try {
        if (!config_path.empty()) {
            if (args.empty()) throw std::runtime_error("--config requires a subcommand");
            const auto injected = config_file_tokens(config_path);
            args.insert(args.begin() + 1, injected.begin(), injected.end());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (honest->parsed()) return run_honest(honest, honest_opt, bit, budget, transcripts_path);
        if (attack->parsed()) return run_attack(attack, attack_opt, strategy, theta, flips, target_bit);
        if (sweepcmd->parsed()) {
            return run_sweep(sweepcmd, sweep_opt, param_name, from, to, points, sweep_strategy,
                             sweep_metric, sweep_theta, sweep_flips, sweep_target);
        }
        if (pract->parsed()) return run_practicality(pract, pract_opt, margin);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand given\n";
    return 2;
}
