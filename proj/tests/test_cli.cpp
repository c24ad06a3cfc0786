#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef QBC_CLI_PATH
#define QBC_CLI_PATH "qbc"
#endif

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    if (const char* env = std::getenv("QBC_CLI")) return env;
    return QBC_CLI_PATH;
}

struct run_result {
    int exit_code = -1;
    std::string output;
};

run_result run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args + " 2>&1";
    std::array<char, 512> buf{};
    run_result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct temp_dir {
    fs::path path;
    temp_dir() {
        path = fs::temp_directory_path() / ("qbc_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~temp_dir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("honest run reports full acceptance and exits 0") {
    temp_dir tmp;
    const fs::path out = tmp.path / "honest.json";
    const auto r = run_cli("honest --code hamming74 --trials 1000 --seed 7 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["config"]["command"] == "honest");
    CHECK(j["config"]["seed"] == 7);
    CHECK(j["config"]["trials"] == 1000);
    REQUIRE(j["results"].size() == 1);
    CHECK(j["results"][0]["estimate"] == 1.0);
    CHECK(j["results"][0]["closed_form"] == 1.0);
    CHECK(j["results"][0]["within_tolerance"] == true);
}

TEST_CASE("same argv and seed give byte-identical reports") {
    temp_dir tmp;
    const fs::path a = tmp.path / "a.json";
    const fs::path b = tmp.path / "b.json";
    const std::string flags = "attack --strategy theta-alice --theta 0.3927 --flips 3 "
                              "--trials 2000 --seed 11 --out ";
    CHECK(run_cli(flags + a.string()).exit_code == 0);
    CHECK(run_cli(flags + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    // CSV path too, and a different worker count must not change the bytes.
    const fs::path c = tmp.path / "c.csv";
    const fs::path d = tmp.path / "d.csv";
    const std::string csv_flags = "attack --strategy entangling-bob --trials 1500 "
                                  "--seed 3 --format csv --out ";
    CHECK(run_cli(csv_flags + c.string()).exit_code == 0);
    CHECK(run_cli(csv_flags + d.string() + " --workers 3").exit_code == 0);
    const std::string cs = slurp(c), ds = slurp(d);
    // configs differ in the workers line only; results must match exactly
    const auto tail_from_header = [](const std::string& s) {
        return s.substr(s.find("param,"));
    };
    CHECK(tail_from_header(cs) == tail_from_header(ds));
}

TEST_CASE("curious bob attack lands near 3/4") {
    temp_dir tmp;
    const fs::path out = tmp.path / "curious.json";
    const auto r = run_cli("attack --strategy curious-bob --trials 15000 --seed 7 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    const double est = j["results"][0]["estimate"].get<double>();
    CHECK(est > 0.74);
    CHECK(est < 0.76);
}

TEST_CASE("practicality lines: pass, fail, and exit 0 either way") {
    const auto fail = run_cli("practicality --code hamming74 --eta-l 0.3");
    CHECK(fail.exit_code == 0);
    CHECK(fail.output.find("FAIL") != std::string::npos);

    const auto pass = run_cli("practicality --code hamming74 --eta-l 0.02");
    CHECK(pass.exit_code == 0);
    CHECK(pass.output.find("PASS") != std::string::npos);
    CHECK(pass.output.find("ratio=0.0933") != std::string::npos);
}

TEST_CASE("usage and config errors exit 2") {
    CHECK(run_cli("honest --no-such-flag").exit_code == 2);
    CHECK(run_cli("attack --strategy nobody --trials 200").exit_code == 2);
    CHECK(run_cli("honest --trials 50 --seed 1").exit_code == 2);  // below the floor
    CHECK(run_cli("honest --code missing_generator.txt --trials 200").exit_code == 2);
    CHECK(run_cli("sweep --param theta --from 0 --to 1 --points 0 --trials 200").exit_code == 2);
    CHECK(run_cli("").exit_code != 0);
}

TEST_CASE("help exits 0") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("honest --help").exit_code == 0);
}

TEST_CASE("config file supplies defaults, flags override") {
    temp_dir tmp;
    const fs::path cfg = tmp.path / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# comment line\n"
          << "trials=500\n"
          << "seed=99\n";
    }
    const fs::path out1 = tmp.path / "r1.json";
    const auto r1 = run_cli("honest --config " + cfg.string() + " --out " + out1.string());
    CHECK(r1.exit_code == 0);
    const auto j1 = nlohmann::json::parse(slurp(out1));
    CHECK(j1["config"]["trials"] == 500);
    CHECK(j1["config"]["seed"] == 99);

    const fs::path out2 = tmp.path / "r2.json";
    const auto r2 = run_cli("honest --config " + cfg.string() + " --trials 800 --out " +
                            out2.string());
    CHECK(r2.exit_code == 0);
    const auto j2 = nlohmann::json::parse(slurp(out2));
    CHECK(j2["config"]["trials"] == 800);  // flag wins
    CHECK(j2["config"]["seed"] == 99);

    const fs::path bad = tmp.path / "bad.cfg";
    {
        std::ofstream f(bad);
        f << "not a key value line\n";
    }
    CHECK(run_cli("honest --config " + bad.string()).exit_code == 2);
}

TEST_CASE("QBC_SEED environment variable is the seed fallback") {
    temp_dir tmp;
    const fs::path out = tmp.path / "env.json";
    const auto r = run_cli("honest --trials 300 --out " + out.string(), "QBC_SEED=41 ");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["config"]["seed"] == 41);

    // An explicit flag beats the environment.
    const fs::path out2 = tmp.path / "env2.json";
    const auto r2 =
        run_cli("honest --trials 300 --seed 5 --out " + out2.string(), "QBC_SEED=41 ");
    CHECK(r2.exit_code == 0);
    const auto j2 = nlohmann::json::parse(slurp(out2));
    CHECK(j2["config"]["seed"] == 5);
}

TEST_CASE("generator matrix files load through --code") {
    temp_dir tmp;
    const fs::path gen = tmp.path / "rep5.txt";
    {
        std::ofstream f(gen);
        f << "1 5\n1 1 1 1 1\n";
    }
    const fs::path out = tmp.path / "rep5.json";
    const auto r = run_cli("honest --code " + gen.string() + " --trials 300 --seed 2 --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["config"]["n"] == 5);
    CHECK(j["config"]["k"] == 1);
    CHECK(j["config"]["d"] == 5);
    CHECK(j["results"][0]["estimate"] == 1.0);
}

TEST_CASE("transcript dump writes one parsable object per trial") {
    temp_dir tmp;
    const fs::path lines = tmp.path / "t.jsonl";
    const auto r = run_cli("honest --trials 120 --seed 13 --transcripts " + lines.string());
    CHECK(r.exit_code == 0);
    std::ifstream f(lines);
    std::string line;
    int count = 0;
    while (std::getline(f, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["verdict"] == "accept");
        CHECK(j["o_prime"].get<std::string>().size() == 7);
        ++count;
    }
    CHECK(count == 120);
}

TEST_CASE("sweep command emits one row per grid point") {
    temp_dir tmp;
    const fs::path out = tmp.path / "sweep.csv";
    const auto r = run_cli(
        "sweep --param m --from 1 --to 4 --points 4 --code repetition8 "
        "--trials 400 --seed 21 --format csv --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find("param,trials,successes,estimate,ci_low,ci_high,closed_form,"
                   "within_tolerance") != std::string::npos);
    int rows = 0;
    for (char ch : csv) rows += ch == '\n';
    // config comment lines + header + 4 data rows
    CHECK(csv.find("\n1,") != std::string::npos);
    CHECK(csv.find("\n4,") != std::string::npos);
    CHECK(rows > 5);
}
