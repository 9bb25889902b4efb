#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

namespace {

#ifndef HETCAP_CLI_PATH
#error "HETCAP_CLI_PATH must be defined by the build"
#endif

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(HETCAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return RunResult{WEXITSTATUS(status), out};
}

} // namespace

TEST_CASE("capacity command prints the closed forms") {
    const RunResult symmetric = run("capacity --bq 0.5 --bp 0.5 --E 1 --format json");
    CHECK(symmetric.exit_code == 0);
    auto j = nlohmann::json::parse(symmetric.out);
    CHECK(j.at("case") == "C");
    CHECK(std::abs(j.at("nats").get<double>() - 0.405465108108164) < 1e-12);

    const RunResult left = run("capacity --bq 0.5 --bp 8 --E 1 --format json");
    auto jl = nlohmann::json::parse(left.out);
    CHECK(jl.at("case") == "L");
    CHECK(std::abs(jl.at("nats").get<double>() - std::log(std::sqrt(6.0) - 1.0)) < 1e-12);

    const RunResult zero = run("capacity --bq 0.5 --bp 0.5 --E 0.5 --format json");
    CHECK(std::abs(nlohmann::json::parse(zero.out).at("nats").get<double>()) < 1e-12);
}

TEST_CASE("invalid parameters exit with code 2") {
    CHECK(run("capacity --bq 0.5 --bp 0.1 --E 1").exit_code == 2);  // noise uncertainty
    CHECK(run("capacity --bq 0.5 --bp 0.5 --E 0.2").exit_code == 2); // energy too low
    CHECK(run("capacity --bq 0.5").exit_code == 2);                  // missing flags
    // divergence-bound check below the admissible squeeze
    CHECK(run("verify --bq 0.5 --bp 8 --delta 0.05").exit_code == 2);
}

TEST_CASE("verify subcommand emits deterministic JSONL and exit code 0") {
    const std::string args =
        "verify --group data_processing --group moment_identities --seed 7";
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    // a config echo, then one well-formed passing report per line
    std::size_t checks = 0, start = 0;
    bool header_seen = false;
    while (start < a.out.size()) {
        const std::size_t end = a.out.find('\n', start);
        if (end == std::string::npos) break;
        const auto j = nlohmann::json::parse(a.out.substr(start, end - start));
        if (!header_seen) {
            CHECK(j.at("schema") == "hetcap-verify-run/1");
            CHECK(j.at("seed") == 7);
            header_seen = true;
        } else {
            CHECK(j.at("schema") == "hetcap-check/1");
            CHECK(j.at("pass") == true);
            ++checks;
        }
        start = end + 1;
    }
    CHECK(header_seen);
    CHECK(checks > 50);
}

TEST_CASE("encoding and entropy commands") {
    const RunResult enc = run("encoding --bq 0.5 --bp 8 --E 1 --format json");
    CHECK(enc.exit_code == 0);
    const auto j = nlohmann::json::parse(enc.out);
    CHECK(j.at("case") == "L");
    CHECK(j.at("gamma_p").get<double>() == 0.0);
    CHECK(std::abs(j.at("alpha_q").get<double>() + j.at("alpha_p").get<double>() - 2.0) <
          1e-9);

    const RunResult ent = run("entropy --bq 0.5 --bp 0.5 --state coherent");
    CHECK(ent.exit_code == 0);
    const auto je = nlohmann::json::parse(ent.out);
    CHECK(std::abs(je.at("entropy_nats").get<double>() -
                   je.at("min_bound_nats").get<double>()) < 1e-3);
}

TEST_CASE("sweep emits the threshold row and a monotone curve") {
    const RunResult r = run("sweep --bq 0.5 --bp 8 --emin 0.5 --emax 8 --estep 0.25");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line); // config echo
    CHECK(line.rfind("# schema=hetcap-sweep/1", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "E,case,C_closed,C_BA,gap,lattice");
    double prev_c = -1.0;
    bool seen_threshold = false;
    std::string prev_case = "L";
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string e_s, case_s, c_s;
        std::getline(cells, e_s, ',');
        std::getline(cells, case_s, ',');
        std::getline(cells, c_s, ',');
        const double e = std::stod(e_s);
        const double c = std::stod(c_s);
        CHECK(c >= prev_c - 1e-12);
        prev_c = c;
        if (std::abs(e - 5.75) < 1e-9) {
            seen_threshold = true;
            CHECK(case_s == "C"); // boundary energy reaches the central regime
            CHECK(std::abs(c - std::log(4.0)) < 1e-12);
        }
        // the switch happens exactly once, L then C
        if (prev_case == "C") CHECK(case_s == "C");
        prev_case = case_s;
    }
    CHECK(seen_threshold);

    const RunResult sym = run("sweep --bq 1 --bp 1 --emin 0.5 --emax 3 --estep 0.5");
    std::istringstream sym_lines(sym.out);
    std::getline(sym_lines, line); // echo
    std::getline(sym_lines, line); // header
    while (std::getline(sym_lines, line)) CHECK(line.find(",C,") != std::string::npos);
}

TEST_CASE("mc command reports a rate near the closed form") {
    const RunResult r =
        run("mc --bq 0.5 --bp 0.5 --E 1 --samples 20000 --lattice 15 --seed 3");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double est = j.at("rate_nats").get<double>();
    const double se = j.at("std_error").get<double>();
    const double closed = j.at("closed_form_nats").get<double>();
    CHECK(std::abs(est - closed) < 4.0 * se + 0.01);
}
