// hetcap: capacities, optimal encodings and numerical certification for
// noisy joint quadrature (heterodyne-type) measurement channels.
//
// Exit codes: 0 success, 1 a check failed, 2 invalid input.

#include "hetcap/capacity.hpp"
#include "hetcap/oracle.hpp"
#include "hetcap/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using nlohmann::json;

constexpr const char* kSchemaCapacity = "hetcap-capacity/1";
constexpr const char* kSchemaBA = "hetcap-ba/1";
constexpr const char* kSchemaMC = "hetcap-mc/1";

const char* case_name(hetcap::Case tag) {
    switch (tag) {
        case hetcap::Case::C: return "C";
        case hetcap::Case::L: return "L";
        case hetcap::Case::R: return "R";
    }
    return "?";
}

json encoding_json(const hetcap::GaussianEncoding& enc) {
    return json{{"case", case_name(enc.tag)},
                {"delta", enc.delta},
                {"gamma_q", enc.gamma_q},
                {"gamma_p", enc.gamma_p},
                {"alpha_q", enc.alpha.alpha_q},
                {"alpha_p", enc.alpha.alpha_p}};
}

json encoding_record(const hetcap::CapacityResult& res) {
    json j = encoding_json(res.encoding);
    j["schema"] = "hetcap-encoding/1";
    j["beta_q"] = res.noise.beta_q;
    j["beta_p"] = res.noise.beta_p;
    j["E"] = res.energy;
    return j;
}

json capacity_json(const hetcap::CapacityResult& res) {
    return json{{"schema", kSchemaCapacity},
                {"beta_q", res.noise.beta_q},
                {"beta_p", res.noise.beta_p},
                {"E", res.energy},
                {"case", case_name(res.tag)},
                {"nats", res.value},
                {"bits", res.value / std::log(2.0)},
                {"encoding", encoding_json(res.encoding)}};
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

std::string default_profile_name() {
    const char* env = std::getenv("HETCAP_PROFILE");
    return env ? env : "fast";
}

int run_capacity(double bq, double bp, double E, bool as_json, bool encoding_only,
                 const std::string& out_path) {
    const hetcap::NoiseCovariance noise(bq, bp);
    const hetcap::CapacityResult res = hetcap::capacity(noise, E);
    if (as_json) {
        write_output(out_path,
                     (encoding_only ? encoding_record(res) : capacity_json(res)).dump(2) +
                         "\n");
        return 0;
    }
    std::ostringstream text;
    text.precision(12);
    if (!encoding_only)
        text << "case " << case_name(res.tag) << ": C = " << res.value << " nats ("
             << res.value / std::log(2.0) << " bits) at E = " << E << "\n";
    text << "encoding: delta = " << res.encoding.delta
         << ", gamma_q = " << res.encoding.gamma_q
         << ", gamma_p = " << res.encoding.gamma_p
         << ", alpha = (" << res.encoding.alpha.alpha_q << ", "
         << res.encoding.alpha.alpha_p << ")\n";
    write_output(out_path, text.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity and certification toolkit for noisy heterodyne measurement"};
    app.require_subcommand(1);

    double bq = 0.5, bp = 0.5, energy = 1.0;
    std::uint64_t seed = 1234;
    std::string out_path, format = "text";
    std::string profile_name = default_profile_name();

    auto add_noise_opts = [&](CLI::App* cmd, bool with_energy = true) {
        cmd->add_option("--bq", bq, "position noise power beta_q")->required();
        cmd->add_option("--bp", bp, "momentum noise power beta_p")->required();
        if (with_energy) cmd->add_option("--E", energy, "energy constraint")->required();
        cmd->add_option("-o,--out", out_path, "output file (default stdout)");
    };

    // capacity / encoding
    auto* cmd_capacity = app.add_subcommand("capacity", "closed-form capacity and encoding");
    add_noise_opts(cmd_capacity);
    cmd_capacity->add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* cmd_encoding = app.add_subcommand("encoding", "optimal encoding parameters only");
    add_noise_opts(cmd_encoding);
    cmd_encoding->add_option("--format", format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    // entropy
    auto* cmd_entropy =
        app.add_subcommand("entropy", "output entropy of a state and the lower bound");
    std::string state_kind = "coherent";
    double delta = 0.5, state_x = 0.0, state_y = 0.0;
    int fock_n = 0;
    cmd_entropy->add_option("--bq", bq)->required();
    cmd_entropy->add_option("--bp", bp)->required();
    cmd_entropy->add_option("--state", state_kind, "coherent|fock|random")
        ->check(CLI::IsMember({"coherent", "fock", "random"}));
    cmd_entropy->add_option("--delta", delta, "letter squeeze (0 = matched)");
    cmd_entropy->add_option("--x", state_x);
    cmd_entropy->add_option("--y", state_y);
    cmd_entropy->add_option("--n", fock_n, "Fock index / random dimension");
    cmd_entropy->add_option("--seed", seed);
    cmd_entropy->add_option("--profile", profile_name)->check(CLI::IsMember({"fast", "strict"}));
    cmd_entropy->add_option("-o,--out", out_path);

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "run the certification battery (JSONL)");
    std::vector<std::string> groups;
    double verify_delta = -1.0;
    cmd_verify->add_option("--profile", profile_name)->check(CLI::IsMember({"fast", "strict"}));
    cmd_verify->add_option("--seed", seed);
    cmd_verify->add_option("--group", groups, "restrict to named groups");
    cmd_verify->add_option("--bq", bq, "single-config mode: noise");
    cmd_verify->add_option("--bp", bp);
    cmd_verify->add_option("--delta", verify_delta,
                           "single-config mode: run one divergence-bound check");
    cmd_verify->add_option("-o,--out", out_path);

    // ba
    auto* cmd_ba = app.add_subcommand("ba", "discretized-channel capacity oracle");
    int lattice = 31, cells = 96, max_iter = 4000;
    double ba_tol = 1e-10;
    add_noise_opts(cmd_ba);
    cmd_ba->add_option("--lattice", lattice, "letters per displaced axis");
    cmd_ba->add_option("--cells", cells, "outcome cells per axis");
    cmd_ba->add_option("--tol", ba_tol);
    cmd_ba->add_option("--max-iter", max_iter);

    // mc
    auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo rate of the optimal encoding");
    long samples = 100000;
    add_noise_opts(cmd_mc);
    cmd_mc->add_option("--samples", samples);
    cmd_mc->add_option("--lattice", lattice);
    cmd_mc->add_option("--seed", seed);

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "capacity vs energy curve (CSV)");
    double e_min = 0.5, e_max = 4.0, e_step = 0.25;
    bool with_ba = false;
    int sweep_lattice = 15, sweep_cells = 64; // modest defaults: one oracle run per row
    cmd_sweep->add_option("--bq", bq)->required();
    cmd_sweep->add_option("--bp", bp)->required();
    cmd_sweep->add_option("--emin", e_min);
    cmd_sweep->add_option("--emax", e_max);
    cmd_sweep->add_option("--estep", e_step);
    cmd_sweep->add_flag("--ba", with_ba, "include the discretized-channel oracle column");
    cmd_sweep->add_option("--lattice", sweep_lattice);
    cmd_sweep->add_option("--cells", sweep_cells);
    cmd_sweep->add_option("-o,--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_capacity->parsed())
            return run_capacity(bq, bp, energy, format == "json", false, out_path);
        if (cmd_encoding->parsed())
            return run_capacity(bq, bp, energy, format == "json", true, out_path);

        if (cmd_entropy->parsed()) {
            const hetcap::NoiseCovariance noise(bq, bp);
            const hetcap::Profile profile = hetcap::Profile::named(profile_name);
            const double d = delta > 0.0 ? delta : hetcap::model_delta_beta(noise);
            hetcap::WaveFunction psi = [&] {
                if (state_kind == "coherent") {
                    const auto grid =
                        hetcap::state_grid(d, 0, std::abs(state_x), profile.position_points);
                    return hetcap::squeezed_coherent(d, state_x, state_y, grid);
                }
                if (state_kind == "fock") {
                    const auto grid = hetcap::state_grid(d, fock_n, 0.0, profile.position_points);
                    return hetcap::squeezed_fock(fock_n, d, grid);
                }
                const int dim = std::max(fock_n, 2);
                const auto grid = hetcap::state_grid(d, dim - 1, 0.0, profile.position_points);
                return hetcap::random_state(seed, dim, d, grid);
            }();
            const auto model = hetcap::build_model(noise, profile.model_eps);
            const auto rho = hetcap::PureEnsemble::pure(std::move(psi));
            const auto grid2 =
                hetcap::default_outcome_grid(noise, rho, profile.outcome_points);
            const double h = hetcap::wehrl_entropy(model, rho, grid2);
            json j{{"schema", "hetcap-entropy/1"},
                   {"beta_q", bq},
                   {"beta_p", bp},
                   {"state", state_kind},
                   {"delta", d},
                   {"entropy_nats", h},
                   {"min_bound_nats", hetcap::min_wehrl_bound(noise)}};
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }

        if (cmd_verify->parsed()) {
            const hetcap::Profile profile = hetcap::Profile::named(profile_name);
            std::vector<hetcap::CheckReport> reports;
            if (verify_delta > 0.0) {
                const hetcap::NoiseCovariance noise(bq, bp);
                const auto g = hetcap::state_grid(0.5, 5, 0.0, profile.position_points);
                const auto rho =
                    hetcap::PureEnsemble::pure(hetcap::random_state(seed, 6, 0.5, g));
                reports.push_back(
                    hetcap::check_kl_inequality(rho, noise, verify_delta, profile));
            } else {
                hetcap::BatteryConfig cfg;
                cfg.profile = profile;
                cfg.seed = seed;
                cfg.groups = groups;
                reports = hetcap::run_battery(cfg);
            }
            // config echo, then one check record per line
            json header{{"schema", "hetcap-verify-run/1"},
                        {"profile", profile.name},
                        {"seed", seed},
                        {"groups", groups.empty() ? hetcap::battery_groups() : groups},
                        {"checks", reports.size()}};
            write_output(out_path, header.dump() + "\n" + hetcap::to_jsonl(reports));

            // per-family summary, worst slack first failure
            std::map<std::string, std::pair<int, double>> families;
            int failures = 0;
            std::string first_failure;
            for (const auto& r : reports) {
                auto& f = families.try_emplace(r.name, 0,
                                               std::numeric_limits<double>::infinity())
                              .first->second;
                ++f.first;
                f.second = std::min(f.second, r.slack);
                if (!r.pass && failures++ == 0) first_failure = r.name;
            }
            for (const auto& [name, f] : families)
                std::cerr << name << ": " << f.first << " checks, min slack " << f.second
                          << "\n";
            std::cerr << "total: " << reports.size() << " checks, failures: " << failures
                      << "\n";
            if (failures > 0) {
                std::cerr << "first failing check: " << first_failure << "\n";
                return 1;
            }
            return 0;
        }

        if (cmd_ba->parsed() || cmd_mc->parsed()) {
            const hetcap::NoiseCovariance noise(bq, bp);
            const hetcap::CapacityResult res = hetcap::capacity(noise, energy);
            const auto constellation =
                hetcap::lattice_constellation(res.encoding, lattice);
            if (cmd_ba->parsed()) {
                const auto grid = hetcap::oracle_grid(constellation, noise, cells);
                const auto channel = hetcap::build_channel(constellation, noise, grid);
                const auto ba = hetcap::blahut_arimoto(channel, constellation.energies,
                                                       energy, ba_tol, max_iter);
                json j{{"schema", kSchemaBA},
                       {"beta_q", bq},
                       {"beta_p", bp},
                       {"E", energy},
                       {"lattice", lattice},
                       {"cells", cells},
                       {"rate_nats", ba.mutual_information},
                       {"closed_form_nats", res.value},
                       {"gap_nats", res.value - ba.mutual_information},
                       {"mean_energy", ba.mean_energy},
                       {"lagrange_multiplier", ba.lagrange_multiplier},
                       {"iterations", ba.iterations},
                       {"converged", ba.converged},
                       {"monotone", ba.monotone}};
                write_output(out_path, j.dump(2) + "\n");
                return 0;
            }
            const auto mc = hetcap::mc_rate(constellation, noise, samples, seed);
            json j{{"schema", kSchemaMC},
                   {"beta_q", bq},
                   {"beta_p", bp},
                   {"E", energy},
                   {"lattice", lattice},
                   {"samples", samples},
                   {"seed", seed},
                   {"rate_nats", mc.estimate},
                   {"std_error", mc.std_error},
                   {"closed_form_nats", res.value}};
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }

        if (cmd_sweep->parsed()) {
            if (!(e_step > 0.0) || e_max < e_min)
                throw std::invalid_argument("sweep: bad energy range");
            const hetcap::NoiseCovariance noise(bq, bp);
            std::ostringstream csv;
            csv.precision(12);
            csv << "# schema=hetcap-sweep/1 beta_q=" << bq << " beta_p=" << bp
                << " ba=" << (with_ba ? 1 : 0) << " lattice=" << sweep_lattice
                << " cells=" << sweep_cells << "\n";
            csv << "E,case,C_closed,C_BA,gap,lattice\n";
            // include the exact threshold row where the regimes meet
            std::vector<double> es;
            for (double e = e_min; e <= e_max + 1e-12; e += e_step) es.push_back(e);
            const double e_thr = std::max(hetcap::energy_threshold(bp, bq),
                                          hetcap::energy_threshold(bq, bp));
            if (e_thr > e_min && e_thr < e_max) es.push_back(e_thr);
            std::sort(es.begin(), es.end());
            for (double e : es) {
                const auto res = hetcap::capacity(noise, e);
                csv << e << "," << case_name(res.tag) << "," << res.value << ",";
                if (with_ba) {
                    const auto constellation =
                        hetcap::lattice_constellation(res.encoding, sweep_lattice);
                    const auto grid =
                        hetcap::oracle_grid(constellation, noise, sweep_cells);
                    const auto channel = hetcap::build_channel(constellation, noise, grid);
                    const auto ba = hetcap::blahut_arimoto(channel, constellation.energies,
                                                           e, ba_tol, max_iter);
                    csv << ba.mutual_information << ","
                        << res.value - ba.mutual_information;
                } else {
                    csv << ",";
                }
                csv << "," << sweep_lattice << "\n";
            }
            write_output(out_path, csv.str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
