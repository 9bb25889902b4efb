#include "hetcap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hetcap {

namespace {

constexpr double kValueFloor = 1e-300;

double entropy_integrand_sum(const HusimiDensity& p) {
    return -differential_entropy(p.density); // integral of p ln p
}

// -integral p ln q for two densities on one grid (no support-floor throw;
// the caller guarantees coverage).
double cross_sum(const Density2D& p, const Density2D& q) {
    const Eigen::ArrayXd wx = p.grid().gx.quad_weights();
    const Eigen::ArrayXd wy = p.grid().gy.quad_weights();
    const auto& pv = p.values();
    const auto& qv = q.values();
    double acc = 0.0;
    for (int j = 0; j < pv.cols(); ++j) {
        double col = 0.0;
        for (int i = 0; i < pv.rows(); ++i) {
            const double pi = pv(i, j);
            if (pi <= kValueFloor) continue;
            col += wx[i] * pi * std::log(std::max(qv(i, j), kValueFloor));
        }
        acc += wy[j] * col;
    }
    return -acc;
}

double letter_bracket(const NoiseCovariance& noise, double delta, double q2, double p2) {
    const double vq = noise.beta_q + delta;
    const double vp = noise.beta_p + 0.25 / delta;
    return std::log(2.0 * M_PI * std::sqrt(vq * vp)) + (noise.beta_q + q2) / (2.0 * vq) +
           (noise.beta_p + p2) / (2.0 * vp);
}

} // namespace

nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json j;
    j["schema"] = "hetcap-check/1";
    j["name"] = r.name;
    j["params"] = r.params;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

std::string to_jsonl(const std::vector<CheckReport>& reports) {
    std::ostringstream out;
    for (const auto& r : reports) out << to_json(r).dump() << '\n';
    return out.str();
}

Profile Profile::named(const std::string& name) {
    if (name == "fast") return fast();
    if (name == "strict") return strict();
    throw std::invalid_argument("Profile: unknown profile '" + name + "'");
}

Grid2D shared_outcome_grid(const NoiseCovariance& noise, const PureEnsemble& rho,
                           double delta, int points_per_axis) {
    const Grid2D a = default_outcome_grid(noise, rho, points_per_axis);
    const Grid1D bx = axis_for(0.0, noise.beta_q + delta, points_per_axis);
    const Grid1D by = axis_for(0.0, noise.beta_p + 0.25 / delta, points_per_axis);
    return Grid2D{hull_axis(a.gx, bx, points_per_axis),
                  hull_axis(a.gy, by, points_per_axis)};
}

CheckReport check_kl_identity(const PureEnsemble& rho, const NoiseCovariance& noise,
                              double delta, const Profile& profile) {
    if (!(delta > 0.0))
        throw std::invalid_argument("check_kl_identity: delta must be positive");
    const MeasurementModel model = build_model(noise, profile.model_eps);
    const Grid2D grid = shared_outcome_grid(noise, rho, delta, profile.outcome_points);
    const HusimiDensity p = husimi(model, rho, grid);
    const HusimiDensity p0 =
        husimi_gaussian_closed_form(noise, delta, 0.0, 0.0, grid);
    const double lhs = kl_divergence(p.density, p0.density);
    const double rhs = entropy_integrand_sum(p) + letter_bracket(noise, delta, p.q2, p.p2);
    CheckReport r;
    r.name = "kl_identity";
    r.params = {{"beta_q", noise.beta_q}, {"beta_p", noise.beta_p}, {"delta", delta}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.tolerance = 1e-5;
    r.pass = std::abs(r.slack) <= r.tolerance;
    return r;
}

CheckReport check_kl_inequality(const PureEnsemble& rho, const NoiseCovariance& noise,
                                double delta, const Profile& profile) {
    const double db = model_delta_beta(noise);
    if (delta < db * (1.0 - 1e-12))
        throw std::invalid_argument(
            "check_kl_inequality: requires delta >= sqrt(beta_q/beta_p)/2");
    const MeasurementModel model = build_model(noise, profile.model_eps);
    const Grid2D grid = shared_outcome_grid(noise, rho, delta, profile.outcome_points);
    const HusimiDensity p = husimi(model, rho, grid);
    const HusimiDensity p0 =
        husimi_gaussian_closed_form(noise, delta, 0.0, 0.0, grid);
    const double lhs = kl_divergence(p.density, p0.density);
    const double rhs =
        (p.q2 + 4.0 * delta * delta * p.p2 - 2.0 * delta) / (2.0 * (noise.beta_q + delta));
    CheckReport r;
    r.name = "kl_inequality";
    r.params = {{"beta_q", noise.beta_q}, {"beta_p", noise.beta_p}, {"delta", delta}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = 1e-5;
    r.pass = r.slack >= -r.tolerance;
    return r;
}

CheckReport check_log_sobolev(const WaveFunction& psi, const NoiseCovariance& noise,
                              double delta, const Profile& profile) {
    const double db = model_delta_beta(noise);
    if (delta < db * (1.0 - 1e-12))
        throw std::invalid_argument(
            "check_log_sobolev: requires delta >= sqrt(beta_q/beta_p)/2");
    const double p2_grad = second_moments(psi).second;
    const double p2_spec = momentum_second_moment_spectral(psi);
    if (std::abs(p2_grad - p2_spec) > 1e-5 * std::max(p2_spec, 1e-12))
        throw std::domain_error(
            "check_log_sobolev: gradient and Fourier momentum moments disagree");
    const MeasurementModel model = build_model(noise, profile.model_eps);
    const PureEnsemble rho = PureEnsemble::pure(psi);
    const Grid2D grid = shared_outcome_grid(noise, rho, delta, profile.outcome_points);
    const HusimiDensity p = husimi(model, rho, grid);
    const double vq = noise.beta_q + delta;
    const double vp = noise.beta_p + 0.25 / delta;
    const double lhs = entropy_integrand_sum(p) + std::log(2.0 * M_PI * std::sqrt(vq * vp)) +
                       (noise.beta_q + 2.0 * delta) / (2.0 * vq) +
                       noise.beta_p / (2.0 * vp);
    const double rhs =
        (4.0 * delta * delta * noise.beta_p - noise.beta_q) / (2.0 * vq * vp) * p2_grad;
    CheckReport r;
    r.name = "log_sobolev";
    r.params = {{"beta_q", noise.beta_q},
                {"beta_p", noise.beta_p},
                {"delta", delta},
                {"p2_gradient", p2_grad},
                {"p2_fourier", p2_spec}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = 1e-5;
    r.pass = r.slack >= -r.tolerance;
    return r;
}

CheckReport check_support_condition(Case tag, const NoiseCovariance& noise, double delta,
                                    const std::vector<std::pair<double, double>>& letters,
                                    const std::vector<WaveFunction>& test_vectors) {
    if (letters.empty() || test_vectors.empty())
        throw std::invalid_argument("check_support_condition: empty inputs");
    if (tag == Case::C && std::abs(delta - model_delta_beta(noise)) > 1e-9)
        throw std::invalid_argument(
            "check_support_condition: case C letters use delta = sqrt(beta_q/beta_p)/2");
    const LagrangeOperator op = lagrange_operator(tag, noise, delta);
    const Grid1D& grid = test_vectors.front().grid;
    const double h = grid.step();
    double worst = 0.0;
    for (const auto& [x, y] : letters) {
        if (tag == Case::L && y != 0.0)
            throw std::invalid_argument(
                "check_support_condition: case L letters are displaced along q only");
        const WaveFunction letter = squeezed_coherent(delta, x, y, grid);
        const WaveFunction k_letter = apply_K_gaussian(noise, delta, x, y, letter);
        // Lambda letter = a letter - b p^2 letter, with p^2 = -d^2/dq^2.
        Eigen::VectorXcd lam = op.constant * letter.amps +
                               op.p2_coeff * fd4_second_derivative(letter.amps, h);
        const Eigen::VectorXcd resid = k_letter.amps - lam;
        for (const auto& phi : test_vectors) {
            if (!(phi.grid == grid))
                throw std::invalid_argument(
                    "check_support_condition: test vectors must share the letter grid");
            worst = std::max(worst, std::abs(phi.amps.dot(resid) * h));
        }
    }
    CheckReport r;
    r.name = "support_condition";
    r.params = {{"beta_q", noise.beta_q},
                {"beta_p", noise.beta_p},
                {"delta", delta},
                {"case", tag == Case::C ? 0.0 : 1.0},
                {"letters", static_cast<double>(letters.size())},
                {"test_vectors", static_cast<double>(test_vectors.size())}};
    r.lhs = worst;
    r.rhs = 0.0;
    r.slack = worst;
    r.tolerance = 1e-5;
    r.pass = worst <= r.tolerance;
    return r;
}

CheckReport check_operator_bound(const WaveFunction& psi, const PureEnsemble& rho,
                                 Case tag, const NoiseCovariance& noise, double delta,
                                 const Profile& profile) {
    const MeasurementModel model = build_model(noise, profile.model_eps);
    // One grid covering both outcome densities.
    const PureEnsemble psi_ens = PureEnsemble::pure(psi);
    const Grid2D ga = default_outcome_grid(noise, psi_ens, profile.outcome_points);
    const Grid2D gb = default_outcome_grid(noise, rho, profile.outcome_points);
    const Grid2D grid{hull_axis(ga.gx, gb.gx, profile.outcome_points),
                      hull_axis(ga.gy, gb.gy, profile.outcome_points)};
    const HusimiDensity pp = husimi(model, psi_ens, grid);
    const HusimiDensity pr = husimi(model, rho, grid);
    const double ce = cross_sum(pp.density, pr.density);
    const double wehrl = -entropy_integrand_sum(pp);
    const LagrangeOperator op = lagrange_operator(tag, noise, delta);
    const double bound = op.constant - op.p2_coeff * pp.p2;
    CheckReport r;
    r.name = "operator_bound";
    r.params = {{"beta_q", noise.beta_q},
                {"beta_p", noise.beta_p},
                {"delta", delta},
                {"case", tag == Case::C ? 0.0 : 1.0},
                {"gibbs_slack", ce - wehrl}};
    r.lhs = bound;
    r.rhs = ce;
    r.slack = ce - bound;
    r.tolerance = 1e-5;
    r.pass = r.slack >= -r.tolerance && (ce - wehrl) >= -1e-8;
    return r;
}

std::vector<LabeledState> versioned_family(const NoiseCovariance& noise, int n_random,
                                           std::uint64_t seed, int position_points) {
    const double db = model_delta_beta(noise);
    std::vector<LabeledState> family;

    auto add_pure = [&](std::string label, bool candidate, WaveFunction psi) {
        family.push_back(LabeledState{std::move(label), candidate,
                                      PureEnsemble::pure(std::move(psi))});
    };

    // Squeeze grid of centered squeezed coherent states, matched scale included.
    std::vector<double> deltas = {db, 0.5 * db, 2.0 * db, 0.5, 0.25};
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 deltas.end());
    for (double d : deltas) {
        const Grid1D grid = state_grid(d, 0, 0.0, position_points);
        add_pure("coherent_delta_" + std::to_string(d), std::abs(d - db) < 1e-12,
                 squeezed_coherent(d, 0.0, 0.0, grid));
    }

    // 9-point displacement lattice at the matched squeeze.
    for (double x : {-1.5, 0.0, 1.5})
        for (double y : {-1.5, 0.0, 1.5}) {
            const Grid1D grid = state_grid(db, 0, std::abs(x), position_points);
            add_pure("displaced_" + std::to_string(x) + "_" + std::to_string(y), true,
                     squeezed_coherent(db, x, y, grid));
        }

    // Fock ladder in two squeeze scales.
    for (double d : {db, 0.5}) {
        for (int n = 0; n <= 10; ++n) {
            const Grid1D grid = state_grid(d, n, 0.0, position_points);
            add_pure("fock_" + std::to_string(n) + "_delta_" + std::to_string(d),
                     n == 0 && std::abs(d - db) < 1e-12, squeezed_fock(n, d, grid));
        }
    }

    // Seeded random superpositions.
    for (int i = 0; i < n_random; ++i) {
        const int dim = 4 + 2 * (i % 4);
        const Grid1D grid = state_grid(0.5, dim - 1, 0.0, position_points);
        add_pure("random_" + std::to_string(i), false,
                 random_state(seed + i, dim, 0.5, grid));
    }
    return family;
}

CheckReport min_wehrl_scan(const NoiseCovariance& noise, int n_trials, std::uint64_t seed,
                           const Profile& profile) {
    if (n_trials < 1) throw std::invalid_argument("min_wehrl_scan: n_trials must be >= 1");
    const MeasurementModel model = build_model(noise, profile.model_eps);
    const auto family = versioned_family(noise, n_trials, seed, profile.position_points);
    double min_all = std::numeric_limits<double>::infinity();
    double min_candidate = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Grid2D grid =
            default_outcome_grid(noise, family[i].state, profile.outcome_points);
        const double h = wehrl_entropy(model, family[i].state, grid);
        if (h < min_all) {
            min_all = h;
            argmin = i;
        }
        if (family[i].minimizer_candidate) min_candidate = std::min(min_candidate, h);
    }
    const double bound = min_wehrl_bound(noise);
    CheckReport r;
    r.name = "wehrl_min";
    r.params = {{"beta_q", noise.beta_q},
                {"beta_p", noise.beta_p},
                {"states", static_cast<double>(family.size())},
                {"argmin_index", static_cast<double>(argmin)},
                {"argmin_is_candidate", family[argmin].minimizer_candidate ? 1.0 : 0.0},
                {"candidate_excess", min_candidate - min_all}};
    r.lhs = min_all;
    r.rhs = bound;
    r.slack = min_all - bound;
    r.tolerance = 1e-4;
    r.pass = r.slack >= -r.tolerance && (min_candidate - min_all) <= 1e-3 &&
             (min_candidate - bound) <= 1e-3;
    return r;
}

namespace {

void run_kl_identity_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    const std::vector<std::pair<double, double>> betas = {
        {0.5, 0.5}, {1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}, {0.5, 8.0}};
    int i = 0;
    for (const auto& [bq, bp] : betas) {
        const NoiseCovariance noise(bq, bp);
        for (double delta : {model_delta_beta(noise), 0.25, 1.0}) {
            PureEnsemble rho = [&] {
                switch (i % 4) {
                    case 0: {
                        const Grid1D g = state_grid(0.4, 0, 1.0, pr.position_points);
                        return PureEnsemble::pure(squeezed_coherent(0.4, 1.0, -0.5, g));
                    }
                    case 1: {
                        const Grid1D g = state_grid(0.5, 5, 0.0, pr.position_points);
                        return PureEnsemble::pure(random_state(cfg.seed + i, 6, 0.5, g));
                    }
                    case 2: {
                        const Grid1D g = state_grid(0.5, 2, 0.0, pr.position_points);
                        return PureEnsemble::pure(squeezed_fock(2, 0.5, g));
                    }
                    default: {
                        const Grid1D g = state_grid(0.5, 7, 0.0, pr.position_points);
                        return PureEnsemble::mixture(
                            {{0.35, random_state(cfg.seed + 7 * i, 8, 0.5, g)},
                             {0.65, random_state(cfg.seed + 7 * i + 1, 6, 0.5, g)}});
                    }
                }
            }();
            out.push_back(check_kl_identity(rho, noise, delta, pr));
            ++i;
        }
    }
}

void run_kl_inequality_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    const std::vector<std::pair<double, double>> betas = {
        {0.5, 0.5}, {1.0, 1.0}, {0.5, 2.0}, {2.0, 1.0}};
    const int n_states = 40;
    for (const auto& [bq, bp] : betas) {
        const NoiseCovariance noise(bq, bp);
        const double db = model_delta_beta(noise);
        for (double factor : {1.0, 1.5, 2.5}) {
            const double delta = db * factor;
            for (int i = 0; i < n_states; ++i) {
                const int dim = 4 + (i % 5);
                const Grid1D g = state_grid(0.5, dim - 1, 0.0, pr.position_points);
                const PureEnsemble rho =
                    PureEnsemble::pure(random_state(cfg.seed + 100 + i, dim, 0.5, g));
                out.push_back(check_kl_inequality(rho, noise, delta, pr));
            }
        }
    }
}

void run_log_sobolev_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    const NoiseCovariance noise(0.5, 2.0);
    const double db = model_delta_beta(noise);
    for (double delta : {db, 0.5, 0.8}) {
        // equality candidate first
        const Grid1D g0 = state_grid(delta, 0, 0.0, pr.position_points);
        out.push_back(check_log_sobolev(squeezed_coherent(delta, 0.0, 0.0, g0), noise,
                                        delta, pr));
        for (int i = 0; i < 85; ++i) {
            const int dim = 3 + (i % 6);
            const Grid1D g = state_grid(0.5, dim - 1, 0.0, pr.position_points);
            out.push_back(check_log_sobolev(
                random_state(cfg.seed + 500 + i, dim, 0.5, g), noise, delta, pr));
        }
    }
}

void run_wehrl_min_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    for (const auto& [bq, bp] : std::vector<std::pair<double, double>>{
             {0.5, 0.5}, {1.0, 1.0}, {0.5, 8.0}, {2.0, 0.5}}) {
        out.push_back(
            min_wehrl_scan(NoiseCovariance(bq, bp), 30, cfg.seed + 900, cfg.profile));
    }
}

void run_support_condition_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    // Case C at symmetric noise.
    {
        const NoiseCovariance noise(0.5, 0.5);
        const double db = model_delta_beta(noise);
        const Grid1D grid = state_grid(db, 10, 2.5, pr.position_points);
        std::vector<WaveFunction> vectors;
        for (int n = 0; n <= 9; ++n) vectors.push_back(squeezed_fock(n, db, grid));
        vectors.push_back(random_state(cfg.seed + 1300, 8, db, grid));
        vectors.push_back(random_state(cfg.seed + 1301, 8, db, grid));
        const std::vector<std::pair<double, double>> letters = {
            {0.0, 0.0}, {1.2, -0.7}, {-2.0, 0.4}, {0.5, 1.5}, {-1.0, -1.0}};
        out.push_back(check_support_condition(Case::C, noise, db, letters, vectors));
    }
    // Case L above the matched squeeze.
    {
        const NoiseCovariance noise(0.5, 8.0);
        for (double delta : {0.125, 0.25, 0.5}) {
            const Grid1D grid = state_grid(delta, 10, 2.5, pr.position_points);
            std::vector<WaveFunction> vectors;
            for (int n = 0; n <= 9; ++n) vectors.push_back(squeezed_fock(n, delta, grid));
            vectors.push_back(random_state(cfg.seed + 1302, 8, delta, grid));
            vectors.push_back(random_state(cfg.seed + 1303, 8, delta, grid));
            const std::vector<std::pair<double, double>> letters = {
                {-2.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}};
            out.push_back(check_support_condition(Case::L, noise, delta, letters, vectors));
        }
    }
}

void run_operator_bound_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    struct Setup {
        Case tag;
        NoiseCovariance noise;
        double delta;
    };
    const std::vector<Setup> setups = {
        {Case::C, NoiseCovariance(0.5, 0.5), 0.5},
        {Case::L, NoiseCovariance(0.5, 2.0), 0.5},
    };
    for (const auto& setup : setups) {
        for (int i = 0; i < 60; ++i) {
            const int dim_psi = 3 + (i % 6);
            const int dim_rho = 2 + (i % 5);
            const Grid1D g = state_grid(0.5, 9, 0.0, pr.position_points);
            const WaveFunction psi =
                random_state(cfg.seed + 1700 + 2 * i, dim_psi, 0.5, g);
            const PureEnsemble rho =
                (i % 3 == 0)
                    ? PureEnsemble::mixture(
                          {{0.5, random_state(cfg.seed + 1800 + i, dim_rho, 0.5, g)},
                           {0.5, random_state(cfg.seed + 1900 + i, dim_rho, 0.5, g)}})
                    : PureEnsemble::pure(
                          random_state(cfg.seed + 1800 + i, dim_rho, 0.5, g));
            out.push_back(
                check_operator_bound(psi, rho, setup.tag, setup.noise, setup.delta, pr));
        }
    }
}

void run_data_processing_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    // Divergence monotonicity under y-smoothing for synthetic Gaussian mixtures.
    std::mt19937_64 rng(cfg.seed + 2100);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    std::uniform_real_distribution<double> vdist(0.5, 2.0);
    const Grid2D grid{Grid1D(0.0, 14.0, 160), Grid1D(0.0, 16.0, 192)};
    auto mixture = [&] {
        const Density2D a =
            gaussian_density(grid, unif(rng), unif(rng), vdist(rng), vdist(rng));
        const Density2D b =
            gaussian_density(grid, unif(rng), unif(rng), vdist(rng), vdist(rng));
        const double w = 0.3 + 0.4 * (unif(rng) + 1.5) / 3.0;
        return Density2D(grid, w * a.values() + (1.0 - w) * b.values());
    };
    for (int i = 0; i < 30; ++i) {
        const Density2D p = mixture();
        const Density2D q = mixture();
        const double t = 0.2 + 0.3 * (i % 3);
        const double before = kl_divergence(p, q);
        const double after = kl_divergence(smooth_y(p, t), smooth_y(q, t));
        CheckReport r;
        r.name = "kl_smoothing_monotone";
        r.params = {{"t", t}, {"index", static_cast<double>(i)}};
        r.lhs = after;
        r.rhs = before;
        r.slack = before - after;
        r.tolerance = 1e-8;
        r.pass = r.slack >= -r.tolerance;
        out.push_back(r);
    }
    // Smoothing identity between outcome densities at two noise levels.
    struct Cfg {
        double bq, delta, bp;
    };
    for (const Cfg& c : std::vector<Cfg>{{1.0, 0.5, 1.5},
                                         {1.0, 0.5, 2.5},
                                         {0.5, 0.4, 1.3},
                                         {2.0, 1.0, 1.0},
                                         {0.5, 0.25, 4.0}}) {
        const double bp_tilde = c.bq / (4.0 * c.delta * c.delta);
        const NoiseCovariance low(c.bq, bp_tilde);
        const NoiseCovariance high(c.bq, c.bp);
        const Grid1D g = state_grid(0.5, 5, 0.0, pr.position_points);
        const PureEnsemble rho =
            PureEnsemble::pure(random_state(cfg.seed + 2200, 6, 0.5, g));
        const Grid2D grid2 = default_outcome_grid(high, rho, pr.outcome_points);
        const HusimiDensity p_low = husimi(build_model(low, pr.model_eps), rho, grid2);
        const HusimiDensity p_high = husimi(build_model(high, pr.model_eps), rho, grid2);
        const Density2D smeared = smooth_y(p_low.density, c.bp - bp_tilde);
        const double sup =
            (smeared.values() - p_high.density.values()).abs().maxCoeff();
        CheckReport r;
        r.name = "smoothing_identity";
        r.params = {{"beta_q", c.bq}, {"delta", c.delta}, {"beta_p", c.bp}};
        r.lhs = sup;
        r.rhs = 0.0;
        r.slack = sup;
        r.tolerance = 1e-5;
        r.pass = sup <= r.tolerance;
        out.push_back(r);
    }
}

void run_moment_identities_group(const BatteryConfig& cfg, std::vector<CheckReport>& out) {
    const auto& pr = cfg.profile;
    const std::vector<std::pair<double, double>> betas = {{0.5, 0.5}, {1.0, 2.0}, {2.0, 0.5}};
    for (int i = 0; i < 50; ++i) {
        const NoiseCovariance noise(betas[i % betas.size()].first,
                                    betas[i % betas.size()].second);
        const MeasurementModel model = build_model(noise, pr.model_eps);
        const int dim = 3 + (i % 7);
        const Grid1D g = state_grid(0.5, dim - 1, 0.0, pr.position_points);
        const PureEnsemble rho =
            PureEnsemble::pure(random_state(cfg.seed + 2400 + i, dim, 0.5, g));
        const Grid2D grid = default_outcome_grid(noise, rho, pr.outcome_points);
        const HusimiDensity p = husimi(model, rho, grid);
        const Eigen::ArrayXd wx = grid.gx.quad_weights();
        const Eigen::ArrayXd wy = grid.gy.quad_weights();
        const Eigen::ArrayXd xs = grid.gx.coords();
        const Eigen::ArrayXd ys = grid.gy.coords();
        const Eigen::ArrayXXd& v = p.density.values();
        const double mx2 =
            ((wx * xs.square()).matrix().transpose() * v.matrix() * wy.matrix())(0);
        const double my2 =
            (wx.matrix().transpose() * v.matrix() * (wy * ys.square()).matrix())(0);
        const double ref_x = p.q2 + noise.beta_q;
        const double ref_y = p.p2 + noise.beta_p;
        {
            CheckReport r;
            r.name = "outcome_mass";
            r.params = {{"index", static_cast<double>(i)}};
            r.lhs = p.density.mass();
            r.rhs = 1.0;
            r.slack = p.density.mass() - 1.0;
            r.tolerance = 1e-5;
            r.pass = std::abs(r.slack) <= r.tolerance;
            out.push_back(r);
        }
        {
            CheckReport r;
            r.name = "outcome_moments";
            r.params = {{"index", static_cast<double>(i)},
                        {"x2", mx2},
                        {"y2", my2},
                        {"x2_ref", ref_x},
                        {"y2_ref", ref_y}};
            const double rel =
                std::max(std::abs(mx2 - ref_x) / ref_x, std::abs(my2 - ref_y) / ref_y);
            r.lhs = rel;
            r.rhs = 0.0;
            r.slack = rel;
            r.tolerance = 1e-4;
            r.pass = rel <= r.tolerance;
            out.push_back(r);
        }
    }
}

} // namespace

const std::vector<std::string>& battery_groups() {
    static const std::vector<std::string> groups = {
        "kl_identity",   "kl_inequality",     "log_sobolev",
        "wehrl_min",     "support_condition", "operator_bound",
        "data_processing", "moment_identities"};
    return groups;
}

std::vector<CheckReport> run_battery(const BatteryConfig& config) {
    std::vector<std::string> selected = config.groups;
    if (selected.empty()) selected = battery_groups();
    for (const auto& g : selected) {
        if (std::find(battery_groups().begin(), battery_groups().end(), g) ==
            battery_groups().end())
            throw std::invalid_argument("run_battery: unknown group '" + g + "'");
    }
    std::vector<CheckReport> out;
    for (const auto& g : selected) {
        if (g == "kl_identity") run_kl_identity_group(config, out);
        else if (g == "kl_inequality") run_kl_inequality_group(config, out);
        else if (g == "log_sobolev") run_log_sobolev_group(config, out);
        else if (g == "wehrl_min") run_wehrl_min_group(config, out);
        else if (g == "support_condition") run_support_condition_group(config, out);
        else if (g == "operator_bound") run_operator_bound_group(config, out);
        else if (g == "data_processing") run_data_processing_group(config, out);
        else if (g == "moment_identities") run_moment_identities_group(config, out);
    }
    return out;
}

} // namespace hetcap
