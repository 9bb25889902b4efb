#pragma once

#include "hetcap/capacity.hpp"
#include "hetcap/measurement.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hetcap {

/// Outcome of one numerical certification. For identity checks pass means
/// |slack| <= tolerance; for inequality checks pass means slack >= -tolerance.
struct CheckReport {
    std::string name;
    std::map<std::string, double> params;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

nlohmann::json to_json(const CheckReport& r);
std::string to_jsonl(const std::vector<CheckReport>& reports);

/// Grid sizes and truncation used by the check battery. `fast` drives the
/// default tolerances; `strict` doubles down for acceptance runs.
struct Profile {
    std::string name;
    int outcome_points;  // outcome grid, per axis
    int position_points; // wavefunction grids
    double model_eps;    // kernel truncation tail

    static Profile fast() { return {"fast", 128, 1024, 1e-8}; }
    static Profile strict() { return {"strict", 512, 1024, 1e-10}; }
    static Profile named(const std::string& name);
};

/// Outcome grid covering both the state's density and the centered
/// squeezed-letter density at squeeze delta.
Grid2D shared_outcome_grid(const NoiseCovariance& noise, const PureEnsemble& rho,
                           double delta, int points_per_axis);

/// Identity between the divergence of a state's outcome density from the
/// centered letter density and its entropy/moment expression; residual
/// passes at 1e-5.
CheckReport check_kl_identity(const PureEnsemble& rho, const NoiseCovariance& noise,
                              double delta, const Profile& profile);

/// Divergence bound h(p_rho || p_letter) <= (q2 + 4 d^2 p2 - 2 d)/(2(bq+d))
/// for delta >= sqrt(beta_q/beta_p)/2; slack passes at -1e-5.
CheckReport check_kl_inequality(const PureEnsemble& rho, const NoiseCovariance& noise,
                                double delta, const Profile& profile);

/// Pure-state form of the divergence bound with the right side computed from
/// the gradient integral of the wavefunction; the gradient and Fourier
/// moment routes must agree to 1e-5 relative.
CheckReport check_log_sobolev(const WaveFunction& psi, const NoiseCovariance& noise,
                              double delta, const Profile& profile);

/// Support condition of the optimal encoding: (K - Lambda) annihilates every
/// letter state; residual over test vectors passes at 1e-5.
CheckReport check_support_condition(Case tag, const NoiseCovariance& noise, double delta,
                                    const std::vector<std::pair<double, double>>& letters,
                                    const std::vector<WaveFunction>& test_vectors);

/// Operator lower bound of the optimal encoding: <psi|Lambda|psi> <=
/// <psi|K(rho)|psi> for arbitrary (psi, rho); also reports the intermediate
/// Gibbs slack cross_entropy - wehrl_entropy >= 0.
CheckReport check_operator_bound(const WaveFunction& psi, const PureEnsemble& rho,
                                 Case tag, const NoiseCovariance& noise, double delta,
                                 const Profile& profile);

/// Scan of the output entropy over the versioned state family; the minimum
/// must sit on the bound (to 1e-4) and be attained by the matched squeezed
/// coherent states (to 1e-3).
CheckReport min_wehrl_scan(const NoiseCovariance& noise, int n_trials, std::uint64_t seed,
                           const Profile& profile);

/// A state family member used by scans and sweeps.
struct LabeledState {
    std::string label;
    bool minimizer_candidate; // squeezed coherent at the matched squeeze
    PureEnsemble state;
};

/// Versioned scan family: Fock 0..10 in two squeeze scales, n_random seeded
/// superpositions, a 9-point displacement lattice and a squeeze grid at the
/// matched scale.
std::vector<LabeledState> versioned_family(const NoiseCovariance& noise, int n_random,
                                           std::uint64_t seed, int position_points);

struct BatteryConfig {
    Profile profile = Profile::fast();
    std::uint64_t seed = 1234;
    std::vector<std::string> groups; // empty = all
};

/// All battery group names, in run order.
const std::vector<std::string>& battery_groups();

/// Runs the selected check groups and returns every report in a fixed order.
std::vector<CheckReport> run_battery(const BatteryConfig& config);

} // namespace hetcap
