#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotstar/basis.hpp"
#include "rotstar/radial.hpp"

namespace rotstar {

struct FamilyOptions {
    GridSpec grid;
    BasisSpec basis;
    ScfOptions scf;
    int jobs = 1;
    int grid_retries = 3;  // enlarge the box by 25% on ResolutionError
};

struct FamilyRecord {
    double mu = 0, M = 0, dMdmu = 0, R0 = 0, Z0 = 0;
    int n_u = -1;
    double min_eigen_K = 0;
    std::string verdict;  // spectrally_stable | unstable | failed
    std::string error;
    bool ok() const { return n_u >= 0; }
};

struct Transition {
    int bracket = 0;  // n_u changes between grid points bracket and bracket+1
    int from = 0, to = 0;
};

struct FamilyScanResult {
    std::string kind;  // fixed_omega | fixed_j
    double parameter = 0;  // kappa or eps
    std::vector<FamilyRecord> records;
    std::vector<Extremum> extrema;
    std::vector<Transition> transitions;
    std::optional<double> mu_star, mu_hat;  // first mass extremum, first grid point past the first transition
    std::string tpp_verdict;
    bool tpp_holds = false;
    bool partial = false;
    // Fixed-omega: extra solve at the interpolated first maximum.
    std::optional<double> min_eigen_K_at_mu_star;
    std::optional<int> n_u_at_mu_star;
    std::vector<std::string> notes;
};

FamilyScanResult scan_fixed_omega(const EquationOfState& eos, const AngularVelocityLaw& law, double kappa,
                                  const std::vector<double>& mu_grid, const FamilyOptions& opt = {});
FamilyScanResult scan_fixed_j(const EquationOfState& eos, const MomentumDistribution& j, double eps,
                              const std::vector<double>& mu_grid, const FamilyOptions& opt = {});

// Extrema of M from sign changes of the 3-point smoothed dM/dmu, n_u transitions
// and the turning-point verdict; used by both scans.
void classify_family(FamilyScanResult& res);

// Largest candidate rotation parameter for which both endpoints converge and
// max |rho_rot - rho_static| < frac * mu.
struct Prescan {
    double value = 0;
    std::vector<std::pair<double, std::string>> tried;  // candidate, outcome
};
Prescan prescan_rotation(const EquationOfState& eos, const Rotation& unit_rotation,
                         const std::vector<double>& candidates, double mu_lo, double mu_hi,
                         const FamilyOptions& opt = {}, double frac = 0.05);

std::vector<double> log_grid(double lo, double hi, int n);

struct BB1974Config {
    double gamma = 4.03 / 3.03;
    double eps = 0.0;  // 0: chosen by the preset table
    double mu_lo = 0.1, mu_hi = 100;
    int n_mu = 25;
    FamilyOptions opt = default_options();
    // Near gamma = 4/3 the core holds most of the mass in a few percent of the radius.
    static FamilyOptions default_options() {
        FamilyOptions o;
        o.grid.nr = o.grid.nz = 192;
        return o;
    }
};
FamilyScanResult bb1974_example(const BB1974Config& cfg = {});

std::string family_csv(const FamilyScanResult& r);
std::string family_plot_csv(const FamilyScanResult& r);
nlohmann::ordered_json family_summary(const FamilyScanResult& r);

}  // namespace rotstar
