#include "rotstar/families.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rotstar/errors.hpp"
#include "rotstar/parallel.hpp"
#include "rotstar/stability.hpp"

namespace rotstar {

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

namespace {

constexpr double bb_default_eps = 1.5;

AxiStar solve_member(const EquationOfState& eos, const Rotation& rot, double mu, const FamilyOptions& opt) {
    GridSpec gs = opt.grid;
    for (int attempt = 0;; ++attempt) {
        try {
            return solve_equilibrium(eos, rot, mu, make_grid(eos, mu, gs), opt.scf);
        } catch (const ResolutionError&) {
            if (attempt >= opt.grid_retries) throw;
            gs.r_factor *= 1.25;
            gs.z_factor *= 1.25;
        }
    }
}

FamilyRecord analyze_member(const EquationOfState& eos, const Rotation& rot, double mu, const FamilyOptions& opt) {
    FamilyRecord rec;
    rec.mu = mu;
    try {
        const AxiStar st = solve_member(eos, rot, mu, opt);
        const MuDerivative md = mu_derivative(st, 1e-3, opt.scf);
        const StabilityReport rep = analyze_stability(st, opt.basis, &md);
        rec.M = st.M;
        rec.dMdmu = md.dM;
        rec.R0 = st.R0;
        rec.Z0 = st.Z0;
        rec.n_u = rep.n_minus_K_constrained;
        rec.min_eigen_K = rep.min_eigen_K_constrained;
        rec.verdict = rep.verdict;
    } catch (const std::exception& e) {
        rec.n_u = -1;
        rec.verdict = "failed";
        rec.error = e.what();
    }
    return rec;
}

FamilyScanResult run_scan(const EquationOfState& eos, const Rotation& rot, const std::vector<double>& mu_grid,
                          const FamilyOptions& opt) {
    if (mu_grid.size() < 3) throw DomainError("family scan: need at least 3 mu values");
    for (size_t i = 1; i < mu_grid.size(); ++i)
        if (!(mu_grid[i] > mu_grid[i - 1])) throw DomainError("family scan: mu grid must be increasing");
    FamilyScanResult res;
    res.records.resize(mu_grid.size());
    parallel_for(static_cast<int>(mu_grid.size()), opt.jobs,
                 [&](int i) { res.records[i] = analyze_member(eos, rot, mu_grid[i], opt); });
    classify_family(res);
    return res;
}

}  // namespace

void classify_family(FamilyScanResult& res) {
    std::vector<int> ok;
    for (int i = 0; i < static_cast<int>(res.records.size()); ++i)
        if (res.records[i].ok()) ok.push_back(i);
    res.partial = ok.size() != res.records.size();
    res.extrema.clear();
    res.transitions.clear();
    res.mu_star.reset();
    res.mu_hat.reset();
    const int n = static_cast<int>(ok.size());
    if (n < 2) {
        res.tpp_verdict = "undetermined";
        res.notes.push_back("fewer than two successful members");
        return;
    }
    // dM/dlog(mu), smoothed with weights (1, 2, 1).
    std::vector<double> d(n), s(n);
    for (int k = 0; k < n; ++k) d[k] = res.records[ok[k]].dMdmu * res.records[ok[k]].mu;
    for (int k = 0; k < n; ++k) {
        if (k == 0) s[k] = (2 * d[0] + d[1]) / 3;
        else if (k == n - 1) s[k] = (d[n - 2] + 2 * d[n - 1]) / 3;
        else s[k] = (d[k - 1] + 2 * d[k] + d[k + 1]) / 4;
    }
    for (int k = 0; k + 1 < n; ++k) {
        if (!(s[k] * s[k + 1] < 0)) continue;
        Extremum e;
        e.is_max = s[k] > 0;
        e.bracket = ok[k];
        const double m0 = res.records[ok[k]].mu, m1 = res.records[ok[k + 1]].mu;
        // Raw derivative locates the zero when it changes sign in the same bracket.
        const bool raw = d[k] * d[k + 1] < 0;
        const double a = raw ? d[k] : s[k], b = raw ? d[k + 1] : s[k + 1];
        e.mu = m0 + (m1 - m0) * a / (a - b);
        res.extrema.push_back(e);
    }
    for (int k = 0; k + 1 < n; ++k) {
        const int a = res.records[ok[k]].n_u, b = res.records[ok[k + 1]].n_u;
        if (a != b) res.transitions.push_back({ok[k], a, b});
    }
    if (!res.extrema.empty()) res.mu_star = res.extrema.front().mu;
    if (!res.transitions.empty()) res.mu_hat = res.records[res.transitions.front().bracket + 1].mu;

    auto near = [](int a, int b) { return std::abs(a - b) <= 1; };
    bool holds = true;
    for (const auto& t : res.transitions) {
        bool hit = false;
        for (const auto& e : res.extrema) hit = hit || near(t.bracket, e.bracket);
        if (!hit) holds = false;
    }
    for (const auto& e : res.extrema) {
        bool hit = false;
        for (const auto& t : res.transitions) hit = hit || near(t.bracket, e.bracket);
        if (!hit) holds = false;
    }
    // Sign rule at every member; only numerically flat points are exempt.
    for (int k = 0; k < n; ++k) {
        const FamilyRecord& r = res.records[ok[k]];
        if (std::abs(r.dMdmu * r.mu) < 1e-6 * r.M) continue;
        if (r.n_u != (r.dMdmu < 0 ? 1 : 0)) holds = false;
    }
    res.tpp_holds = holds;
    if (holds) {
        res.tpp_verdict = "TPP-holds";
    } else {
        char buf[160];
        std::snprintf(buf, sizeof buf, "TPP-fails(mu_hat=%s vs mu_star=%s)",
                      res.mu_hat ? std::to_string(*res.mu_hat).c_str() : "none",
                      res.mu_star ? std::to_string(*res.mu_star).c_str() : "none");
        res.tpp_verdict = buf;
    }
    if (res.partial) res.tpp_verdict += " (partial)";
}

FamilyScanResult scan_fixed_omega(const EquationOfState& eos, const AngularVelocityLaw& law, double kappa,
                                  const std::vector<double>& mu_grid, const FamilyOptions& opt) {
    const Rotation rot = Rotation::fixed_omega(law, kappa);
    FamilyScanResult res = run_scan(eos, rot, mu_grid, opt);
    res.kind = "fixed_omega";
    res.parameter = kappa;
    if (!res.extrema.empty() && res.extrema.front().is_max) {
        const FamilyRecord r = analyze_member(eos, rot, *res.mu_star, opt);
        if (r.ok()) {
            res.min_eigen_K_at_mu_star = r.min_eigen_K;
            res.n_u_at_mu_star = r.n_u;
        } else {
            res.notes.push_back("solve at mu_star failed: " + r.error);
        }
    }
    return res;
}

FamilyScanResult scan_fixed_j(const EquationOfState& eos, const MomentumDistribution& j, double eps,
                              const std::vector<double>& mu_grid, const FamilyOptions& opt) {
    if (eps != 0) {
        j.check_smooth(1.0);
        if (!j.rayleigh_stable_on(1.0)) throw PreconditionError("scan_fixed_j: d_p(j^2) must be positive");
    }
    FamilyScanResult res = run_scan(eos, Rotation::fixed_j(j, eps), mu_grid, opt);
    res.kind = "fixed_j";
    res.parameter = eps;
    return res;
}

Prescan prescan_rotation(const EquationOfState& eos, const Rotation& unit_rotation,
                         const std::vector<double>& candidates, double mu_lo, double mu_hi,
                         const FamilyOptions& opt, double frac) {
    std::vector<double> c = candidates;
    std::sort(c.begin(), c.end(), std::greater<>());
    Prescan out;
    for (double v : c) {
        Rotation rot = unit_rotation;
        if (rot.kind == RotationKind::fixed_omega) rot.kappa = v;
        else rot.eps = v;
        std::string outcome = "ok";
        for (double mu : {mu_lo, mu_hi}) {
            try {
                const auto grid = make_grid(eos, mu, opt.grid);
                const AxiStar s0 = solve_equilibrium(eos, Rotation::none(), mu, grid, opt.scf);
                const AxiStar s1 = solve_equilibrium(eos, rot, mu, grid, opt.scf);
                const double dev = (s1.rho - s0.rho).cwiseAbs().maxCoeff();
                if (!(dev < frac * mu)) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "density change %.3g mu at mu=%g", dev / mu, mu);
                    outcome = buf;
                }
            } catch (const std::exception& e) {
                outcome = std::string("mu=") + std::to_string(mu) + ": " + e.what();
            }
            if (outcome != "ok") break;
        }
        out.tried.emplace_back(v, outcome);
        if (outcome == "ok") {
            out.value = v;
            return out;
        }
    }
    throw SolverError("prescan: no candidate rotation parameter passed");
}

FamilyScanResult bb1974_example(const BB1974Config& cfg) {
    const EquationOfState eos = EquationOfState::polytrope(1.0, cfg.gamma);
    const double eps = cfg.eps > 0 ? cfg.eps : bb_default_eps;
    FamilyScanResult res = scan_fixed_j(eos, MomentumDistribution::bb(), eps, log_grid(cfg.mu_lo, cfg.mu_hi, cfg.n_mu), cfg.opt);
    bool has_min = false;
    for (const auto& e : res.extrema) has_min = has_min || !e.is_max;
    if (!has_min)
        res.notes.push_back("no mass minimum bracketed by the mu grid; extend mu_lo/mu_hi or change eps");
    return res;
}

std::string family_csv(const FamilyScanResult& r) {
    std::ostringstream os;
    os << "mu,M,dMdmu,n_u,verdict\n";
    char buf[256];
    for (const auto& x : r.records) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d,%s\n", x.mu, x.M, x.dMdmu, x.n_u, x.verdict.c_str());
        os << buf;
    }
    return os.str();
}

std::string family_plot_csv(const FamilyScanResult& r) {
    std::ostringstream os;
    os << "mu,M\n";
    char buf[96];
    for (const auto& x : r.records) {
        if (!x.ok()) continue;
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", x.mu, x.M);
        os << buf;
    }
    return os.str();
}

nlohmann::ordered_json family_summary(const FamilyScanResult& r) {
    nlohmann::ordered_json j;
    j["kind"] = r.kind;
    j["parameter"] = r.parameter;
    j["mu_star"] = r.mu_star ? nlohmann::ordered_json(*r.mu_star) : nlohmann::ordered_json(nullptr);
    j["mu_hat"] = r.mu_hat ? nlohmann::ordered_json(*r.mu_hat) : nlohmann::ordered_json(nullptr);
    j["tpp_verdict"] = r.tpp_holds ? "TPP-holds" : "TPP-fails";
    j["tpp_detail"] = r.tpp_verdict;
    j["partial"] = r.partial;
    auto& ex = j["extrema"] = nlohmann::ordered_json::array();
    for (const auto& e : r.extrema) ex.push_back({{"mu", e.mu}, {"type", e.is_max ? "max" : "min"}, {"bracket", e.bracket}});
    auto& tr = j["transitions"] = nlohmann::ordered_json::array();
    for (const auto& t : r.transitions)
        tr.push_back({{"mu_left", r.records[t.bracket].mu}, {"mu_right", r.records[t.bracket + 1].mu}, {"from", t.from}, {"to", t.to}});
    if (r.min_eigen_K_at_mu_star) j["min_eigen_K_at_mu_star"] = *r.min_eigen_K_at_mu_star;
    if (r.n_u_at_mu_star) j["n_u_at_mu_star"] = *r.n_u_at_mu_star;
    auto& fl = j["failures"] = nlohmann::ordered_json::array();
    for (const auto& x : r.records)
        if (!x.ok()) fl.push_back({{"mu", x.mu}, {"error", x.error}});
    j["notes"] = r.notes;
    return j;
}

}  // namespace rotstar
