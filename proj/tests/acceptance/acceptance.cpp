// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rotstar/families.hpp"
#include "rotstar/generator.hpp"
#include "rotstar/spectral.hpp"
#include "rotstar/stability.hpp"

using namespace rotstar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

GridSpec grid(int n) {
    GridSpec g;
    g.nr = g.nz = n;
    return g;
}

EquationOfState asymptotic_eos() {
    EosParams p;
    p.kind = EosKind::asymptotic;
    return EquationOfState(p);
}

Outcome radial_oracle() {
    const auto e2 = EquationOfState::polytrope(1.0, 2.0);
    const double mu = 1.0;
    const RadialStar s = solve_radial(e2, mu);
    const double k = std::sqrt(2 * M_PI);  // Phi' = 2 rho, so Laplace(rho) = -2 pi rho
    double err = 0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = s.R * i / 2000.0;
        const double ex = r > 0 ? mu * std::sin(k * r) / (k * r) : mu;
        err = std::max(err, std::abs(s.rho_at(r) - ex) / mu);
    }
    const auto e53 = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const double ratio = solve_radial(e53, 2.0).M / solve_radial(e53, 1.0).M;
    const double rel = std::abs(ratio / std::sqrt(2.0) - 1);
    return {err < 1e-4 && rel < 5e-3,
            fmt("gamma=2 max|rho-sin(kr)/kr|/mu=%.2e (<1e-4), R=%.6f vs pi/k=%.6f; M(2mu)/M(mu)/sqrt2-1=%.2e (<5e-3)",
                err, s.R, M_PI / k, rel)};
}

Outcome operator_equivalence() {
    std::string d;
    bool ok = true;
    for (double gam : {5.0 / 3.0, 1.5, 1.3, 1.25}) {
        const auto eos = EquationOfState::polytrope(1.0, gam);
        const AxiStar st = solve_equilibrium(eos, Rotation::none(), 1.0, make_grid(eos, 1.0, grid(96)));
        const StabilityReport rep = analyze_stability(st);
        const RadialStar rs = solve_radial(eos, 1.0);
        const ReducedD De = assemble_reduced_D(rs, DMesh{}, Parity::even);
        const ReducedD Do = assemble_reduced_D(rs, DMesh{}, Parity::odd);
        const int nD = De.form.inertia.neg + Do.adjusted.inertia.neg;
        ok = ok && nD == rep.n_minus_L;
        d += fmt("gamma=%.3f n-(L)=%d n-(D)=%d; ", gam, rep.n_minus_L, nD);
    }
    return {ok, d};
}

Outcome nonrotating_verdicts() {
    const auto e53 = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const auto e13 = EquationOfState::polytrope(1.0, 1.3);
    const StabilityReport a = analyze_stability(solve_equilibrium(e53, Rotation::none(), 1.0, make_grid(e53, 1.0, grid(96))));
    const StabilityReport b = analyze_stability(solve_equilibrium(e13, Rotation::none(), 1.0, make_grid(e13, 1.0, grid(96))));
    const double corr = std::min(a.translation_correlation, b.translation_correlation);
    return {a.n_minus_K_constrained == 0 && b.n_minus_K_constrained >= 1 && corr > 0.99,
            fmt("gamma=5/3 n-(K|mass0)=%d (want 0), gamma=1.3 n-(K|mass0)=%d (want >=1), odd kernel correlation %.6f (>0.99)",
                a.n_minus_K_constrained, b.n_minus_K_constrained, corr)};
}

Outcome turning_identity() {
    std::string d;
    bool ok = true;
    for (double gam : {5.0 / 3.0, 1.5, 1.3}) {
        const TurningIdentity t = radial_turning_identity(EquationOfState::polytrope(1.0, gam), 1.0);
        const double rel = std::abs(t.form - t.rhs()) / std::abs(t.rhs());
        ok = ok && rel < 0.05;
        d += fmt("gamma=%.3f <L r',r'>=%.6e dV*dM=%.6e rel=%.1e; ", gam, t.form, t.rhs(), rel);
    }
    return {ok, d};
}

Outcome reduced_identity() {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.3, 1.0);
    const MuDerivative md = mu_derivative(st);
    const PerturbationBasis b = make_basis(st, Parity::even, {}, &md.dH);
    const QuadraticFormMatrix L = assemble_L(st, b), K = assemble_K(st, b);
    const MatrixXd Z = null_space_of_row(b.mass / b.mass.cwiseAbs().maxCoeff());
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        VectorXd y(Z.cols());
        for (auto& v : y) v = nd(rng);
        const VectorXd c = Z * y;
        const ThetaLift lift = u_theta_lift(st, b, c);
        const double kq = c.dot(K.Q * c), lq = c.dot(L.Q * c);
        worst = std::max(worst, std::abs(kq - lq - lift.a1_value) / std::max(std::abs(kq), std::abs(lq)));
    }
    return {worst < 1e-8, fmt("rigid kappa=0.3 gamma=5/3, 50 random mass-zero perturbations: max rel defect %.2e (<1e-8)", worst)};
}

Outcome generator_cross_check() {
    struct Cfg {
        std::string name;
        EquationOfState eos;
        Rotation rot;
        double mu;
    };
    const std::vector<Cfg> cfgs = {
        {"gamma=5/3 rigid k=0.2", EquationOfState::polytrope(1.0, 5.0 / 3.0), Rotation::fixed_omega(AngularVelocityLaw::rigid(1.0), 0.2), 1.0},
        {"gamma=1.3 rigid k=0.05", EquationOfState::polytrope(1.0, 1.3), Rotation::fixed_omega(AngularVelocityLaw::rigid(1.0), 0.05), 1.0},
        {"asymptotic eos fixed-j eps=2 mu=60", asymptotic_eos(), Rotation::fixed_j(MomentumDistribution::bb(), 2.0), 60.0},
    };
    bool ok = true;
    std::string d;
    for (const auto& c : cfgs) {
        for (int n : {64, 96}) {
            const AxiStar st = solve_equilibrium(c.eos, c.rot, c.mu, make_grid(c.eos, c.mu, grid(n)));
            const StabilityReport rep = analyze_stability(st);
            int count = 0;
            double quad = 0;
            for (Parity p : {Parity::even, Parity::odd}) {
                const GeneratorSpectrum gs = generator_spectrum(assemble_generator(st, p));
                count += gs.unstable_count;
                quad = std::max(quad, gs.quadruple_defect);
            }
            ok = ok && count == rep.n_minus_K_constrained && quad < 1e-6;
            d += fmt("[%s n=%d: JL %d vs K %d, quad %.1e] ", c.name.c_str(), n, count, rep.n_minus_K_constrained, quad);
        }
    }
    return {ok, d};
}

Outcome tpp_fixed_j() {
    const auto eos = asymptotic_eos();
    FamilyOptions opt;
    const std::vector<double> mus = log_grid(3, 200, 20);
    const Prescan ps = prescan_rotation(eos, Rotation::fixed_j(MomentumDistribution::bb(), 1.0),
                                        {2.0, 1.5, 1.0, 0.7, 0.5}, mus.front(), mus.back(), opt);
    const FamilyScanResult r = scan_fixed_j(eos, MomentumDistribution::bb(), ps.value, mus, opt);
    int mism = 0;
    for (const auto& x : r.records)
        if (!x.ok() || x.n_u != (x.dMdmu < 0 ? 1 : 0)) ++mism;
    bool near = !r.extrema.empty();
    for (const auto& t : r.transitions) {
        bool hit = false;
        for (const auto& e : r.extrema) hit = hit || std::abs(t.bracket - e.bracket) <= 1;
        near = near && hit;
    }
    return {r.tpp_holds && mism == 0 && near && !r.partial,
            fmt("eps=%g (prescan), %zu members, %zu extrema, %zu transitions, sign-rule mismatches %d, mu*=%.4g mu_hat=%.4g: %s",
                ps.value, r.records.size(), r.extrema.size(), r.transitions.size(), mism, r.mu_star.value_or(NAN),
                r.mu_hat.value_or(NAN), r.tpp_verdict.c_str())};
}

Outcome tpp_fixed_omega() {
    const auto eos = asymptotic_eos();
    FamilyOptions opt;
    const std::vector<double> mus = log_grid(3, 200, 20);
    const Prescan ps = prescan_rotation(eos, Rotation::fixed_omega(AngularVelocityLaw::rigid(1.0), 1.0),
                                        {2.0, 1.5, 1.0, 0.7, 0.5, 0.3}, mus.front(), mus.back(), opt);
    const FamilyScanResult r = scan_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), ps.value, mus, opt);
    if (!r.mu_star || !r.mu_hat || !r.min_eigen_K_at_mu_star)
        return {false, "scan did not locate both mu_star and mu_hat: " + r.tpp_verdict};
    const int b = r.extrema.front().bracket;
    const double step = r.records[b + 1].mu - r.records[b].mu;
    const double gap = *r.mu_hat - *r.mu_star;
    return {!r.tpp_holds && gap >= step && *r.min_eigen_K_at_mu_star > 0 && r.n_u_at_mu_star == 0,
            fmt("kappa=%g (prescan): mu*=%.4g mu_hat=%.4g gap=%.3g local step=%.3g; smallest constrained K eigenvalue at mu* %.3e, n_u(mu*)=%d; %s",
                ps.value, *r.mu_star, *r.mu_hat, gap, step, *r.min_eigen_K_at_mu_star, r.n_u_at_mu_star.value_or(-1),
                r.tpp_verdict.c_str())};
}

Outcome bb1974() {
    const FamilyScanResult r = bb1974_example();
    std::optional<Extremum> mn;
    for (const auto& e : r.extrema)
        if (!e.is_max && !mn) mn = e;
    if (!mn || r.partial) return {false, "no mass minimum or failed members: " + r.tpp_verdict};
    bool flip = true;
    for (const auto& x : r.records) flip = flip && x.n_u == (x.mu < mn->mu ? 1 : 0);
    // Grid minimum of M and the discrete second difference there.
    int k = 0;
    for (int i = 1; i < static_cast<int>(r.records.size()); ++i)
        if (r.records[i].M < r.records[k].M) k = i;
    const bool interior = k > 0 && k + 1 < static_cast<int>(r.records.size());
    double d2 = 0;
    bool shape = interior;
    if (interior) {
        const auto &a = r.records[k - 1], &b = r.records[k], &c = r.records[k + 1];
        d2 = ((c.M - b.M) / (c.mu - b.mu) - (b.M - a.M) / (b.mu - a.mu)) / (0.5 * (c.mu - a.mu));
        for (int i = 1; i <= k; ++i) shape = shape && r.records[i].M < r.records[i - 1].M;
        for (int i = k + 1; i < static_cast<int>(r.records.size()); ++i) shape = shape && r.records[i].M > r.records[i - 1].M;
    }
    return {flip && shape && d2 > 0,
            fmt("gamma=4.03/3.03, eps=%g: mass minimum mu*=%.4g (grid min at mu=%.4g, second difference %.3e), n_u 1 below / 0 above: %s; M decreasing then increasing: %s",
                r.parameter, mn->mu, r.records[k].mu, d2, flip ? "yes" : "no", shape ? "yes" : "no")};
}


const AxiStar& rayleigh_unstable_star() {
    static const AxiStar st = [] {
        const auto eos = EquationOfState::polytrope(1.0, 1.3);
        const double R = solve_radial(eos, 1.0).R;
        return solve_fixed_omega(eos, AngularVelocityLaw::power_tail(1.0, 0.4 * R, 2.0), 0.05, 1.0, grid(96));
    }();
    return st;
}

Outcome rayleigh_spectrum() {
    const AxiStar& st = rayleigh_unstable_star();
    SpectralSpec spec;
    spec.levels = {{1, 8, 4}, {2, 16, 8}, {3, 24, 10}};
    const SpectrumReport rep = spectrum(st, spec);
    bool halving = true, counts = true, inside = true;
    std::string dl;
    for (size_t l = 0; l < rep.levels.size(); ++l) {
        const auto& L = rep.levels[l];
        inside = inside && L.inside_fraction >= 0.9;
        if (l > 0) {
            halving = halving && L.delta <= 0.5 * rep.levels[l - 1].delta + 1e-12 * rep.b;
            counts = counts && L.below == rep.levels[l - 1].below;
        }
        dl += fmt("[dim %d: delta %.3g, in [-a,b] %.3f, below %d] ", L.dim, L.delta, L.inside_fraction, L.below);
    }
    const double tol = 1e-3 * rep.a;
    return {inside && halving && counts && rep.eta0 <= -rep.a + tol && !rep.ambiguous,
            fmt("a=%.4g b=%.4g eta0=%.6g; ", rep.a, rep.b, rep.eta0) + dl};
}

Outcome growth_rates() {
    const AxiStar& st = rayleigh_unstable_star();
    const SecondOrderSystem sys = second_order_system(assemble_Ltilde(st, spectral_basis(st, Parity::even, {2, 16, 8})));
    const double eta0 = sys.lambda(0);
    if (!(eta0 < 0)) return {false, "no negative eigenvalue"};
    const double s = std::sqrt(-eta0);
    const double T = 20 / s;
    const VectorXd u0 = sys.U.col(0);
    const SecondOrderTrajectory te = evolve_second_order(sys, u0, s * u0, T);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    VectorXd g(sys.dim()), h(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) {
        g(i) = nd(rng);
        h(i) = nd(rng);
    }
    const SecondOrderTrajectory tg = evolve_second_order(sys, g, h, T);
    const double eps = 0.02 * std::abs(eta0);
    const VectorXd pg = spectral_projection(sys, g, eta0, eta0 + eps);
    const VectorXd ph = spectral_projection(sys, h, eta0, eta0 + eps);
    const SecondOrderTrajectory tp = evolve_second_order(sys, pg, ph, T);
    const double e_rel = std::abs(te.growth_rate / s - 1);
    const double upper = s * 1.05, lower = std::sqrt(-eta0 + eps) * 0.95;
    const double drift = std::max({te.max_rel_drift, tg.max_rel_drift, tp.max_rel_drift});
    return {e_rel < 0.01 && tg.growth_rate <= upper && tp.growth_rate >= lower && drift < 1e-6,
            fmt("sqrt(-eta0)=%.6g: eigenmode rate %.6g (rel %.1e <1e-2); generic rate %.6g <= %.6g; projected rate %.6g >= %.6g; max energy drift %.1e (<1e-6)",
                s, te.growth_rate, e_rel, tg.growth_rate, upper, tp.growth_rate, lower, drift)};
}

Outcome boundary_asymptotics() {
    std::string d;
    bool ok = true;
    for (double gam : {5.0 / 3.0, 1.5}) {
        const AsymptoticFit f = radial_boundary_exponent(solve_radial(EquationOfState::polytrope(1.0, gam), 1.0));
        const double rel = std::abs(f.slope / f.target - 1);
        ok = ok && rel < 0.1;
        d += fmt("rho exponent gamma=%.3f: %.4f vs %.4f; ", gam, f.slope, f.target);
    }
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.3, 1.0, grid(128));
    for (double lam : {1.0, 2.0}) {
        const AsymptoticFit f = boundary_asymptotics_check(st, lam);
        const double rel = std::abs(f.slope / f.target - 1);
        ok = ok && rel < 0.1;
        d += fmt("int rho^%.0f dz exponent: %.4f vs %.4f (%d pts); ", lam, f.slope, f.target, f.n_points);
    }
    return {ok, d};
}

Outcome hardy_bound() {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    std::vector<double> ratios;
    std::string d;
    for (int n : {48, 96, 192}) {
        const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.3, 1.0, grid(n));
        const PerturbationBasis b = make_basis(st, Parity::even, {}, nullptr);
        const MatrixXd Z = null_space_of_row(b.mass / b.mass.cwiseAbs().maxCoeff());
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        double mx = 0;
        for (int t = 0; t < 200; ++t) {
            VectorXd y(Z.cols());
            for (auto& v : y) v = nd(rng);
            mx = std::max(mx, u_theta_lift(st, b, Z * y).hardy_ratio);
        }
        ratios.push_back(mx);
        d += fmt("n=%d max ratio %.5g; ", n, mx);
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    return {spread < 2, d + fmt("spread %.4f (<2)", spread)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"radial oracle", radial_oracle},
        {"operator-oracle equivalence", operator_equivalence},
        {"non-rotating verdicts", nonrotating_verdicts},
        {"turning-point identity", turning_identity},
        {"reduced-functional identity", reduced_identity},
        {"generator cross-check", generator_cross_check},
        {"TPP holds for fixed-j", tpp_fixed_j},
        {"TPP fails for fixed-omega", tpp_fixed_omega},
        {"mass minimum example", bb1974},
        {"Rayleigh-unstable spectrum", rayleigh_spectrum},
        {"growth rates", growth_rates},
        {"boundary asymptotics", boundary_asymptotics},
        {"Hardy-bound stability", hardy_bound},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), dt,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
