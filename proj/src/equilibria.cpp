#include "rotstar/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rotstar/errors.hpp"
#include "rotstar/linalg.hpp"

namespace rotstar {

Rotation Rotation::fixed_omega(const AngularVelocityLaw& law, double kappa) {
    Rotation r;
    r.kind = RotationKind::fixed_omega;
    r.law = law;
    r.kappa = kappa;
    return r;
}

Rotation Rotation::fixed_j(const MomentumDistribution& j, double eps) {
    Rotation r;
    r.kind = RotationKind::fixed_j;
    r.j = j;
    r.eps = eps;
    return r;
}

bool Rotation::rotating() const {
    return (kind == RotationKind::fixed_omega && kappa != 0) || (kind == RotationKind::fixed_j && eps != 0);
}

namespace {

struct RotPotential {
    VectorXd col;  // per column
    double center = 0;
};

// Last column carrying mass; columns beyond it see p = q exactly.
int last_mass_column(const VectorXd& W) {
    for (int i = static_cast<int>(W.size()) - 1; i >= 0; --i)
        if (W(i) > 0) return i;
    return -1;
}

RotPotential fixed_j_potential(const AxiGrid& g, const MomentumDistribution& j, double eps, const VectorXd& m,
                               double M, int last) {
    RotPotential out;
    out.col.resize(g.nr);
    double tail = 0;
    const double e2 = eps * eps;
    for (int i = g.nr - 1; i >= 0; --i) {
        const double p = i > last ? M : std::min(2 * M_PI * m(i), M);
        const double a = j.J(p, M) / std::pow(g.r(i), 3);
        out.col(i) = -e2 * g.dr * (tail + 0.5 * a);
        tail += a;
    }
    out.center = -e2 * g.dr * tail;
    return out;
}

class Scf {
public:
    Scf(const EquationOfState& eos, const Rotation& rot, double mu, const MultipolePoisson& P)
        : eos_(eos), rot_(rot), mu_(mu), P_(P), g_(P.grid()), h0_(eos.enthalpy(mu)) {
        if (rot.kind == RotationKind::fixed_omega) {
            omega_pot_.resize(g_.nr);
            const double k2 = rot.kappa * rot.kappa;
            for (int i = 0; i < g_.nr; ++i) omega_pot_(i) = k2 * rot.law.rot_potential(g_.r(i));
        }
        if (rot.kind == RotationKind::fixed_j && rot.eps != 0) rot.j.check_smooth(1.0);
    }

    VectorXd density(const VectorXd& H) const {
        VectorXd rho(H.size());
        for (int n = 0; n < H.size(); ++n) rho(n) = H(n) > 0 ? eos_.enthalpy_inverse(H(n)) : 0.0;
        return rho;
    }

    RotPotential rotation(const VectorXd& rho) const {
        if (rot_.kind == RotationKind::fixed_omega) return {omega_pot_, 0.0};
        if (rot_.kind == RotationKind::fixed_j && rot_.eps != 0) {
            const VectorXd m = g_.cylinder_integral(rho);
            const double M = g_.integrate(rho);
            return fixed_j_potential(g_, rot_.j, rot_.eps, m, M, last_mass_column(g_.column_integral(rho)));
        }
        return {VectorXd::Zero(g_.nr), 0.0};
    }

    // T(H) = psi + rot - c with c fixed by the centre value Phi'(mu).
    VectorXd map(const VectorXd& rho, VectorXd* psi_out = nullptr, VectorXd* rot_out = nullptr,
                 double* c_out = nullptr) const {
        const VectorXd psi = P_.apply(rho);
        const RotPotential rp = rotation(rho);
        const double c = P_.center(rho) + rp.center - h0_;
        VectorXd T(psi.size());
        for (int i = 0; i < g_.nr; ++i)
            for (int k = 0; k < g_.nz; ++k) T(g_.idx(i, k)) = psi(g_.idx(i, k)) + rp.col(i) - c;
        if (psi_out) *psi_out = psi;
        if (rot_out) *rot_out = rp.col;
        if (c_out) *c_out = c;
        return T;
    }

    // Directional derivative of T along dH at the state with density rho.
    VectorXd map_jvp(const VectorXd& rho, const VectorXd& D, const VectorXd& dH) const {
        const VectorXd drho = D.cwiseProduct(dH);
        VectorXd out = P_.apply(drho);
        double dc = P_.center(drho);
        if (rot_.kind == RotationKind::fixed_j && rot_.eps != 0) {
            const VectorXd m = g_.cylinder_integral(rho), dm = g_.cylinder_integral(drho);
            const double M = g_.integrate(rho), dM = g_.integrate(drho);
            const int last = last_mass_column(g_.column_integral(rho));
            const double scale = std::max(dm.cwiseAbs().maxCoeff(), std::abs(dM) / (2 * M_PI));
            if (scale > 0) {
                const double t = 1e-6 * M / (2 * M_PI) / scale;
                const RotPotential a = fixed_j_potential(g_, rot_.j, rot_.eps, m + t * dm, M + t * dM, last);
                const RotPotential b = fixed_j_potential(g_, rot_.j, rot_.eps, m - t * dm, M - t * dM, last);
                for (int i = 0; i < g_.nr; ++i)
                    out.segment(i * g_.nz, g_.nz).array() += (a.col(i) - b.col(i)) / (2 * t);
                dc += (a.center - b.center) / (2 * t);
            }
        }
        out.array() -= dc;
        return out;
    }

    double h0() const { return h0_; }

private:
    const EquationOfState& eos_;
    const Rotation& rot_;
    double mu_;
    const MultipolePoisson& P_;
    const AxiGrid& g_;
    double h0_;
    VectorXd omega_pot_;
};

// Root in (x1, x2] of the quadratic through (x0,f0), (x1,f1), (x2,f2), uniform spacing h.
double quadratic_root(double x1, double h, double f0, double f1, double f2) {
    const double a = 0.5 * (f2 - 2 * f1 + f0) / (h * h);
    const double b = 0.5 * (f2 - f0) / h;  // derivative at x1
    double t;
    if (std::abs(a) < 1e-14 * std::abs(b)) {
        t = -f1 / b;
    } else {
        const double disc = std::max(b * b - 4 * a * f1, 0.0);
        const double t1 = (-b + std::sqrt(disc)) / (2 * a), t2 = (-b - std::sqrt(disc)) / (2 * a);
        t = (t1 >= -1e-12 && t1 <= h * (1 + 1e-12)) ? t1 : t2;
    }
    return x1 + std::clamp(t, 0.0, h);
}

// Zero of sampled f_k at x_k = (k + 1/2) h; the first positive-to-nonpositive crossing.
double first_zero(const std::vector<double>& f, double h) {
    for (size_t k = 1; k < f.size(); ++k) {
        if (f[k - 1] > 0 && f[k] <= 0) {
            const double x1 = (k - 0.5) * h;
            if (k >= 2) return quadratic_root(x1, h, f[k - 2], f[k - 1], f[k]);
            return x1 + h * f[k - 1] / (f[k - 1] - f[k]);
        }
    }
    return -1;
}

void finish(AxiStar& st) {
    const AxiGrid& g = st.grid();
    for (int i = 0; i < g.nr; ++i)
        if (st.H(g.idx(i, g.nz - 1)) > 0) throw ResolutionError("grid too small: support reaches z_max");
    for (int k = 0; k < g.nz; ++k)
        if (st.H(g.idx(g.nr - 1, k)) > 0) throw ResolutionError("grid too small: support reaches r_max");
    st.M = g.integrate(st.rho);
    st.m_of_r = g.cylinder_integral(st.rho);
    auto eq_row = [&](int k0, int k1) {
        std::vector<double> f(g.nr);
        for (int i = 0; i < g.nr; ++i) f[i] = (9 * st.H(g.idx(i, k0)) - st.H(g.idx(i, k1))) / 8;
        return f;
    };
    st.R0 = first_zero(eq_row(0, 1), g.dr);
    std::vector<double> ax(g.nz);
    for (int k = 0; k < g.nz; ++k) ax[k] = (9 * st.H(g.idx(0, k)) - st.H(g.idx(1, k))) / 8;
    st.Z0 = first_zero(ax, g.dz);
    if (st.R0 <= 0 || st.Z0 <= 0) throw SolverError("equilibrium has no resolved support");

    // Osculating circle at (R0, 0): fit r_b(z) = R0 - b z^2 on rows near the midplane.
    double num = 0, den = 0;
    for (int k = 0; k < g.nz && g.z(k) <= 0.3 * st.Z0; ++k) {
        std::vector<double> f(g.nr);
        for (int i = 0; i < g.nr; ++i) f[i] = st.H(g.idx(i, k));
        const double rb = first_zero(f, g.dr);
        if (rb <= 0) break;
        const double z2 = g.z(k) * g.z(k);
        num += z2 * (st.R0 - rb);
        den += z2 * z2;
    }
    st.curvature = den > 0 ? 2 * num / den : 0.0;
}

}  // namespace

ColumnRotation AxiStar::columns() const {
    const AxiGrid& g = grid();
    ColumnRotation c{VectorXd::Zero(g.nr), VectorXd::Zero(g.nr), VectorXd::Zero(g.nr)};
    if (rotation.kind == RotationKind::fixed_omega) {
        const double k = rotation.kappa;
        for (int i = 0; i < g.nr; ++i) {
            c.omega(i) = k * rotation.law.omega(g.r(i));
            c.d_omega_r2(i) = k * rotation.law.d_omega_r2(g.r(i));
            c.upsilon(i) = k * k * rotation.law.discriminant(g.r(i));
        }
    } else if (rotation.kind == RotationKind::fixed_j) {
        const VectorXd W = g.column_integral(rho);
        const int last = last_mass_column(W);
        const double e = rotation.eps;
        for (int i = 0; i < g.nr; ++i) {
            const double r = g.r(i);
            const double p = i > last ? M : std::min(2 * M_PI * m_of_r(i), M);
            c.omega(i) = e * rotation.j.j(p, M) / (r * r);
            c.d_omega_r2(i) = i > last ? 0.0 : e * rotation.j.j_p(p, M) * 2 * M_PI * r * W(i);
            c.upsilon(i) = 2 * c.omega(i) * c.d_omega_r2(i) / r;
        }
    }
    return c;
}

VectorXd AxiStar::inv_phi2() const {
    VectorXd d(rho.size());
    for (int n = 0; n < rho.size(); ++n) d(n) = rho(n) > 0 ? eos.inv_enthalpy_second(rho(n)) : 0.0;
    return d;
}

std::shared_ptr<const MultipolePoisson> make_grid(const EquationOfState& eos, double mu, const GridSpec& spec) {
    const RadialStar rs = solve_radial(eos, mu);
    return std::make_shared<const MultipolePoisson>(
        AxiGrid(spec.nr, spec.nz, spec.r_factor * rs.R, spec.z_factor * rs.R), spec.l_max);
}

VectorXd radial_enthalpy_on_grid(const RadialStar& star, const AxiGrid& g) {
    VectorXd H(g.size());
    for (int i = 0; i < g.nr; ++i)
        for (int k = 0; k < g.nz; ++k) H(g.idx(i, k)) = star.y_at(std::hypot(g.r(i), g.z(k)));
    return H;
}

AxiStar solve_equilibrium(const EquationOfState& eos, const Rotation& rot, double mu,
                          std::shared_ptr<const MultipolePoisson> P, const ScfOptions& opt, const VectorXd* H_guess) {
    if (!(mu > 0)) throw DomainError("solve_equilibrium: mu must be positive");
    const AxiGrid& g = P->grid();
    Scf scf(eos, rot, mu, *P);
    VectorXd H = H_guess ? *H_guess : radial_enthalpy_on_grid(solve_radial(eos, mu), g);
    if (H.size() != g.size()) throw DomainError("solve_equilibrium: initial guess does not match the grid");
    const double h0 = scf.h0();

    VectorXd rho = scf.density(H);
    VectorXd F = H - scf.map(rho);
    double fn = F.cwiseAbs().maxCoeff();
    int it = 0;
    for (; it < opt.max_newton && fn > opt.tol * h0; ++it) {
        VectorXd D(g.size());
        for (int n = 0; n < g.size(); ++n) D(n) = H(n) > 0 ? eos.inv_enthalpy_second(rho(n)) : 0.0;
        auto jac = [&](const VectorXd& v) -> VectorXd { return v - scf.map_jvp(rho, D, v); };
        VectorXd dH = VectorXd::Zero(g.size());
        const double eta = std::clamp(fn / h0, 1e-10, 1e-4);
        gmres(jac, -F, dH, eta, opt.max_gmres);
        double lam = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt, lam *= 0.5) {
            const VectorXd Hn = H + lam * dH;
            const VectorXd rn = scf.density(Hn);
            if (rn.maxCoeff() <= 0) continue;
            const VectorXd Fn = Hn - scf.map(rn);
            const double fnn = Fn.cwiseAbs().maxCoeff();
            if (fnn < (1 - 1e-4 * lam) * fn || fnn <= opt.tol * h0) {
                H = Hn;
                rho = rn;
                F = Fn;
                fn = fnn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!(fn <= opt.tol * h0)) {
        std::ostringstream os;
        os << "no equilibrium at mu=" << mu << ": SCF residual " << fn / h0 << " after " << it
           << " Newton steps";
        throw SolverError(os.str());
    }
    AxiStar st;
    st.poisson = std::move(P);
    st.eos = eos;
    st.rotation = rot;
    st.mu = mu;
    st.H = H;
    st.rho = rho;
    scf.map(rho, &st.psi, &st.rot, &st.c_const);
    st.newton_iterations = it;
    st.residual = 0;
    for (int n = 0; n < g.size(); ++n)
        if (st.in_support(n)) st.residual = std::max(st.residual, std::abs(F(n)));
    finish(st);
    return st;
}

AxiStar solve_fixed_omega(const EquationOfState& eos, const AngularVelocityLaw& law, double kappa, double mu,
                          const GridSpec& grid, const ScfOptions& opt) {
    return solve_equilibrium(eos, Rotation::fixed_omega(law, kappa), mu, make_grid(eos, mu, grid), opt);
}

AxiStar solve_fixed_j(const EquationOfState& eos, const MomentumDistribution& j, double eps, double mu,
                      const GridSpec& grid, const ScfOptions& opt) {
    return solve_equilibrium(eos, Rotation::fixed_j(j, eps), mu, make_grid(eos, mu, grid), opt);
}

namespace {

AsymptoticFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double target) {
    AsymptoticFit f;
    f.target = target;
    f.n_points = static_cast<int>(x.size());
    if (f.n_points < 8) throw ResolutionError("boundary fit: fewer than 8 usable radii");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = f.n_points;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return f;
}

}  // namespace

AsymptoticFit boundary_asymptotics_check(const AxiStar& star, double lambda) {
    if (!(lambda > 0)) throw DomainError("boundary_asymptotics_check: lambda must be positive");
    const AxiGrid& g = star.grid();
    std::vector<double> x, y;
    for (int i = 0; i < g.nr; ++i) {
        const double d = star.R0 - g.r(i);
        if (d <= 0 || d > 0.1 * star.R0) continue;
        double s = 0;
        for (int k = 0; k < g.nz; ++k) s += std::pow(star.rho(g.idx(i, k)), lambda);
        if (s <= 0) continue;
        x.push_back(d);
        y.push_back(2 * g.dz * s);
    }
    return fit_loglog(x, y, lambda / (star.eos.gamma0() - 1) + 0.5);
}

AsymptoticFit radial_boundary_exponent(const RadialStar& star) {
    std::vector<double> x, y;
    for (size_t k = 0; k < star.r.size(); ++k) {
        const double d = star.R - star.r[k];
        if (d <= 0 || d > 0.1 * star.R || star.rho[k] <= 0) continue;
        x.push_back(d);
        y.push_back(star.rho[k]);
    }
    return fit_loglog(x, y, 1 / (star.eos.gamma0() - 1));
}

void write_bundle(const AxiStar& star, const std::string& prefix) {
    const AxiGrid& g = star.grid();
    nlohmann::ordered_json gj = {{"layout", "row-major, index i*nz+k, cell centres r=(i+1/2)dr, z=(k+1/2)dz"},
                                 {"nr", g.nr},
                                 {"nz", g.nz},
                                 {"r_max", g.r_max},
                                 {"z_max", g.z_max},
                                 {"symmetry", "even in z"},
                                 {"l_max", star.poisson->l_max()}};
    std::ofstream(prefix + ".grid.json") << gj.dump(2) << "\n";
    std::ofstream dens(prefix + ".density.csv");
    char buf[64];
    for (int i = 0; i < g.nr; ++i) {
        for (int k = 0; k < g.nz; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", star.rho(g.idx(i, k)));
            dens << (k ? "," : "") << buf;
        }
        dens << "\n";
    }
    nlohmann::ordered_json mj = {{"mu", star.mu},
                                 {"M", star.M},
                                 {"R0", star.R0},
                                 {"Z0", star.Z0},
                                 {"c_const", star.c_const},
                                 {"residual", star.residual},
                                 {"curvature", star.curvature},
                                 {"m_of_r_convention", "m(R0) = M / (2 pi)"}};
    if (star.rotation.kind == RotationKind::fixed_omega) {
        mj["rotation"] = "fixed_omega";
        mj["kappa"] = star.rotation.kappa;
    } else if (star.rotation.kind == RotationKind::fixed_j) {
        mj["rotation"] = "fixed_j";
        mj["eps"] = star.rotation.eps;
    } else {
        mj["rotation"] = "none";
    }
    std::ofstream(prefix + ".meta.json") << mj.dump(2) << "\n";
}

}  // namespace rotstar
