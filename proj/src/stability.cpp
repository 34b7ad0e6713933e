#include "rotstar/stability.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rotstar/errors.hpp"

namespace rotstar {

MatrixXd coulomb_matrix(const AxiStar& star, const PerturbationBasis& basis) {
    const AxiGrid& g = star.grid();
    const int K = basis.size();
    MatrixXd psi(g.size(), K);
    for (int k = 0; k < K; ++k) psi.col(k) = star.poisson->apply(basis.drho.col(k), basis.parity);
    MatrixXd C = basis.drho.transpose() * g.weights().asDiagonal() * psi;
    return 0.5 * (C + C.transpose());
}

QuadraticFormMatrix assemble_L(const AxiStar& star, const PerturbationBasis& basis) {
    return make_form(basis.gram - coulomb_matrix(star, basis), basis.gram);
}

MatrixXd cylinder_flux(const AxiStar& star, const MatrixXd& drho, bool mass_zero) {
    const AxiGrid& g = star.grid();
    MatrixXd F(g.nr, drho.cols());
    for (int c = 0; c < drho.cols(); ++c) {
        const VectorXd f = g.cylinder_integral(drho.col(c));
        if (!mass_zero) {
            F.col(c) = f;
            continue;
        }
        const VectorXd t = g.cylinder_tail(drho.col(c));
        for (int i = 0; i < g.nr; ++i) F(i, c) = g.r(i) <= 0.5 * star.R0 ? f(i) : -t(i);
    }
    return F;
}

VectorXd rotational_weights(const AxiStar& star) {
    const AxiGrid& g = star.grid();
    VectorXd q = VectorXd::Zero(g.nr);
    if (!star.rotation.rotating()) return q;
    const ColumnRotation cr = star.columns();
    const VectorXd W = g.column_integral(star.rho);
    for (int i = 0; i < g.nr; ++i) {
        if (!(W(i) > 0)) continue;
        if (cr.upsilon(i) < 0) {
            std::ostringstream os;
            os << "Rayleigh discriminant negative at r=" << g.r(i)
               << " on the support; use the spectral analysis for Rayleigh-unstable stars";
            throw PreconditionError(os.str());
        }
        q(i) = 2 * M_PI * cr.upsilon(i) / (g.r(i) * W(i));
    }
    return q;
}

namespace {

MatrixXd rotational_matrix(const AxiStar& star, const MatrixXd& F) {
    const VectorXd q = rotational_weights(star);
    MatrixXd R = F.transpose() * (star.grid().dr * q).asDiagonal() * F;
    return 0.5 * (R + R.transpose());
}

}  // namespace

QuadraticFormMatrix assemble_K(const AxiStar& star, const PerturbationBasis& basis) {
    MatrixXd Q = basis.gram - coulomb_matrix(star, basis);
    if (basis.parity == Parity::even && star.rotation.rotating())
        Q += rotational_matrix(star, cylinder_flux(star, basis.drho, false));
    return make_form(Q, basis.gram);
}

QuadraticFormMatrix restrict_mass_zero(const QuadraticFormMatrix& Q, const PerturbationBasis& basis,
                                       MatrixXd* Z_out) {
    const double scale = basis.mass.cwiseAbs().maxCoeff();
    if (!(scale > 0)) {
        QuadraticFormMatrix out = Q;
        out.constraint_vacuous = true;
        if (Z_out) *Z_out = MatrixXd::Identity(Q.Q.rows(), Q.Q.cols());
        return out;
    }
    const MatrixXd Z = null_space_of_row(basis.mass / scale);
    if (Z_out) *Z_out = Z;
    return make_form(Z.transpose() * Q.Q * Z, Z.transpose() * Q.G * Z);
}

QuadraticFormMatrix assemble_K_mass_zero(const AxiStar& star, const PerturbationBasis& basis, MatrixXd* Z_out) {
    const double scale = basis.mass.cwiseAbs().maxCoeff();
    MatrixXd Z = scale > 0 ? null_space_of_row(basis.mass / scale)
                           : MatrixXd::Identity(basis.size(), basis.size());
    const MatrixXd L = basis.gram - coulomb_matrix(star, basis);
    MatrixXd Q = Z.transpose() * L * Z;
    if (basis.parity == Parity::even && star.rotation.rotating())
        Q += rotational_matrix(star, cylinder_flux(star, basis.drho * Z, true));
    if (Z_out) *Z_out = Z;
    QuadraticFormMatrix f = make_form(Q, Z.transpose() * basis.gram * Z);
    f.constraint_vacuous = !(scale > 0);
    return f;
}

VectorXd a1_weight(const AxiStar& star) {
    const AxiGrid& g = star.grid();
    VectorXd a(g.size());
    if (!star.rotation.rotating()) return star.rho;
    const ColumnRotation cr = star.columns();
    for (int i = 0; i < g.nr; ++i) {
        double f = 0;
        if (cr.d_omega_r2(i) > 0) f = 2 * cr.omega(i) * g.r(i) / cr.d_omega_r2(i);  // 4 omega^2 / Upsilon
        for (int k = 0; k < g.nz; ++k) a(g.idx(i, k)) = f * star.rho(g.idx(i, k));
    }
    return a;
}

ThetaLift u_theta_lift(const AxiStar& star, const PerturbationBasis& basis, const VectorXd& coeffs) {
    const AxiGrid& g = star.grid();
    const double m = basis.mass.dot(coeffs);
    const double ref = basis.mass.cwiseAbs().dot(coeffs.cwiseAbs());
    if (std::abs(m) > 1e-9 * std::max(ref, 1e-300))
        throw PreconditionError("u_theta_lift: perturbation must have zero total mass");
    const VectorXd q = rotational_weights(star);  // also checks the discriminant sign
    (void)q;
    ThetaLift out;
    out.u_theta = VectorXd::Zero(g.nr);
    const double dnorm2 = coeffs.dot(basis.gram * coeffs);
    if (basis.parity == Parity::odd) {
        out.hardy_ratio = 0;
        return out;
    }
    const MatrixXd F = cylinder_flux(star, basis.drho * coeffs, true);
    const ColumnRotation cr = star.columns();
    const VectorXd W = g.column_integral(star.rho);
    double unorm2 = 0;
    for (int i = 0; i < g.nr; ++i) {
        if (!(W(i) > 0)) continue;
        const double r = g.r(i);
        out.u_theta(i) = cr.d_omega_r2(i) * F(i, 0) / (r * r * W(i));
        unorm2 += 2 * M_PI * r * g.dr * W(i) * out.u_theta(i) * out.u_theta(i);
        if (cr.d_omega_r2(i) > 0)
            out.a1_value += 2 * M_PI * r * g.dr * W(i) * (2 * cr.omega(i) * r / cr.d_omega_r2(i)) *
                            out.u_theta(i) * out.u_theta(i);
        double col = 0;
        for (int k = 0; k < g.nz; ++k) col += star.rho(g.idx(i, k)) * out.u_theta(i);
        out.accessibility_defect =
            std::max(out.accessibility_defect, std::abs(2 * g.dz * col - cr.d_omega_r2(i) * F(i, 0) / (r * r)));
    }
    out.hardy_ratio = dnorm2 > 0 ? std::sqrt(unorm2 / dnorm2) : 0.0;
    return out;
}

double casimir_second_variation(const AxiStar& star, const LinearState& s) {
    const AxiGrid& g = star.grid();
    const int n = g.size();
    if (s.rho.size() != n || s.v_theta.size() != n || s.v_r.size() != n || s.v_z.size() != n)
        throw DomainError("casimir_second_variation: state does not match the grid");
    if (star.rotation.rotating()) rotational_weights(star);
    const VectorXd D = star.inv_phi2();
    const VectorXd w = g.weights();
    const VectorXd a1 = a1_weight(star);
    double pressure = 0;
    for (int j = 0; j < n; ++j) {
        if (s.rho(j) == 0) continue;
        if (!star.in_support(j)) throw DomainError("casimir_second_variation: density perturbation off the support");
        pressure += w(j) * s.rho(j) * s.rho(j) / D(j);
    }
    const VectorXd psi = star.poisson->apply(s.rho, s.parity);
    double v = pressure - (w.cwiseProduct(s.rho)).dot(psi);
    for (int j = 0; j < n; ++j)
        v += w(j) * (a1(j) * s.v_theta(j) * s.v_theta(j) + star.rho(j) * (s.v_r(j) * s.v_r(j) + s.v_z(j) * s.v_z(j)));
    return v;
}

StabilityReport analyze_stability(const AxiStar& star, const BasisSpec& spec, const MuDerivative* dmu) {
    MuDerivative local;
    if (!dmu) {
        local = mu_derivative(star);
        dmu = &local;
    }
    StabilityReport rep;
    const PerturbationBasis even = make_basis(star, Parity::even, spec, spec.append_symmetry_mode ? &dmu->dH : nullptr);
    const QuadraticFormMatrix Le = assemble_L(star, even);
    const QuadraticFormMatrix Kz = assemble_K_mass_zero(star, even);
    const VectorXd t = translation_chi(star);
    const PerturbationBasis odd = make_basis(star, Parity::odd, spec, spec.append_symmetry_mode ? &t : nullptr);
    const QuadraticFormMatrix Lo = assemble_L(star, odd);
    const PerturbationBasis tb = basis_from_chi(star, Parity::odd, t);
    const VectorXd overlap = odd.chi.transpose() * star.grid().weights().cwiseProduct(star.inv_phi2()).asDiagonal() * tb.chi.col(0);
    const SymmetryAdjusted adj = inertia_with_symmetry_mode(Lo, overlap, std::sqrt(tb.gram(0, 0)));
    rep.translation_correlation = adj.correlation;
    rep.n_minus_L_even = Le.inertia.neg;
    rep.n_minus_K_even = Kz.inertia.neg;
    rep.n_minus_odd = adj.inertia.neg;
    rep.n_minus_L = Le.inertia.neg + adj.inertia.neg;
    rep.n_minus_K_constrained = Kz.inertia.neg + adj.inertia.neg;
    rep.n_zero = Kz.inertia.zero + adj.inertia.zero;
    rep.min_eigen_K_constrained = Kz.eigenvalues.size() ? Kz.eigenvalues(0) : 0.0;
    rep.verdict = rep.n_minus_K_constrained == 0 ? "spectrally_stable" : "unstable";
    return rep;
}

std::string to_json(const StabilityReport& r) {
    nlohmann::ordered_json j = {{"n_minus_L", r.n_minus_L},
                                {"n_minus_K_constrained", r.n_minus_K_constrained},
                                {"n_zero", r.n_zero},
                                {"verdict", r.verdict}};
    if (r.generator_unstable_count) j["generator_unstable_count"] = *r.generator_unstable_count;
    if (r.growth_rate) j["growth_rate"] = *r.growth_rate;
    j["min_eigen_K_constrained"] = r.min_eigen_K_constrained;
    j["translation_correlation"] = r.translation_correlation;
    return j.dump(2);
}

TurningIdentity radial_turning_identity(const EquationOfState& eos, double mu, double h) {
    const RadialStar s0 = solve_radial(eos, mu);
    const RadialStar p1 = solve_radial(eos, mu * (1 + h)), m1 = solve_radial(eos, mu * (1 - h));
    const RadialStar p2 = solve_radial(eos, mu * (1 + h / 2)), m2 = solve_radial(eos, mu * (1 - h / 2));
    const double d1 = 2 * h * mu, d2 = h * mu;
    auto rich = [&](double a1, double b1, double a2, double b2) { return (4 * (a2 - b2) / d2 - (a1 - b1) / d1) / 3; };
    TurningIdentity out;
    out.dM = rich(p1.M, m1.M, p2.M, m2.M);
    out.dV_surface = rich(-p1.M / p1.R, -m1.M / m1.R, -p2.M / p2.R, -m2.M / m2.R);

    // Midpoint rule on n cells of [0, R]: f = (dy/dmu) / Phi''.
    const int n = 20000;
    const double hr = s0.R / n;
    double pressure = 0, grav = 0, A = 0;
    for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) * hr;
        const double dy = rich(p1.y_at(r), m1.y_at(r), p2.y_at(r), m2.y_at(r));
        const double inv2 = eos.inv_enthalpy_second(s0.rho_at(r));
        const double f = dy * inv2;
        pressure += 4 * M_PI * r * r * hr * dy * f;
        const double c = f * r * r * hr;
        grav += 2 * 16 * M_PI * M_PI * f * r * hr * (A + 0.5 * c);
        A += c;
    }
    out.form = pressure - grav;
    return out;
}

}  // namespace rotstar
