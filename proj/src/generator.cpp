#include "rotstar/generator.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rotstar/errors.hpp"

namespace rotstar {

double GeneratorSystem::energy(const VectorXd& x) const {
    const VectorXd a = x.head(na);
    return 0.5 * (a.dot(Lhat * a) + x.segment(na, nc).squaredNorm() + x.tail(nb).squaredNorm());
}

LinearState GeneratorSystem::state(const VectorXd& x) const {
    LinearState s;
    s.parity = parity;
    s.rho = rho_map * x.head(na);
    s.v_theta = nc > 0 ? VectorXd(theta_map * x.segment(na, nc)) : VectorXd::Zero(rho_map.rows());
    s.v_r = vr_map * x.tail(nb);
    s.v_z = vz_map * x.tail(nb);
    return s;
}

GeneratorSystem assemble_generator(const AxiStar& star, Parity parity, const GeneratorSpec& spec) {
    const AxiGrid& g = star.grid();
    const bool odd = parity == Parity::odd;
    const bool rotating = star.rotation.rotating();
    if (rotating) rotational_weights(star);  // Rayleigh-stability precondition

    // Density space; the odd sector keeps only the complement of the translation.
    BasisSpec bs;
    bs.deg_r = spec.rho_deg_r;
    bs.deg_z = spec.rho_deg_z;
    bs.deg_z_odd = spec.rho_deg_z_odd;
    PerturbationBasis rb;
    if (odd) {
        const VectorXd t = translation_chi(star);
        rb = remove_mode(make_basis(star, parity, bs, &t));
    } else {
        rb = make_basis(star, parity, bs, nullptr);
    }
    const MatrixXd QL = rb.gram - coulomb_matrix(star, rb);

    // Meridional velocity: gradients of the density-space chi, plus stream fields.
    VelocityBasis vb;
    vb.parity = parity;
    {
        std::vector<int> keep;
        for (int k = 0; k < rb.size(); ++k)
            if (rb.chi_r.col(k).cwiseAbs().maxCoeff() + rb.chi_z.col(k).cwiseAbs().maxCoeff() > 0) keep.push_back(k);
        VelocityBasis gf;
        gf.parity = parity;
        gf.vr.resize(g.size(), keep.size());
        gf.vz.resize(g.size(), keep.size());
        gf.sigma = MatrixXd::Zero(g.size(), keep.size());
        for (size_t c = 0; c < keep.size(); ++c) {
            gf.vr.col(c) = rb.chi_r.col(keep[c]);
            gf.vz.col(c) = rb.chi_z.col(keep[c]);
        }
        gf.n_gradient = static_cast<int>(keep.size());
        std::vector<RadialFn> rf;
        std::vector<AxialFn> tf;
        for (int a = 0; a <= spec.stream_deg_r; ++a) rf.push_back(legendre_r2(a, star.R0));
        for (int b = 0; b <= spec.stream_deg_z; ++b) tf.push_back(legendre_z2(b, star.Z0, !odd));
        vb = concat(gf, stream_fields(star, parity, rf, tf));
    }
    const VectorXd w = g.weights();
    const VectorXd wr = w.cwiseProduct(star.rho);
    const MatrixXd A = y_gram(star, vb);
    const MatrixXd C = rb.chi_r.transpose() * wr.asDiagonal() * vb.vr + rb.chi_z.transpose() * wr.asDiagonal() * vb.vz;

    // v_theta space.
    MatrixXd tau(g.size(), 0), A1, E;
    if (rotating) {
        const int nt = (spec.theta_deg_r + 1) * (spec.theta_deg_z + 1);
        tau.resize(g.size(), nt);
        for (int i = 0; i < g.nr; ++i) {
            std::vector<RadialFactor> R;
            for (int a = 0; a <= spec.theta_deg_r; ++a) R.push_back(legendre_r2(a, star.R0)(g.r(i)));
            for (int k = 0; k < g.nz; ++k) {
                int c = 0;
                for (const auto& Ra : R)
                    for (int b = 0; b <= spec.theta_deg_z; ++b)
                        tau(g.idx(i, k), c++) = g.r(i) * Ra.f * legendre_z2(b, star.Z0, odd)(g.z(k)).f;
            }
        }
        const VectorXd a1 = a1_weight(star);
        A1 = tau.transpose() * w.cwiseProduct(a1).asDiagonal() * tau;
        A1 = 0.5 * (A1 + A1.transpose());
        const ColumnRotation cr = star.columns();
        VectorXd two_omega_rho(g.size());
        for (int i = 0; i < g.nr; ++i)
            for (int k = 0; k < g.nz; ++k) two_omega_rho(g.idx(i, k)) = 2 * cr.omega(i) * star.rho(g.idx(i, k));
        E = vb.vr.transpose() * w.cwiseProduct(two_omega_rho).asDiagonal() * tau;
    }

    GeneratorSystem sys;
    sys.parity = parity;
    const PencilEigen pa = pencil_eigen(QL, rb.gram);
    const MatrixXd Sa = pa.S;
    const MatrixXd Sb = pencil_eigen(A, A).S;
    MatrixXd Sc(0, 0);
    if (rotating) Sc = pencil_eigen(A1, A1).S;
    sys.na = static_cast<int>(Sa.cols());
    sys.nb = static_cast<int>(Sb.cols());
    sys.nc = rotating ? static_cast<int>(Sc.cols()) : 0;
    sys.Lhat = Sa.transpose() * QL * Sa;
    sys.Lhat = 0.5 * (sys.Lhat + sys.Lhat.transpose());
    sys.Chat = Sa.transpose() * C * Sb;
    sys.Ehat = rotating ? MatrixXd(Sb.transpose() * E * Sc) : MatrixXd::Zero(sys.nb, 0);
    const int n = sys.dim();
    sys.G = MatrixXd::Zero(n, n);
    sys.G.block(0, sys.na + sys.nc, sys.na, sys.nb) = sys.Chat;
    if (sys.nc > 0) {
        sys.G.block(sys.na, sys.na + sys.nc, sys.nc, sys.nb) = -sys.Ehat.transpose();
        sys.G.block(sys.na + sys.nc, sys.na, sys.nb, sys.nc) = sys.Ehat;
    }
    sys.G.block(sys.na + sys.nc, 0, sys.nb, sys.na) = -sys.Chat.transpose() * sys.Lhat;
    sys.rho_map = rb.drho * Sa;
    sys.theta_map = rotating ? MatrixXd(tau * Sc) : MatrixXd::Zero(g.size(), 0);
    sys.vr_map = vb.vr * Sb;
    sys.vz_map = vb.vz * Sb;
    return sys;
}

GeneratorSpectrum generator_spectrum(const GeneratorSystem& sys, double rel_tol) {
    GeneratorSpectrum out;
    Eigen::EigenSolver<MatrixXd> es(sys.G, false);
    out.eigenvalues = es.eigenvalues();
    const double rad = out.eigenvalues.cwiseAbs().maxCoeff();
    out.tol = rel_tol * rad;
    for (int i = 0; i < out.eigenvalues.size(); ++i) {
        const auto l = out.eigenvalues(i);
        if (l.real() > out.tol) {
            ++out.unstable_count;
            out.max_growth = std::max(out.max_growth, l.real());
        }
        out.imaginary_axis_defect = std::max(out.imaginary_axis_defect, std::abs(l.real()) / rad);
        auto nearest = [&](std::complex<double> t) {
            double d = 1e300;
            for (int j = 0; j < out.eigenvalues.size(); ++j) d = std::min(d, std::abs(out.eigenvalues(j) - t));
            return d;
        };
        const double d = std::max({nearest(-l), nearest(std::conj(l)), nearest(-std::conj(l))});
        out.quadruple_defect = std::max(out.quadruple_defect, d / rad);
    }
    const MatrixXd Qb = sys.Chat.transpose() * sys.Lhat * sys.Chat + sys.Ehat * sys.Ehat.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> qs(0.5 * (Qb + Qb.transpose()), Eigen::EigenvaluesOnly);
    const double qn = qs.eigenvalues().cwiseAbs().maxCoeff();
    // Growth rate sqrt(-q) above the generator tolerance.
    for (int i = 0; i < qs.eigenvalues().size(); ++i)
        if (qs.eigenvalues()(i) < -std::max(out.tol * out.tol, 1e-12 * qn)) ++out.reduced_negative;
    return out;
}

LinearTrajectory evolve_linearized(const GeneratorSystem& sys, const VectorXd& x0, double T, double dt) {
    if (!(dt > 0) || !(T > 0)) throw DomainError("evolve_linearized: T and dt must be positive");
    const int n = sys.dim();
    if (x0.size() != n) throw DomainError("evolve_linearized: initial state has the wrong size");
    const MatrixXd I = MatrixXd::Identity(n, n);
    Eigen::PartialPivLU<MatrixXd> lu(I - 0.5 * dt * sys.G);
    const MatrixXd Bp = I + 0.5 * dt * sys.G;
    if (!(lu.rcond() > 1e-12)) throw StepSizeError("evolve_linearized: implicit midpoint matrix is singular at this dt");
    const int steps = static_cast<int>(std::ceil(T / dt));
    LinearTrajectory tr;
    VectorXd x = x0;
    double emax = 0;
    const double e0 = sys.energy(x0);
    for (int s = 0; s <= steps; ++s) {
        const double e = sys.energy(x);
        const VectorXd a = x.head(sys.na);
        emax = std::max({emax, std::abs(e), 0.5 * (std::abs(a.dot(sys.Lhat * a)) + x.tail(n - sys.na).squaredNorm())});
        tr.t.push_back(s * dt);
        tr.norm.push_back(x.norm());
        tr.energy.push_back(e);
        tr.max_rel_drift = std::max(tr.max_rel_drift, std::abs(e - e0));
        if (!std::isfinite(x.norm())) throw StepSizeError("evolve_linearized: state became non-finite");
        if (s < steps) x = lu.solve(Bp * x);
    }
    tr.max_rel_drift /= std::max(emax, 1e-300);
    const int h = static_cast<int>(tr.t.size()) / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(tr.t.size()) - h;
    for (size_t i = h; i < tr.t.size(); ++i) {
        const double y = std::log(tr.norm[i]);
        sx += tr.t[i];
        sy += y;
        sxx += tr.t[i] * tr.t[i];
        sxy += tr.t[i] * y;
    }
    tr.growth_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return tr;
}

}  // namespace rotstar
