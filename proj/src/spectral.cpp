#include "rotstar/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rotstar/errors.hpp"
#include "rotstar/parallel.hpp"
#include "rotstar/stability.hpp"

namespace rotstar {

VelocityBasis spectral_basis(const AxiStar& star, Parity parity, const SpectralLevel& level) {
    const bool odd = parity == Parity::odd;
    std::vector<RadialFn> gr, sr;
    std::vector<AxialFn> gz, sz;
    for (int a = 0; a <= level.grad_deg; ++a) {
        gr.push_back(legendre_r2(a, star.R0));
        gz.push_back(legendre_z2(a, star.Z0, odd));
    }
    const double h = star.R0 / (level.n_splines + 1);
    for (int j = 0; j < level.n_splines; ++j) sr.push_back(cubic_bspline((j + 1) * h, h));
    for (int b = 0; b < level.n_axial; ++b) sz.push_back(legendre_z2(b, star.Z0, !odd));
    return concat(gradient_fields(star, parity, gr, gz, true), stream_fields(star, parity, sr, sz));
}

namespace {

double upsilon_at(const AxiStar& star, double r) {
    if (star.rotation.kind == RotationKind::fixed_omega)
        return star.rotation.kappa * star.rotation.kappa * star.rotation.law.discriminant(r);
    const AxiGrid& g = star.grid();
    const VectorXd u = star.columns().upsilon;
    const double s = std::clamp(r / g.dr - 0.5, 0.0, g.nr - 1.0);
    const int i = std::min(static_cast<int>(s), g.nr - 2);
    return u(i) + (s - i) * (u(i + 1) - u(i));
}

}  // namespace

UpsilonRange upsilon_range(const AxiStar& star) {
    UpsilonRange out;
    if (!star.rotation.rotating()) return out;
    if (star.rotation.kind == RotationKind::fixed_omega) {
        const RayleighClass rc = classify_rayleigh(star.rotation.law.scaled(star.rotation.kappa), 0.0, star.R0);
        out.a = -rc.min_upsilon;
        out.b = rc.max_upsilon;
        out.r_min = rc.witness;
        return out;
    }
    const AxiGrid& g = star.grid();
    const VectorXd u = star.columns().upsilon;
    const VectorXd W = g.column_integral(star.rho);
    double mn = 1e300, mx = -1e300;
    for (int i = 0; i < g.nr; ++i) {
        if (!(W(i) > 0)) continue;
        if (u(i) < mn) {
            mn = u(i);
            out.r_min = g.r(i);
        }
        mx = std::max(mx, u(i));
    }
    out.a = -mn;
    out.b = mx;
    return out;
}

QuadraticFormMatrix assemble_Ltilde(const AxiStar& star, const VelocityBasis& v) {
    const UpsilonRange ur = upsilon_range(star);
    if (!(ur.a > 0))
        throw PreconditionError("assemble_Ltilde: rotation law is Rayleigh-stable on the star; use the stability analysis");
    if (!v.vr.allFinite() || !v.vz.allFinite() || !v.sigma.allFinite())
        throw DomainError("assemble_Ltilde: basis has non-finite entries");
    const AxiGrid& g = star.grid();
    const VectorXd w = g.weights();
    const VectorXd ip = star.inv_phi2();
    const ColumnRotation cr = star.columns();
    VectorXd wphi(g.size()), wrot(g.size());
    for (int i = 0; i < g.nr; ++i)
        for (int k = 0; k < g.nz; ++k) {
            const int n = g.idx(i, k);
            wphi(n) = ip(n) > 0 ? w(n) / ip(n) : 0.0;
            wrot(n) = w(n) * star.rho(n) * cr.upsilon(i);
        }
    const int K = v.size();
    MatrixXd psi(g.size(), K);
    for (int c = 0; c < K; ++c) psi.col(c) = star.poisson->apply(v.sigma.col(c), v.parity);
    MatrixXd Q = v.sigma.transpose() * wphi.asDiagonal() * v.sigma - v.sigma.transpose() * w.asDiagonal() * psi +
                 v.vr.transpose() * wrot.asDiagonal() * v.vr;
    return make_form(Q, y_gram(star, v));
}

SpectrumReport spectrum(const AxiStar& star, const SpectralSpec& spec) {
    if (spec.levels.size() < 2) throw DomainError("spectrum: need at least two refinement levels");
    SpectrumReport rep;
    const UpsilonRange ur = upsilon_range(star);
    rep.a = ur.a;
    rep.b = ur.b;
    const int nl = static_cast<int>(spec.levels.size());
    rep.levels.resize(nl);
    parallel_for(nl, spec.jobs, [&](int l) {
        const QuadraticFormMatrix f = assemble_Ltilde(star, spectral_basis(star, spec.parity, spec.levels[l]));
        LevelSpectrum& ls = rep.levels[l];
        ls.eigenvalues = f.eigenvalues;
        ls.dim = static_cast<int>(f.eigenvalues.size());
        std::vector<double> dist;
        int inside = 0;
        for (int i = 0; i < ls.dim; ++i) {
            const double e = f.eigenvalues(i);
            if (e < -rep.a) ++ls.below;
            else if (e > rep.b) ++ls.above;
            else ++inside;
            dist.push_back(std::max({0.0, -rep.a - e, e - rep.b}));
        }
        std::sort(dist.begin(), dist.end());
        const int need = std::max(1, static_cast<int>(std::ceil(spec.inside_fraction * ls.dim)));
        ls.delta = dist[need - 1];
        ls.inside_fraction = static_cast<double>(inside) / ls.dim;
    });
    const LevelSpectrum& fine = rep.levels.back();
    const LevelSpectrum& prev = rep.levels[nl - 2];
    rep.eta0 = fine.eigenvalues(0);
    rep.cluster_fraction = fine.inside_fraction;
    rep.discrete_above_count = fine.above;
    rep.top_growth = fine.eigenvalues(fine.dim - 1) / prev.eigenvalues(prev.dim - 1);
    for (int i = 0; i < fine.below; ++i) {
        const double e = fine.eigenvalues(i);
        rep.discrete_below.push_back(e);
        const bool conv = i < prev.below && std::abs(prev.eigenvalues(i) - e) < 1e-3 * std::abs(e);
        rep.discrete_below_converged.push_back(conv);
    }
    if (fine.below != prev.below) {
        rep.ambiguous = true;
        rep.ambiguity = "count below -a changed between the two finest levels (" + std::to_string(prev.below) + " -> " +
                        std::to_string(fine.below) + ")";
    }
    for (int i = 0; i < fine.dim; ++i) {
        const double e = fine.eigenvalues(i);
        if (e <= -rep.a && e > -rep.a * (1 + spec.edge_rel)) {
            rep.ambiguous = true;
            if (!rep.ambiguity.empty()) rep.ambiguity += "; ";
            rep.ambiguity += "eigenvalue " + std::to_string(e) + " at the lower essential edge";
        }
    }
    return rep;
}

nlohmann::ordered_json to_json(const SpectrumReport& r) {
    nlohmann::ordered_json j;
    j["a"] = r.a;
    j["b"] = r.b;
    j["eta0"] = r.eta0;
    j["discrete_below"] = r.discrete_below;
    j["discrete_above_count"] = r.discrete_above_count;
    j["cluster_fraction"] = r.cluster_fraction;
    j["discrete_below_converged"] = r.discrete_below_converged;
    j["top_eigenvalue_growth"] = r.top_growth;
    j["ambiguous"] = r.ambiguous;
    if (r.ambiguous) j["ambiguity"] = r.ambiguity;
    auto& lv = j["levels"] = nlohmann::ordered_json::array();
    for (const auto& l : r.levels)
        lv.push_back({{"dim", l.dim},
                      {"delta", l.delta},
                      {"inside_fraction", l.inside_fraction},
                      {"below", l.below},
                      {"above", l.above},
                      {"min", l.eigenvalues(0)},
                      {"max", l.eigenvalues(l.dim - 1)}});
    return j;
}

VectorXd SecondOrderSystem::coordinates(const VectorXd& coeff) const { return S.transpose() * (Y * coeff); }

SecondOrderSystem second_order_system(const QuadraticFormMatrix& Lt) {
    SecondOrderSystem s;
    s.Y = Lt.G;
    s.S = pencil_eigen(Lt.Q, Lt.G).S;
    s.Ahat = s.S.transpose() * Lt.Q * s.S;
    s.Ahat = 0.5 * (s.Ahat + s.Ahat.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.Ahat);
    s.lambda = es.eigenvalues();
    s.U = es.eigenvectors();
    return s;
}

SecondOrderTrajectory evolve_second_order(const SecondOrderSystem& sys, const VectorXd& u0, const VectorXd& v0,
                                          double T, double dt, int record_every) {
    const int n = sys.dim();
    if (u0.size() != n || v0.size() != n) throw DomainError("evolve_second_order: initial data has the wrong size");
    if (!(T > 0)) throw DomainError("evolve_second_order: T must be positive");
    const double lmax = sys.lambda.cwiseAbs().maxCoeff();
    if (dt <= 0) dt = 0.1 / std::sqrt(lmax);
    if (dt * std::sqrt(lmax) > 2)
        throw StepSizeError("evolve_second_order: dt*sqrt(lambda_max) = " + std::to_string(dt * std::sqrt(lmax)) +
                            " exceeds 2");
    // Implicit midpoint is covariant under the orthogonal change to eigen-coordinates,
    // where it decouples into 2x2 Cayley steps.
    VectorXd q = sys.U.transpose() * u0, p = sys.U.transpose() * v0;
    const VectorXd& l = sys.lambda;
    const VectorXd c = (1 - 0.25 * dt * dt * l.array()).matrix();
    const VectorXd det = (1 + 0.25 * dt * dt * l.array()).matrix();
    const int steps = static_cast<int>(std::ceil(T / dt));
    SecondOrderTrajectory tr;
    tr.dt = dt;
    auto energy = [&] { return p.squaredNorm() + (l.array() * q.array().square()).sum(); };
    const double e0 = energy();
    double drift = 0, scale = 0;
    std::vector<double> ft, fl;  // samples for the growth fit
    for (int s = 0; s <= steps; ++s) {
        const double e = energy();
        const double qn = q.norm();
        drift = std::max(drift, std::abs(e - e0));
        scale = std::max(scale, p.squaredNorm() + std::abs((l.array() * q.array().square()).sum()));
        if (!std::isfinite(qn)) throw StepSizeError("evolve_second_order: state became non-finite");
        if (s % record_every == 0 || s == steps) {
            tr.t.push_back(s * dt);
            tr.norm.push_back(qn);
            tr.energy.push_back(e);
        }
        if (2 * s >= steps) {
            ft.push_back(s * dt);
            fl.push_back(std::log(qn));
        }
        if (s == steps) break;
        const VectorXd qn1 = ((c.array() * q.array() + dt * p.array()) / det.array()).matrix();
        p = ((c.array() * p.array() - dt * l.array() * q.array()) / det.array()).matrix();
        q = qn1;
    }
    tr.max_rel_drift = drift / std::max(scale, 1e-300);
    const double m = static_cast<double>(ft.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < ft.size(); ++i) {
        sx += ft[i];
        sy += fl[i];
        sxx += ft[i] * ft[i];
        sxy += ft[i] * fl[i];
    }
    tr.growth_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return tr;
}

VectorXd spectral_projection(const SecondOrderSystem& sys, const VectorXd& x, double lo, double hi) {
    VectorXd c = sys.U.transpose() * x;
    for (int i = 0; i < c.size(); ++i)
        if (sys.lambda(i) < lo || sys.lambda(i) > hi) c(i) = 0;
    return sys.U * c;
}

WeylCheck weyl_quotient(const AxiStar& star, double r_star, double h, double k) {
    WeylCheck w;
    w.r_star = r_star;
    w.h = h;
    w.k = k;
    const VelocityBasis v = stream_fields(star, Parity::even, {cubic_bspline(r_star, h)}, {sine_z(k)});
    const QuadraticFormMatrix f = assemble_Ltilde(star, v);
    w.quotient = f.Q(0, 0) / f.G(0, 0);
    w.upsilon_center = upsilon_at(star, r_star);
    double mn = 1e300, mx = -1e300, amax = 0;
    for (int s = 0; s <= 200; ++s) {
        const double u = upsilon_at(star, std::max(0.0, r_star - 2 * h + 4 * h * s / 200));
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    for (int s = 0; s <= 400; ++s) amax = std::max(amax, std::abs(upsilon_at(star, star.R0 * s / 400)));
    w.upsilon_oscillation = mx - mn;
    w.tolerance = w.upsilon_oscillation + 0.05 * amax;
    return w;
}

}  // namespace rotstar
