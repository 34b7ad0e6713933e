#include "rotstar/basis.hpp"

#include <cmath>

#include "rotstar/errors.hpp"

namespace rotstar {

void legendre_with_derivative(int n_max, double x, double* p, double* dp, double* d2p) {
    p[0] = 1.0;
    dp[0] = 0.0;
    if (d2p) d2p[0] = 0.0;
    if (n_max >= 1) {
        p[1] = x;
        dp[1] = 1.0;
        if (d2p) d2p[1] = 0.0;
    }
    for (int n = 2; n <= n_max; ++n) {
        p[n] = ((2 * n - 1) * x * p[n - 1] - (n - 1) * p[n - 2]) / n;
        dp[n] = dp[n - 2] + (2 * n - 1) * p[n - 1];
        if (d2p) d2p[n] = d2p[n - 2] + (2 * n - 1) * dp[n - 1];
    }
}

MuDerivative mu_derivative(const AxiStar& star, double h, const ScfOptions& opt) {
    auto solve = [&](double f) {
        return solve_equilibrium(star.eos, star.rotation, star.mu * (1 + f), star.poisson, opt, &star.H);
    };
    const AxiStar p1 = solve(h), m1 = solve(-h), p2 = solve(h / 2), m2 = solve(-h / 2);
    const double d1 = 2 * h * star.mu, d2 = h * star.mu;
    MuDerivative out;
    out.dH = (4 * (p2.H - m2.H) / d2 - (p1.H - m1.H) / d1) / 3;
    out.dM = (4 * (p2.M - m2.M) / d2 - (p1.M - m1.M) / d1) / 3;
    out.dc = (4 * (p2.c_const - m2.c_const) / d2 - (p1.c_const - m1.c_const) / d1) / 3;
    return out;
}

VectorXd translation_chi(const AxiStar& star) { return star.grid().d_dz(star.H, Parity::even); }

PerturbationBasis basis_from_chi(const AxiStar& star, Parity parity, const MatrixXd& chi_in) {
    const AxiGrid& g = star.grid();
    if (chi_in.rows() != g.size()) throw DomainError("basis: chi has the wrong number of nodes");
    const VectorXd D = star.inv_phi2();
    PerturbationBasis b;
    b.parity = parity;
    b.chi = chi_in;
    b.chi_r.resize(g.size(), chi_in.cols());
    b.chi_z.resize(g.size(), chi_in.cols());
    for (int c = 0; c < chi_in.cols(); ++c) {
        b.chi_r.col(c) = g.d_dr(chi_in.col(c));
        b.chi_z.col(c) = g.d_dz(chi_in.col(c), parity);
    }
    for (int n = 0; n < g.size(); ++n)
        if (!star.in_support(n)) b.chi.row(n).setZero();
    b.drho = D.asDiagonal() * b.chi;
    const VectorXd w = g.weights();
    b.gram = b.chi.transpose() * (w.cwiseProduct(D)).asDiagonal() * b.chi;
    b.mass = b.drho.transpose() * w;
    if (parity == Parity::odd) b.mass.setZero();
    return b;
}

PerturbationBasis make_basis(const AxiStar& star, Parity parity, const BasisSpec& spec, const VectorXd* mode_chi) {
    const AxiGrid& g = star.grid();
    const bool odd = parity == Parity::odd;
    const int dz = odd ? spec.deg_z_odd : spec.deg_z;
    std::vector<RadialFn> rf;
    std::vector<AxialFn> zf;
    for (int a = 0; a <= spec.deg_r; ++a) rf.push_back(legendre_r2(a, star.R0));
    for (int b = 0; b <= dz; ++b) zf.push_back(legendre_z2(b, star.Z0, odd));
    const int K = static_cast<int>(rf.size() * zf.size());
    const int ncol = K + (mode_chi ? 1 : 0);
    MatrixXd chi(g.size(), ncol), cr(g.size(), ncol), cz(g.size(), ncol);
    for (int i = 0; i < g.nr; ++i) {
        std::vector<RadialFactor> R;
        for (const auto& f : rf) R.push_back(f(g.r(i)));
        for (int k = 0; k < g.nz; ++k) {
            const int n = g.idx(i, k);
            int c = 0;
            for (const auto& Ra : R)
                for (const auto& f : zf) {
                    const AxialFactor Zb = f(g.z(k));
                    chi(n, c) = Ra.f * Zb.f;
                    cr(n, c) = Ra.d * Zb.f;
                    cz(n, c) = Ra.f * Zb.d;
                    ++c;
                }
        }
    }
    std::vector<std::string> labels;
    for (int a = 0; a <= spec.deg_r; ++a)
        for (int b = 0; b <= dz; ++b) labels.push_back("P" + std::to_string(a) + "xP" + std::to_string(b));
    if (mode_chi) {
        chi.col(K) = *mode_chi;
        cr.col(K) = g.d_dr(*mode_chi);
        cz.col(K) = g.d_dz(*mode_chi, parity);
        labels.push_back(odd ? "d_z" : "d_mu");
    }
    PerturbationBasis b = basis_from_chi(star, parity, chi);
    b.chi_r = cr;
    b.chi_z = cz;
    b.labels = labels;
    if (mode_chi) b.mode_index = K;
    return b;
}

PerturbationBasis remove_mode(const PerturbationBasis& b) {
    if (b.mode_index < 0) return b;
    const int t = b.mode_index;
    const int K = b.size() - 1;
    MatrixXd P = MatrixXd::Zero(b.size(), K);
    int c = 0;
    for (int k = 0; k < b.size(); ++k) {
        if (k == t) continue;
        P(k, c) = 1.0;
        P(t, c) = -b.gram(k, t) / b.gram(t, t);
        ++c;
    }
    PerturbationBasis out;
    out.parity = b.parity;
    out.chi = b.chi * P;
    out.chi_r = b.chi_r * P;
    out.chi_z = b.chi_z * P;
    out.drho = b.drho * P;
    out.gram = P.transpose() * b.gram * P;
    out.mass = P.transpose() * b.mass;
    for (int k = 0; k < b.size(); ++k)
        if (k != t) out.labels.push_back(k < static_cast<int>(b.labels.size()) ? b.labels[k] : "");
    return out;
}

RadialFn legendre_r2(int a, double R) {
    return [a, R](double r) {
        std::vector<double> p(a + 1), dp(a + 1), d2p(a + 1);
        legendre_with_derivative(a, 2 * r * r / (R * R) - 1, p.data(), dp.data(), d2p.data());
        const double s = 4 / (R * R);  // dx/dr = s r
        RadialFactor f;
        f.f = p[a];
        f.d_over_r = dp[a] * s;
        f.d = f.d_over_r * r;
        f.dd = d2p[a] * s * s * r * r + dp[a] * s;
        return f;
    };
}

AxialFn legendre_z2(int b, double Z, bool odd) {
    return [b, Z, odd](double z) {
        std::vector<double> p(b + 1), dp(b + 1), d2p(b + 1);
        legendre_with_derivative(b, 2 * z * z / (Z * Z) - 1, p.data(), dp.data(), d2p.data());
        const double s = 4 / (Z * Z);
        const double P = p[b], P1 = dp[b] * s * z, P2 = d2p[b] * s * s * z * z + dp[b] * s;
        AxialFactor f;
        if (!odd) {
            f.f = P;
            f.d = P1;
            f.dd = P2;
        } else {
            f.f = z / Z * P;
            f.d = P / Z + z / Z * P1;
            f.dd = 2 * P1 / Z + z / Z * P2;
        }
        return f;
    };
}

RadialFn cubic_bspline(double c, double h) {
    return [c, h](double r) {
        const double t = (r - c) / h + 2;  // support t in [0, 4]
        RadialFactor f;
        if (t <= 0 || t >= 4) return f;
        double v, d, dd;
        if (t < 1) {
            v = t * t * t / 6;
            d = t * t / 2;
            dd = t;
        } else if (t < 2) {
            const double u = t - 1;
            v = (1 + 3 * u + 3 * u * u - 3 * u * u * u) / 6;
            d = (3 + 6 * u - 9 * u * u) / 6;
            dd = (6 - 18 * u) / 6;
        } else if (t < 3) {
            const double u = 3 - t;
            v = (1 + 3 * u + 3 * u * u - 3 * u * u * u) / 6;
            d = -(3 + 6 * u - 9 * u * u) / 6;
            dd = (6 - 18 * u) / 6;
        } else {
            const double u = 4 - t;
            v = u * u * u / 6;
            d = -u * u / 2;
            dd = u;
        }
        f.f = v;
        f.d = d / h;
        f.dd = dd / (h * h);
        f.d_over_r = r > 0 ? f.d / r : 0.0;
        return f;
    };
}

AxialFn sine_z(double k) {
    return [k](double z) { return AxialFactor{std::sin(k * z), k * std::cos(k * z), -k * k * std::sin(k * z)}; };
}

namespace {

struct DensityGradient {
    VectorXd dr, dz;
};

DensityGradient density_gradient(const AxiStar& star) {
    const AxiGrid& g = star.grid();
    const VectorXd D = star.inv_phi2();
    return {g.d_dr(star.H).cwiseProduct(D), g.d_dz(star.H, Parity::even).cwiseProduct(D)};
}

}  // namespace

VelocityBasis gradient_fields(const AxiStar& star, Parity parity, const std::vector<RadialFn>& rf,
                              const std::vector<AxialFn>& zf, bool skip_constant) {
    const AxiGrid& g = star.grid();
    const DensityGradient gr = density_gradient(star);
    int n = static_cast<int>(rf.size() * zf.size());
    if (skip_constant) --n;
    VelocityBasis v;
    v.parity = parity;
    v.vr.resize(g.size(), n);
    v.vz.resize(g.size(), n);
    v.sigma.resize(g.size(), n);
    v.n_gradient = n;
    for (int i = 0; i < g.nr; ++i) {
        std::vector<RadialFactor> R;
        for (const auto& f : rf) R.push_back(f(g.r(i)));
        for (int k = 0; k < g.nz; ++k) {
            const int node = g.idx(i, k);
            const double rho = star.rho(node);
            int c = 0, raw = 0;
            for (const auto& Ra : R)
                for (const auto& f : zf) {
                    if (skip_constant && raw++ == 0) continue;
                    const AxialFactor Zb = f(g.z(k));
                    const double cr = Ra.d * Zb.f, cz = Ra.f * Zb.d;
                    const double lap = (Ra.dd + Ra.d_over_r) * Zb.f + Ra.f * Zb.dd;
                    v.vr(node, c) = cr;
                    v.vz(node, c) = cz;
                    v.sigma(node, c) = rho > 0 ? -(gr.dr(node) * cr + gr.dz(node) * cz + rho * lap) : 0.0;
                    ++c;
                }
        }
    }
    return v;
}

VelocityBasis stream_fields(const AxiStar& star, Parity parity, const std::vector<RadialFn>& rf,
                            const std::vector<AxialFn>& tf) {
    const AxiGrid& g = star.grid();
    const DensityGradient gr = density_gradient(star);
    const int n = static_cast<int>(rf.size() * tf.size());
    VelocityBasis v;
    v.parity = parity;
    v.vr = MatrixXd::Zero(g.size(), n);
    v.vz = MatrixXd::Zero(g.size(), n);
    v.sigma = MatrixXd::Zero(g.size(), n);
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.r(i);
        std::vector<RadialFactor> R;
        for (const auto& f : rf) R.push_back(f(r));
        for (int k = 0; k < g.nz; ++k) {
            const int node = g.idx(i, k);
            const double rho = star.rho(node);
            if (!(rho > 0)) continue;
            int c = 0;
            for (const auto& Ra : R)
                for (const auto& f : tf) {
                    const AxialFactor t = f(g.z(k));
                    const double a = r * Ra.f * t.f;
                    const double a_z = r * Ra.f * t.d;
                    const double div_ra = (2 * Ra.f + r * Ra.d) * t.f;  // (1/r) d_r(r a)
                    v.vr(node, c) = -2 * a * gr.dz(node) - rho * a_z;
                    v.vz(node, c) = 2 * a * gr.dr(node) + rho * div_ra;
                    ++c;
                }
        }
    }
    return v;
}

VelocityBasis concat(const VelocityBasis& a, const VelocityBasis& b) {
    VelocityBasis v;
    v.parity = a.parity;
    v.vr.resize(a.vr.rows(), a.size() + b.size());
    v.vz.resize(a.vr.rows(), a.size() + b.size());
    v.sigma.resize(a.vr.rows(), a.size() + b.size());
    v.vr << a.vr, b.vr;
    v.vz << a.vz, b.vz;
    v.sigma << a.sigma, b.sigma;
    v.n_gradient = a.n_gradient + b.n_gradient;
    return v;
}

MatrixXd y_gram(const AxiStar& star, const VelocityBasis& v) {
    const VectorXd w = star.grid().weights().cwiseProduct(star.rho);
    MatrixXd A = v.vr.transpose() * w.asDiagonal() * v.vr + v.vz.transpose() * w.asDiagonal() * v.vz;
    return 0.5 * (A + A.transpose());
}

}  // namespace rotstar
