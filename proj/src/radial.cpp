#include "rotstar/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "rotstar/errors.hpp"
#include "rotstar/parallel.hpp"

namespace rotstar {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

double RadialStar::y_at(double s) const {
    if (s >= R) return M / s - M / R;
    const int n = static_cast<int>(r.size());
    const double h = R / (n - 1);
    int k = std::min(static_cast<int>(s / h), n - 2);
    const double t = (s - r[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * dy[k] + (-2 * t3 + 3 * t2) * y[k + 1] +
           (t3 - t2) * h * dy[k + 1];
}

double RadialStar::dy_at(double s) const {
    if (s >= R) return -M / (s * s);
    const int n = static_cast<int>(r.size());
    const double h = R / (n - 1);
    int k = std::min(static_cast<int>(s / h), n - 2);
    const double t = (s - r[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y[k] + (-6 * t2 + 6 * t) * y[k + 1]) / h + (3 * t2 - 4 * t + 1) * dy[k] +
           (3 * t2 - 2 * t) * dy[k + 1];
}

double RadialStar::rho_at(double s) const {
    const double v = y_at(s);
    return v > 0 ? eos.enthalpy_inverse(v) : 0.0;
}

RadialStar solve_radial(const EquationOfState& eos, double mu, const RadialOptions& opt) {
    if (!(mu > 0)) throw DomainError("solve_radial: mu must be positive");
    const double y0 = eos.enthalpy(mu);
    const double phi2 = eos.enthalpy_second(mu);
    const double a2 = -2.0 * M_PI * mu / 3.0;
    const double a4 = 2.0 * M_PI * M_PI * mu / (15.0 * phi2);
    const double scale = std::sqrt(y0 / (-a2));
    const double r_start = 1e-4 * scale;
    const double r_max = opt.max_radius_factor * scale;

    auto rhs = [&eos](const State& u, State& du, double r) {
        const double rho = u[0] > 0 ? eos.enthalpy_inverse(u[0]) : 0.0;
        du[0] = u[1];
        du[1] = -2.0 * u[1] / r - 4.0 * M_PI * rho;
    };
    auto series = [&](double r) {
        return State{y0 + a2 * r * r + a4 * r * r * r * r, 2 * a2 * r + 4 * a4 * r * r * r};
    };

    auto stepper = odeint::make_dense_output(opt.tol * 1e-2 * y0, opt.tol, odeint::runge_kutta_dopri5<State>());
    State u = series(r_start);
    stepper.initialize(u, r_start, 1e-3 * scale);
    double R = -1;
    while (stepper.current_time() < r_max) {
        auto iv = stepper.do_step(rhs);
        if (stepper.current_state()[0] <= 0) {
            auto f = [&](double t) {
                State s;
                stepper.calc_state(t, s);
                return s[0];
            };
            boost::uintmax_t it = 200;
            auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); };
            auto br = boost::math::tools::toms748_solve(f, iv.first, iv.second, tol, it);
            R = 0.5 * (br.first + br.second);
            break;
        }
    }
    if (R < 0) {
        std::ostringstream os;
        os << "unbounded star: no zero of the enthalpy within r_max=" << r_max << " at mu=" << mu;
        throw SolverError(os.str());
    }

    RadialStar st{eos, mu, R, 0.0, {}, {}, {}, {}};
    const int n = opt.n_profile;
    st.r.resize(n);
    st.y.resize(n);
    st.dy.resize(n);
    st.rho.resize(n);
    for (int k = 0; k < n; ++k) st.r[k] = R * k / (n - 1);
    int k0 = 0;
    while (k0 < n && st.r[k0] <= r_start) {
        State s = series(st.r[k0]);
        st.y[k0] = s[0];
        st.dy[k0] = s[1];
        ++k0;
    }
    State w = series(r_start);
    std::vector<double> times{r_start};
    for (int k = k0; k < n; ++k) times.push_back(st.r[k]);
    int idx = k0 - 1;
    odeint::integrate_times(
        odeint::make_dense_output(opt.tol * 1e-2 * y0, opt.tol, odeint::runge_kutta_dopri5<State>()), rhs, w,
        times.begin(), times.end(), 1e-3 * scale, [&](const State& s, double) {
            if (idx >= k0) {
                st.y[idx] = s[0];
                st.dy[idx] = s[1];
            }
            ++idx;
        });
    st.y[n - 1] = 0.0;
    st.M = -R * R * st.dy[n - 1];
    for (int k = 0; k < n; ++k) st.rho[k] = st.y[k] > 0 ? eos.enthalpy_inverse(st.y[k]) : 0.0;
    st.rho[0] = mu;
    return st;
}

double radial_dmass_dmu(const EquationOfState& eos, double mu, double h, const RadialOptions& opt) {
    auto d = [&](double hh) {
        return (solve_radial(eos, mu * (1 + hh), opt).M - solve_radial(eos, mu * (1 - hh), opt).M) /
               (2 * hh * mu);
    };
    const double d1 = d(h), d2 = d(h / 2);
    return (4 * d2 - d1) / 3;
}

namespace {

struct RadialPoint {
    double R, M, dM, dMR, MR;
};

RadialPoint radial_point(const EquationOfState& eos, double mu, const RadialOptions& opt) {
    const double h = 1e-3;
    auto eval = [&](double m) {
        RadialStar s = solve_radial(eos, m, opt);
        return std::pair<double, double>(s.M, s.M / s.R);
    };
    RadialStar c = solve_radial(eos, mu, opt);
    auto p1 = eval(mu * (1 + h)), m1 = eval(mu * (1 - h));
    auto p2 = eval(mu * (1 + h / 2)), m2 = eval(mu * (1 - h / 2));
    const double dM1 = (p1.first - m1.first) / (2 * h * mu), dM2 = (p2.first - m2.first) / (h * mu);
    const double dR1 = (p1.second - m1.second) / (2 * h * mu), dR2 = (p2.second - m2.second) / (h * mu);
    return {c.R, c.M, (4 * dM2 - dM1) / 3, (4 * dR2 - dR1) / 3, c.M / c.R};
}

// Root of a derivative bracketed by (mu_a, d_a), (mu_b, d_b): secant estimate,
// one extra evaluation, then a secant step on the sub-bracket.
double refine_root(double ma, double da, double mb, double db, const std::function<double(double)>& deriv) {
    const double m1 = ma - da * (mb - ma) / (db - da);
    const double d1 = deriv(m1);
    if ((d1 > 0) == (da > 0)) return m1 - d1 * (mb - m1) / (db - d1);
    return ma - da * (m1 - ma) / (d1 - da);
}

}  // namespace

RadialScan family_scan_radial(const EquationOfState& eos, const std::vector<double>& mu_grid, int jobs,
                              const RadialOptions& opt) {
    if (mu_grid.size() < 5) throw DomainError("family_scan_radial: need at least 5 mu values");
    for (size_t i = 1; i < mu_grid.size(); ++i)
        if (!(mu_grid[i] > mu_grid[i - 1])) throw DomainError("family_scan_radial: mu grid must increase");
    const int n = static_cast<int>(mu_grid.size());
    std::vector<RadialPoint> pts(n);
    parallel_for(n, jobs, [&](int i) {
        try {
            pts[i] = radial_point(eos, mu_grid[i], opt);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << e.what() << " [mu=" << mu_grid[i] << "]";
            throw SolverError(os.str());
        }
    });
    RadialScan out;
    for (int i = 0; i < n; ++i)
        out.rows.push_back({mu_grid[i], pts[i].R, pts[i].M, pts[i].dM, pts[i].MR, pts[i].dMR});
    for (int i = 0; i + 1 < n; ++i) {
        const double a = out.rows[i].dMdmu, b = out.rows[i + 1].dMdmu;
        if (a * b < 0) {
            const double mu_e = refine_root(mu_grid[i], a, mu_grid[i + 1], b,
                                            [&](double m) { return radial_point(eos, m, opt).dM; });
            out.mass_extrema.push_back({mu_e, a > 0, i});
        }
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double a = out.rows[i].dMoverR, b = out.rows[i + 1].dMoverR;
        if (a * b < 0) {
            out.mu_tilde = refine_root(mu_grid[i], a, mu_grid[i + 1], b,
                                       [&](double m) { return radial_point(eos, m, opt).dMR; });
            break;
        }
    }
    return out;
}

std::string radial_scan_csv(const RadialScan& scan) {
    std::ostringstream os;
    os << "mu,R,M,dMdmu,MoverR\n";
    char buf[256];
    for (const auto& r : scan.rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", r.mu, r.R, r.M, r.dMdmu, r.MoverR);
        os << buf;
    }
    return os.str();
}

ReducedD assemble_reduced_D(const RadialStar& star, const DMesh& mesh, Parity parity) {
    const double Rb = mesh.ball_factor * star.R;
    if (!(mesh.ball_factor > 1.0)) throw DomainError("assemble_reduced_D: mesh must strictly contain the support");
    const int ne = mesh.n_elem;
    const double h = Rb / ne;
    std::vector<int> ls;
    for (int l = (parity == Parity::even ? 0 : 1); l <= mesh.l_max; l += 2) ls.push_back(l);

    // Per-element 4-point Gauss data.
    using G4 = boost::math::quadrature::gauss<double, 4>;
    const auto& xa = G4::abscissa();
    const auto& wa = G4::weights();
    std::vector<double> gx, gw;
    for (size_t i = 0; i < xa.size(); ++i) {
        gx.push_back(xa[i]);
        gw.push_back(wa[i]);
        if (xa[i] != 0) {
            gx.push_back(-xa[i]);
            gw.push_back(wa[i]);
        }
    }

    // The form is block diagonal in l: assemble and diagonalise each block.
    std::vector<MatrixXd> Qb, Gb;
    std::vector<VectorXd> kb;
    ReducedD out;
    out.ball_radius = Rb;
    for (int l : ls) {
        const double cl = 4 * M_PI / (2 * l + 1);
        const int first = (l == 0 ? 0 : 1);  // first free node
        const int nb = ne + 1 - first;
        MatrixXd Q = MatrixXd::Zero(nb, nb), G = MatrixXd::Zero(nb, nb);
        VectorXd ker = VectorXd::Zero(nb);
        for (int e = 0; e < ne; ++e) {
            const double s0 = e * h;
            double ke[2][2] = {{0, 0}, {0, 0}}, me[2][2] = {{0, 0}, {0, 0}};
            for (size_t q = 0; q < gx.size(); ++q) {
                const double s = s0 + 0.5 * h * (gx[q] + 1);
                const double w = 0.5 * h * gw[q];
                const double phi[2] = {1 - (s - s0) / h, (s - s0) / h};
                const double dphi[2] = {-1 / h, 1 / h};
                const double rho = s < star.R ? star.rho_at(s) : 0.0;
                const double inv2 = star.eos.inv_enthalpy_second(rho);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        ke[i][j] += w * (dphi[i] * dphi[j] * s * s + l * (l + 1) * phi[i] * phi[j] -
                                         4 * M_PI * inv2 * phi[i] * phi[j] * s * s);
                        me[i][j] += w * phi[i] * phi[j] * s * s;
                    }
            }
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const int gi = e + i - first, gj = e + j - first;
                    if (gi < 0 || gj < 0) continue;
                    Q(gi, gj) += cl * ke[i][j];
                    G(gi, gj) += cl * me[i][j];
                }
        }
        Q(nb - 1, nb - 1) += cl * (l + 1) * Rb;
        if (l == 1)
            for (int k = 1; k <= ne; ++k) ker(k - first) = -star.dy_at(k * h);  // V'(s) = -y'(s)
        Qb.push_back(Q);
        Gb.push_back(G);
        kb.push_back(ker);
        out.block_l.push_back(l);
    }
    int ntot = 0;
    for (const auto& q : Qb) ntot += static_cast<int>(q.rows());
    QuadraticFormMatrix& f = out.form;
    f.Q = MatrixXd::Zero(ntot, ntot);
    f.G = MatrixXd::Zero(ntot, ntot);
    VectorXd ker = VectorXd::Zero(ntot);
    std::vector<std::pair<double, VectorXd>> modes;
    int off = 0;
    for (size_t b = 0; b < Qb.size(); ++b) {
        const int nb = static_cast<int>(Qb[b].rows());
        f.Q.block(off, off, nb, nb) = Qb[b];
        f.G.block(off, off, nb, nb) = Gb[b];
        ker.segment(off, nb) = kb[b];
        const PencilEigen pe = pencil_eigen(Qb[b], Gb[b]);
        for (int i = 0; i < pe.values.size(); ++i) {
            VectorXd v = VectorXd::Zero(ntot);
            v.segment(off, nb) = pe.vectors.col(i);
            modes.emplace_back(pe.values(i), std::move(v));
        }
        off += nb;
    }
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    f.eigenvalues.resize(modes.size());
    f.eigenvectors.resize(ntot, modes.size());
    for (size_t i = 0; i < modes.size(); ++i) {
        f.eigenvalues(i) = modes[i].first;
        f.eigenvectors.col(i) = modes[i].second;
    }
    f.tol_zero = 1e-8 * f.eigenvalues.cwiseAbs().maxCoeff();
    for (int i = 0; i < f.eigenvalues.size(); ++i) {
        if (f.eigenvalues(i) < -f.tol_zero) ++f.inertia.neg;
        else if (f.eigenvalues(i) > f.tol_zero) ++f.inertia.pos;
        else ++f.inertia.zero;
    }
    if (parity == Parity::odd) {
        const VectorXd ov = out.form.G * ker;
        out.adjusted = inertia_with_symmetry_mode(out.form, ov, std::sqrt(ker.dot(ov)));
    } else {
        out.adjusted.inertia = out.form.inertia;
    }
    return out;
}

}  // namespace rotstar
