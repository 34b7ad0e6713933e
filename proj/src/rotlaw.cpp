#include "rotstar/rotlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "rotstar/errors.hpp"
#include "rotstar/spline1d.hpp"

namespace rotstar {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

Spline1D::Spline1D(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n < 4 || y.size() != x.size()) throw DomainError("spline: need at least 4 matching samples");
    for (int i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("spline: abscissae must increase strictly");
    x0_ = x.front();
    x1_ = x.back();
    Eigen::RowVectorXd pts(n), kp(n);
    for (int i = 0; i < n; ++i) {
        pts(i) = y[i];
        kp(i) = (x[i] - x0_) / (x1_ - x0_);
    }
    s_ = Eigen::SplineFitting<Eigen::Spline<double, 1>>::Interpolate(pts, 3, kp);
}

double Spline1D::param(double x) const { return std::clamp((x - x0_) / (x1_ - x0_), 0.0, 1.0); }

double Spline1D::operator()(double x) const { return s_(param(x))(0); }

double Spline1D::derivative(double x) const {
    auto d = s_.derivatives(param(x), 1);
    return d(0, 1) / (x1_ - x0_);
}

struct AngularVelocityLaw::Spline {
    Spline1D s;
};

AngularVelocityLaw AngularVelocityLaw::rigid(double omega_c) {
    AngularVelocityLaw l;
    l.form_ = LawForm::rigid;
    l.omega_c = omega_c;
    return l;
}

AngularVelocityLaw AngularVelocityLaw::power_tail(double omega_c, double r_c, double p) {
    if (!(r_c > 0)) throw DomainError("power_tail: r_c must be positive");
    AngularVelocityLaw l;
    l.form_ = LawForm::power_tail;
    l.omega_c = omega_c;
    l.r_c = r_c;
    l.p = p;
    return l;
}

AngularVelocityLaw AngularVelocityLaw::table(const std::vector<double>& r, const std::vector<double>& omega) {
    if (r.empty() || r.front() != 0.0) throw DomainError("table law: first sample must be at r = 0");
    std::vector<double> u(r.size());
    for (size_t i = 0; i < r.size(); ++i) u[i] = r[i] * r[i];
    AngularVelocityLaw l;
    l.form_ = LawForm::table;
    l.spline_ = std::make_shared<Spline>(Spline{Spline1D(u, omega)});
    return l;
}

AngularVelocityLaw AngularVelocityLaw::scaled(double c) const {
    AngularVelocityLaw l = *this;
    l.scale_ *= c;
    return l;
}

double AngularVelocityLaw::r_max() const {
    if (form_ == LawForm::table) return std::sqrt(spline_->s.x_max());
    return std::numeric_limits<double>::infinity();
}

double AngularVelocityLaw::omega_u(double u) const {
    switch (form_) {
        case LawForm::rigid: return scale_ * omega_c;
        case LawForm::power_tail: return scale_ * omega_c * std::pow(1 + u / (r_c * r_c), -p);
        case LawForm::table: return scale_ * spline_->s(u);
    }
    return 0;
}

double AngularVelocityLaw::domega_du(double u) const {
    switch (form_) {
        case LawForm::rigid: return 0.0;
        case LawForm::power_tail:
            return -scale_ * p * omega_c * std::pow(1 + u / (r_c * r_c), -p - 1) / (r_c * r_c);
        case LawForm::table: return scale_ * spline_->s.derivative(u);
    }
    return 0;
}

double AngularVelocityLaw::omega(double r) const { return omega_u(r * r); }
double AngularVelocityLaw::domega_dr(double r) const { return 2 * r * domega_du(r * r); }
double AngularVelocityLaw::d_omega_r2(double r) const { return domega_dr(r) * r * r + 2 * omega(r) * r; }

double AngularVelocityLaw::discriminant(double r) const {
    const double u = r * r;
    const double w = omega_u(u);
    return 4 * w * w + 4 * w * domega_du(u) * u;
}

double AngularVelocityLaw::rot_potential(double r) const {
    if (r <= 0) return 0.0;
    if (form_ == LawForm::rigid) {
        const double w = scale_ * omega_c;
        return 0.5 * w * w * r * r;
    }
    if (form_ == LawForm::power_tail) {
        const double w2 = scale_ * scale_ * omega_c * omega_c;
        const double x2 = r * r / (r_c * r_c);
        const double e = 1 - 2 * p;
        const double I = std::abs(e) < 1e-12 ? std::log1p(x2) : (std::pow(1 + x2, e) - 1) / e;
        return 0.5 * w2 * r_c * r_c * I;
    }
    // int_0^r omega^2 s ds = 1/2 int_0^{r^2} omega(u)^2 du
    auto f = [this](double u) { const double w = omega_u(u); return 0.5 * w * w; };
    const int pieces = 8;
    double acc = 0;
    const double U = r * r;
    for (int k = 0; k < pieces; ++k) acc += Gauss20::integrate(f, U * k / pieces, U * (k + 1) / pieces);
    return acc;
}

double discriminant(const AngularVelocityLaw& law, double r) { return law.discriminant(r); }

RayleighClass classify_rayleigh(const AngularVelocityLaw& law, double r0, double r1, int n_samples) {
    if (!(r1 > r0) || r0 < 0) throw DomainError("classify_rayleigh: invalid interval");
    RayleighClass out;
    int imin = 0, imax = 0;
    std::vector<double> v(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        v[i] = law.discriminant(r0 + (r1 - r0) * i / (n_samples - 1));
        if (v[i] < v[imin]) imin = i;
        if (v[i] > v[imax]) imax = i;
    }
    const double h = (r1 - r0) / (n_samples - 1);
    const int bits = std::numeric_limits<double>::digits / 2;
    auto refine = [&](int i, double sign) {
        const double a = std::max(r0, r0 + (i - 1) * h), b = std::min(r1, r0 + (i + 1) * h);
        auto res = boost::math::tools::brent_find_minima(
            [&](double r) { return sign * law.discriminant(r); }, a, b, bits);
        return std::pair<double, double>(res.first, sign * res.second);
    };
    auto mn = refine(imin, 1.0);
    auto mx = refine(imax, -1.0);
    out.witness = mn.first;
    out.min_upsilon = std::min(mn.second, v[imin]);
    out.max_upsilon = std::max(mx.second, v[imax]);
    out.stable = out.min_upsilon > 0;
    return out;
}

CasimirTable casimir_g0(const AngularVelocityLaw& law, const std::vector<double>& r_grid) {
    CasimirTable t;
    const int n = static_cast<int>(r_grid.size());
    if (n < 4) throw DomainError("casimir_g0: grid too small");
    t.r = r_grid;
    t.s.resize(n);
    t.g.resize(n);
    t.g_closed.resize(n);
    t.dg.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = r_grid[i];
        t.s[i] = law.omega(r) * r * r;
        if (i > 0 && !(t.s[i] > t.s[i - 1])) {
            std::ostringstream os;
            os << "casimir_g0: omega r^2 not increasing near r=" << r << " (discriminant <= 0)";
            throw PreconditionError(os.str());
        }
    }
    // g0(s(r)) = -int_0^r omega d(omega r^2)
    auto f = [&](double r) { return -law.omega(r) * law.d_omega_r2(r); };
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) acc += Gauss20::integrate(f, r_grid[i - 1], r_grid[i]);
        else if (r_grid[0] > 0) acc += Gauss20::integrate(f, 0.0, r_grid[0]);
        t.g[i] = acc;
        const double w = law.omega(r_grid[i]);
        t.g_closed[i] = -0.5 * w * w * r_grid[i] * r_grid[i] - law.rot_potential(r_grid[i]);
        t.max_closed_form_defect = std::max(t.max_closed_form_defect, std::abs(t.g[i] - t.g_closed[i]));
    }
    Spline1D sp(t.s, t.g);
    for (int i = 0; i < n; ++i) {
        t.dg[i] = sp.derivative(t.s[i]);
        t.max_derivative_defect = std::max(t.max_derivative_defect, std::abs(t.dg[i] + law.omega(r_grid[i])));
    }
    return t;
}

struct MomentumDistribution::Table {
    Spline1D s;
};

MomentumDistribution MomentumDistribution::power(double amplitude, double exponent) {
    MomentumDistribution d;
    d.form_ = JForm::power;
    d.amplitude = amplitude;
    d.exponent = exponent;
    return d;
}

MomentumDistribution MomentumDistribution::bb() {
    MomentumDistribution d;
    d.form_ = JForm::bb;
    return d;
}

MomentumDistribution MomentumDistribution::unit_mass_table(const std::vector<double>& x, const std::vector<double>& j) {
    MomentumDistribution d;
    d.form_ = JForm::unit_mass_table;
    d.table_ = std::make_shared<Table>(Table{Spline1D(x, j)});
    return d;
}

double MomentumDistribution::j(double p, double q) const {
    switch (form_) {
        case JForm::power: return amplitude * std::pow(std::max(p, 0.0), exponent);
        case JForm::bb: {
            const double x = std::clamp(p / q, 0.0, 1.0);
            return (1.0 - std::pow(1.0 - x, 2.0 / 3.0)) / q;
        }
        case JForm::unit_mass_table: return table_->s(std::clamp(p / q, 0.0, 1.0));
    }
    return 0;
}

double MomentumDistribution::j_p(double p, double q) const {
    switch (form_) {
        case JForm::power:
            return p > 0 ? amplitude * exponent * std::pow(p, exponent - 1) : (exponent == 1 ? amplitude : 0.0);
        case JForm::bb: {
            const double x = std::clamp(p / q, 0.0, 1.0 - 1e-15);
            return (2.0 / 3.0) * std::pow(1.0 - x, -1.0 / 3.0) / (q * q);
        }
        case JForm::unit_mass_table: return table_->s.derivative(std::clamp(p / q, 0.0, 1.0)) / q;
    }
    return 0;
}

double MomentumDistribution::J_diag_q(double q) const {
    const double h = 1e-6 * q;
    return (J(q + h, q + h) - J(q - h, q - h)) / (2 * h);
}

double MomentumDistribution::check_smooth(double q) const {
    if (std::abs(j(0.0, q)) > 1e-14 * std::max(1.0, std::abs(j(q, q))))
        throw PreconditionError("momentum distribution: j(0,q) must vanish");
    return j_p(0.0, q);
}

bool MomentumDistribution::rayleigh_stable_on(double q, int n) const {
    for (int i = 1; i < n; ++i) {
        const double p = q * i / n;
        if (!(J_p(p, q) > 0)) return false;
    }
    return true;
}

AngularVelocityLaw omega_from_j(const MomentumDistribution& j, const std::vector<double>& r,
                                const std::vector<double>& m_of_r, double M, double eps) {
    const int n = static_cast<int>(r.size());
    if (n < 4 || m_of_r.size() != r.size()) throw DomainError("omega_from_j: need matching r and m samples");
    j.check_smooth(M);
    for (int i = 1; i < n; ++i)
        if (m_of_r[i] < m_of_r[i - 1]) throw PreconditionError("omega_from_j: m(r) must be nondecreasing");
    std::vector<double> rr, w;
    rr.push_back(0.0);
    w.push_back(0.0);
    for (int i = 0; i < n; ++i) {
        if (r[i] <= 0) continue;
        rr.push_back(r[i]);
        w.push_back(eps * j.j(2 * M_PI * m_of_r[i], M) / (r[i] * r[i]));
    }
    // Axis value from the quadratic-in-u fit through the first three samples.
    const double u1 = rr[1] * rr[1], u2 = rr[2] * rr[2], u3 = rr[3] * rr[3];
    w[0] = w[1] * u2 * u3 / ((u1 - u2) * (u1 - u3)) + w[2] * u1 * u3 / ((u2 - u1) * (u2 - u3)) +
           w[3] * u1 * u2 / ((u3 - u1) * (u3 - u2));
    return AngularVelocityLaw::table(rr, w);
}

}  // namespace rotstar
