#include "rotstar/eos.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "rotstar/errors.hpp"

namespace rotstar {

namespace {
constexpr int kTable = 512;
using Gauss20 = boost::math::quadrature::gauss<double, 20>;
}  // namespace

EquationOfState EquationOfState::polytrope(double c, double gamma) {
    EosParams p;
    p.kind = EosKind::polytropic;
    p.c_minus = c;
    p.gamma0 = gamma;
    return EquationOfState(p);
}

EquationOfState::EquationOfState(const EosParams& p) : p_(p) {
    if (!(p_.c_minus > 0)) throw DomainError("eos: c_minus must be positive");
    const bool poly = p_.kind == EosKind::polytropic;
    const double g0 = p_.gamma0;
    if (!(g0 > 1.2 && (poly ? g0 <= 2.0 : g0 < 2.0)))
        throw DomainError("eos: gamma0 out of range (6/5, 2)");
    if (poly) return;

    const double gi = p_.gamma_inf;
    const bool gi_ok = (gi > 1.0 && gi < 1.2) || (gi > 1.2 && gi < 4.0 / 3.0);
    if (!gi_ok) throw DomainError("eos: gamma_inf out of range (1,6/5)U(6/5,4/3)");
    if (!(p_.blend_lo > 0 && p_.blend_hi > p_.blend_lo))
        throw DomainError("eos: blend interval must satisfy 0 < lo < hi");
    if (p_.c_plus <= 0) {
        const double rx = std::sqrt(p_.blend_lo * p_.blend_hi);
        p_.c_plus = p_.c_minus * std::pow(rx, g0 - gi);
    }
    x0_ = std::log(p_.blend_lo);
    x1_ = std::log(p_.blend_hi);
    p0_ = std::log(p_.c_minus) + g0 * x0_;
    p1_ = std::log(p_.c_plus) + gi * x1_;
    for (int i = 0; i <= 1000; ++i) {
        const double x = x0_ + (x1_ - x0_) * i / 1000.0;
        if (!(dlog_p(x) > 0))
            throw DomainError("eos: blend produces non-increasing pressure; adjust c_plus or blend");
    }

    h_lo_ = p_.c_minus * g0 / (g0 - 1.0) * std::pow(p_.blend_lo, g0 - 1.0);
    tab_x_.resize(kTable + 1);
    tab_h_.resize(kTable + 1);
    tab_logh_.resize(kTable + 1);
    tab_x_[0] = x0_;
    tab_h_[0] = h_lo_;
    for (int k = 1; k <= kTable; ++k) {
        tab_x_[k] = x0_ + (x1_ - x0_) * k / kTable;
        tab_h_[k] = tab_h_[k - 1] + blend_integral(tab_x_[k - 1], tab_x_[k]);
    }
    tab_x_[kTable] = x1_;
    h_hi_ = tab_h_[kTable];
    for (int k = 0; k <= kTable; ++k) tab_logh_[k] = std::log(tab_h_[k]);
}

double EquationOfState::log_p(double x) const {
    const double d = x1_ - x0_;
    const double t = (x - x0_) / d;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0_ + (t3 - 2 * t2 + t) * d * p_.gamma0 +
           (-2 * t3 + 3 * t2) * p1_ + (t3 - t2) * d * p_.gamma_inf;
}

double EquationOfState::dlog_p(double x) const {
    const double d = x1_ - x0_;
    const double t = (x - x0_) / d;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * p0_ + (-6 * t2 + 6 * t) * p1_) / d +
           (3 * t2 - 4 * t + 1) * p_.gamma0 + (3 * t2 - 2 * t) * p_.gamma_inf;
}

// int P'(s)/s ds over s in [e^a, e^b] = int P'(e^x) dx.
double EquationOfState::blend_integral(double a, double b) const {
    auto f = [this](double x) { return std::exp(log_p(x) - x) * dlog_p(x); };
    return Gauss20::integrate(f, a, b);
}

double EquationOfState::pressure(double rho) const {
    if (rho < 0 || std::isnan(rho)) throw DomainError("pressure: negative density");
    if (rho == 0) return 0.0;
    if (p_.kind == EosKind::polytropic || rho <= p_.blend_lo)
        return p_.c_minus * std::pow(rho, p_.gamma0);
    if (rho >= p_.blend_hi) return p_.c_plus * std::pow(rho, p_.gamma_inf);
    return std::exp(log_p(std::log(rho)));
}

double EquationOfState::dpressure(double rho) const {
    if (rho < 0 || std::isnan(rho)) throw DomainError("dpressure: negative density");
    if (rho == 0) return 0.0;
    if (p_.kind == EosKind::polytropic || rho <= p_.blend_lo)
        return p_.c_minus * p_.gamma0 * std::pow(rho, p_.gamma0 - 1.0);
    if (rho >= p_.blend_hi) return p_.c_plus * p_.gamma_inf * std::pow(rho, p_.gamma_inf - 1.0);
    const double x = std::log(rho);
    return std::exp(log_p(x) - x) * dlog_p(x);
}

double EquationOfState::enthalpy(double rho) const {
    if (rho < 0 || std::isnan(rho)) throw DomainError("enthalpy: negative density");
    if (rho == 0) return 0.0;
    const double g0 = p_.gamma0;
    if (p_.kind == EosKind::polytropic || rho <= p_.blend_lo)
        return p_.c_minus * g0 / (g0 - 1.0) * std::pow(rho, g0 - 1.0);
    if (rho >= p_.blend_hi) {
        const double gi = p_.gamma_inf;
        return h_hi_ + p_.c_plus * gi / (gi - 1.0) *
                           (std::pow(rho, gi - 1.0) - std::pow(p_.blend_hi, gi - 1.0));
    }
    const double x = std::log(rho);
    int k = static_cast<int>((x - x0_) / (x1_ - x0_) * kTable);
    k = std::clamp(k, 0, kTable - 1);
    return tab_h_[k] + blend_integral(tab_x_[k], x);
}

double EquationOfState::enthalpy_second(double rho) const {
    if (!(rho > 0)) throw DomainError("enthalpy_second: density must be positive");
    return dpressure(rho) / rho;
}

double EquationOfState::inv_enthalpy_second(double rho) const {
    if (rho < 0) throw DomainError("inv_enthalpy_second: negative density");
    if (rho == 0) return 0.0;
    return rho / dpressure(rho);
}

double EquationOfState::enthalpy_inverse(double h) const {
    if (h < 0 || std::isnan(h)) throw DomainError("enthalpy_inverse: negative enthalpy");
    if (h == 0) return 0.0;
    const double g0 = p_.gamma0;
    if (p_.kind == EosKind::polytropic || h <= h_lo_)
        return std::pow(h * (g0 - 1.0) / (p_.c_minus * g0), 1.0 / (g0 - 1.0));
    if (h >= h_hi_) {
        const double gi = p_.gamma_inf;
        const double base = std::pow(p_.blend_hi, gi - 1.0) + (h - h_hi_) * (gi - 1.0) / (p_.c_plus * gi);
        return std::pow(base, 1.0 / (gi - 1.0));
    }
    const double lh = std::log(h);
    auto it = std::upper_bound(tab_logh_.begin(), tab_logh_.end(), lh);
    int k = static_cast<int>(it - tab_logh_.begin()) - 1;
    k = std::clamp(k, 0, kTable - 1);
    double a = tab_x_[k], b = tab_x_[k + 1];
    const double w = (lh - tab_logh_[k]) / (tab_logh_[k + 1] - tab_logh_[k]);
    double x = a + w * (b - a);
    // Safeguarded Newton in x = log(rho): d/dx Phi'(e^x) = P'(e^x).
    for (int it_n = 0; it_n < 60; ++it_n) {
        const double rho = std::exp(x);
        const double f = tab_h_[k] + blend_integral(tab_x_[k], x) - h;
        if (f > 0) b = x; else a = x;
        const double fp = dpressure(rho);
        double xn = x - f / fp;
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        const double dx = std::abs(xn - x);
        x = xn;
        if (dx < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return std::exp(x);
}

}  // namespace rotstar
