#pragma once

#include <vector>

namespace rotstar {

enum class EosKind { polytropic, asymptotic };

struct EosParams {
    EosKind kind = EosKind::polytropic;
    double c_minus = 1.0;
    double gamma0 = 5.0 / 3.0;
    double c_plus = 0.0;  // 0 selects the default crossing value
    double gamma_inf = 1.25;
    double blend_lo = 1.0;
    double blend_hi = 10.0;
};

// Barotropic pressure law P(rho). Enthalpy Phi'(rho) = int_0^rho P'(s)/s ds.
// Immutable after construction.
class EquationOfState {
public:
    explicit EquationOfState(const EosParams& p);
    static EquationOfState polytrope(double c, double gamma);

    const EosParams& params() const { return p_; }
    double gamma0() const { return p_.gamma0; }

    double pressure(double rho) const;
    double dpressure(double rho) const;          // P'(rho)
    double enthalpy(double rho) const;           // Phi'(rho)
    double enthalpy_second(double rho) const;    // Phi''(rho) = P'(rho)/rho
    double enthalpy_inverse(double h) const;
    // 1/Phi''(rho) = rho/P'(rho); finite at vacuum (returns 0 there).
    double inv_enthalpy_second(double rho) const;

private:
    double log_p(double x) const;
    double dlog_p(double x) const;
    double blend_integral(double x_from, double x_to) const;

    EosParams p_;
    double x0_ = 0, x1_ = 0, p0_ = 0, p1_ = 0;
    double h_lo_ = 0, h_hi_ = 0;
    std::vector<double> tab_x_, tab_h_, tab_logh_;
};

}  // namespace rotstar
