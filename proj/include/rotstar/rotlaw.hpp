#pragma once

#include <memory>
#include <string>
#include <vector>

namespace rotstar {

enum class LawForm { rigid, power_tail, table };

// Angular velocity omega(r), independent of z. Internally a function of u = r^2,
// which keeps the discriminant regular on the axis.
class AngularVelocityLaw {
public:
    static AngularVelocityLaw rigid(double omega_c);
    static AngularVelocityLaw power_tail(double omega_c, double r_c, double p);
    // Tabulated samples (r_k, omega_k), r_0 = 0, splined in u = r^2.
    static AngularVelocityLaw table(const std::vector<double>& r, const std::vector<double>& omega);

    LawForm form() const { return form_; }
    double omega(double r) const;
    double domega_dr(double r) const;
    double d_omega_r2(double r) const;     // d/dr (omega r^2)
    double discriminant(double r) const;   // d/dr(omega^2 r^4) / r^3, equals 4 omega(0)^2 at r = 0
    double rot_potential(double r) const;  // int_0^r omega^2 s ds
    AngularVelocityLaw scaled(double c) const;
    double r_max() const;  // table extent (infinity for analytic forms)

    double omega_c = 0, r_c = 1, p = 0;

private:
    struct Spline;
    double omega_u(double u) const;
    double domega_du(double u) const;
    LawForm form_ = LawForm::rigid;
    double scale_ = 1.0;
    std::shared_ptr<const Spline> spline_;
};

double discriminant(const AngularVelocityLaw& law, double r);

struct RayleighClass {
    bool stable = true;
    double witness = 0;  // minimizer of the discriminant
    double min_upsilon = 0, max_upsilon = 0;
    double a() const { return -min_upsilon; }
    double b() const { return max_upsilon; }
};

RayleighClass classify_rayleigh(const AngularVelocityLaw& law, double r0, double r1, int n_samples = 2001);

struct CasimirTable {
    std::vector<double> r, s, g, g_closed, dg;
    double max_derivative_defect = 0;  // max |g0'(omega r^2) + omega|
    double max_closed_form_defect = 0; // max |g0 - (-omega^2 r^2/2 - int omega^2 s ds)|
};

CasimirTable casimir_g0(const AngularVelocityLaw& law, const std::vector<double>& r_grid);

enum class JForm { power, bb, unit_mass_table };

// Specific angular momentum j(p, q) of cylinder mass p and total mass q.
class MomentumDistribution {
public:
    static MomentumDistribution power(double amplitude, double exponent);
    static MomentumDistribution bb();
    static MomentumDistribution unit_mass_table(const std::vector<double>& x, const std::vector<double>& j);

    JForm form() const { return form_; }
    double j(double p, double q) const;
    double j_p(double p, double q) const;
    double J(double p, double q) const { const double v = j(p, q); return v * v; }
    double J_p(double p, double q) const { return 2 * j(p, q) * j_p(p, q); }
    // d/dq J(q, q): used for columns outside the support, where p = q.
    double J_diag_q(double q) const;
    // Throws PreconditionError when j(0,q) != 0; returns d_p j(0,q).
    double check_smooth(double q) const;
    bool rayleigh_stable_on(double q, int n = 200) const;

    double amplitude = 1, exponent = 2;

private:
    struct Table;
    JForm form_ = JForm::bb;
    std::shared_ptr<const Table> table_;
};

// omega(r) = eps * j(2 pi m(r), M) / r^2 with m in the convention m(R0) = M / (2 pi).
AngularVelocityLaw omega_from_j(const MomentumDistribution& j, const std::vector<double>& r,
                                const std::vector<double>& m_of_r, double M, double eps);

}  // namespace rotstar
