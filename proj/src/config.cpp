#include "rotstar/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rotstar/errors.hpp"

namespace rotstar {

Json default_config() {
    Json c;
    c["eos"] = {{"kind", "polytropic"}, {"c_minus", 1.0},  {"gamma0", 5.0 / 3.0}, {"c_plus", 0.0},
                {"gamma_inf", 1.25},    {"blend_lo", 1.0}, {"blend_hi", 10.0}};
    c["rotation"] = {
        {"kind", "none"},
        {"law", {{"form", "rigid"}, {"omega_c", 1.0}, {"r_c", 1.0}, {"p", 2.0}, {"r", Json::array()}, {"omega", Json::array()}}},
        {"kappa", 0.0},
        {"j", {{"form", "bb"}, {"amplitude", 1.0}, {"exponent", 2.0}, {"x", Json::array()}, {"j", Json::array()}}},
        {"eps", 0.0}};
    c["mu"] = 1.0;
    c["mu_grid"] = {{"lo", 3.0}, {"hi", 200.0}, {"n", 20}, {"values", Json::array()}};
    c["grid"] = {{"nr", 96}, {"nz", 96}, {"r_factor", 1.4}, {"z_factor", 1.2}, {"l_max", 32}};
    c["scf"] = {{"tol", 1e-12}, {"max_newton", 40}, {"max_gmres", 400}};
    c["basis"] = {{"deg_r", 5}, {"deg_z", 3}, {"deg_z_odd", 2}};
    c["generator"] = {{"enabled", true},     {"rho_deg_r", 4},    {"rho_deg_z", 3},   {"rho_deg_z_odd", 2},
                      {"stream_deg_r", 4},   {"stream_deg_z", 2}, {"theta_deg_r", 4}, {"theta_deg_z", 2}};
    c["spectrum"] = {{"parity", "even"},
                     {"levels", Json::array({Json{{"grad_deg", 1}, {"n_splines", 8}, {"n_axial", 4}},
                                             Json{{"grad_deg", 2}, {"n_splines", 16}, {"n_axial", 8}}})},
                     {"edge_rel", 1e-3},
                     {"inside_fraction", 0.9}};
    c["evolve"] = {{"initial", "eigenmode"}, {"T", 0.0}, {"dt", 0.0}, {"window_frac", 0.02}, {"record_every", 10}};
    c["tpp_scan"] = {{"prescan", true}, {"candidates", Json::array({2.0, 1.5, 1.0, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05})},
                     {"max_density_change", 0.05}};
    c["bb1974"] = {{"gamma", 4.03 / 3.03}, {"eps", 1.5}, {"mu_lo", 0.1}, {"mu_hi", 100.0}, {"n_mu", 25}, {"resolution", 192}};
    c["jobs"] = 1;
    c["seed"] = 0;
    return c;
}

namespace {

const char* type_name(const Json& j) {
    if (j.is_number()) return "number";
    return j.type_name();
}

bool compatible(const Json& def, const Json& v) {
    if (def.is_number_integer()) return v.is_number_integer() || (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()));
    if (def.is_number()) return v.is_number();
    return std::string(def.type_name()) == v.type_name();
}

void overlay(Json& base, const Json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError(path.empty() ? "config must be a JSON object" : path + " must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
        Json& b = base[it.key()];
        if (b.is_object()) {
            overlay(b, it.value(), key);
        } else {
            if (!compatible(b, it.value()))
                throw ConfigError("config key '" + key + "' expects " + type_name(b) + ", got " + type_name(it.value()));
            b = b.is_number_integer() ? Json(static_cast<long long>(it.value().get<double>())) : it.value();
        }
    }
}

double num(const Json& j, const char* k) { return j.at(k).get<double>(); }
int integer(const Json& j, const char* k) { return j.at(k).get<int>(); }

std::vector<double> vec(const Json& j, const char* k) {
    std::vector<double> v;
    for (const auto& x : j.at(k)) {
        if (!x.is_number()) throw ConfigError(std::string("array '") + k + "' must contain numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

}  // namespace

Json merge_config(const Json& user) {
    Json c = default_config();
    overlay(c, user, "");
    const std::string ek = c["eos"]["kind"], rk = c["rotation"]["kind"];
    if (ek != "polytropic" && ek != "asymptotic") throw ConfigError("eos.kind must be polytropic or asymptotic");
    if (rk != "none" && rk != "fixed_omega" && rk != "fixed_j")
        throw ConfigError("rotation.kind must be none, fixed_omega or fixed_j");
    const std::string p = c["spectrum"]["parity"];
    if (p != "even" && p != "odd") throw ConfigError("spectrum.parity must be even or odd");
    const std::string ini = c["evolve"]["initial"];
    if (ini != "eigenmode" && ini != "generic" && ini != "projected")
        throw ConfigError("evolve.initial must be eigenmode, generic or projected");
    for (const auto& lv : c["spectrum"]["levels"]) {
        if (!lv.is_object()) throw ConfigError("spectrum.levels entries must be objects");
        Json probe = default_config()["spectrum"]["levels"][0];
        overlay(probe, lv, "spectrum.levels[]");
    }
    if (c["jobs"].get<int>() < 1) throw ConfigError("jobs must be >= 1");
    if (c["mu"].get<double>() <= 0) throw ConfigError("mu must be positive");
    return c;
}

Json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    Json user;
    try {
        user = Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return merge_config(user);
}

EquationOfState eos_from(const Json& cfg) {
    const Json& e = cfg.at("eos");
    EosParams p;
    p.kind = e.at("kind") == "asymptotic" ? EosKind::asymptotic : EosKind::polytropic;
    p.c_minus = num(e, "c_minus");
    p.gamma0 = num(e, "gamma0");
    p.c_plus = num(e, "c_plus");
    p.gamma_inf = num(e, "gamma_inf");
    p.blend_lo = num(e, "blend_lo");
    p.blend_hi = num(e, "blend_hi");
    try {
        return EquationOfState(p);
    } catch (const DomainError& err) {
        throw ConfigError(std::string("eos: ") + err.what());
    }
}

Rotation rotation_from(const Json& cfg) {
    const Json& r = cfg.at("rotation");
    const std::string kind = r.at("kind");
    try {
        if (kind == "fixed_omega") {
            const Json& l = r.at("law");
            const std::string form = l.at("form");
            AngularVelocityLaw law = AngularVelocityLaw::rigid(num(l, "omega_c"));
            if (form == "power_tail") law = AngularVelocityLaw::power_tail(num(l, "omega_c"), num(l, "r_c"), num(l, "p"));
            else if (form == "table") law = AngularVelocityLaw::table(vec(l, "r"), vec(l, "omega"));
            else if (form != "rigid") throw ConfigError("rotation.law.form must be rigid, power_tail or table");
            return Rotation::fixed_omega(law, num(r, "kappa"));
        }
        if (kind == "fixed_j") {
            const Json& j = r.at("j");
            const std::string form = j.at("form");
            MomentumDistribution md = MomentumDistribution::bb();
            if (form == "power") md = MomentumDistribution::power(num(j, "amplitude"), num(j, "exponent"));
            else if (form == "table") md = MomentumDistribution::unit_mass_table(vec(j, "x"), vec(j, "j"));
            else if (form != "bb") throw ConfigError("rotation.j.form must be bb, power or table");
            return Rotation::fixed_j(md, num(r, "eps"));
        }
    } catch (const DomainError& err) {
        throw ConfigError(std::string("rotation: ") + err.what());
    }
    return Rotation::none();
}

GridSpec grid_from(const Json& cfg) {
    const Json& g = cfg.at("grid");
    GridSpec s;
    s.nr = integer(g, "nr");
    s.nz = integer(g, "nz");
    s.r_factor = num(g, "r_factor");
    s.z_factor = num(g, "z_factor");
    s.l_max = integer(g, "l_max");
    if (s.nr < 8 || s.nz < 8 || s.nr > 1024 || s.nz > 1024) throw ConfigError("grid.nr and grid.nz must be in [8, 1024]");
    if (!(s.r_factor > 1) || !(s.z_factor > 1)) throw ConfigError("grid factors must exceed 1");
    if (s.l_max < 0) throw ConfigError("grid.l_max must be >= 0");
    return s;
}

ScfOptions scf_from(const Json& cfg) {
    const Json& s = cfg.at("scf");
    ScfOptions o;
    o.tol = num(s, "tol");
    o.max_newton = integer(s, "max_newton");
    o.max_gmres = integer(s, "max_gmres");
    if (!(o.tol > 0)) throw ConfigError("scf.tol must be positive");
    return o;
}

BasisSpec basis_from(const Json& cfg) {
    const Json& b = cfg.at("basis");
    BasisSpec s;
    s.deg_r = integer(b, "deg_r");
    s.deg_z = integer(b, "deg_z");
    s.deg_z_odd = integer(b, "deg_z_odd");
    if (s.deg_r < 0 || s.deg_z < 0 || s.deg_z_odd < 0) throw ConfigError("basis degrees must be >= 0");
    return s;
}

GeneratorSpec generator_from(const Json& cfg) {
    const Json& g = cfg.at("generator");
    GeneratorSpec s;
    s.rho_deg_r = integer(g, "rho_deg_r");
    s.rho_deg_z = integer(g, "rho_deg_z");
    s.rho_deg_z_odd = integer(g, "rho_deg_z_odd");
    s.stream_deg_r = integer(g, "stream_deg_r");
    s.stream_deg_z = integer(g, "stream_deg_z");
    s.theta_deg_r = integer(g, "theta_deg_r");
    s.theta_deg_z = integer(g, "theta_deg_z");
    return s;
}

SpectralSpec spectral_from(const Json& cfg) {
    const Json& s = cfg.at("spectrum");
    SpectralSpec o;
    o.parity = s.at("parity") == "odd" ? Parity::odd : Parity::even;
    o.levels.clear();
    for (const auto& lv : s.at("levels")) {
        Json full = default_config()["spectrum"]["levels"][0];
        full.update(lv);
        o.levels.push_back({integer(full, "grad_deg"), integer(full, "n_splines"), integer(full, "n_axial")});
    }
    if (o.levels.size() < 2) throw ConfigError("spectrum.levels needs at least two refinement levels");
    o.edge_rel = num(s, "edge_rel");
    o.inside_fraction = num(s, "inside_fraction");
    o.jobs = cfg.at("jobs").get<int>();
    return o;
}

FamilyOptions family_options_from(const Json& cfg) {
    FamilyOptions o;
    o.grid = grid_from(cfg);
    o.basis = basis_from(cfg);
    o.scf = scf_from(cfg);
    o.jobs = cfg.at("jobs").get<int>();
    return o;
}

std::vector<double> mu_grid_from(const Json& cfg) {
    const Json& m = cfg.at("mu_grid");
    std::vector<double> v = vec(m, "values");
    if (!v.empty()) {
        for (size_t i = 0; i < v.size(); ++i)
            if (!(v[i] > 0) || (i > 0 && !(v[i] > v[i - 1]))) throw ConfigError("mu_grid.values must be positive and increasing");
        return v;
    }
    try {
        return log_grid(num(m, "lo"), num(m, "hi"), integer(m, "n"));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("mu_grid: ") + e.what());
    }
}

}  // namespace rotstar
