#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <random>

#include <CLI11.hpp>

#include "rotstar/config.hpp"
#include "rotstar/errors.hpp"
#include "rotstar/io.hpp"

using namespace rotstar;
namespace fs = std::filesystem;

namespace {

struct Run {
    Json cfg;
    std::string out_dir;
    std::uint64_t seed = 0;
    Manifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void emit(const std::string& name, const std::string& content) {
        write_text((fs::path(out_dir) / name).string(), content);
        manifest.add_artifact(name);
    }
    void lap(const std::string& step) {
        const auto t = std::chrono::steady_clock::now();
        manifest.add_runtime(step, std::chrono::duration<double>(t - t0).count());
        t0 = t;
    }
};

AxiStar solve_configured(Run& run) {
    const EquationOfState eos = eos_from(run.cfg);
    const double mu = run.cfg["mu"].get<double>();
    AxiStar st = solve_equilibrium(eos, rotation_from(run.cfg), mu, make_grid(eos, mu, grid_from(run.cfg)), scf_from(run.cfg));
    run.lap("equilibrium");
    return st;
}

bool rayleigh_unstable(const AxiStar& st) { return st.rotation.rotating() && upsilon_range(st).a > 0; }

void cmd_radial_scan(Run& run) {
    const RadialScan scan = family_scan_radial(eos_from(run.cfg), mu_grid_from(run.cfg), run.cfg["jobs"].get<int>());
    run.lap("scan");
    run.emit("radial_scan.csv", radial_scan_csv(scan));
    Json s;
    bool inc = true, dec = true;
    for (size_t i = 1; i < scan.rows.size(); ++i) {
        inc = inc && scan.rows[i].M > scan.rows[i - 1].M;
        dec = dec && scan.rows[i].M < scan.rows[i - 1].M;
    }
    s["monotone_M"] = inc ? "increasing" : dec ? "decreasing" : "no";
    auto& ex = s["mass_extrema"] = Json::array();
    for (const auto& e : scan.mass_extrema) ex.push_back({{"mu", e.mu}, {"type", e.is_max ? "max" : "min"}});
    s["mu_tilde"] = std::isfinite(scan.mu_tilde) ? Json(scan.mu_tilde) : Json(nullptr);
    run.emit("radial_summary.json", s.dump(2) + "\n");
}

void cmd_equilibrium(Run& run) {
    const AxiStar st = solve_configured(run);
    const std::string prefix = (fs::path(run.out_dir) / "equilibrium").string();
    write_bundle(st, prefix);
    for (const char* ext : {".grid.json", ".density.csv", ".meta.json"}) run.manifest.add_artifact(std::string("equilibrium") + ext);
}

void cmd_stability(Run& run) {
    const AxiStar st = solve_configured(run);
    const MuDerivative md = mu_derivative(st, 1e-3, scf_from(run.cfg));
    StabilityReport rep = analyze_stability(st, basis_from(run.cfg), &md);
    run.lap("forms");
    Json extra;
    if (run.cfg["generator"]["enabled"].get<bool>() && !rayleigh_unstable(st)) {
        int count = 0;
        double growth = 0, quad = 0;
        for (Parity p : {Parity::even, Parity::odd}) {
            const GeneratorSpectrum gs = generator_spectrum(assemble_generator(st, p, generator_from(run.cfg)));
            count += gs.unstable_count;
            growth = std::max(growth, gs.max_growth);
            quad = std::max(quad, gs.quadruple_defect);
        }
        rep.generator_unstable_count = count;
        rep.growth_rate = growth;
        extra["generator_quadruple_defect"] = quad;
        run.lap("generator");
    }
    Json j = Json::parse(to_json(rep));
    j["M"] = st.M;
    j["dMdmu"] = md.dM;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    run.emit("stability.json", j.dump(2) + "\n");
}

void cmd_spectrum(Run& run) {
    const AxiStar st = solve_configured(run);
    const SpectrumReport rep = spectrum(st, spectral_from(run.cfg));
    run.lap("spectrum");
    run.emit("spectrum.json", to_json(rep).dump(2) + "\n");
    if (rep.ambiguous) throw AmbiguityError(rep.ambiguity);
}

VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

void cmd_evolve(Run& run) {
    const AxiStar st = solve_configured(run);
    const Json& ev = run.cfg["evolve"];
    const std::string initial = ev["initial"];
    double T = ev["T"].get<double>(), dt = ev["dt"].get<double>();
    const int every = std::max(1, ev["record_every"].get<int>());
    std::mt19937_64 rng(run.seed);
    Json out;
    std::ostringstream csv;
    char buf[128];
    if (rayleigh_unstable(st)) {
        const SpectralSpec spec = spectral_from(run.cfg);
        const SecondOrderSystem sys =
            second_order_system(assemble_Ltilde(st, spectral_basis(st, spec.parity, spec.levels.back())));
        const double eta0 = sys.lambda(0);
        const double rate = eta0 < 0 ? std::sqrt(-eta0) : 0.0;
        VectorXd u0, v0 = VectorXd::Zero(sys.dim());
        if (initial == "eigenmode") {
            u0 = sys.U.col(0);
            v0 = rate * u0;
        } else {
            u0 = random_vector(sys.dim(), rng);
            v0 = random_vector(sys.dim(), rng);
            if (initial == "projected") {
                const double w = ev["window_frac"].get<double>() * std::abs(eta0);
                u0 = spectral_projection(sys, u0, eta0, eta0 + w);
                v0 = spectral_projection(sys, v0, eta0, eta0 + w);
                out["window"] = {eta0, eta0 + w};
            }
        }
        if (T <= 0) T = 20 / std::sqrt(std::max(std::abs(eta0), 1e-300));
        const SecondOrderTrajectory tr = evolve_second_order(sys, u0, v0, T, dt, every);
        run.lap("evolve");
        csv << "t,Y_norm,E\n";
        for (size_t i = 0; i < tr.t.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", tr.t[i], tr.norm[i], tr.energy[i]);
            csv << buf;
        }
        out["mode"] = "second_order";
        out["initial"] = initial;
        out["eta0"] = eta0;
        out["sqrt_minus_eta0"] = rate;
        out["measured_rate"] = tr.growth_rate;
        out["max_rel_energy_drift"] = tr.max_rel_drift;
        out["dt"] = tr.dt;
        out["T"] = T;
    } else {
        const GeneratorSystem sys = assemble_generator(st, Parity::even, generator_from(run.cfg));
        const GeneratorSpectrum gs = generator_spectrum(sys);
        const double rad = std::abs(gs.eigenvalues.cwiseAbs().maxCoeff());
        VectorXd x0;
        if (initial == "eigenmode" && gs.unstable_count > 0) {
            Eigen::EigenSolver<MatrixXd> es(sys.G);
            int k = 0;
            for (int i = 1; i < es.eigenvalues().size(); ++i)
                if (es.eigenvalues()(i).real() > es.eigenvalues()(k).real()) k = i;
            x0 = es.eigenvectors().col(k).real();
        } else {
            x0 = random_vector(sys.dim(), rng);
        }
        if (T <= 0) T = gs.max_growth > 0 ? 20 / gs.max_growth : 200 / rad;
        if (dt <= 0) dt = 0.1 / rad;
        const LinearTrajectory tr = evolve_linearized(sys, x0, T, dt);
        run.lap("evolve");
        csv << "t,norm,E\n";
        for (size_t i = 0; i < tr.t.size(); i += every) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", tr.t[i], tr.norm[i], tr.energy[i]);
            csv << buf;
        }
        out["mode"] = "generator";
        out["initial"] = initial;
        out["unstable_count"] = gs.unstable_count;
        out["max_growth"] = gs.max_growth;
        out["measured_rate"] = tr.growth_rate;
        out["max_rel_energy_drift"] = tr.max_rel_drift;
        out["dt"] = dt;
        out["T"] = T;
    }
    run.emit("evolve.csv", csv.str());
    run.emit("evolve.json", out.dump(2) + "\n");
}

void emit_family(Run& run, const std::string& stem, const FamilyScanResult& r, const Json& extra) {
    run.emit(stem + ".csv", family_csv(r));
    run.emit(stem + "_plot.csv", family_plot_csv(r));
    Json s = family_summary(r);
    for (auto it = extra.begin(); it != extra.end(); ++it) s[it.key()] = it.value();
    run.emit(stem + "_summary.json", s.dump(2) + "\n");
}

void cmd_tpp_scan(Run& run) {
    const EquationOfState eos = eos_from(run.cfg);
    Rotation rot = rotation_from(run.cfg);
    if (rot.kind == RotationKind::none) throw ConfigError("tpp-scan needs rotation.kind fixed_omega or fixed_j");
    const std::vector<double> mus = mu_grid_from(run.cfg);
    const FamilyOptions opt = family_options_from(run.cfg);
    const Json& ts = run.cfg["tpp_scan"];
    Json extra;
    if (ts["prescan"].get<bool>()) {
        std::vector<double> cand;
        for (const auto& c : ts["candidates"]) cand.push_back(c.get<double>());
        const Prescan ps = prescan_rotation(eos, rot, cand, mus.front(), mus.back(), opt, ts["max_density_change"].get<double>());
        if (rot.kind == RotationKind::fixed_omega) rot.kappa = ps.value;
        else rot.eps = ps.value;
        auto& tried = extra["prescan"] = Json::array();
        for (const auto& [v, s] : ps.tried) tried.push_back({{"value", v}, {"outcome", s}});
        run.lap("prescan");
    }
    const FamilyScanResult r = rot.kind == RotationKind::fixed_omega ? scan_fixed_omega(eos, rot.law, rot.kappa, mus, opt)
                                                                     : scan_fixed_j(eos, rot.j, rot.eps, mus, opt);
    run.lap("scan");
    emit_family(run, "tpp_scan", r, extra);
}

void cmd_bb1974(Run& run) {
    const Json& b = run.cfg["bb1974"];
    BB1974Config c;
    c.gamma = b["gamma"].get<double>();
    c.eps = b["eps"].get<double>();
    c.mu_lo = b["mu_lo"].get<double>();
    c.mu_hi = b["mu_hi"].get<double>();
    c.n_mu = b["n_mu"].get<int>();
    c.opt = family_options_from(run.cfg);
    c.opt.grid.nr = c.opt.grid.nz = b["resolution"].get<int>();
    const FamilyScanResult r = bb1974_example(c);
    run.lap("scan");
    emit_family(run, "bb1974", r, Json::object());
    bool has_min = false;
    for (const auto& e : r.extrema) has_min = has_min || !e.is_max;
    if (!has_min) throw SolverError("bb1974: no mass minimum inside [mu_lo, mu_hi]; extend the mu range");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotstar: rotating gaseous star equilibria and axisymmetric stability"};
    std::string config_path, out_dir = "out";
    int jobs = 0;
    long long seed = -1;
    bool print_defaults = false;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out-dir", out_dir, "directory for artifacts");
    app.add_option("--jobs", jobs, "worker threads (overrides config)");
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");
    const std::vector<std::pair<std::string, void (*)(Run&)>> commands = {
        {"radial-scan", cmd_radial_scan}, {"equilibrium", cmd_equilibrium}, {"stability", cmd_stability},
        {"spectrum", cmd_spectrum},       {"evolve", cmd_evolve},           {"tpp-scan", cmd_tpp_scan},
        {"bb1974", cmd_bb1974}};
    // Options may also follow the subcommand name.
    for (const auto& c : commands) app.add_subcommand(c.first, "run " + c.first)->fallthrough();
    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cout << error_json("config_error", e.what(), 2).dump(2) << "\n";
        return 2;
    }
    if (print_defaults) {
        std::cout << default_config().dump(2) << "\n";
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        Json user = Json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot open config file " + config_path);
            try {
                user = Json::parse(f);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        Json cfg = merge_config(user);
        if (jobs > 0) cfg["jobs"] = jobs;
        if (seed >= 0) cfg["seed"] = seed;
        const std::string hash = hex64(fnv1a64(cfg.dump()));
        Run run{cfg, out_dir, cfg["seed"].get<std::uint64_t>(), Manifest(name, hash, cfg["seed"].get<std::uint64_t>())};
        fs::create_directories(out_dir);
        run.emit("config.json", cfg.dump(2) + "\n");
        int code = 0;
        try {
            for (const auto& c : commands)
                if (c.first == name) c.second(run);
        } catch (const Error& e) {
            run.emit("error.json", error_json(e.type(), e.what(), e.exit_code()).dump(2) + "\n");
            std::cerr << "rotstar " << name << ": " << e.what() << "\n";
            code = e.exit_code();
        } catch (const std::exception& e) {
            run.emit("error.json", error_json("solver_error", e.what(), 3).dump(2) + "\n");
            std::cerr << "rotstar " << name << ": " << e.what() << "\n";
            code = 3;
        }
        run.manifest.write(out_dir);
        return code;
    } catch (const Error& e) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        const std::string err = error_json(e.type(), e.what(), e.exit_code()).dump(2) + "\n";
        if (!ec) write_text((fs::path(out_dir) / "error.json").string(), err);
        std::cerr << "rotstar " << name << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "rotstar " << name << ": " << e.what() << "\n";
        return 3;
    }
}
