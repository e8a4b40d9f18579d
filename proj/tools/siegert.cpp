// Command-line front end for the toolkit.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "siegert/io.hpp"
#include "siegert/siegert.hpp"

namespace {

using namespace siegert;
using io::fmt;
using io::fmt_pair;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ModelArgs {
    std::string path;
    std::string preset;

    void attach(CLI::App* sub) {
        auto* m = sub->add_option("--model", path, "model JSON file");
        auto* p = sub->add_option("--preset", preset, "built-in model")
                      ->check(CLI::IsMember(io::preset_names()));
        m->excludes(p);
    }

    io::Model load() const {
        if (!path.empty()) return io::load_model(path);
        if (!preset.empty()) return io::preset(preset);
        throw ValidationError("one of --model or --preset is required");
    }
};

// Every option of the subcommand with its effective value, for the manifest.
json parameters_of(const CLI::App* sub) {
    json p = json::object();
    for (const auto* opt : sub->get_options()) {
        if (opt->get_name() == "--help") continue;
        const std::string name = opt->get_name();
        if (opt->count() > 0) {
            const auto& r = opt->results();
            p[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else {
            p[name] = opt->get_default_str();
        }
    }
    return p;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const std::string& out, const std::string& payload, const CLI::App* sub, const io::Model* model,
          const Timer& timer) {
    io::RunManifest man;
    man.subcommand = sub->get_name();
    man.model_hash = model ? io::model_hash(*model) : "";
    man.parameters = parameters_of(sub);
    man.wall_time_s = timer.seconds();
    io::write_output(out, payload, man);
}

std::string pole_json(const ComplexPole& p) {
    std::ostringstream s;
    s << "{\"k\": " << fmt_pair(p.k) << ", \"E\": " << fmt_pair(p.E) << ", \"class\": " << io::quoted(std::string(to_string(p.cls)))
      << ", \"first_sheet\": " << (p.first_sheet ? "true" : "false") << ", \"residual\": " << fmt(p.residual)
      << ", \"newton_iters\": " << p.newton_iters << ", \"certified\": " << (p.certified ? "true" : "false")
      << ", \"diagnostic\": " << io::quoted(p.diagnostic) << "}";
    return s.str();
}

std::string pole_list_json(const std::vector<ComplexPole>& poles) {
    std::string s = "[";
    for (std::size_t i = 0; i < poles.size(); ++i) s += (i ? ",\n    " : "\n    ") + pole_json(poles[i]);
    s += poles.empty() ? "]" : "\n  ]";
    return s;
}

// --- scatter -----------------------------------------------------------------

struct ScatterArgs {
    ModelArgs model;
    double emin = 0.01, emax = 10.0;
    std::size_t samples = 200;
    std::string out;
};

int run_scatter(const ScatterArgs& a, const CLI::App* sub) {
    Timer timer;
    const auto model = a.model.load();
    const auto& p = model.continuum();
    if (!(a.emin > 0.0) || !(a.emax > a.emin)) throw ValidationError("scatter: need 0 < emin < emax");
    const auto grid = uniform_grid(a.emin, a.emax, a.samples);
    std::vector<ScatteringResult> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { rows[i] = scattering_amplitudes(p, grid[i]); });
    io::CsvWriter csv({"E", "R", "T", "G"});
    double gmax = 0.0;
    for (const auto& r : rows) {
        csv.row({r.E, r.R, r.T, r.T});
        gmax = std::max(gmax, r.T);
    }
    emit(a.out, csv.str(), sub, &model, timer);
    std::printf("scatter: %zu energies, max G = %s (2e^2/h) = %s S\n", rows.size(), fmt(gmax).c_str(),
                fmt(gmax * kConductanceQuantum).c_str());
    return kExitOk;
}

// --- poles -------------------------------------------------------------------

struct PolesArgs {
    ModelArgs model;
    std::vector<double> window{-6.0, 6.0, -3.0, 6.0};
    double axis_tol = 1e-9;
    int max_depth = 40;
    double origin_exclusion = 1e-3;
    std::string out;
};

int run_poles(const PolesArgs& a, const CLI::App* sub) {
    Timer timer;
    const auto model = a.model.load();
    std::vector<ComplexPole> poles;
    bool additive = true;
    std::string variable;
    if (model.is_continuum()) {
        SearchWindow w{a.window[0], a.window[1], a.window[2], a.window[3], a.max_depth, a.axis_tol, a.origin_exclusion};
        auto res = find_poles(model.continuum(), w);
        poles = std::move(res.poles);
        additive = res.all_additive();
        variable = "k";
    } else {
        LatticeWindow w{a.window[0], a.window[1], a.window[2], a.window[3], a.max_depth, a.axis_tol, a.origin_exclusion};
        auto res = lattice_siegert_poles(model.lattice(), w);
        poles = std::move(res.poles);
        for (const auto& s : res.subdivisions) additive = additive && s.additive();
        variable = "kappa";
    }
    std::size_t uncertified = 0;
    for (const auto& p : poles) uncertified += p.certified ? 0 : 1;
    std::string payload = "{\n  \"variable\": " + io::quoted(variable) +
                          ",\n  \"additive\": " + (additive ? "true" : "false") +
                          ",\n  \"poles\": " + pole_list_json(poles) + "\n}\n";
    emit(a.out, payload, sub, &model, timer);
    std::printf("poles: %zu found, %zu uncertified, winding counts %s\n", poles.size(), uncertified,
                additive ? "additive" : "NOT additive");
    if (uncertified > 0 || !additive) {
        std::fprintf(stderr, "poles: numerical failure (uncertified pole or non-additive subdivision)\n");
        return kExitNumerical;
    }
    return kExitOk;
}

// --- norm-check ----------------------------------------------------------------

struct NormArgs {
    ModelArgs model;
    std::size_t pole_index = 0;
    double L0 = 0.0;
    double tmax = 0.0;
    std::size_t samples = 201;
    double speed_factor = 1.0;
    double threshold = 1e-8;
    std::vector<double> window{-6.0, 6.0, -3.0, 6.0};
    std::string out;
};

int run_norm(const NormArgs& a, const CLI::App* sub) {
    Timer timer;
    const auto model = a.model.load();
    const auto& p = model.continuum();
    SearchWindow w{a.window[0], a.window[1], a.window[2], a.window[3]};
    const auto res = find_poles(p, w);
    if (a.pole_index >= res.poles.size()) {
        throw ValidationError("norm-check: pole index " + std::to_string(a.pole_index) + " out of range (" +
                              std::to_string(res.poles.size()) + " poles)");
    }
    const auto& pole = res.poles[a.pole_index];
    const auto wf = build_wavefunction(p, pole);
    const double l = p.support_halfwidth();
    const double L0 = a.L0 > 0.0 ? a.L0 : 2.0 * l;
    double tmax = a.tmax;
    if (!(tmax > 0.0)) tmax = std::abs(pole.E.imag()) > 0 ? 5.0 / std::abs(pole.E.imag()) : 10.0;
    const auto grid = pole.cls == PoleClass::anti_resonant ? uniform_grid(-tmax, 0.0, a.samples)
                                                           : uniform_grid(0.0, tmax, a.samples);
    ExpandingNormOptions opt;
    opt.speed_factor = a.speed_factor;
    const auto en = expanding_norm(wf, L0, grid, opt);
    io::CsvWriter csv({"t", "N", "dN/dt"});
    for (std::size_t i = 0; i < en.series.size(); ++i) {
        csv.row({en.series.t[i], en.series.values[i].N, en.series.values[i].dN_dt});
    }
    emit(a.out, csv.str(), sub, &model, timer);
    const double dev = en.max_relative_deviation();
    std::printf("norm-check: pole %zu (%s, k = %s), max |N/N0 - 1| = %s, threshold %s\n", a.pole_index,
                std::string(to_string(pole.cls)).c_str(), fmt_pair(pole.k).c_str(), fmt(dev).c_str(),
                fmt(a.threshold).c_str());
    if (!en.warning.empty()) std::fprintf(stderr, "warning: %s\n", en.warning.c_str());
    if (!(dev < a.threshold)) {
        std::fprintf(stderr, "norm-check: deviation above threshold\n");
        return kExitNumerical;
    }
    return kExitOk;
}

// --- feshbach ------------------------------------------------------------------

struct FeshbachArgs {
    ModelArgs model;
    std::string branch = "ret";
    std::string seeds = "grid";
    std::vector<double> seed;
    int max_iter = 200;
    double step_tol = 1e-12;
    double residual_tol = 1e-12;
    std::string out;
};

std::vector<cplx> seed_grid(double J) {
    std::vector<cplx> s;
    for (int i = 0; i <= 16; ++i) {
        for (double im : {-0.6, -0.2, 0.2, 0.6}) s.emplace_back(-3.2 * J + 0.4 * J * i, im * J);
    }
    return s;
}

std::vector<cplx> read_seeds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("feshbach: cannot open seed file '" + path + "'");
    std::vector<cplx> s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double re = 0, im = 0;
        if (!(ls >> re)) throw ValidationError("feshbach: bad seed line '" + line + "'");
        ls >> im;
        s.emplace_back(re, im);
    }
    if (s.empty()) throw ValidationError("feshbach: seed file is empty");
    return s;
}

int run_feshbach(const FeshbachArgs& a, const CLI::App* sub) {
    Timer timer;
    const auto model = a.model.load();
    const auto& m = model.lattice();
    const Branch branch = a.branch == "ret" ? Branch::retarded : Branch::advanced;
    std::vector<cplx> seeds;
    if (!a.seed.empty()) {
        seeds.emplace_back(a.seed[0], a.seed.size() > 1 ? a.seed[1] : 0.0);
    } else {
        seeds = a.seeds == "grid" ? seed_grid(m.lead_hopping) : read_seeds(a.seeds);
    }
    // Seeds at a branch point are reported, not skipped.
    for (const auto& s : seeds) (void)lead_self_energy(s, m.lead_hopping, branch);
    NonlinearEigOptions opt;
    opt.max_iter = a.max_iter;
    opt.step_tol = a.step_tol;
    opt.residual_tol = a.residual_tol;

    std::vector<NonlinearEigResult> results;
    if (seeds.size() == 1) {
        auto r = solve_nonlinear_eig(m, branch, seeds.front(), opt);
        if (!r.converged) {
            std::fprintf(stderr, "feshbach: no convergence from seed %s: %s\n", fmt_pair(seeds.front()).c_str(),
                         r.diagnostic.c_str());
            return kExitNumerical;
        }
        r.trace.clear();
        results.push_back(std::move(r));
    } else {
        results = solve_nonlinear_eig_seeds(m, branch, seeds, opt);
    }
    std::string payload = "{\n  \"branch\": " + io::quoted(std::string(to_string(branch))) +
                          ",\n  \"J\": " + fmt(m.lead_hopping) + ",\n  \"seeds\": " + std::to_string(seeds.size()) +
                          ",\n  \"poles\": [";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const bool on_sheet = std::abs(lead_self_energy(r.E, m.lead_hopping, branch).value - r.sigma) <
                              1e-8 * std::max(1.0, m.lead_hopping);
        payload += (i ? ",\n    " : "\n    ");
        payload += "{\"E\": " + fmt_pair(r.E) + ", \"kappa\": " + fmt_pair(r.kappa) +
                   ", \"class\": " + io::quoted(std::string(to_string(classify_lattice(r.kappa)))) +
                   ", \"sigma\": " + fmt_pair(r.sigma) + ", \"on_branch_sheet\": " + (on_sheet ? "true" : "false") +
                   ", \"residual\": " + fmt(r.residual) + ", \"iterations\": " + std::to_string(r.iterations) + "}";
    }
    payload += results.empty() ? "]\n}\n" : "\n  ]\n}\n";
    emit(a.out, payload, sub, &model, timer);
    std::printf("feshbach: %zu poles on branch %s from %zu seeds\n", results.size(),
                std::string(to_string(branch)).c_str(), seeds.size());
    return kExitOk;
}

// --- sigma ---------------------------------------------------------------------

struct SigmaArgs {
    std::vector<double> E;
    double J = 1.0;
};

int run_sigma(const SigmaArgs& a) {
    const cplx E(a.E.at(0), a.E.size() > 1 ? a.E[1] : 0.0);
    for (Branch b : {Branch::retarded, Branch::advanced}) {
        const auto s = lead_self_energy(E, a.J, b);
        const double fixed_point = std::abs(s.value - a.J * a.J / (E - s.value));
        std::printf("%s: Sigma = %s  |Sigma - J^2/(E - Sigma)| = %s\n", std::string(to_string(b)).c_str(),
                    fmt_pair(s.value).c_str(), fmt(fixed_point).c_str());
    }
    return kExitOk;
}

// --- dynamics ------------------------------------------------------------------

struct DynamicsArgs {
    ModelArgs model;
    std::size_t sites = 2001;
    double tmax = 20.0;
    std::size_t steps = 400;
    std::size_t probe = 0;
    std::vector<double> fit{2.0, 16.0};
    std::string out;
};

int run_dynamics(const DynamicsArgs& a, const CLI::App* sub) {
    Timer timer;
    const auto model = a.model.load();
    const auto& m = model.lattice();
    const auto grid = symmetric_grid(a.tmax, a.steps);
    const auto survival = evolve_survival(m, a.sites, grid, a.probe);
    const auto poles = lattice_siegert_poles(m).poles;
    const auto dec = pole_decomposition(m, poles, survival, a.probe);
    io::CsvWriter csv({"t", "P", "P_res", "P_antires", "P_bound", "residual"});
    double asym = 0.0;
    for (std::size_t i = 0; i < dec.t.size(); ++i) {
        csv.row({dec.t[i], dec.total[i], dec.resonant[i], dec.anti_resonant[i], dec.bound[i], dec.residual[i]});
        asym = std::max(asym, std::abs(dec.total[i] - dec.total[dec.t.size() - 1 - i]));
    }
    emit(a.out, csv.str(), sub, &model, timer);
    std::printf("dynamics: %zu samples, max |P(t) - P(-t)| = %s", dec.t.size(), fmt(asym).c_str());
    if (a.fit.size() == 2 && a.fit[1] > a.fit[0] && a.fit[0] >= 0.0 && a.fit[1] <= a.tmax) {
        std::printf(", decay rate on [%g, %g] = %s", a.fit[0], a.fit[1],
                    fmt(fit_decay_rate(survival, a.fit[0], a.fit[1])).c_str());
    }
    std::printf("\n");
    return kExitOk;
}

// --- pendulum ------------------------------------------------------------------

struct PendulumArgs {
    double omega = 1.0, alpha = 0.1;
    std::vector<double> x0{1.0, 0.0}, v0{0.0, 0.0};
    double tmax = 100.0;
    std::size_t samples = 1001;
    std::string out;
};

int run_pendulum(const PendulumArgs& a, const CLI::App* sub) {
    Timer timer;
    const PendulumPair p{a.omega, a.alpha};
    const auto modes = pendulum::modes(p);
    const auto s = pendulum::evolve(p, {a.x0[0], a.x0[1]}, {a.v0[0], a.v0[1]}, uniform_grid(0.0, a.tmax, a.samples));
    io::CsvWriter csv({"t", "x1", "x2", "v1", "v2", "energy"});
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& st = s.values[i];
        csv.row({s.t[i], st.x(0), st.x(1), st.v(0), st.v(1), pendulum::energy(p, st)});
    }
    emit(a.out, csv.str(), sub, nullptr, timer);
    std::printf("pendulum: mode frequencies %s, %s\n", fmt(modes[0].frequency).c_str(),
                fmt(modes[1].frequency).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Siegert poles, transfer matrices and open-system dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kToolVersion));

    ScatterArgs sc;
    auto* scatter = app.add_subcommand("scatter", "transmission and conductance of a continuum model");
    sc.model.attach(scatter);
    scatter->add_option("--emin", sc.emin)->capture_default_str();
    scatter->add_option("--emax", sc.emax)->capture_default_str();
    scatter->add_option("--samples", sc.samples)->capture_default_str()->check(CLI::Range(2, 10000000));
    scatter->add_option("--out", sc.out)->required();

    PolesArgs po;
    auto* poles = app.add_subcommand("poles", "certified Siegert poles in a window");
    po.model.attach(poles);
    poles->add_option("--window", po.window, "remin remax immin immax")->expected(4)->capture_default_str();
    poles->add_option("--axis-tol", po.axis_tol)->capture_default_str();
    poles->add_option("--max-depth", po.max_depth)->capture_default_str();
    poles->add_option("--origin-exclusion", po.origin_exclusion)->capture_default_str();
    poles->add_option("--out", po.out)->required();

    NormArgs nc;
    auto* norm = app.add_subcommand("norm-check", "probability in the expanding window of a Siegert state");
    nc.model.attach(norm);
    norm->add_option("--pole-index", nc.pole_index)->capture_default_str();
    norm->add_option("--L0", nc.L0, "initial half-width (default 2l)")->capture_default_str();
    norm->add_option("--tmax", nc.tmax, "time span (default 5/|Im E|)")->capture_default_str();
    norm->add_option("--samples", nc.samples)->capture_default_str()->check(CLI::Range(5, 10000000));
    norm->add_option("--speed-factor", nc.speed_factor)->capture_default_str();
    norm->add_option("--threshold", nc.threshold)->capture_default_str();
    norm->add_option("--window", nc.window, "pole search window")->expected(4)->capture_default_str();
    norm->add_option("--out", nc.out)->required();

    FeshbachArgs fe;
    auto* fesh = app.add_subcommand("feshbach", "poles of the energy-dependent effective Hamiltonian");
    fe.model.attach(fesh);
    fesh->add_option("--branch", fe.branch)->check(CLI::IsMember({"ret", "adv"}))->capture_default_str();
    auto* seeds_opt = fesh->add_option("--seeds", fe.seeds, "'grid' or a file of 're im' lines")->capture_default_str();
    fesh->add_option("--seed", fe.seed, "single seed: re [im]")->expected(1, 2)->excludes(seeds_opt);
    fesh->add_option("--max-iter", fe.max_iter)->capture_default_str();
    fesh->add_option("--step-tol", fe.step_tol)->capture_default_str();
    fesh->add_option("--residual-tol", fe.residual_tol)->capture_default_str();
    fesh->add_option("--out", fe.out)->required();

    SigmaArgs si;
    auto* sigma = app.add_subcommand("sigma", "lead self-energy on both branches");
    sigma->add_option("--E", si.E, "re [im]")->expected(1, 2)->required();
    sigma->add_option("--J", si.J)->capture_default_str();

    DynamicsArgs dy;
    auto* dyn = app.add_subcommand("dynamics", "survival probability and its pole decomposition");
    dy.model.attach(dyn);
    dyn->add_option("--sites", dy.sites)->capture_default_str();
    dyn->add_option("--tmax", dy.tmax)->capture_default_str();
    dyn->add_option("--steps", dy.steps, "samples per time direction")->capture_default_str();
    dyn->add_option("--probe", dy.probe, "system site of the initial state")->capture_default_str();
    dyn->add_option("--fit", dy.fit, "decay-rate fit window t0 t1")->expected(2)->capture_default_str();
    dyn->add_option("--out", dy.out)->required();

    PendulumArgs pe;
    auto* pend = app.add_subcommand("pendulum", "coupled pendulum normal modes");
    pend->add_option("--omega", pe.omega)->capture_default_str();
    pend->add_option("--alpha", pe.alpha)->capture_default_str();
    pend->add_option("--x0", pe.x0)->expected(2)->capture_default_str();
    pend->add_option("--v0", pe.v0)->expected(2)->capture_default_str();
    pend->add_option("--tmax", pe.tmax)->capture_default_str();
    pend->add_option("--samples", pe.samples)->capture_default_str()->check(CLI::Range(2, 10000000));
    pend->add_option("--out", pe.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*scatter) return run_scatter(sc, scatter);
        if (*poles) return run_poles(po, poles);
        if (*norm) return run_norm(nc, norm);
        if (*fesh) return run_feshbach(fe, fesh);
        if (*sigma) return run_sigma(si);
        if (*dyn) return run_dynamics(dy, dyn);
        if (*pend) return run_pendulum(pe, pend);
    } catch (const BranchSingularity& e) {
        std::fprintf(stderr, "branch singularity: %s\n", e.what());
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
