// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "siegert/siegert.hpp"

using namespace siegert;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, double time_limit, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  %2d  %-34s %s  [%.2f s / %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt,
                time_limit, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SearchWindow criterion_window() {
    SearchWindow w;
    w.re_min = -8.0;
    w.re_max = 8.0;
    w.im_min = -3.0;
    w.im_max = 6.0;
    return w;
}

std::vector<PoleSearch> well_searches;  // V0 = 1, 5, 25; shared by criteria 2-4
constexpr double kDepths[] = {1.0, 5.0, 25.0};

std::vector<cplx> seed_grid(double J) {
    std::vector<cplx> s;
    for (int i = 0; i <= 16; ++i) {
        for (double im : {-0.6, -0.2, 0.2, 0.6}) s.emplace_back(J * (-3.2 + 0.4 * i), J * im);
    }
    return s;
}

std::vector<cplx> nonlinear_energies(const LatticeModel& m) {
    std::vector<cplx> out;
    for (Branch b : {Branch::retarded, Branch::advanced}) {
        for (const auto& r : solve_nonlinear_eig_seeds(m, b, seed_grid(m.lead_hopping))) {
            if (std::none_of(out.begin(), out.end(), [&](cplx e) { return std::abs(e - r.E) < 1e-8; })) {
                out.push_back(r.E);
            }
        }
    }
    return out;
}

// Largest distance from an element of one set to the nearest element of the other.
double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    auto one_way = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        for (cplx p : x) {
            double best = INFINITY;
            for (cplx q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
    };
    one_way(a, b);
    one_way(b, a);
    return worst;
}

double two_site_resonance_width = 0.0;  // 2 |Im E*| from criterion 8

}  // namespace

int main() {
    run(1, "flux conservation", 10.0, [] {
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<int> count(1, 8);
        std::uniform_real_distribution<double> width(0.05, 1.5), gap(0.0, 0.5), height(-25.0, 25.0),
            energy(0.01, 40.0);
        double worst = 0.0;
        for (int n = 0; n < 1000; ++n) {
            std::vector<Segment> segs;
            double x = -4.0;
            for (int i = count(rng); i > 0; --i) {
                x += gap(rng);
                const double w = width(rng);
                segs.push_back({x, x + w, height(rng)});
                x += w;
            }
            const Potential1D p(segs);
            for (int j = 0; j < 10; ++j) {
                const auto s = scattering_amplitudes(p, energy(rng));
                worst = std::max(worst, std::abs(s.R + s.T - 1.0));
            }
        }
        return Outcome{worst < 1e-10, fmt("max|R+T-1| = %.2e", worst)};
    });

    run(2, "pole-pair symmetry", 60.0, [] {
        double worst_f = 0.0, worst_e = 0.0;
        int pairs = 0;
        bool all_certified = true, partners_found = true;
        for (double v0 : kDepths) {
            const auto p = Potential1D::square_well(v0, 1.0);
            well_searches.push_back(find_poles(p, criterion_window()));
            const auto& poles = well_searches.back().poles;
            for (const auto& pole : poles) {
                all_certified = all_certified && pole.certified;
                if (!pole.certified || pole.cls == PoleClass::bound || pole.cls == PoleClass::anti_bound) continue;
                const cplx partner = -std::conj(pole.k);
                worst_f = std::max(worst_f, std::abs(siegert_function(p, partner)));
                const auto it = std::min_element(poles.begin(), poles.end(), [&](const auto& a, const auto& b) {
                    return std::abs(a.k - partner) < std::abs(b.k - partner);
                });
                if (std::abs(it->k - partner) > 1e-8) {
                    partners_found = false;
                    continue;
                }
                worst_e = std::max(worst_e, std::abs(it->E - std::conj(pole.E)));
                ++pairs;
            }
        }
        const bool pass = all_certified && partners_found && pairs > 0 && worst_f < 1e-9 && worst_e < 1e-8;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d off-axis poles, max|f(-k*)| = %.2e, max|dE| = %.2e", pairs, worst_f,
                      worst_e);
        return Outcome{pass, buf};
    });

    run(3, "bound-state oracle", 5.0, [] {
        double worst_k = 0.0, worst_im = 0.0;
        bool counts = true, negative = true;
        for (double v0 : kDepths) {
            const auto kappas = oracle::square_well_bound_kappas(v0, 1.0);
            const auto search = find_poles(Potential1D::square_well(v0, 1.0), criterion_window());
            std::vector<const ComplexPole*> bound;
            for (const auto& p : search.poles) {
                if (p.cls == PoleClass::bound) bound.push_back(&p);
            }
            std::sort(bound.begin(), bound.end(), [](auto a, auto b) { return a->k.imag() < b->k.imag(); });
            if (bound.size() != kappas.size()) {
                counts = false;
                continue;
            }
            for (std::size_t j = 0; j < bound.size(); ++j) {
                worst_k = std::max(worst_k, std::abs(bound[j]->k - cplx(0.0, kappas[j])));
                worst_im = std::max(worst_im, std::abs(bound[j]->E.imag()));
                negative = negative && bound[j]->E.real() < 0.0;
            }
        }
        const bool pass = counts && negative && worst_k < 1e-9 && worst_im < 1e-9;
        char buf[160];
        std::snprintf(buf, sizeof buf, "max|dk| = %.2e, max|Im E| = %.2e, counts %s", worst_k, worst_im,
                      counts ? "match" : "differ");
        return Outcome{pass, buf};
    });

    run(4, "winding-count additivity", 1.0, [] {
        std::size_t total = 0, bad = 0;
        for (const auto& s : well_searches) {
            for (const auto& d : s.subdivisions) {
                ++total;
                bad += d.additive() ? 0 : 1;
            }
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu subdivisions, %zu non-additive", total, bad);
        return Outcome{!well_searches.empty() && total > 0 && bad == 0, buf};
    });

    run(5, "expanding-window conservation", 30.0, [] {
        const auto p = Potential1D::square_well(1.0, 1.0);
        const ComplexPole* lowest = nullptr;
        for (const auto& pole : well_searches.at(0).poles) {
            if (pole.cls == PoleClass::resonant && (!lowest || pole.k.real() < lowest->k.real())) lowest = &pole;
        }
        if (!lowest) return Outcome{false, "no resonant pole"};
        const auto w = build_wavefunction(p, *lowest);
        const auto grid = uniform_grid(0.0, 5.0 / std::abs(lowest->E.imag()), 401);
        const double good = expanding_norm(w, 2.0, grid).max_relative_deviation();
        ExpandingNormOptions half;
        half.speed_factor = 0.5;
        const double control = expanding_norm(w, 2.0, grid, half).max_relative_deviation();
        char buf[160];
        std::snprintf(buf, sizeof buf, "max|N/N0-1| = %.2e, half-speed control = %.2e", good, control);
        return Outcome{good < 1e-8 && control > 1e-3, buf};
    });

    run(6, "surface-term dichotomy", 5.0, [] {
        double worst_bound = 0.0;
        bool increasing = true;
        int nb = 0, nr = 0;
        for (std::size_t i = 0; i < well_searches.size(); ++i) {
            const auto p = Potential1D::square_well(kDepths[i], 1.0);
            for (const auto& pole : well_searches[i].poles) {
                if (pole.cls == PoleClass::bound) {
                    const auto w = build_wavefunction(p, pole);
                    worst_bound = std::max(worst_bound, std::abs(surface_term(w, 20.0).imag()));
                    ++nb;
                } else if (pole.cls == PoleClass::resonant) {
                    const auto w = build_wavefunction(p, pole);
                    double prev = -INFINITY;
                    for (int j = 0; j < 10; ++j) {
                        const double im = std::abs(surface_term(w, 1.2 * std::pow(1.3, j)).imag());
                        increasing = increasing && im > prev;
                        prev = im;
                    }
                    ++nr;
                }
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d bound max|Im S(20l)| = %.2e; %d resonant %s", nb, worst_bound, nr,
                      increasing ? "strictly increasing" : "NOT increasing");
        return Outcome{nb > 0 && nr > 0 && worst_bound < 1e-10 && increasing, buf};
    });

    run(7, "self-energy identity", 5.0, [] {
        const double J = 1.0;
        double worst = 0.0, worst_conj = 0.0;
        for (Branch b : {Branch::retarded, Branch::advanced}) {
            for (int i = 0; i < 100; ++i) {
                for (int j = 0; j < 100; ++j) {
                    const cplx E(-5.0 + 10.0 * i / 99.0, -5.0 + 10.0 * j / 99.0);
                    const cplx s = lead_self_energy(E, J, b).value;
                    worst = std::max(worst, std::abs(s - J * J / (E - s)));
                }
            }
        }
        for (int i = 1; i < 1000; ++i) {
            const double E = -2.0 * J + 4.0 * J * i / 1000.0;
            const cplx r = lead_self_energy(E, J, Branch::retarded).value;
            const cplx a = lead_self_energy(E, J, Branch::advanced).value;
            worst_conj = std::max(worst_conj, std::abs(a - std::conj(r)));
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max fixed-point residual = %.2e, max|S_adv - S_ret*| = %.2e", worst,
                      worst_conj);
        return Outcome{worst < 1e-12 && worst_conj < 1e-12, buf};
    });

    run(8, "route equivalence", 30.0, [] {
        const auto impurity = LatticeModel::single_impurity(1.0, 1.0);
        const auto two_site = LatticeModel::two_site_resonator();
        double worst = 0.0;
        for (const auto& m : {impurity, two_site}) {
            std::vector<cplx> lattice;
            for (const auto& p : lattice_siegert_poles(m).poles) {
                if (!p.certified) return Outcome{false, "uncertified lattice pole"};
                lattice.push_back(p.E);
            }
            worst = std::max(worst, set_distance(lattice, nonlinear_energies(m)));
        }
        const double e = std::sqrt(4.0 + 1.0);
        std::vector<cplx> imp;
        for (const auto& p : lattice_siegert_poles(impurity).poles) imp.push_back(p.E);
        const double analytic = set_distance(imp, {cplx(-e, 0.0), cplx(e, 0.0)});
        for (const auto& p : lattice_siegert_poles(two_site).poles) {
            if (p.cls == PoleClass::resonant) two_site_resonance_width = 2.0 * std::abs(p.E.imag());
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max route distance = %.2e, impurity vs +-sqrt(5) = %.2e", worst, analytic);
        return Outcome{worst < 1e-8 && analytic < 1e-10 && two_site_resonance_width > 0.0, buf};
    });

    run(9, "dynamics symmetry and decay", 300.0, [] {
        const auto m = LatticeModel::two_site_resonator();
        const auto s = evolve_survival(m, 2001, symmetric_grid(20.0 / m.lead_hopping, 400));
        double asym = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) asym = std::max(asym, std::abs(s.values[i] - s.values[s.size() - 1 - i]));
        const double rate = fit_decay_rate(s, 2.0, 16.0);
        const double rel = std::abs(rate / two_site_resonance_width - 1.0);
        char buf[160];
        std::snprintf(buf, sizeof buf, "max|P(t)-P(-t)| = %.2e, fit %.6f vs 2|Im E*| %.6f (%.2f%%)", asym, rate,
                      two_site_resonance_width, 100.0 * rel);
        return Outcome{two_site_resonance_width > 0.0 && asym < 1e-10 && rel < 0.05, buf};
    });

    run(10, "biorthogonality", 5.0, [] {
        std::mt19937_64 rng(99);
        std::normal_distribution<double> g;
        std::uniform_int_distribution<int> size(1, 8);
        double worst_delta = 0.0, worst_id = 0.0, worst_herm = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int n = size(rng);
            Eigen::MatrixXcd h(n, n);
            for (int i = 0; i < n; ++i) for (int j = 0; j < n; ++j) h(i, j) = cplx(g(rng), g(rng));
            const auto sys = biorthogonal_system(h);
            worst_delta = std::max(worst_delta, sys.biorthogonality_residual());
            worst_id = std::max(worst_id, sys.completeness_residual());
            const Eigen::MatrixXcd herm = h + h.adjoint();
            Eigen::VectorXcd f(n);
            for (int i = 0; i < n; ++i) f(i) = cplx(g(rng), g(rng));
            const auto e = biorthogonal_expand(herm, f);
            worst_herm = std::max(worst_herm, std::abs(e.biorthogonal_probability - e.square_modulus) / e.square_modulus);
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max delta = %.2e, max identity = %.2e, hermitian = %.2e", worst_delta,
                      worst_id, worst_herm);
        return Outcome{worst_delta < 1e-10 && worst_id < 1e-10 && worst_herm < 1e-12, buf};
    });

    run(11, "pendulum modes", 5.0, [] {
        double worst_freq = 0.0, worst_traj = 0.0;
        for (auto [omega, alpha] : {std::pair{1.0, 0.1}, {1.0, 1.5}, {2.0, 6.0}, {0.7, 0.05}}) {
            const PendulumPair p{omega, alpha};
            const auto modes = pendulum::modes(p);
            const auto ev = oracle::sym2_eigenvalues(omega * omega + alpha, -alpha, omega * omega + alpha);
            worst_freq = std::max({worst_freq, std::abs(modes[0].frequency - std::sqrt(ev[0])),
                                   std::abs(modes[1].frequency - std::sqrt(ev[1]))});
            const double period = 2.0 * std::numbers::pi / modes[0].frequency;
            const std::array<double, 4> y0{1.0, -0.3, 0.2, 0.4};
            const auto grid = uniform_grid(0.0, 100.0 * period, 21);
            const auto s = pendulum::evolve(p, {y0[0], y0[1]}, {y0[2], y0[3]}, grid);
            std::array<double, 4> y = y0;
            const double h = 2.0 * std::numbers::pi / modes[1].frequency / 4000.0;
            for (std::size_t i = 1; i < grid.size(); ++i) {
                y = oracle::rk4_pendulum(omega, alpha, y, grid[i] - grid[i - 1], h);
                const auto& st = s.values[i];
                worst_traj = std::max({worst_traj, std::abs(st.x(0) - y[0]), std::abs(st.x(1) - y[1]),
                                       std::abs(st.v(0) - y[2]), std::abs(st.v(1) - y[3])});
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max|d omega| = %.2e, max trajectory error = %.2e", worst_freq, worst_traj);
        return Outcome{worst_freq < 1e-12 && worst_traj < 1e-6, buf};
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
