// Survival probability on a finite chain and its attribution
// to the discrete poles of the open system.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "siegert/errors.hpp"
#include "siegert/feshbach.hpp"
#include "siegert/model.hpp"
#include "siegert/parallel.hpp"
#include "siegert/poles.hpp"
#include "siegert/time_series.hpp"

namespace siegert {

// Spectrum of the finite chain (system embedded between two finite leads),
// reduced to what the survival amplitude of one site needs.
struct FiniteChainSpectrum {
    Eigen::VectorXd energies;
    Eigen::VectorXd weights;  // |<probe|n>|^2
    std::size_t total_sites = 0;
    std::size_t probe_index = 0;  // index of the probe site in the full chain

    cplx amplitude(double t) const {
        cplx a = 0.0;
        for (Eigen::Index n = 0; n < energies.size(); ++n) a += weights(n) * std::polar(1.0, -energies(n) * t);
        return a;
    }
};

inline FiniteChainSpectrum finite_chain_spectrum(const LatticeModel& m, std::size_t total_sites,
                                                 std::size_t probe_site = 0) {
    m.validate();
    const std::size_t ns = m.size();
    if (total_sites < 401 || total_sites % 2 == 0) {
        throw ValidationError("evolve_survival: total_sites must be odd and >= 401");
    }
    if (probe_site >= ns) throw ValidationError("evolve_survival: probe site outside the system");
    const std::size_t left = (total_sites - ns) / 2;
    const auto n = static_cast<Eigen::Index>(total_sites);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -m.lead_hopping);
    for (std::size_t s = 0; s < ns; ++s) diag(static_cast<Eigen::Index>(left + s)) = m.onsite[s];
    for (std::size_t s = 0; s + 1 < ns; ++s) sub(static_cast<Eigen::Index>(left + s)) = -m.intra_hopping[s];
    sub(static_cast<Eigen::Index>(left) - 1) = -m.g_left;
    sub(static_cast<Eigen::Index>(left + ns) - 1) = -m.g_right;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalError("evolve_survival: diagonalization failed");
    FiniteChainSpectrum out;
    out.total_sites = total_sites;
    out.probe_index = left + probe_site;
    out.energies = solver.eigenvalues();
    out.weights = solver.eigenvectors().row(static_cast<Eigen::Index>(out.probe_index)).cwiseAbs2().transpose();
    return out;
}

inline void require_no_reflection(const LatticeModel& m, std::size_t total_sites, const std::vector<double>& t) {
    double tmax = 0.0;
    for (double x : t) tmax = std::max(tmax, std::abs(x));
    const double needed = 2.0 * (2.0 * m.lead_hopping * tmax) + static_cast<double>(m.size());
    if (!(static_cast<double>(total_sites) > needed)) {
        throw ValidationError("evolve_survival: lattice too short, the wave front would reflect within max|t| (need > " +
                              std::to_string(needed) + " sites)");
    }
}

// P(t) = |<0|e^{-iHt}|0>|^2 on the finite chain. Negative times are
// evaluated directly, not folded, so P(t) = P(-t) is a genuine check.
inline TimeSeries<double> evolve_survival(const LatticeModel& m, std::size_t total_sites,
                                          const std::vector<double>& t_grid, std::size_t probe_site = 0) {
    require_increasing(t_grid);
    require_no_reflection(m, total_sites, t_grid);
    const auto spec = finite_chain_spectrum(m, total_sites, probe_site);
    TimeSeries<double> out;
    out.t = t_grid;
    out.observable = "P(t)";
    out.values.resize(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { out.values[i] = std::norm(spec.amplitude(t_grid[i])); });
    return out;
}

// Residue of G_pp(E) = [E - H_eff(E)]^{-1}_pp at a lattice pole, by the
// trapezoidal rule on a small circle; the lead root is continued from the
// pole's own sheet around the circle.
inline cplx green_residue(const LatticeModel& m, const ComplexPole& pole, std::size_t probe_site = 0,
                          double radius = 1e-3, int nodes = 64) {
    const double J = m.lead_hopping;
    const cplx z_pole = std::exp(cplx(0.0, 1.0) * pole.k);
    if (std::abs(pole.E - 2.0 * J) < 2.0 * radius || std::abs(pole.E + 2.0 * J) < 2.0 * radius) {
        throw NumericalError("green_residue: pole too close to a band edge for the contour");
    }
    const auto n = static_cast<Eigen::Index>(m.size());
    cplx sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
        const cplx E = pole.E + radius * w;
        const cplx z = feshbach::continue_root(E, J, z_pole);
        const Eigen::MatrixXcd a = E * Eigen::MatrixXcd::Identity(n, n) - effective_matrix(m, -J * z);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(static_cast<Eigen::Index>(probe_site)) = 1.0;
        const cplx g = a.partialPivLu().solve(e)(static_cast<Eigen::Index>(probe_site));
        sum += g * w;
    }
    return radius * sum / static_cast<double>(nodes);
}

struct PoleContribution {
    ComplexPole pole;
    cplx residue;
};

struct PoleDecomposition {
    std::vector<double> t;
    std::vector<double> total;
    std::vector<double> resonant;       // t > 0 only
    std::vector<double> anti_resonant;  // t < 0 only
    std::vector<double> bound;
    std::vector<double> residual;
    std::vector<PoleContribution> contributions;
};

// Splits P(t) into pole terms |r_n e^{-i E_n t}|^2: resonant poles for t > 0,
// their anti-resonant partners for t < 0, bound poles at all times. Anti-bound
// poles are not attributed. The residual channel carries the rest (branch-cut
// background and cross terms).
inline PoleDecomposition pole_decomposition(const LatticeModel& m, const std::vector<ComplexPole>& poles,
                                            const TimeSeries<double>& survival, std::size_t probe_site = 0) {
    PoleDecomposition out;
    out.t = survival.t;
    out.total = survival.values;
    for (const auto& p : poles) {
        if (!p.certified || p.cls == PoleClass::anti_bound) continue;
        out.contributions.push_back({p, green_residue(m, p, probe_site)});
    }
    const std::size_t n = out.t.size();
    out.resonant.assign(n, 0.0);
    out.anti_resonant.assign(n, 0.0);
    out.bound.assign(n, 0.0);
    out.residual.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = out.t[i];
        for (const auto& c : out.contributions) {
            const double mag = std::norm(c.residue) * std::exp(2.0 * c.pole.E.imag() * t);
            switch (c.pole.cls) {
                case PoleClass::resonant:
                    if (t > 0) out.resonant[i] += mag;
                    break;
                case PoleClass::anti_resonant:
                    if (t < 0) out.anti_resonant[i] += mag;
                    break;
                case PoleClass::bound: out.bound[i] += std::norm(c.residue); break;
                case PoleClass::anti_bound: break;
            }
        }
        out.residual[i] = out.total[i] - out.resonant[i] - out.anti_resonant[i] - out.bound[i];
    }
    return out;
}

// Least-squares slope of -log P(t) over [t0, t1].
inline double fit_decay_rate(const TimeSeries<double>& s, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.t[i] < t0 || s.t[i] > t1) continue;
        if (!(s.values[i] > 0.0)) continue;
        const double x = s.t[i], y = std::log(s.values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw ValidationError("fit_decay_rate: fewer than two samples in the window");
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace siegert
