// Projection onto the system sites of a tight-binding chain.
//
// Each uniform lead (hopping J, H_{n,n+1} = -J) is eliminated exactly. A
// system site coupled to it with strength g picks up (g/J)^2 Sigma(E), where
// Sigma solves Sigma = J^2 / (E - Sigma):
//
//   Sigma_ret(E) = (E - i sqrt(4J^2 - E^2)) / 2,   Sigma_adv(E) = conj(Sigma_ret(conj E)).
//
// The retarded branch is the decaying root for Im E > 0 and is continued
// through the band [-2J, 2J] into Im E < 0 (second sheet, where resonances
// live). Its cuts therefore sit on the real axis outside the band; on those
// cuts the limit from Im E -> 0+ (the decaying root) is taken.
//
// In the lead, Sigma = -J e^{i kappa} with E = -2J cos(kappa), so the sheet
// of a solution is encoded by z = e^{i kappa}. Newton iterations track z
// continuously, i.e. they move on the Riemann surface rather than a sheet.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "siegert/contour.hpp"
#include "siegert/errors.hpp"
#include "siegert/model.hpp"
#include "siegert/poles.hpp"

namespace siegert {

enum class Branch { retarded, advanced };

inline std::string_view to_string(Branch b) { return b == Branch::retarded ? "ret" : "adv"; }

struct SelfEnergy {
    Branch branch;
    cplx E;
    cplx value;
};

namespace feshbach {

inline constexpr double kBandEdgeTol = 1e-12;

inline cplx retarded_sigma(cplx E, double J) {
    const double edge = 2.0 * J;
    if (std::abs(E - edge) < kBandEdgeTol * std::max(1.0, J) || std::abs(E + edge) < kBandEdgeTol * std::max(1.0, J)) {
        throw BranchSingularity("lead_self_energy: E at a band edge +-2J (branch point)");
    }
    if (E.imag() == 0.0 && std::abs(E.real()) > edge) {
        const double x = E.real();
        const double r = std::sqrt((x - edge) * (x + edge));
        return {0.5 * (x - std::copysign(r, x)), 0.0};
    }
    const cplx s = std::sqrt(cplx(edge * edge) - E * E);
    return 0.5 * (E - cplx(0.0, 1.0) * s);
}

// The two lead roots z (Sigma = -J z); the one nearer to `previous` continues the sheet.
inline cplx continue_root(cplx E, double J, cplx previous) {
    const cplx b = E / J;
    const cplx disc = std::sqrt(b * b - 4.0);
    const cplx z1 = 0.5 * (-b + disc);
    const cplx z2 = 0.5 * (-b - disc);
    return std::abs(z1 - previous) <= std::abs(z2 - previous) ? z1 : z2;
}

inline cplx kappa_of_root(cplx z) { return cplx(0.0, -1.0) * std::log(z); }

}  // namespace feshbach

inline SelfEnergy lead_self_energy(cplx E, double J, Branch branch) {
    if (!(J > 0.0)) throw ValidationError("lead_self_energy: J must be positive");
    if (!std::isfinite(E.real()) || !std::isfinite(E.imag())) throw ValidationError("lead_self_energy: non-finite E");
    const cplx value = branch == Branch::retarded ? feshbach::retarded_sigma(E, J)
                                                  : std::conj(feshbach::retarded_sigma(std::conj(E), J));
    return {branch, E, value};
}

// System Hamiltonian PHP with the minus-sign hopping convention.
inline Eigen::MatrixXcd system_hamiltonian(const LatticeModel& m) {
    m.validate();
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = m.onsite[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        h(i, i + 1) = h(i + 1, i) = -m.intra_hopping[static_cast<std::size_t>(i)];
    }
    return h;
}

// PHP plus the lead corrections for a given self-energy value.
inline Eigen::MatrixXcd effective_matrix(const LatticeModel& m, cplx sigma) {
    Eigen::MatrixXcd h = system_hamiltonian(m);
    const double j2 = m.lead_hopping * m.lead_hopping;
    const auto last = static_cast<Eigen::Index>(m.size()) - 1;
    h(0, 0) += (m.g_left * m.g_left / j2) * sigma;
    h(last, last) += (m.g_right * m.g_right / j2) * sigma;
    return h;
}

struct EffectiveHamiltonian {
    cplx E;
    Branch branch;
    cplx sigma;
    Eigen::MatrixXcd matrix;

    double hermiticity_defect() const { return (matrix - matrix.adjoint()).norm(); }
};

inline EffectiveHamiltonian effective_hamiltonian(const LatticeModel& m, cplx E, Branch branch) {
    const auto se = lead_self_energy(E, m.lead_hopping, branch);
    return {E, branch, se.value, effective_matrix(m, se.value)};
}

struct NonlinearEigOptions {
    int max_iter = 200;
    double step_tol = 1e-12;
    double residual_tol = 1e-12;
    double rel_diff_step = 1e-7;
    double band_edge_guard = 1e-6;
};

struct NonlinearEigResult {
    Branch branch;
    cplx E;
    cplx sigma;
    cplx kappa;  // lead wavenumber of the solution, E = -2J cos(kappa)
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string diagnostic;
    std::vector<cplx> trace;
};

// Newton on d(E) = det(E I - H_eff(E)), following the lead root continuously
// from the branch value at the seed.
inline NonlinearEigResult solve_nonlinear_eig(const LatticeModel& m, Branch branch, cplx seed,
                                              const NonlinearEigOptions& opt = {}) {
    m.validate();
    const double J = m.lead_hopping;
    const auto n = static_cast<Eigen::Index>(m.size());
    cplx z = -lead_self_energy(seed, J, branch).value / J;

    const double h_scale = std::max(1.0, system_hamiltonian(m).norm() + 2.0 * J);
    const double det_scale = std::pow(h_scale, static_cast<double>(n));
    auto det_at = [&](cplx E, cplx z_ref) {
        const cplx zz = feshbach::continue_root(E, J, z_ref);
        const Eigen::MatrixXcd a = E * Eigen::MatrixXcd::Identity(n, n) - effective_matrix(m, -J * zz);
        return a.partialPivLu().determinant();
    };

    NonlinearEigResult out{branch, seed, -J * z, feshbach::kappa_of_root(z), 0.0, 0, false, {}, {seed}};
    cplx E = seed;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const cplx d = det_at(E, z);
        const double h = opt.rel_diff_step * std::max(1.0, std::abs(E));
        const cplx dd = (det_at(E + h, z) - det_at(E - h, z)) / (2.0 * h);
        out.iterations = it;
        if (dd == cplx(0.0) || !std::isfinite(std::abs(dd))) {
            out.diagnostic = "vanishing derivative";
            break;
        }
        const cplx step = d / dd;
        const cplx next = E - step;
        z = feshbach::continue_root(next, J, z);
        E = next;
        out.trace.push_back(E);
        if (!std::isfinite(std::abs(E))) {
            out.diagnostic = "diverged";
            break;
        }
        if (std::abs(step) < opt.step_tol * std::max(1.0, std::abs(E))) {
            out.residual = std::abs(det_at(E, z));
            out.converged = out.residual < opt.residual_tol * det_scale;
            if (!out.converged) out.diagnostic = "step converged but determinant residual too large";
            break;
        }
    }
    if (out.iterations >= opt.max_iter && !out.converged && out.diagnostic.empty()) {
        out.diagnostic = "no convergence within iteration limit";
    }
    out.E = E;
    out.sigma = -J * z;
    out.kappa = feshbach::kappa_of_root(z);
    if (out.residual == 0.0) out.residual = std::abs(det_at(E, z));
    if (std::abs(E - 2.0 * J) < opt.band_edge_guard || std::abs(E + 2.0 * J) < opt.band_edge_guard) {
        out.converged = false;
        out.diagnostic = "band-edge attraction: no discrete pole near the seed";
    }
    return out;
}

// --- lattice Siegert route ----------------------------------------------------

// Incoming-wave amplitude (up to a kappa-dependent nonzero factor) of the
// solution that is purely outgoing, e^{i kappa m}, in the right lead. The
// lattice equations are iterated site by site from the right lead through
// the system into the left lead.
inline cplx lattice_siegert_function(const LatticeModel& m, cplx kappa) {
    const double J = m.lead_hopping;
    const cplx i(0.0, 1.0);
    const cplx z = std::exp(i * kappa);
    const cplx E = -J * (z + 1.0 / z);
    const std::size_t n = m.size();
    // psi on the system sites, filled from the right
    std::vector<cplx> psi(n);
    const cplx r1 = z, r2 = z * z;
    psi[n - 1] = -(E * r1 + J * r2) / m.g_right;
    for (std::size_t s = n - 1; s >= 1; --s) {
        const cplx right_neighbor = (s + 1 < n) ? psi[s + 1] * m.intra_hopping[s] : m.g_right * r1;
        psi[s - 1] = ((m.onsite[s] - E) * psi[s] - right_neighbor) / m.intra_hopping[s - 1];
    }
    const cplx right_of_first = (n > 1) ? m.intra_hopping[0] * psi[1] : m.g_right * r1;
    const cplx site1 = (E - m.onsite[0]) * psi[0] + right_of_first;
    if (m.g_left == 0.0) return site1;
    const cplx l1 = -site1 / m.g_left;
    const cplx l2 = -(E * l1 + m.g_left * psi[0]) / J;
    // left lead: a e^{-i kappa m} + b e^{i kappa m}; returns a (e^{-2i kappa} - 1)
    return l2 - z * l1;
}

// Lattice quadrant rule on kappa reduced to (-pi, pi].
inline PoleClass classify_lattice(cplx kappa, double axis_tolerance = 1e-9) {
    double re = std::remainder(kappa.real(), 2.0 * std::numbers::pi);
    if (re <= -std::numbers::pi) re += 2.0 * std::numbers::pi;
    const bool on_axis = std::abs(re) < axis_tolerance || std::numbers::pi - std::abs(re) < axis_tolerance;
    if (on_axis) return kappa.imag() > 0 ? PoleClass::bound : PoleClass::anti_bound;
    if (kappa.imag() > 0) return PoleClass::bound;
    return re > 0 ? PoleClass::resonant : PoleClass::anti_resonant;
}

struct LatticeWindow {
    double re_min = -0.5 * std::numbers::pi, re_max = 1.5 * std::numbers::pi;
    double im_min = -2.0, im_max = 2.0;
    int max_subdivision_depth = 40;
    double axis_tolerance = 1e-9;
    double exclusion = 1e-3;
};

inline ComplexPole make_lattice_pole(const LatticeModel& m, const contour::Root& r, double axis_tolerance) {
    ComplexPole pole;
    cplx kappa = r.z;
    double re = std::fmod(kappa.real() + 0.5 * std::numbers::pi, 2.0 * std::numbers::pi);
    if (re < 0) re += 2.0 * std::numbers::pi;
    kappa = cplx(re - 0.5 * std::numbers::pi, kappa.imag());
    pole.cls = classify_lattice(kappa, axis_tolerance);
    if (pole.cls == PoleClass::bound || pole.cls == PoleClass::anti_bound) {
        const double snapped = std::abs(kappa.real()) < 0.5 * std::numbers::pi ? 0.0 : std::numbers::pi;
        kappa = cplx(snapped, kappa.imag());
    }
    pole.k = kappa;
    pole.E = -2.0 * m.lead_hopping * std::cos(kappa);
    if (pole.cls == PoleClass::bound || pole.cls == PoleClass::anti_bound) pole.E = cplx(pole.E.real(), 0.0);
    pole.first_sheet = kappa.imag() > 0;
    pole.residual = r.residual;
    pole.newton_iters = r.newton_iters;
    pole.certified = r.certified;
    pole.diagnostic = r.diagnostic;
    return pole;
}

struct LatticePoleSearch {
    std::vector<ComplexPole> poles;
    std::vector<contour::Subdivision> subdivisions;
    int total_count = 0;
};

// Siegert poles of the lattice model in a window of the complex kappa plane,
// with kappa = 0 and pi (band edges) cut out.
inline LatticePoleSearch lattice_siegert_poles(const LatticeModel& m, const LatticeWindow& w = {}) {
    m.validate();
    LatticePoleSearch out;
    if (m.decoupled()) return out;
    for (double t : m.intra_hopping) {
        if (t == 0.0) throw ValidationError("lattice_siegert_poles: zero intra-system hopping splits the system");
    }
    // iterate from whichever side is coupled
    LatticeModel mm = m;
    if (mm.g_right == 0.0) {
        std::reverse(mm.onsite.begin(), mm.onsite.end());
        std::reverse(mm.intra_hopping.begin(), mm.intra_hopping.end());
        std::swap(mm.g_left, mm.g_right);
    }
    std::vector<cplx> excluded;
    for (int n = -2; n <= 4; ++n) {
        const double x = n * std::numbers::pi;
        if (x >= w.re_min - w.exclusion && x <= w.re_max + w.exclusion) excluded.emplace_back(x, 0.0);
    }
    contour::Options opt;
    opt.max_depth = w.max_subdivision_depth;
    contour::Window cw{w.re_min, w.re_max, w.im_min, w.im_max, excluded, w.exclusion};
    auto f = [&mm](cplx kappa) { return lattice_siegert_function(mm, kappa); };
    const auto res = contour::find_zeros(f, cw, opt);
    out.subdivisions = res.subdivisions;
    out.total_count = res.total_count;
    for (const auto& r : res.roots) {
        auto pole = make_lattice_pole(m, r, w.axis_tolerance);
        const bool duplicate = std::any_of(out.poles.begin(), out.poles.end(), [&](const ComplexPole& p) {
            return std::abs(p.k - pole.k) < opt.dedup_tol;
        });
        if (!duplicate) out.poles.push_back(std::move(pole));
    }
    std::sort(out.poles.begin(), out.poles.end(), [](const ComplexPole& a, const ComplexPole& b) {
        return a.E.real() < b.E.real() || (a.E.real() == b.E.real() && a.E.imag() < b.E.imag());
    });
    return out;
}

// Multi-seed nonlinear solve; converged poles deduplicated by lead wavenumber
// and sorted by energy.
inline std::vector<NonlinearEigResult> solve_nonlinear_eig_seeds(const LatticeModel& m, Branch branch,
                                                                 const std::vector<cplx>& seeds,
                                                                 const NonlinearEigOptions& opt = {},
                                                                 double dedup_tol = 1e-8) {
    std::vector<NonlinearEigResult> runs(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
    parallel_for(seeds.size(), [&](std::size_t i) {
        try {
            runs[i] = solve_nonlinear_eig(m, branch, seeds[i], opt);
            ok[i] = runs[i].converged;
        } catch (const BranchSingularity&) {
            ok[i] = 0;
        }
    });
    std::vector<NonlinearEigResult> out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!ok[i]) continue;
        const cplx zi = std::exp(cplx(0, 1) * runs[i].kappa);
        const bool dup = std::any_of(out.begin(), out.end(), [&](const NonlinearEigResult& o) {
            return std::abs(std::exp(cplx(0, 1) * o.kappa) - zi) < dedup_tol * std::max(1.0, std::abs(zi));
        });
        if (!dup) out.push_back(std::move(runs[i]));
    }
    std::sort(out.begin(), out.end(), [](const NonlinearEigResult& a, const NonlinearEigResult& b) {
        return a.E.real() < b.E.real() || (a.E.real() == b.E.real() && a.E.imag() < b.E.imag());
    });
    for (auto& r : out) r.trace.clear();
    return out;
}

// --- biorthogonal expansion ---------------------------------------------------

struct BiorthogonalSystem {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right;  // columns psi_n
    Eigen::MatrixXcd left;   // rows phi_n, phi_m psi_n = delta_mn
    double condition_number = 1.0;
    bool left_from_inverse = false;

    double biorthogonality_residual() const {
        const auto n = right.cols();
        return (left * right - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    }
    double completeness_residual() const {
        const auto n = right.cols();
        return (right * left - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    }
};

// Right eigenvectors from H, left eigenvectors independently from H^dagger,
// paired by conjugate eigenvalue. Falls back to the rows of the inverse
// eigenvector matrix when eigenvalues are too close to pair reliably.
inline BiorthogonalSystem biorthogonal_system(const Eigen::MatrixXcd& h, double max_condition = 1e8) {
    if (h.rows() != h.cols() || h.rows() == 0) throw ValidationError("biorthogonal_system: need a square matrix");
    const auto n = h.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right_solver(h);
    if (right_solver.info() != Eigen::Success) throw NumericalError("biorthogonal_system: eigensolver failed");
    BiorthogonalSystem out;
    out.eigenvalues = right_solver.eigenvalues();
    out.right = right_solver.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) out.right.col(j).normalize();

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.right);
    const auto& sv = svd.singularValues();
    out.condition_number = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!(out.condition_number < max_condition)) {
        throw NumericalError("biorthogonal_system: eigenvector condition number " +
                             std::to_string(out.condition_number) + " (exceptional point), expansion refused");
    }

    const double scale = std::max(1.0, h.norm());
    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            min_gap = std::min(min_gap, std::abs(out.eigenvalues(a) - out.eigenvalues(b)));
        }
    }
    if (min_gap < 1e-6 * scale) {
        out.left = out.right.inverse();
        out.left_from_inverse = true;
        return out;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left_solver(h.adjoint());
    if (left_solver.info() != Eigen::Success) throw NumericalError("biorthogonal_system: eigensolver failed");
    out.left.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index best = 0;
        (left_solver.eigenvalues().array() - std::conj(out.eigenvalues(j))).abs().minCoeff(&best);
        const Eigen::RowVectorXcd phi = left_solver.eigenvectors().col(best).adjoint();
        out.left.row(j) = phi / (phi * out.right.col(j))(0);
    }
    return out;
}

struct Expansion {
    Eigen::VectorXcd coefficients;
    double biorthogonal_probability = 0.0;  // sum_n |f_n|^2
    double square_modulus = 0.0;            // f^dagger f
    double reconstruction_residual = 0.0;   // |sum_n f_n psi_n - f|
};

inline Expansion biorthogonal_expand(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& f) {
    if (f.size() != h.rows()) throw ValidationError("biorthogonal_expand: dimension mismatch");
    const auto sys = biorthogonal_system(h);
    Expansion e;
    e.coefficients = sys.left * f;
    e.biorthogonal_probability = e.coefficients.squaredNorm();
    e.square_modulus = f.squaredNorm();
    e.reconstruction_residual = (sys.right * e.coefficients - f).norm();
    return e;
}

}  // namespace siegert
