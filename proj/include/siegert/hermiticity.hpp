// Siegert wave functions, the partial-integration surface
// term, and probability in a window that expands with the outgoing flux.
//
// Exterior forms (hbar = 2m = 1):
//   x <= -l :  psi = B e^{-ikx}        x >= l :  psi = C e^{ikx}
// normalized so that psi(l) = 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "siegert/errors.hpp"
#include "siegert/model.hpp"
#include "siegert/poles.hpp"
#include "siegert/quadrature.hpp"
#include "siegert/time_series.hpp"
#include "siegert/transfer.hpp"

namespace siegert {

class SiegertWavefunction {
public:
    struct Region {
        double x0, x1;
        cplx q2;  // k^2 - v
        cplx psi0, dpsi0;  // at x0
    };

    struct Sample {
        double x;
        cplx psi;
    };

    SiegertWavefunction(const Potential1D& p, const ComplexPole& pole, double grid_step = 0.01)
        : pole_(pole), k_(pole.k), l_(p.support_halfwidth()) {
        if (!pole.certified) throw ValidationError("build_wavefunction: pole is not certified");
        if (!(l_ > 0.0)) throw ValidationError("build_wavefunction: potential has empty support");
        if (!(grid_step > 0.0)) throw ValidationError("build_wavefunction: grid step must be positive");
        const cplx i(0.0, 1.0);

        // Integrate leftward from psi(l) = 1, psi'(l) = ik.
        const auto regions = p.regions();
        regions_.resize(regions.size());
        cplx psi = 1.0, dpsi = i * k_;
        for (std::size_t n = regions.size(); n-- > 0;) {
            const auto& s = regions[n];
            const cplx q2 = k_ * k_ - s.v;
            const Mat2c phi = transfer::piece_propagator(q2, s.width());
            // inverse of a unit-determinant 2x2 matrix
            const cplx p0 = phi(1, 1) * psi - phi(0, 1) * dpsi;
            const cplx d0 = -phi(1, 0) * psi + phi(0, 0) * dpsi;
            psi = p0;
            dpsi = d0;
            regions_[n] = {s.x_left, s.x_right, q2, psi, dpsi};
        }
        matching_residual_ = std::abs(dpsi + i * k_ * psi) / (std::abs(dpsi) + std::abs(k_) * std::abs(psi));
        if (!(matching_residual_ < 1e-8)) {
            throw NumericalError("build_wavefunction: matching residual " + std::to_string(matching_residual_) +
                                 " at -l, pole rejected as spurious");
        }
        psi_left_edge_ = psi;
        C_ = std::exp(-i * k_ * l_);
        B_ = psi * std::exp(-i * k_ * l_);

        const auto n = static_cast<std::size_t>(std::ceil(2.0 * l_ / grid_step));
        samples_.reserve(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            const double x = (j == n) ? l_ : -l_ + 2.0 * l_ * static_cast<double>(j) / static_cast<double>(n);
            samples_.push_back({x, psi_at(x)});
        }
    }

    const ComplexPole& pole() const noexcept { return pole_; }
    cplx k() const noexcept { return k_; }
    cplx energy() const noexcept { return k_ * k_; }
    double support_halfwidth() const noexcept { return l_; }
    cplx B() const noexcept { return B_; }
    cplx C() const noexcept { return C_; }
    double matching_residual() const noexcept { return matching_residual_; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const std::vector<Region>& regions() const noexcept { return regions_; }

    cplx psi_at(double x) const { return evaluate(x).first; }
    cplx dpsi_at(double x) const { return evaluate(x).second; }

    // Closed-form exterior values; interior from the exact piecewise solution.
    std::pair<cplx, cplx> evaluate(double x) const {
        const cplx i(0.0, 1.0);
        if (x >= l_ || x <= -l_) {
            if (std::abs(k_.imag() * x) > transfer::kExponentLimit) {
                throw OverflowError("SiegertWavefunction: exterior exponent exceeds overflow guard");
            }
            if (x >= l_) {
                const cplx v = C_ * std::exp(i * k_ * x);
                return {v, i * k_ * v};
            }
            const cplx v = B_ * std::exp(-i * k_ * x);
            return {v, -i * k_ * v};
        }
        auto it = std::find_if(regions_.begin(), regions_.end(), [x](const Region& r) { return x <= r.x1; });
        const Region& r = *it;
        const Mat2c phi = transfer::piece_propagator(r.q2, x - r.x0);
        return {phi(0, 0) * r.psi0 + phi(0, 1) * r.dpsi0, phi(1, 0) * r.psi0 + phi(1, 1) * r.dpsi0};
    }

    // |psi(-l)|^2 + |psi(l)|^2, the edge intensity that drives the exterior growth.
    double edge_intensity() const noexcept { return 1.0 + std::norm(psi_left_edge_); }

    // Integral of |psi|^2 over [-l, l] by 32-point Gauss-Legendre per region.
    double interior_norm() const {
        const auto& rule = quadrature::gauss32();
        double sum = 0.0;
        for (const auto& r : regions_) {
            sum += rule.integrate([&](double x) { return std::norm(psi_at(std::clamp(x, r.x0, r.x1))); }, r.x0, r.x1);
        }
        return sum;
    }

    // Closed-form integral of |psi|^2 over l <= |x| <= L.
    double exterior_norm(double L) const {
        if (!(L >= l_)) throw ValidationError("exterior_norm: L must be >= l");
        const double gamma = -k_.imag();
        if (std::abs(2.0 * gamma * L) > transfer::kExponentLimit) {
            throw OverflowError("exterior_norm: exponent exceeds overflow guard");
        }
        const double span = L - l_;
        const double growth = (gamma == 0.0) ? span : std::expm1(2.0 * gamma * span) / (2.0 * gamma);
        return edge_intensity() * growth;
    }

private:
    ComplexPole pole_;
    cplx k_;
    double l_;
    cplx B_, C_;
    cplx psi_left_edge_;
    double matching_residual_ = 0.0;
    std::vector<Region> regions_;
    std::vector<Sample> samples_;
};

inline SiegertWavefunction build_wavefunction(const Potential1D& p, const ComplexPole& pole,
                                              double grid_step = 0.01) {
    return SiegertWavefunction(p, pole, grid_step);
}

// [psi* psi']_{-L}^{L}; its imaginary part is the obstruction to reading
// <psi|d^2/dx^2|psi> as a real number.
inline cplx surface_term(const SiegertWavefunction& w, double L) {
    if (!(L > w.support_halfwidth())) throw ValidationError("surface_term: L must exceed the support half-width");
    const auto [pr, dpr] = w.evaluate(L);
    const auto [pl, dpl] = w.evaluate(-L);
    return std::conj(pr) * dpr - std::conj(pl) * dpl;
}

struct NormSample {
    double N;
    double dN_dt;     // five-point finite difference on the sampled N(t)
    double bulk;      // integral of d|Psi|^2/dt over [-L, L] = 2 Im E N(t)
    double bulk_surface;  // the same term from the surface form -2 Im[Psi* Psi']_{-L}^{L}
    double boundary;  // L'(t) (|Psi(L)|^2 + |Psi(-L)|^2)
    double L;
};

struct ExpandingNormOptions {
    // Multiplier on the window speed 2 Re k; anything but 1 breaks conservation.
    double speed_factor = 1.0;
};

struct ExpandingNorm {
    TimeSeries<NormSample> series;
    double window_speed = 0.0;
    std::string warning;

    double max_relative_deviation() const {
        const double n0 = series.values.front().N;
        double worst = 0.0;
        for (const auto& s : series.values) worst = std::max(worst, std::abs(s.N / n0 - 1.0));
        return worst;
    }
};

// Five-point derivative of uniformly sampled data; one-sided stencils at the ends.
inline std::vector<double> five_point_derivative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw ValidationError("five_point_derivative: need at least five samples");
    std::vector<double> d(n);
    const double s = 1.0 / (12.0 * h);
    d[0] = s * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
    d[1] = s * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = s * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
    d[n - 2] = s * (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]);
    d[n - 1] = s * (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]);
    return d;
}

// N(t) = integral of |e^{-iEt} psi|^2 over [-L(t), L(t)], L(t) = L0 + 2 Re(k) t.
inline ExpandingNorm expanding_norm(const SiegertWavefunction& w, double L0, const std::vector<double>& t_grid,
                                    const ExpandingNormOptions& opt = {}) {
    const double l = w.support_halfwidth();
    if (!(L0 > l)) throw ValidationError("expanding_norm: L0 must exceed the support half-width");
    require_increasing(t_grid);
    if (t_grid.size() < 5) throw ValidationError("expanding_norm: need at least five time samples");
    const cplx k = w.k();
    const cplx E = w.energy();
    const auto cls = w.pole().cls;
    if (cls == PoleClass::resonant && t_grid.front() < 0.0) {
        throw ValidationError("expanding_norm: resonant windows run forward in time (t >= 0)");
    }
    if (cls == PoleClass::anti_resonant && t_grid.back() > 0.0) {
        throw ValidationError("expanding_norm: anti-resonant windows run backward in time (t <= 0)");
    }
    const double h = t_grid[1] - t_grid[0];
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (std::abs((t_grid[i] - t_grid[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw ValidationError("expanding_norm: time grid must be uniform");
        }
    }

    ExpandingNorm out;
    out.window_speed = opt.speed_factor * UnitSystem::velocity(k.real());
    if (cls != PoleClass::bound && std::abs(k.real()) < std::abs(k.imag())) {
        out.warning = "near-threshold pole: window speed 2 Re k is slower than the spatial growth rate";
    }
    const double interior = w.interior_norm();
    const double gamma = -k.imag();
    const double im_e = E.imag();

    out.series.t = t_grid;
    out.series.observable = "N(t)";
    out.series.values.reserve(t_grid.size());
    std::vector<double> n_values;
    n_values.reserve(t_grid.size());
    for (double t : t_grid) {
        const double L = L0 + out.window_speed * t;
        if (!(L > l)) throw ValidationError("expanding_norm: window shrank inside the support");
        const double decay_exp = 2.0 * im_e * t;
        if (std::abs(decay_exp) > transfer::kExponentLimit) {
            throw OverflowError("expanding_norm: time exponent exceeds overflow guard");
        }
        const double decay = std::exp(decay_exp);
        const double N = decay * (interior + w.exterior_norm(L));
        const double edge = decay * w.edge_intensity() * std::exp(2.0 * gamma * (L - l));
        const cplx surf = surface_term(w, L) * decay;
        NormSample s{};
        s.N = N;
        s.bulk = 2.0 * im_e * N;
        s.bulk_surface = -2.0 * surf.imag();
        s.boundary = out.window_speed * edge;
        s.L = L;
        out.series.values.push_back(s);
        n_values.push_back(N);
    }
    const auto d = five_point_derivative(n_values, h);
    for (std::size_t i = 0; i < d.size(); ++i) out.series.values[i].dN_dt = d[i];
    return out;
}

}  // namespace siegert
