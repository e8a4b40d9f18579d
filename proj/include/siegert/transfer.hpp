// 2x2 transfer matrices for piecewise-constant potentials.
//
// Outside the support the wave function is written in plane waves referenced
// at the support edges,
//
//   x <= -l :  a e^{ik(x+l)} + b e^{-ik(x+l)}
//   x >=  l :  c e^{ik(x-l)} + d e^{-ik(x-l)}
//
// and the transfer matrix maps (a, b) to (c, d). Internally everything is
// propagated in the (psi, psi') basis, where each constant piece contributes
//
//   [  cos(qw)     sin(qw)/q ]      q^2 = k^2 - v
//   [ -q sin(qw)   cos(qw)   ]
//
// which is even in q, hence entire in k^2 with unit determinant.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "siegert/errors.hpp"
#include "siegert/model.hpp"

namespace siegert {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

namespace transfer {

inline constexpr double kExponentLimit = 700.0;
inline constexpr double kDegenerateThreshold = 1e-6;

inline void require_valid_k(cplx k) {
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
        throw ValidationError("transfer: non-finite wavenumber");
    }
    if (k == cplx(0.0)) throw ValidationError("transfer: k = 0 is a branch point");
}

// Fundamental matrix of psi'' = (v - k^2) psi over a width w.
inline Mat2c piece_propagator(cplx k2_minus_v, double w) {
    const cplx q = std::sqrt(k2_minus_v);
    Mat2c phi;
    if (std::abs(q) * w < kDegenerateThreshold) {
        // linear-in-x limit, with the leading q^2 corrections kept
        const cplx z = k2_minus_v * w * w;
        phi << 1.0 - z / 2.0, w * (1.0 - z / 6.0), -k2_minus_v * w * (1.0 - z / 6.0), 1.0 - z / 2.0;
        return phi;
    }
    if (std::abs(q.imag()) * w > kExponentLimit) {
        throw OverflowError("transfer: exponent |Im q| w exceeds overflow guard");
    }
    const cplx c = std::cos(q * w);
    const cplx s = std::sin(q * w);
    phi << c, s / q, -q * s, c;
    return phi;
}

// (psi, psi') at xb from (psi, psi') at xa, xa <= xb.
inline Mat2c propagator(const Potential1D& p, cplx k, double xa, double xb) {
    if (!(xa <= xb)) throw ValidationError("propagator: requires xa <= xb");
    const cplx k2 = k * k;
    Mat2c total = Mat2c::Identity();
    double x = xa;
    auto advance = [&](double to, double v) {
        if (to > x) {
            total = piece_propagator(k2 - v, to - x) * total;
            x = to;
        }
    };
    for (const auto& s : p.segments()) {
        if (s.x_right <= xa) continue;
        if (s.x_left >= xb) break;
        advance(std::min(s.x_left, xb), 0.0);
        advance(std::min(s.x_right, xb), s.v);
    }
    advance(xb, 0.0);
    return total;
}

// Columns: the (psi, psi') of e^{ik(x-x0)} and e^{-ik(x-x0)} at x0.
inline Mat2c plane_wave_basis(cplx k) {
    Mat2c w;
    w << 1.0, 1.0, cplx(0, 1) * k, -cplx(0, 1) * k;
    return w;
}

inline Mat2c plane_wave_basis_inverse(cplx k) {
    const cplx inv = 1.0 / (2.0 * cplx(0, 1) * k);
    Mat2c w;
    w << 0.5, inv, 0.5, -inv;
    return w;
}

}  // namespace transfer

struct TransferMatrix {
    cplx k;
    Mat2c m;

    cplx determinant() const { return m.determinant(); }
    // Incoming amplitude a for unit outgoing amplitude c and no incoming wave from the right.
    cplx incoming_element() const { return m(1, 1); }
};

// Plane-wave amplitudes referenced at xa and xb.
inline TransferMatrix transfer_matrix_between(const Potential1D& p, cplx k, double xa, double xb) {
    transfer::require_valid_k(k);
    const Mat2c phi = transfer::propagator(p, k, xa, xb);
    return {k, transfer::plane_wave_basis_inverse(k) * phi * transfer::plane_wave_basis(k)};
}

inline TransferMatrix transfer_matrix(const Potential1D& p, cplx k) {
    const double l = p.support_halfwidth();
    return transfer_matrix_between(p, k, -l, l);
}

struct ScatteringResult {
    double E;
    cplx r;
    cplx t;
    double R;
    double T;
};

inline ScatteringResult scattering_amplitudes(const Potential1D& p, double energy) {
    if (!(energy > 0.0) || !std::isfinite(energy)) {
        throw ValidationError("scattering_amplitudes: energy must be positive and finite");
    }
    const auto tm = transfer_matrix(p, cplx(std::sqrt(energy), 0.0));
    const cplx t = 1.0 / tm.m(1, 1);
    const cplx r = -tm.m(1, 0) / tm.m(1, 1);
    return {energy, r, t, std::norm(r), std::norm(t)};
}

// Conductance in units of the quantum 2e^2/h.
inline double landauer_conductance(const Potential1D& p, double fermi_energy) {
    return scattering_amplitudes(p, fermi_energy).T;
}

inline constexpr double kConductanceQuantum = 7.748091729e-5;  // 2e^2/h in siemens

}  // namespace siegert
