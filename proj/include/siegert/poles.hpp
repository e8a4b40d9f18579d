// Siegert poles of a piecewise-constant potential.
//
// The Siegert function is the incoming amplitude a(k) of the solution that is
// purely outgoing on the right (c = 1, d = 0), i.e. the (2,2) element of the
// transfer matrix. Its zeros in the complex k plane are the bound (+i axis),
// anti-bound (-i axis), resonant (4th quadrant) and anti-resonant (3rd
// quadrant) states.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "siegert/contour.hpp"
#include "siegert/errors.hpp"
#include "siegert/model.hpp"
#include "siegert/transfer.hpp"

namespace siegert {

enum class PoleClass { bound, anti_bound, resonant, anti_resonant };

inline std::string_view to_string(PoleClass c) {
    switch (c) {
        case PoleClass::bound: return "bound";
        case PoleClass::anti_bound: return "anti-bound";
        case PoleClass::resonant: return "resonant";
        case PoleClass::anti_resonant: return "anti-resonant";
    }
    return "unknown";
}

struct ComplexPole {
    cplx k;
    cplx E;
    bool first_sheet = false;  // Im k > 0
    PoleClass cls = PoleClass::bound;
    double residual = 0.0;
    int newton_iters = 0;
    bool certified = false;
    std::string diagnostic;
};

struct SearchWindow {
    double re_min = -6.0, re_max = 6.0;
    double im_min = -3.0, im_max = 6.0;
    int max_subdivision_depth = 40;
    double axis_tolerance = 1e-9;
    double origin_exclusion = 1e-3;
};

inline cplx siegert_function(const Potential1D& p, cplx k) { return transfer_matrix(p, k).incoming_element(); }

// Quadrant rule, with |Re k| < axis_tolerance treated as on the imaginary axis.
inline PoleClass classify(cplx k, double axis_tolerance = 1e-9) {
    if (k == cplx(0.0)) throw ValidationError("classify: k = 0 is excluded");
    if (std::abs(k.real()) < axis_tolerance) return k.imag() > 0 ? PoleClass::bound : PoleClass::anti_bound;
    if (k.imag() > 0) {
        // Off-axis zeros in the upper half plane cannot occur for a real potential.
        return PoleClass::bound;
    }
    return k.real() > 0 ? PoleClass::resonant : PoleClass::anti_resonant;
}

namespace detail {

inline contour::Options contour_options(int max_depth) {
    contour::Options opt;
    opt.max_depth = max_depth;
    return opt;
}

}  // namespace detail

// Argument-principle zero count of the Siegert function inside the box.
inline int winding_count(const Potential1D& p, const contour::Box& box, const contour::Options& opt = {}) {
    if (box.contains(cplx(0.0))) throw ValidationError("winding_count: box must exclude k = 0");
    auto f = [&p](cplx k) { return siegert_function(p, k); };
    return contour::winding_count_perturbed(f, box, opt);
}

inline ComplexPole make_pole(const contour::Root& r, double axis_tolerance) {
    ComplexPole pole;
    pole.k = r.z;
    pole.cls = classify(r.z, axis_tolerance);
    if (pole.cls == PoleClass::bound || pole.cls == PoleClass::anti_bound) pole.k = cplx(0.0, r.z.imag());
    pole.E = pole.k * pole.k * (UnitSystem::hbar * UnitSystem::hbar / UnitSystem::two_m);
    if (pole.cls == PoleClass::bound || pole.cls == PoleClass::anti_bound) pole.E = cplx(pole.E.real(), 0.0);
    pole.first_sheet = pole.k.imag() > 0;
    pole.residual = r.residual;
    pole.newton_iters = r.newton_iters;
    pole.certified = r.certified;
    pole.diagnostic = r.diagnostic;
    return pole;
}

struct PoleSearch {
    std::vector<ComplexPole> poles;
    std::vector<contour::Subdivision> subdivisions;
    int total_count = 0;

    bool all_additive() const {
        for (const auto& s : subdivisions) {
            if (!s.additive()) return false;
        }
        return true;
    }
};

inline PoleSearch find_poles(const Potential1D& p, const SearchWindow& w) {
    auto opt = detail::contour_options(w.max_subdivision_depth);
    contour::Window cw{w.re_min, w.re_max, w.im_min, w.im_max, {cplx(0.0)}, w.origin_exclusion};
    auto f = [&p](cplx k) { return siegert_function(p, k); };
    const auto res = contour::find_zeros(f, cw, opt);
    PoleSearch out;
    out.subdivisions = res.subdivisions;
    out.total_count = res.total_count;
    for (const auto& r : res.roots) out.poles.push_back(make_pole(r, w.axis_tolerance));
    std::sort(out.poles.begin(), out.poles.end(), [](const ComplexPole& a, const ComplexPole& b) {
        return a.k.real() < b.k.real() || (a.k.real() == b.k.real() && a.k.imag() < b.k.imag());
    });
    return out;
}

}  // namespace siegert
