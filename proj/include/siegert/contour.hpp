// Argument-principle zero counting and certified zero search
// for functions analytic inside a rectangular window of the complex plane.
//
// The search tiles the window (cutting out small squares around excluded
// points such as branch points), counts zeros per tile by the winding of f
// along the tile boundary, subdivides until every box holds at most one zero,
// polishes with Newton, and certifies each zero with a winding count of one
// around a tiny isolating box.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "siegert/errors.hpp"
#include "siegert/parallel.hpp"

namespace siegert::contour {

using cplx = std::complex<double>;

// A zero lies on (or numerically on) the contour being traced.
class BoundaryProximity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Box {
    double re0, re1, im0, im1;

    double width() const noexcept { return re1 - re0; }
    double height() const noexcept { return im1 - im0; }
    cplx center() const noexcept { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
    bool contains(cplx z, double slack = 0.0) const noexcept {
        return z.real() >= re0 - slack && z.real() <= re1 + slack && z.imag() >= im0 - slack &&
               z.imag() <= im1 + slack;
    }
    static Box around(cplx z, double half) noexcept {
        return {z.real() - half, z.real() + half, z.imag() - half, z.imag() + half};
    }
};

struct Options {
    double proximity_tol = 1e-9;  // |f| on a contour below this counts as a zero on the contour
    int min_samples_per_edge = 16;
    int max_edge_depth = 50;
    int perturb_attempts = 5;
    int max_depth = 40;
    int newton_max_iter = 100;
    double newton_rel_step = 1e-7;  // central-difference step, relative to max(1, |z|)
    double newton_step_tol = 1e-13;
    double certify_radius = 1e-6;
    double residual_tol = 1e-10;
    double dedup_tol = 1e-8;
};

namespace detail {

inline bool lex_less(cplx a, cplx b) noexcept {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

template <typename F>
cplx checked_eval(F& f, cplx z, const Options& opt) {
    const cplx v = f(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NumericalError("contour: non-finite function value");
    }
    if (std::abs(v) < opt.proximity_tol) throw BoundaryProximity("contour: zero within tolerance of the contour");
    return v;
}

template <typename F>
double refine(F& f, cplx z0, cplx f0, cplx z1, cplx f1, int depth, const Options& opt) {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) < 0.5 * std::numbers::pi) return d;
    if (depth >= opt.max_edge_depth) throw BoundaryProximity("contour: phase unwrapping did not resolve");
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = checked_eval(f, zm, opt);
    return refine(f, z0, f0, zm, fm, depth + 1, opt) + refine(f, zm, fm, z1, f1, depth + 1, opt);
}

}  // namespace detail

// Continuous change of arg f along the straight segment a -> b. The segment
// is always traced in a canonical direction so that an edge shared by two
// boxes contributes exactly opposite amounts.
template <typename F>
double phase_change(F& f, cplx a, cplx b, const Options& opt = {}) {
    if (detail::lex_less(b, a)) return -phase_change(f, b, a, opt);
    const int n = opt.min_samples_per_edge;
    double total = 0.0;
    cplx z0 = a;
    cplx f0 = detail::checked_eval(f, z0, opt);
    for (int j = 1; j <= n; ++j) {
        const cplx z1 = (j == n) ? b : a + (b - a) * (static_cast<double>(j) / n);
        const cplx f1 = detail::checked_eval(f, z1, opt);
        total += detail::refine(f, z0, f0, z1, f1, 0, opt);
        z0 = z1;
        f0 = f1;
    }
    return total;
}

// Number of zeros (with multiplicity) inside the box.
template <typename F>
int winding_count(F& f, const Box& box, const Options& opt = {}) {
    const cplx c00(box.re0, box.im0), c10(box.re1, box.im0), c11(box.re1, box.im1), c01(box.re0, box.im1);
    const double total = phase_change(f, c00, c10, opt) + phase_change(f, c10, c11, opt) +
                         phase_change(f, c11, c01, opt) + phase_change(f, c01, c00, opt);
    const double turns = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-3) throw NumericalError("contour: non-integer winding");
    if (rounded < 0) throw NumericalError("contour: negative winding, function has poles inside the box");
    return static_cast<int>(rounded);
}

// Retries with the box expanded by a small, attempt-dependent amount when a
// zero sits on the boundary.
template <typename F>
int winding_count_perturbed(F& f, Box box, const Options& opt = {}) {
    const double scale = std::max(box.width(), box.height());
    for (int attempt = 0;; ++attempt) {
        try {
            return winding_count(f, box, opt);
        } catch (const BoundaryProximity&) {
            if (attempt + 1 >= opt.perturb_attempts) throw;
            const double d = scale * 1e-4 * (1.0 + 0.618 * attempt);
            box = {box.re0 - d, box.re1 + 0.7 * d, box.im0 - 0.9 * d, box.im1 + 1.1 * d};
        }
    }
}

struct NewtonResult {
    cplx z;
    double residual;
    int iterations;
    bool converged;
};

template <typename F>
NewtonResult newton(F& f, cplx z, const Options& opt = {}) {
    for (int it = 1; it <= opt.newton_max_iter; ++it) {
        const cplx fz = f(z);
        if (fz == cplx(0.0)) return {z, 0.0, it, true};
        const double h = opt.newton_rel_step * std::max(1.0, std::abs(z));
        const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
        if (d == cplx(0.0) || !std::isfinite(std::abs(d))) break;
        const cplx step = fz / d;
        if (!std::isfinite(std::abs(step))) break;
        z -= step;
        if (std::abs(step) <= opt.newton_step_tol * std::max(1.0, std::abs(z))) {
            return {z, std::abs(f(z)), it, true};
        }
    }
    return {z, std::abs(f(z)), opt.newton_max_iter, false};
}

struct Root {
    cplx z;
    double residual = 0.0;
    int newton_iters = 0;
    bool certified = false;
    int isolating_count = 0;
    std::string diagnostic;
};

struct Subdivision {
    Box parent;
    int parent_count;
    std::array<int, 4> child_counts;

    bool additive() const noexcept {
        return parent_count == child_counts[0] + child_counts[1] + child_counts[2] + child_counts[3];
    }
};

struct Window {
    double re0, re1, im0, im1;
    std::vector<cplx> excluded;      // points cut out of the window (branch points)
    double exclusion_radius = 1e-3;  // half-width of the square removed around each
};

struct SearchResult {
    std::vector<Root> roots;
    std::vector<Subdivision> subdivisions;
    std::vector<Box> tiles;
    int total_count = 0;
};

namespace detail {

// Grid tiling of the window with cut lines at excluded_point +- r; cells
// covering an excluded square are dropped.
inline std::vector<Box> tile_window(const Window& w, double r, double grow) {
    Box outer{w.re0 - grow, w.re1 + grow, w.im0 - grow, w.im1 + grow};
    std::vector<double> xs{outer.re0, outer.re1}, ys{outer.im0, outer.im1};
    for (cplx p : w.excluded) {
        for (double s : {-r, r}) {
            const double x = p.real() + s, y = p.imag() + s;
            if (x > outer.re0 && x < outer.re1) xs.push_back(x);
            if (y > outer.im0 && y < outer.im1) ys.push_back(y);
        }
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::vector<Box> tiles;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            Box b{xs[i], xs[i + 1], ys[j], ys[j + 1]};
            const cplx c = b.center();
            const bool excluded = std::any_of(w.excluded.begin(), w.excluded.end(), [&](cplx p) {
                return std::abs(c.real() - p.real()) < r && std::abs(c.imag() - p.imag()) < r;
            });
            if (!excluded) tiles.push_back(b);
        }
    }
    return tiles;
}

inline constexpr std::array<double, 5> kSplitFractions{0.5123, 0.4871, 0.5357, 0.4629, 0.5591};

template <typename F>
class Searcher {
public:
    Searcher(F& f, const Options& opt) : f_(f), opt_(opt) {}

    void process(const Box& box, int count, int depth) {
        if (count == 0) return;
        if (count == 1 && try_single(box)) return;
        if (depth >= opt_.max_depth) {
            unresolved(box, count, "maximum subdivision depth reached");
            return;
        }
        for (double frac : kSplitFractions) {
            const double xm = box.re0 + frac * box.width();
            const double ym = box.im0 + (1.0 - frac) * box.height();
            const std::array<Box, 4> kids{Box{box.re0, xm, box.im0, ym}, Box{xm, box.re1, box.im0, ym},
                                          Box{box.re0, xm, ym, box.im1}, Box{xm, box.re1, ym, box.im1}};
            std::array<int, 4> counts{};
            try {
                for (int i = 0; i < 4; ++i) counts[i] = winding_count(f_, kids[i], opt_);
            } catch (const BoundaryProximity&) {
                continue;
            }
            subdivisions.push_back({box, count, counts});
            for (int i = 0; i < 4; ++i) process(kids[i], counts[i], depth + 1);
            return;
        }
        unresolved(box, count, "could not place subdivision lines away from zeros");
    }

    std::vector<Root> roots;
    std::vector<Subdivision> subdivisions;

private:
    bool try_single(const Box& box) {
        const auto nr = newton(f_, box.center(), opt_);
        const double slack = 1e-9 * std::max(box.width(), box.height());
        if (!nr.converged || !box.contains(nr.z, slack)) return false;
        Root r{nr.z, nr.residual, nr.iterations, false, 0, {}};
        try {
            r.isolating_count = winding_count(f_, Box::around(nr.z, opt_.certify_radius), opt_);
        } catch (const NumericalError& e) {
            r.diagnostic = std::string("isolating box: ") + e.what();
        }
        r.certified = r.isolating_count == 1 && r.residual < opt_.residual_tol;
        if (!r.certified && r.diagnostic.empty()) {
            r.diagnostic = "isolating winding " + std::to_string(r.isolating_count) + ", residual " +
                           std::to_string(r.residual);
        }
        roots.push_back(r);
        return true;
    }

    void unresolved(const Box& box, int count, const std::string& why) {
        const auto nr = newton(f_, box.center(), opt_);
        Root r{nr.converged ? nr.z : box.center(), nr.residual, nr.iterations, false, count, {}};
        r.diagnostic = why + " (winding " + std::to_string(count) + ")";
        if (!nr.converged) r.diagnostic += "; newton did not converge";
        roots.push_back(r);
    }

    F& f_;
    const Options& opt_;
};

inline std::vector<Root> deduplicate(std::vector<Root> roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return lex_less(a.z, b.z); });
    std::vector<Root> out;
    for (auto& r : roots) {
        auto same = std::find_if(out.begin(), out.end(), [&](const Root& o) { return std::abs(o.z - r.z) < tol; });
        if (same == out.end()) {
            out.push_back(std::move(r));
        } else if ((r.certified && !same->certified) ||
                   (r.certified == same->certified && r.residual < same->residual)) {
            *same = std::move(r);
        }
    }
    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return lex_less(a.z, b.z); });
    return out;
}

}  // namespace detail

// Certified zeros of f inside the window. f must be analytic on the window
// minus the excluded squares.
template <typename F>
SearchResult find_zeros(F f, const Window& w, const Options& opt = {}) {
    if (!(w.re1 > w.re0) || !(w.im1 > w.im0) || !std::isfinite(w.re0) || !std::isfinite(w.re1) ||
        !std::isfinite(w.im0) || !std::isfinite(w.im1)) {
        throw ValidationError("find_zeros: window ranges must be finite and nonempty");
    }
    const double scale = std::max(w.re1 - w.re0, w.im1 - w.im0);
    for (int attempt = 0; attempt < opt.perturb_attempts; ++attempt) {
        const double r = w.exclusion_radius * (1.0 + 0.173 * attempt);
        const double grow = attempt * 1e-7 * scale;
        const auto tiles = detail::tile_window(w, r, grow);
        std::vector<int> counts(tiles.size(), 0);
        bool proximity = false;
        try {
            parallel_for(tiles.size(), [&](std::size_t i) {
                F local = f;
                counts[i] = winding_count(local, tiles[i], opt);
            });
        } catch (const BoundaryProximity&) {
            proximity = true;
        }
        if (proximity) continue;

        std::vector<std::vector<Root>> per_tile_roots(tiles.size());
        std::vector<std::vector<Subdivision>> per_tile_subdiv(tiles.size());
        parallel_for(tiles.size(), [&](std::size_t i) {
            F local = f;
            detail::Searcher<F> s(local, opt);
            s.process(tiles[i], counts[i], 0);
            per_tile_roots[i] = std::move(s.roots);
            per_tile_subdiv[i] = std::move(s.subdivisions);
        });

        SearchResult out;
        out.tiles = tiles;
        std::vector<Root> all;
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            out.total_count += counts[i];
            all.insert(all.end(), per_tile_roots[i].begin(), per_tile_roots[i].end());
            out.subdivisions.insert(out.subdivisions.end(), per_tile_subdiv[i].begin(), per_tile_subdiv[i].end());
        }
        out.roots = detail::deduplicate(std::move(all), opt.dedup_tol);
        return out;
    }
    throw BoundaryProximity("find_zeros: zeros on the tiling after all perturbation attempts");
}

}  // namespace siegert::contour
