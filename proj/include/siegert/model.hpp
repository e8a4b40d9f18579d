// Continuum and lattice model definitions shared by every module.
//
// Units: hbar = 2m = 1 throughout the continuum code, so free motion has
// E = k^2 exactly. Lattice energies are in units of the lead hopping J.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "siegert/errors.hpp"

namespace siegert {

struct UnitSystem {
    static constexpr double hbar = 1.0;
    static constexpr double two_m = 1.0;

    static constexpr double energy_of(double k) noexcept { return hbar * hbar * k * k / two_m; }
    // Group velocity of e^{ikx} with E = hbar^2 k^2 / 2m.
    static constexpr double velocity(double re_k) noexcept { return 2.0 * hbar * re_k / two_m; }
};

struct Segment {
    double x_left;
    double x_right;
    double v;

    double width() const noexcept { return x_right - x_left; }
};

// Piecewise-constant real potential with finite support [-l, l].
class Potential1D {
public:
    Potential1D() = default;

    explicit Potential1D(std::vector<Segment> segments) : segments_(std::move(segments)) {
        for (const auto& s : segments_) {
            if (!std::isfinite(s.x_left) || !std::isfinite(s.x_right) || !std::isfinite(s.v)) {
                throw ValidationError("Potential1D: non-finite segment data");
            }
            if (!(s.x_left < s.x_right)) {
                throw ValidationError("Potential1D: segment requires x_left < x_right");
            }
        }
        std::sort(segments_.begin(), segments_.end(),
                  [](const Segment& a, const Segment& b) { return a.x_left < b.x_left; });
        for (std::size_t i = 1; i < segments_.size(); ++i) {
            if (segments_[i].x_left < segments_[i - 1].x_right) {
                throw ValidationError("Potential1D: overlapping segments");
            }
        }
        for (const auto& s : segments_) {
            halfwidth_ = std::max({halfwidth_, std::abs(s.x_left), std::abs(s.x_right)});
        }
    }

    // Square well of depth v0 > 0 on [-l, l] (potential -v0 inside).
    static Potential1D square_well(double v0, double l) {
        if (!(l > 0.0)) throw ValidationError("square_well: half-width must be positive");
        return Potential1D({{-l, l, -v0}});
    }

    static Potential1D square_barrier(double v, double l) {
        if (!(l > 0.0)) throw ValidationError("square_barrier: half-width must be positive");
        return Potential1D({{-l, l, v}});
    }

    // Segments sorted by x_left.
    const std::vector<Segment>& segments() const noexcept { return segments_; }
    double support_halfwidth() const noexcept { return halfwidth_; }
    bool is_free() const noexcept {
        return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.v == 0.0; });
    }

    // The support [-l, l] as contiguous regions, with explicit v = 0 fill for gaps.
    std::vector<Segment> regions() const {
        std::vector<Segment> out;
        double x = -halfwidth_;
        for (const auto& s : segments_) {
            if (s.x_left > x) out.push_back({x, s.x_left, 0.0});
            out.push_back(s);
            x = s.x_right;
        }
        if (x < halfwidth_) out.push_back({x, halfwidth_, 0.0});
        return out;
    }

    // Mirror image x -> -x.
    Potential1D mirrored() const {
        std::vector<Segment> m;
        m.reserve(segments_.size());
        for (const auto& s : segments_) m.push_back({-s.x_right, -s.x_left, s.v});
        return Potential1D(std::move(m));
    }

private:
    std::vector<Segment> segments_;
    double halfwidth_ = 0.0;
};

// A point on a shared boundary belongs to the segment with the larger x_left.
inline double potential_at(const Potential1D& p, double x) {
    const auto& segs = p.segments();
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
        if (it->x_left <= x && x <= it->x_right) return it->v;
    }
    return 0.0;
}

// Tight-binding chain: N_sys system sites between two uniform semi-infinite
// leads with hopping J. Hopping matrix elements enter H with a minus sign, so
// the lead dispersion is E(kappa) = -2 J cos(kappa).
struct LatticeModel {
    std::vector<double> onsite;
    std::vector<double> intra_hopping;
    double lead_hopping = 1.0;
    double g_left = 1.0;
    double g_right = 1.0;

    std::size_t size() const noexcept { return onsite.size(); }

    void validate() const {
        if (onsite.empty()) throw ValidationError("LatticeModel: at least one system site required");
        if (intra_hopping.size() + 1 != onsite.size()) {
            throw ValidationError("LatticeModel: intra_hopping must have N_sys - 1 entries");
        }
        if (!(lead_hopping > 0.0) || !std::isfinite(lead_hopping)) {
            throw ValidationError("LatticeModel: lead hopping J must be positive and finite");
        }
        auto finite = [](double x) { return std::isfinite(x); };
        if (!std::all_of(onsite.begin(), onsite.end(), finite) ||
            !std::all_of(intra_hopping.begin(), intra_hopping.end(), finite) || !std::isfinite(g_left) ||
            !std::isfinite(g_right)) {
            throw ValidationError("LatticeModel: non-finite parameter");
        }
    }

    bool decoupled() const noexcept { return g_left == 0.0 && g_right == 0.0; }

    // One potential site embedded in an otherwise uniform chain.
    static LatticeModel single_impurity(double v0, double j = 1.0) {
        LatticeModel m{{v0}, {}, j, j, j};
        m.validate();
        return m;
    }

    // Two sites: site 1 weakly coupled to the left lead and to site 2, which
    // continues into the right lead with the bulk hopping. Site 1 then carries
    // a single isolated resonance.
    static LatticeModel two_site_resonator(double j = 1.0) {
        LatticeModel m{{0.5, 0.0}, {0.3 * j}, j, 0.3 * j, j};
        m.validate();
        return m;
    }

    // Symmetric dot: two degenerate sites, weakly coupled on both sides.
    static LatticeModel symmetric_dot(double j = 1.0) {
        LatticeModel m{{0.0, 0.0}, {0.5 * j}, j, 0.5 * j, 0.5 * j};
        m.validate();
        return m;
    }
};

struct PendulumPair {
    double omega = 1.0;
    double alpha = 0.0;

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError("PendulumPair: omega must be positive");
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("PendulumPair: alpha must be >= 0");
    }
};

}  // namespace siegert
