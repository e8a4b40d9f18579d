// Normal modes of two identical pendulums joined by a spring.
//
//   x1'' = -w^2 x1 - a (x1 - x2)
//   x2'' = -w^2 x2 - a (x2 - x1)
//
// The in-phase mode (1,1)/sqrt2 keeps frequency w; the anti-phase mode
// (1,-1)/sqrt2 oscillates at sqrt(w^2 + 2a).

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

#include "siegert/model.hpp"
#include "siegert/time_series.hpp"

namespace siegert::pendulum {

struct Mode {
    double frequency;
    Eigen::Vector2d vector;
};

// Matrix K with x'' = -K x.
inline Eigen::Matrix2d stiffness(const PendulumPair& p) {
    Eigen::Matrix2d k;
    k << p.omega * p.omega + p.alpha, -p.alpha, -p.alpha, p.omega * p.omega + p.alpha;
    return k;
}

inline std::array<Mode, 2> modes(const PendulumPair& p) {
    p.validate();
    const double s = 1.0 / std::sqrt(2.0);
    return {Mode{p.omega, Eigen::Vector2d(s, s)},
            Mode{std::sqrt(p.omega * p.omega + 2.0 * p.alpha), Eigen::Vector2d(s, -s)}};
}

struct State {
    Eigen::Vector2d x;
    Eigen::Vector2d v;
};

inline double energy(const PendulumPair& p, const State& s) {
    const double d = s.x(0) - s.x(1);
    return 0.5 * s.v.squaredNorm() + 0.5 * p.omega * p.omega * s.x.squaredNorm() + 0.5 * p.alpha * d * d;
}

// Exact solution by superposing the two modes with their own phases.
inline TimeSeries<State> evolve(const PendulumPair& p, const Eigen::Vector2d& x0, const Eigen::Vector2d& v0,
                                const std::vector<double>& t_grid) {
    require_increasing(t_grid);
    const auto m = modes(p);
    std::array<double, 2> a{}, b{};
    for (int n = 0; n < 2; ++n) {
        a[n] = m[n].vector.dot(x0);
        b[n] = m[n].vector.dot(v0) / m[n].frequency;
    }
    TimeSeries<State> out;
    out.observable = "pendulum";
    out.t = t_grid;
    out.values.reserve(t_grid.size());
    for (double t : t_grid) {
        State s{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
        for (int n = 0; n < 2; ++n) {
            const double w = m[n].frequency;
            const double c = std::cos(w * t), sn = std::sin(w * t);
            s.x += (a[n] * c + b[n] * sn) * m[n].vector;
            s.v += w * (-a[n] * sn + b[n] * c) * m[n].vector;
        }
        out.values.push_back(s);
    }
    return out;
}

}  // namespace siegert::pendulum
