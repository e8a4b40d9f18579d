#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace siegert::quadrature {

template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        // Newton on P_N from the Chebyshev-like initial guesses; nodes are symmetric.
        for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t n = 2; n <= N; ++n) {
                    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / static_cast<double>(n);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <typename F>
    auto integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        auto sum = weights[0] * f(mid + half * nodes[0]);
        for (std::size_t i = 1; i < N; ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

inline const GaussLegendre<32>& gauss32() {
    static const GaussLegendre<32> rule;
    return rule;
}

}  // namespace siegert::quadrature
