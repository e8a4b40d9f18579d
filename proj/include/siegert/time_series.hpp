#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "siegert/errors.hpp"

namespace siegert {

template <typename Value>
struct TimeSeries {
    std::vector<double> t;
    std::vector<Value> values;
    std::string observable;
    std::string model_hash;

    std::size_t size() const noexcept { return t.size(); }
};

// n samples uniformly on [t0, t1], endpoints included.
inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
    if (n < 2) throw ValidationError("uniform_grid: need at least two samples");
    if (!(t1 > t0)) throw ValidationError("uniform_grid: empty interval");
    std::vector<double> g(n);
    const double h = (t1 - t0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = t0 + h * static_cast<double>(i);
    g.back() = t1;
    return g;
}

// 2n+1 samples on [-tmax, tmax] with t[n] == 0 and t[n-i] == -t[n+i] exactly.
inline std::vector<double> symmetric_grid(double tmax, std::size_t n) {
    if (!(tmax > 0.0) || n == 0) throw ValidationError("symmetric_grid: need tmax > 0 and n > 0");
    std::vector<double> g(2 * n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double ti = tmax * static_cast<double>(i) / static_cast<double>(n);
        g[n + i] = ti;
        g[n - i] = -ti;
    }
    return g;
}

inline void require_increasing(const std::vector<double>& t) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw ValidationError("time grid must be strictly increasing");
    }
    for (double x : t) {
        if (!std::isfinite(x)) throw ValidationError("time grid contains non-finite values");
    }
}

}  // namespace siegert
