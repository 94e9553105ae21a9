#pragma once

#include <cmath>

#include "wavetrap/grid.hpp"

namespace wavetrap {

namespace detail {

inline void cubic_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace detail

/// Periodic Catmull-Rom (cubic) interpolation of a lattice function.
/// Exact for cubics on the local stencil; C^1 across cells.
inline double sample_periodic(const RealField& f, const std::array<double, 3>& x) {
    const Grid& g = f.grid;
    int base[3] = {0, 0, 0};
    double w[3][4];
    for (int a = 0; a < g.dim; ++a) {
        const double u = (x[a] + 0.5 * g.extent[a]) / g.spacing(a);
        const double fl = std::floor(u);
        detail::cubic_weights(u - fl, w[a]);
        base[a] = static_cast<int>(fl);
    }
    auto wrap = [&](int i, int a) {
        const int n = g.npts[a];
        i %= n;
        return i < 0 ? i + n : i;
    };
    double acc = 0.0;
    const int s1 = (g.dim >= 2) ? 4 : 1;
    const int s2 = (g.dim >= 3) ? 4 : 1;
    for (int i0 = 0; i0 < 4; ++i0) {
        const int j0 = wrap(base[0] - 1 + i0, 0);
        for (int i1 = 0; i1 < s1; ++i1) {
            const int j1 = (g.dim >= 2) ? wrap(base[1] - 1 + i1, 1) : 0;
            const double w01 = w[0][i0] * ((g.dim >= 2) ? w[1][i1] : 1.0);
            for (int i2 = 0; i2 < s2; ++i2) {
                const int j2 = (g.dim >= 3) ? wrap(base[2] - 1 + i2, 2) : 0;
                acc += w01 * ((g.dim >= 3) ? w[2][i2] : 1.0) * f[g.index({j0, j1, j2})];
            }
        }
    }
    return acc;
}

}  // namespace wavetrap
