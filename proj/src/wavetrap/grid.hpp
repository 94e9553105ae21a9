#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "wavetrap/error.hpp"

namespace wavetrap {

using cplx = std::complex<double>;

/// Periodic rectangular lattice. Dimensionless units with hbar = 2m = 1,
/// so the free-particle frequency is w = k^2.
///
/// Coordinates run over [-L/2, L/2) per axis; wavenumbers follow FFT
/// (wrap-around) ordering: k_i = (2*pi/L) * (i < n/2 ? i : i - n).
struct Grid {
    int dim = 1;
    std::array<int, 3> npts{1, 1, 1};
    std::array<double, 3> extent{0.0, 0.0, 0.0};

    static Grid make(int dim, std::array<int, 3> npts, std::array<double, 3> extent);
    static Grid make1d(int n, double length) { return make(1, {n, 1, 1}, {length, 0, 0}); }
    static Grid make2d(int n0, int n1, double l0, double l1) {
        return make(2, {n0, n1, 1}, {l0, l1, 0});
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(npts[a]);
        return s;
    }
    double spacing(int axis) const { return extent[axis] / npts[axis]; }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing(a);
        return v;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= extent[a];
        return v;
    }
    double coord(int axis, int i) const { return -0.5 * extent[axis] + spacing(axis) * i; }
    double wavenumber(int axis, int i) const {
        const int n = npts[axis];
        const int f = (i < n / 2) ? i : i - n;
        return 2.0 * M_PI / extent[axis] * f;
    }
    double nyquist(int axis) const { return M_PI / spacing(axis); }

    /// Row-major flat index; unused trailing axes must be 0.
    std::size_t index(std::array<int, 3> i) const {
        std::size_t idx = 0;
        for (int a = 0; a < dim; ++a) idx = idx * npts[a] + static_cast<std::size_t>(i[a]);
        return idx;
    }
    std::array<int, 3> unindex(std::size_t idx) const {
        std::array<int, 3> i{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            i[a] = static_cast<int>(idx % npts[a]);
            idx /= npts[a];
        }
        return i;
    }

    std::array<double, 3> position(std::size_t idx) const {
        auto i = unindex(idx);
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < dim; ++a) x[a] = coord(a, i[a]);
        return x;
    }
    std::array<double, 3> wavevector(std::size_t idx) const {
        auto i = unindex(idx);
        std::array<double, 3> k{0, 0, 0};
        for (int a = 0; a < dim; ++a) k[a] = wavenumber(a, i[a]);
        return k;
    }
    double k_squared(std::size_t idx) const {
        auto k = wavevector(idx);
        return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    }

    bool compatible(const Grid& o) const {
        return dim == o.dim && npts == o.npts && extent == o.extent;
    }
};

struct RealField {
    Grid grid;
    std::vector<double> v;

    RealField() = default;
    explicit RealField(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

struct ComplexField {
    Grid grid;
    std::vector<cplx> v;

    ComplexField() = default;
    explicit ComplexField(const Grid& g, cplx fill = {}) : grid(g), v(g.size(), fill) {}
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

inline RealField abs2(const ComplexField& f) {
    RealField r(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = std::norm(f[i]);
    return r;
}

/// Quadrature of a lattice function (midpoint rule on the periodic box).
inline double integrate(const RealField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid.cell_volume();
}

inline double l2_norm(const ComplexField& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(s * f.grid.cell_volume());
}

inline double l2_norm(const RealField& f) {
    double s = 0.0;
    for (double x : f.v) s += x * x;
    return std::sqrt(s * f.grid.cell_volume());
}

}  // namespace wavetrap
