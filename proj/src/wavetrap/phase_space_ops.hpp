#pragma once

#include <span>

#include "wavetrap/gabor.hpp"

namespace wavetrap {

/// Uniform 1D wavevector band k_i = k0 + i dk required by the phase-space
/// differential operators (master equation, Gabor Hamiltonian).
struct KBand {
    double k0 = 0.0;
    double dk = 0.0;
    int n = 0;
    double k(int i) const { return k0 + i * dk; }
};

inline KBand contiguous_band(const PhaseSpaceGrid& psg) {
    require(psg.field_grid.dim == 1, "phase-space operators need a 1D field grid");
    KBand b;
    b.n = static_cast<int>(psg.nk());
    require(b.n >= 5, "phase-space operators need at least 5 k nodes");
    b.k0 = psg.k_vec[0][0];
    b.dk = psg.k_vec[1][0] - b.k0;
    require(b.dk > 0.0, "k band must be increasing");
    for (int i = 1; i < b.n; ++i)
        require(std::abs(psg.k_vec[i][0] - b.k(i)) < 1e-9 * std::abs(b.dk),
                "k band must be uniformly spaced");
    return b;
}

/// d/dx along the coarse x lattice (periodic, spectral), column-wise per k.
inline void ps_grad_x(const PhaseSpaceGrid& psg, std::span<const cplx> in, std::span<cplx> out) {
    const int nx = static_cast<int>(psg.nx());
    const int nk = static_cast<int>(psg.nk());
    Grid xg = Grid::make(1, {nx, 1, 1}, {psg.field_grid.extent[0], 0, 0});
    const Fft& fft = fft_for(xg);
    std::vector<cplx> col(nx), spec(nx);
    for (int ik = 0; ik < nk; ++ik) {
        for (int ix = 0; ix < nx; ++ix) col[ix] = in[psg.node(ix, ik)];
        fft.forward(col.data(), spec.data());
        for (int q = 0; q < nx; ++q) spec[q] *= cplx(0.0, xg.wavenumber(0, q));
        fft.inverse(spec.data(), col.data());
        for (int ix = 0; ix < nx; ++ix) out[psg.node(ix, ik)] = col[ix];
    }
}

/// d/dk on the band, 4th-order centered stencil truncated at the band edges
/// (zero outside). The truncated matrix stays exactly antisymmetric, which
/// the canonical-structure identity relies on.
inline void ps_grad_k(const PhaseSpaceGrid& psg, const KBand& band, std::span<const cplx> in,
                      std::span<cplx> out) {
    const int nx = static_cast<int>(psg.nx());
    const int nk = band.n;
    const double inv = 1.0 / (12.0 * band.dk);
    for (int ix = 0; ix < nx; ++ix) {
        auto v = [&](int i) -> cplx {
            return (i < 0 || i >= nk) ? cplx(0.0) : in[psg.node(ix, i)];
        };
        for (int i = 0; i < nk; ++i)
            out[psg.node(ix, i)] = (-v(i + 2) + 8.0 * v(i + 1) - 8.0 * v(i - 1) + v(i - 2)) * inv;
    }
}

/// dU/dx on the coarse x lattice, 4th-order centered (periodic wrap); local,
/// so the trap's box-scale non-periodicity does not ring into the interior.
inline std::vector<double> ps_grad_potential(const PhaseSpaceGrid& psg,
                                             std::span<const double> u_nodes) {
    const int nx = static_cast<int>(psg.nx());
    const double h = psg.field_grid.spacing(0) * psg.x_stride[0];
    std::vector<double> du(nx);
    auto wrap = [nx](int i) { return ((i % nx) + nx) % nx; };
    for (int i = 0; i < nx; ++i)
        du[i] = (-u_nodes[wrap(i + 2)] + 8.0 * u_nodes[wrap(i + 1)] - 8.0 * u_nodes[wrap(i - 1)] +
                 u_nodes[wrap(i - 2)]) /
                (12.0 * h);
    return du;
}

}  // namespace wavetrap
