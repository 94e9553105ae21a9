#include "wavetrap/gabor.hpp"

#include <algorithm>
#include <cmath>

namespace wavetrap {

PhaseSpaceGrid PhaseSpaceGrid::make(const Grid& g, std::array<int, 3> x_stride,
                                    std::vector<std::array<int, 3>> k_index) {
    PhaseSpaceGrid p;
    p.field_grid = g;
    p.x_stride = x_stride;
    p.k_index = std::move(k_index);
    require(!p.k_index.empty(), "phase-space grid: empty k node set");
    for (int a = 0; a < g.dim; ++a) {
        require(x_stride[a] >= 1 && g.npts[a] % x_stride[a] == 0,
                "phase-space grid: x stride must divide the grid");
        p.x_count[a] = g.npts[a] / x_stride[a];
    }
    for (const auto& ki : p.k_index)
        for (int a = 0; a < g.dim; ++a)
            require(ki[a] >= 0 && ki[a] < g.npts[a], "phase-space grid: k index out of range");

    std::size_t nx = 1;
    for (int a = 0; a < g.dim; ++a) nx *= p.x_count[a];
    p.x_flat.reserve(nx);
    p.x_pos.reserve(nx);
    std::array<int, 3> c{0, 0, 0};
    for (std::size_t n = 0; n < nx; ++n) {
        std::array<int, 3> gi{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) gi[a] = c[a] * x_stride[a];
        p.x_flat.push_back(g.index(gi));
        Vec3 x{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) x[a] = g.coord(a, gi[a]);
        p.x_pos.push_back(x);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++c[a] < p.x_count[a]) break;
            c[a] = 0;
        }
    }
    p.k_vec.reserve(p.k_index.size());
    for (const auto& ki : p.k_index) {
        Vec3 k{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) k[a] = g.wavenumber(a, ki[a]);
        p.k_vec.push_back(k);
    }
    return p;
}

PhaseSpaceGrid PhaseSpaceGrid::band_1d(const Grid& g, int x_stride, double kmin, double kmax,
                                       bool include_zero) {
    require(g.dim == 1, "band_1d needs a 1D grid");
    require(kmax <= g.nyquist(0), "phase-space grid: band exceeds Nyquist");
    std::vector<std::array<int, 3>> ks;
    for (int i = 0; i < g.npts[0]; ++i) {
        const double k = g.wavenumber(0, i);
        const double ak = std::abs(k);
        if (k == 0.0 ? (include_zero && kmin <= 0.0) : (ak >= kmin && ak <= kmax))
            ks.push_back({i, 0, 0});
    }
    return make(g, {x_stride, 1, 1}, std::move(ks));
}

double PhaseSpaceGrid::dx_cell() const {
    double v = 1.0;
    for (int a = 0; a < field_grid.dim; ++a) v *= field_grid.spacing(a) * x_stride[a];
    return v;
}

double PhaseSpaceGrid::dk_cell() const {
    double v = 1.0;
    for (int a = 0; a < field_grid.dim; ++a) v *= 2.0 * M_PI / field_grid.extent[a];
    return v;
}

double PhaseSpaceSpectrum::total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * psg->dx_cell() * psg->dk_cell();
}

namespace {

/// Spectral coefficients of the sampled window (min-image distance), real.
std::vector<double> kernel_coefficients(const Grid& g, const GaborKernel& kernel) {
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.position(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += x[a] * x[a];
        f[i] = kernel.window(std::sqrt(r2), g.dim);
    }
    ComplexField c = to_spectral(f);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = c[i].real();
    return out;
}

void validate_kernel(const Grid& g, const GaborKernel& kernel) {
    for (int a = 0; a < g.dim; ++a) {
        require(1.0 / kernel.eps_star >= 8.0 * g.spacing(a),
                "gabor: kernel width under-resolved (need >= 8 grid points)");
        require(1.0 / kernel.eps_star <= 0.25 * g.extent[a],
                "gabor: kernel width too close to the box size");
    }
}

GaborField transform_impl(const ComplexField& field, const GaborKernel& kernel,
                          const std::shared_ptr<const PhaseSpaceGrid>& psg, double time) {
    const Grid& g = field.grid;
    require(psg && psg->field_grid.compatible(g), "gabor: grid mismatch");
    validate_kernel(g, kernel);

    const Fft& fft = fft_for(g);
    const std::vector<double> khat = kernel_coefficients(g, kernel);
    ComplexField spec = to_spectral(field);
    const double vol = g.volume();

    GaborField out;
    out.psg = psg;
    out.time = time;
    out.values.resize(psg->size());

    ComplexField prod(g), conv(g);
    const std::size_t nk = psg->nk();
    for (std::size_t ik = 0; ik < nk; ++ik) {
        const auto& kidx = psg->k_index[ik];
        // coefficients of f(y) e^{ik.y} are the kernel coefficients shifted by k
        for (std::size_t q = 0; q < g.size(); ++q) {
            auto qi = g.unindex(q);
            std::array<int, 3> si{0, 0, 0};
            for (int a = 0; a < g.dim; ++a) {
                si[a] = qi[a] - kidx[a];
                si[a] = (si[a] % g.npts[a] + g.npts[a]) % g.npts[a];
            }
            prod[q] = vol * khat[g.index(si)] * spec[q];
        }
        fft.inverse(prod, conv);
        for (std::size_t ix = 0; ix < psg->nx(); ++ix)
            out.values[psg->node(ix, ik)] = conv[psg->x_flat[ix]];
    }
    return out;
}

}  // namespace

GaborField gabor_transform(const ComplexField& field, const GaborKernel& kernel,
                           const std::shared_ptr<const PhaseSpaceGrid>& psg) {
    return transform_impl(field, kernel, psg, 0.0);
}

GaborField gabor_transform(const RealField& field, const GaborKernel& kernel,
                           const std::shared_ptr<const PhaseSpaceGrid>& psg) {
    ComplexField z(field.grid);
    for (std::size_t i = 0; i < field.size(); ++i) z[i] = field[i];
    return transform_impl(z, kernel, psg, 0.0);
}

ComplexField gabor_inverse(const GaborField& gf) {
    const auto& psg = *gf.psg;
    const Grid& g = psg.field_grid;
    for (int a = 0; a < g.dim; ++a)
        require(psg.x_stride[a] == 1, "gabor_inverse needs x_stride = 1");
    ComplexField out(g);
    const double dk = psg.dk_cell();
    for (std::size_t ix = 0; ix < psg.nx(); ++ix) {
        cplx s = 0.0;
        for (std::size_t ik = 0; ik < psg.nk(); ++ik) s += gf.values[psg.node(ix, ik)];
        out[psg.x_flat[ix]] = s * dk;
    }
    return out;
}

SlowAmplitude slow_amplitude(const GaborField& gf) {
    SlowAmplitude sa;
    sa.psg = gf.psg;
    sa.time = gf.time;
    sa.values.resize(gf.values.size());
    const auto& psg = *gf.psg;
    for (std::size_t ix = 0; ix < psg.nx(); ++ix)
        for (std::size_t ik = 0; ik < psg.nk(); ++ik) {
            const double phase = dot(psg.k_vec[ik], psg.x_pos[ix]);
            sa.values[psg.node(ix, ik)] = gf.values[psg.node(ix, ik)] * std::exp(cplx(0, -phase));
        }
    return sa;
}

GaborField fast_restore(const SlowAmplitude& sa) {
    GaborField gf;
    gf.psg = sa.psg;
    gf.time = sa.time;
    gf.values.resize(sa.values.size());
    const auto& psg = *sa.psg;
    for (std::size_t ix = 0; ix < psg.nx(); ++ix)
        for (std::size_t ik = 0; ik < psg.nk(); ++ik) {
            const double phase = dot(psg.k_vec[ik], psg.x_pos[ix]);
            gf.values[psg.node(ix, ik)] = sa.values[psg.node(ix, ik)] * std::exp(cplx(0, phase));
        }
    return gf;
}

EigenPair bogoliubov_project(const GaborField& a_hat, const GaborField& b_hat, double rho) {
    require(a_hat.psg == b_hat.psg || (a_hat.psg && b_hat.psg &&
                                       a_hat.psg->field_grid.compatible(b_hat.psg->field_grid)),
            "bogoliubov_project: phase-space grids differ");
    const auto& psg = *a_hat.psg;
    EigenPair out;
    out.psg = a_hat.psg;
    out.rho = rho;
    out.time = a_hat.time;
    out.lambda.resize(psg.size());
    out.mu.resize(psg.size());
    for (std::size_t ik = 0; ik < psg.nk(); ++ik) {
        const double k2 = dot(psg.k_vec[ik], psg.k_vec[ik]);
        require(k2 > 0.0, "bogoliubov_project: k = 0 node not allowed");
        const double w = std::sqrt(k2 * (k2 + 2.0 * rho));
        const cplx c(0.0, k2 / w);
        for (std::size_t ix = 0; ix < psg.nx(); ++ix) {
            const std::size_t n = psg.node(ix, ik);
            out.lambda[n] = 0.5 * (a_hat.values[n] - c * b_hat.values[n]);
            out.mu[n] = 0.5 * (a_hat.values[n] + c * b_hat.values[n]);
        }
    }
    return out;
}

std::pair<GaborField, GaborField> bogoliubov_restore(const EigenPair& pair) {
    const auto& psg = *pair.psg;
    GaborField a, b;
    a.psg = b.psg = pair.psg;
    a.time = b.time = pair.time;
    a.values.resize(psg.size());
    b.values.resize(psg.size());
    for (std::size_t ik = 0; ik < psg.nk(); ++ik) {
        const double k2 = dot(psg.k_vec[ik], psg.k_vec[ik]);
        const double w = std::sqrt(k2 * (k2 + 2.0 * pair.rho));
        const cplx c(0.0, w / k2);
        for (std::size_t ix = 0; ix < psg.nx(); ++ix) {
            const std::size_t n = psg.node(ix, ik);
            a.values[n] = pair.lambda[n] + pair.mu[n];
            b.values[n] = c * (pair.lambda[n] - pair.mu[n]);
        }
    }
    return {std::move(a), std::move(b)};
}

PhaseSpaceSpectrum waveaction_field(const PerturbationState& pert,
                                    const CondensateProfile& profile, const GaborKernel& kernel,
                                    const std::shared_ptr<const PhaseSpaceGrid>& psg) {
    require(profile.grid.compatible(pert.re_part.grid), "waveaction_field: grid mismatch");
    GaborField ah = gabor_transform(pert.re_part, kernel, psg);
    GaborField bh = gabor_transform(pert.im_part, kernel, psg);

    PhaseSpaceSpectrum n;
    n.psg = psg;
    n.time = pert.time;
    n.values.resize(psg->size());
    for (std::size_t ik = 0; ik < psg->nk(); ++ik) {
        const double k2 = dot(psg->k_vec[ik], psg->k_vec[ik]);
        require(k2 > 0.0, "waveaction_field: k = 0 node not allowed");
        for (std::size_t ix = 0; ix < psg->nx(); ++ix) {
            const std::size_t in = psg->node(ix, ik);
            const double rho = std::max(profile.rho[psg->x_flat[ix]], 0.0);
            const cplx a = ah.values[in], b = bh.values[in];
            if (rho > 1e-6 * k2) {
                const double w = std::sqrt(k2 * (k2 + 2.0 * rho));
                const cplx m = a + cplx(0.0, k2 / w) * b;
                n.values[in] = 0.5 * (w * rho / k2) * std::norm(m);
            } else {
                // zero-condensate limit: n = |psi_hat|^2 / 2 with psi ~ sqrt(rho) phi
                n.values[in] = 0.5 * rho * std::norm(a + cplx(0.0, 1.0) * b);
            }
        }
    }
    return n;
}

PhaseSpaceSpectrum spectrum(std::span<const SlowAmplitude> ensemble, const GaborKernel& kernel) {
    require(!ensemble.empty(), "spectrum: empty ensemble");
    const auto& psg = *ensemble.front().psg;
    PhaseSpaceSpectrum n;
    n.psg = ensemble.front().psg;
    n.time = ensemble.front().time;
    n.values.assign(psg.size(), 0.0);
    for (const auto& member : ensemble) {
        require(member.values.size() == psg.size(), "spectrum: member size mismatch");
        for (std::size_t i = 0; i < psg.size(); ++i) n.values[i] += std::norm(member.values[i]);
    }
    const double f0 = kernel.fourier_zero(psg.field_grid.dim);
    const double scale = 1.0 / (f0 * ensemble.size());
    for (auto& v : n.values) v *= scale;
    return n;
}

}  // namespace wavetrap
