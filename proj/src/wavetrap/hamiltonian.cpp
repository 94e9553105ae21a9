#include "wavetrap/hamiltonian.hpp"

#include <cmath>

#include "wavetrap/kinetics.hpp"
#include "wavetrap/phase_space_ops.hpp"

namespace wavetrap {

HamiltonianBreakdown hamiltonian_gp(const FieldState& state) {
    const Grid& g = state.psi.grid;
    HamiltonianBreakdown h;
    ComplexField c = to_spectral(state.psi);
    for (std::size_t i = 0; i < c.size(); ++i) h.kinetic += g.k_squared(i) * std::norm(c[i]);
    h.kinetic *= g.volume();
    for (std::size_t i = 0; i < state.psi.size(); ++i) {
        const double r = std::norm(state.psi[i]);
        h.interaction += 0.5 * r * r;
        h.potential += state.potential[i] * r;
    }
    h.interaction *= g.cell_volume();
    h.potential *= g.cell_volume();
    h.total = h.kinetic + h.interaction + h.potential;
    return h;
}

double gabor_norm_factor(const GaborKernel& kernel, int dim) {
    return kernel.fourier_zero(dim) * std::pow(2.0, -0.5 * dim);
}

namespace {

struct GaborHamiltonianParts {
    double quadratic = 0.0;
    double quartic = 0.0;
};

GaborHamiltonianParts hamiltonian_gabor_parts(const SlowAmplitude& a, const RealField& potential,
                                              const GaborKernel& kernel, bool include_quartic) {
    const auto& psg = *a.psg;
    require(potential.grid.compatible(psg.field_grid), "hamiltonian_gabor: grid mismatch");
    const KBand band = contiguous_band(psg);
    const std::size_t nx = psg.nx(), nk = psg.nk();
    const double w_cell = psg.dx_cell() * psg.dk_cell();

    std::vector<double> u(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) u[ix] = potential[psg.x_flat[ix]];
    const std::vector<double> du = ps_grad_potential(psg, u);

    std::vector<cplx> dxa(psg.size()), dka(psg.size());
    ps_grad_x(psg, a.values, dxa);
    ps_grad_k(psg, band, a.values, dka);

    GaborHamiltonianParts parts;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = psg.x_pos[ix][0];
        for (std::size_t ik = 0; ik < nk; ++ik) {
            const std::size_t n = psg.node(ix, ik);
            const double k = band.k(static_cast<int>(ik));
            const cplx an = a.values[n];
            const double w = k * k + u[ix];
            // (i/2)(z - conj z) = -Im z applied to both gradient couplings
            const double term_k = -du[ix] * std::imag(std::conj(an) * dka[n]);
            const double term_x = -2.0 * k * std::imag(an * std::conj(dxa[n]));
            parts.quadratic += (w - x * du[ix]) * std::norm(an) + term_k + term_x;
        }
    }
    parts.quadratic *= w_cell;

    if (include_quartic) {
        const int nky = static_cast<int>(nk);
        const double dy = 2.0 * M_PI / (nky * band.dk);
        std::vector<double> fwin(nky);
        for (int j = 0; j < nky; ++j)
            fwin[j] = kernel.window(std::abs((j - nky / 2) * dy), 1);
        std::vector<cplx> h(nky);
        double q = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (int j = 0; j < nky; ++j) {
                const double y = (j - nky / 2) * dy;
                cplx s = 0.0;
                for (std::size_t ik = 0; ik < nk; ++ik)
                    s += a.values[psg.node(ix, ik)] *
                         std::exp(cplx(0.0, -band.k(static_cast<int>(ik)) * y));
                h[j] = s * band.dk;
            }
            double loc = 0.0;
            for (int j = 0; j < nky; ++j) loc += fwin[j] * std::norm(h[j]) * std::norm(h[j]);
            q += loc * dy;
        }
        parts.quartic = 0.5 * q * psg.dx_cell();
    }
    return parts;
}

}  // namespace

double hamiltonian_gabor(const SlowAmplitude& a, const RealField& potential,
                         const GaborKernel& kernel, bool include_quartic) {
    auto parts = hamiltonian_gabor_parts(a, potential, kernel, include_quartic);
    return parts.quadratic + parts.quartic;
}

double verify_canonical(const SlowAmplitude& a, const RealField& potential,
                        const GaborKernel& kernel, bool include_quartic, double h_rel,
                        std::size_t sample_stride) {
    const auto& psg = *a.psg;
    const double w_cell = psg.dx_cell() * psg.dk_cell();

    const std::vector<cplx> rhs = master_rhs(a, potential, kernel, include_quartic);

    double amax = 0.0;
    for (const auto& z : a.values) amax = std::max(amax, std::abs(z));
    const double h = h_rel * std::max(amax, 1e-12);

    // scale for the relative residual
    double scale = 0.0;
    for (std::size_t n = 0; n < psg.size(); ++n)
        scale = std::max(scale, std::abs(cplx(0.0, 1.0) * rhs[n]));
    if (scale == 0.0) scale = 1.0;

    double worst = 0.0;
    SlowAmplitude pert = a;
    for (std::size_t n = 0; n < psg.size(); n += sample_stride) {
        auto h_of = [&](cplx delta) {
            pert.values[n] = a.values[n] + delta;
            const double val = hamiltonian_gabor(pert, potential, kernel, include_quartic);
            pert.values[n] = a.values[n];
            return val;
        };
        const double d_re = (h_of(cplx(h, 0.0)) - h_of(cplx(-h, 0.0))) / (2.0 * h);
        const double d_im = (h_of(cplx(0.0, h)) - h_of(cplx(0.0, -h))) / (2.0 * h);
        const cplx variational = cplx(0.5 * d_re, 0.5 * d_im) / w_cell;
        const cplx canonical = cplx(0.0, 1.0) * rhs[n];  // i da/dt
        worst = std::max(worst, std::abs(variational - canonical) / scale);
    }
    return worst;
}

NormalVariable normal_variable(const EigenPair& pair, const CondensateProfile& profile) {
    const auto& psg = *pair.psg;
    require(profile.grid.compatible(psg.field_grid), "normal_variable: grid mismatch");
    NormalVariable out;
    out.psg = pair.psg;
    out.time = pair.time;
    out.values.resize(psg.size());
    for (std::size_t ik = 0; ik < psg.nk(); ++ik) {
        const double k2 = dot(psg.k_vec[ik], psg.k_vec[ik]);
        require(k2 > 0.0, "normal_variable: k = 0 node not allowed");
        for (std::size_t ix = 0; ix < psg.nx(); ++ix) {
            const std::size_t n = psg.node(ix, ik);
            const double rho = std::max(profile.rho[psg.x_flat[ix]], 0.0);
            const double w = std::sqrt(k2 * (k2 + 2.0 * rho));
            const double pref = 2.0 * std::sqrt(rho * w) / std::sqrt(k2);
            const double phase = dot(psg.k_vec[ik], psg.x_pos[ix]);
            out.values[n] = pref * pair.mu[n] * std::exp(cplx(0.0, -phase));
        }
    }
    return out;
}

}  // namespace wavetrap
