#pragma once

#include <memory>
#include <span>

#include "wavetrap/dispersion.hpp"
#include "wavetrap/fft.hpp"
#include "wavetrap/fields.hpp"

namespace wavetrap {

/// Intermediate-scale Gaussian window f(y) = (2pi)^-d exp(-(eps* y)^2).
/// eps must sit between the wave scale and the trap scale: eps << eps* << 1;
/// the default working choice is eps* = sqrt(eps).
struct GaborKernel {
    double eps_star = 0.1;

    explicit GaborKernel(double e) : eps_star(e) {
        require(e > 0.0 && e < 1.0, "gabor kernel: eps_star must lie in (0,1)");
    }

    double window(double r, int dim) const {
        return std::pow(2.0 * M_PI, -dim) * std::exp(-(eps_star * r) * (eps_star * r));
    }
    /// Continuum Fourier transform F(q) = (2pi)^-d (pi/eps*^2)^{d/2} e^{-q^2/(4 eps*^2)}.
    double fourier(double q, int dim) const {
        return fourier_zero(dim) * std::exp(-q * q / (4.0 * eps_star * eps_star));
    }
    double fourier_zero(int dim) const {
        return std::pow(2.0 * M_PI, -dim) * std::pow(M_PI / (eps_star * eps_star), 0.5 * dim);
    }
};

/// Discretized (x, k) phase space: a coarse spatial sublattice of the field
/// grid times a set of field-lattice wavevectors.
struct PhaseSpaceGrid {
    Grid field_grid;
    std::array<int, 3> x_stride{1, 1, 1};
    std::vector<std::array<int, 3>> k_index;  // FFT-order indices

    // derived node tables
    std::vector<std::size_t> x_flat;  // flat field-grid index per x node
    std::vector<Vec3> x_pos;
    std::vector<Vec3> k_vec;
    std::array<int, 3> x_count{1, 1, 1};

    static PhaseSpaceGrid make(const Grid& g, std::array<int, 3> x_stride,
                               std::vector<std::array<int, 3>> k_index);
    /// 1D helper: all lattice wavevectors with kmin <= |k| <= kmax
    /// (both signs; k = 0 only if kmin == 0 and include_zero).
    static PhaseSpaceGrid band_1d(const Grid& g, int x_stride, double kmin, double kmax,
                                  bool include_zero = false);

    std::size_t nx() const { return x_flat.size(); }
    std::size_t nk() const { return k_index.size(); }
    std::size_t size() const { return nx() * nk(); }
    std::size_t node(std::size_t ix, std::size_t ik) const { return ix * nk() + ik; }
    /// Phase-space volume element (dx per node) * (dk per node is k-set
    /// dependent; full-lattice sums use dk = (2pi/L)^d).
    double dx_cell() const;
    double dk_cell() const;
};

/// Windowed transform psi_hat(x, k) of a field (or of Re/Im perturbation parts).
struct GaborField {
    std::shared_ptr<const PhaseSpaceGrid> psg;
    std::vector<cplx> values;  // [x][k]
    double time = 0.0;

    cplx& at(std::size_t ix, std::size_t ik) { return values[psg->node(ix, ik)]; }
    const cplx& at(std::size_t ix, std::size_t ik) const { return values[psg->node(ix, ik)]; }
};

/// Slow envelope a(x,k), convention psi_hat = a exp(i k.x).
struct SlowAmplitude {
    std::shared_ptr<const PhaseSpaceGrid> psg;
    std::vector<cplx> values;
    double time = 0.0;
};

/// Bogoliubov eigen-amplitudes on a uniform background density:
///   lambda = (a_hat - i (k^2/w) b_hat)/2   (rotates e^{+iwt})
///   mu     = (a_hat + i (k^2/w) b_hat)/2   (rotates e^{-iwt}, co-moving)
struct EigenPair {
    std::shared_ptr<const PhaseSpaceGrid> psg;
    std::vector<cplx> lambda;
    std::vector<cplx> mu;
    double rho = 0.0;
    double time = 0.0;
};

/// Waveaction density n(x,k) >= 0 on a phase-space grid.
struct PhaseSpaceSpectrum {
    std::shared_ptr<const PhaseSpaceGrid> psg;
    std::vector<double> values;  // [x][k]
    double time = 0.0;

    double& at(std::size_t ix, std::size_t ik) { return values[psg->node(ix, ik)]; }
    double at(std::size_t ix, std::size_t ik) const { return values[psg->node(ix, ik)]; }
    /// Total waveaction, sum n dx dk over the node set.
    double total() const;
};

/// g_hat(x,k) = int f(eps*|x-x0|) e^{ik.(x-x0)} g(x0) dx0 by windowed
/// spectral convolution; linear in g.
GaborField gabor_transform(const ComplexField& field, const GaborKernel& kernel,
                           const std::shared_ptr<const PhaseSpaceGrid>& psg);
GaborField gabor_transform(const RealField& field, const GaborKernel& kernel,
                           const std::shared_ptr<const PhaseSpaceGrid>& psg);

/// g(x) = int g_hat(x,k) dk. Exact inverse of gabor_transform when the node
/// set is the full lattice (and x_stride = 1).
ComplexField gabor_inverse(const GaborField& gf);

SlowAmplitude slow_amplitude(const GaborField& gf);
GaborField fast_restore(const SlowAmplitude& sa);

/// Projects (a_hat, b_hat) onto the Bogoliubov eigenbasis at uniform rho.
/// k = 0 nodes are rejected (w -> 0).
EigenPair bogoliubov_project(const GaborField& a_hat, const GaborField& b_hat, double rho);

/// Inverse of bogoliubov_project: recovers (a_hat, b_hat).
std::pair<GaborField, GaborField> bogoliubov_restore(const EigenPair& pair);

/// Waveaction from a perturbation on a condensate background:
///   n = (1/2) (w rho / k^2) |a_hat + i (k^2/w) b_hat|^2,  w = k sqrt(k^2+2rho)
/// evaluated with the local rho(x). The sign picks the branch that propagates
/// with +dw/dk, so n(x,k) co-moves with the rays at the same k. Where
/// rho < 1e-6 k^2 the analytic zero-condensate limit (1/2)|psi_hat|^2 is used.
PhaseSpaceSpectrum waveaction_field(const PerturbationState& pert, const CondensateProfile& profile,
                                    const GaborKernel& kernel,
                                    const std::shared_ptr<const PhaseSpaceGrid>& psg);

/// Ensemble spectrum n = <|a|^2>/F(0).
PhaseSpaceSpectrum spectrum(std::span<const SlowAmplitude> ensemble, const GaborKernel& kernel);

}  // namespace wavetrap
