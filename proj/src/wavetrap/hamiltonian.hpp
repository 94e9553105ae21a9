#pragma once

#include "wavetrap/gabor.hpp"

namespace wavetrap {

struct HamiltonianBreakdown {
    double kinetic = 0.0;      // int |grad psi|^2
    double interaction = 0.0;  // (1/2) int |psi|^4
    double potential = 0.0;    // int U |psi|^2
    double total = 0.0;
};

HamiltonianBreakdown hamiltonian_gp(const FieldState& state);

/// Canonical Gabor-variable Hamiltonian with w(k,x) = k^2 + U(x):
///   H = sum [ (w - x dU/dx)|a|^2 + (i/2) dU/dx (a* da/dk - a da*/dk)
///           + (i/2) 2k (a da*/dx - a* da/dx) ] dx dk  (+ quartic term),
/// discretized with the same operators as the master equation, so that
/// i da/dt = dH/da* holds as a discrete identity. The value carries the
/// raw Gabor measure; divide by gabor_norm_factor to compare with the
/// field-space energy of a weak wavetrain.
double hamiltonian_gabor(const SlowAmplitude& a, const RealField& potential,
                         const GaborKernel& kernel, bool include_quartic);

/// sum_k |a(x,k)|^2 dk = gabor_norm_factor * |psi(x)|^2 for slowly varying
/// fields: F(0) 2^{-d/2}.
double gabor_norm_factor(const GaborKernel& kernel, int dim);

/// Max relative mismatch between i (da/dt from the master equation) and the
/// numerically evaluated variational derivative dH/da* at sampled nodes.
double verify_canonical(const SlowAmplitude& a, const RealField& potential,
                        const GaborKernel& kernel, bool include_quartic, double h_rel = 1e-6,
                        std::size_t sample_stride = 1);

/// Canonical amplitude built from the co-moving Bogoliubov envelope,
///   a(k,x) = (2 sqrt(rho w)/k) mu(k,x) e^{-ik.x},
/// normalized so that the rho -> 0 limit reproduces the slow amplitude of
/// the bare field; |a|^2 equals twice the waveaction of waveaction_field.
struct NormalVariable {
    std::shared_ptr<const PhaseSpaceGrid> psg;
    std::vector<cplx> values;
    double time = 0.0;
};

NormalVariable normal_variable(const EigenPair& pair, const CondensateProfile& profile);

}  // namespace wavetrap
