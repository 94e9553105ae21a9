#pragma once

#include <cstdint>
#include <functional>

#include "wavetrap/gabor.hpp"
#include "wavetrap/rays.hpp"

namespace wavetrap {

/// n(k) on spherical shells at one spatial location.
struct IsotropicSpectrum {
    std::vector<double> k_shells;  // increasing, > 0
    std::vector<double> n_values;  // >= 0
    double position = 0.0;
    int dim = 3;

    /// Linear interpolation between shells; zero outside the band.
    double value(double k) const;
    void validate() const;
};

enum class VertexModel { AcousticLimit, UserTable };

struct CollisionConfig {
    /// Gaussian broadening of the frequency delta; 0 = auto
    /// (twice the mean shell-to-shell frequency spacing).
    double delta_width = 0.0;
    long mc_samples = 100000;
    /// Overall four-wave prefactor. The written form of the kinetic
    /// equation carries 1/pi; prefactor conventions vary, so it is a knob.
    double coupling = 1.0 / M_PI;
    VertexModel vertex_model = VertexModel::AcousticLimit;
    /// |V|^2 = vertex_constant * k k1 k2 in the acoustic limit.
    double vertex_constant = 1.0;
    std::function<double(double, double, double)> vertex_table;
    std::uint64_t seed = 12345;
};

using OmegaLaw = std::function<double(double)>;  // isotropic w(|k|) at fixed x

OmegaLaw make_omega_law(const MediumSample& m, const DispersionModel& model);

struct ShellRates {
    std::vector<double> rate;       // dn/dt per shell
    std::vector<double> std_error;  // Monte-Carlo standard error
    bool insufficient_samples = false;
};

/// Four-wave collision integral (no condensate):
/// dn_k/dt = coupling * int n n1 n2 n3 (1/n + 1/n1 - 1/n2 - 1/n3)
///           delta(k+k1-k2-k3) delta_sigma(w+w1-w2-w3) dk1 dk2 dk3,
/// momentum delta exact (k3 = k+k1-k2), frequency delta Gaussian-broadened.
/// dim must be 2 or 3: with w = k^2 the 1D resonant manifold is trivial.
ShellRates collision_4wave(const IsotropicSpectrum& spec, const OmegaLaw& omega,
                           const CollisionConfig& cfg);

/// Three-wave collision integral (condensate-mediated): decay k -> k1+k2
/// plus absorption k1 -> k+k2 with the f_k12 = n1 n2 - n(n1+n2) brackets.
ShellRates collision_3wave(const IsotropicSpectrum& spec, const OmegaLaw& omega,
                           const CollisionConfig& cfg);

struct ConservationResidual {
    double dn_dt = 0.0, de_dt = 0.0;
    double dn_err = 0.0, de_err = 0.0;
};

/// Quadrature of the rates over shells with the d-dimensional shell measure:
/// dN/dt = int S_d k^{d-1} rate dk, dE/dt with an extra w(k) weight.
ConservationResidual conservation_residuals(const IsotropicSpectrum& spec, const ShellRates& rates,
                                            const OmegaLaw& omega);

/// Rayleigh-Jeans equilibrium n = T/(w - mu); annuls both collision integrals.
struct RJParams {
    double temperature = 1.0;
    double chem_potential = 0.0;  // must sit below min w on the band
};

// ---------------------------------------------------------------------------
// Gabor-amplitude master equation

struct MasterEnsemble {
    std::vector<SlowAmplitude> members;
    std::uint64_t rng_seed = 0;
};

/// Right side of the master equation for a(k, x) on a 1D field grid:
///   da/dt = -i (k^2 + U - x dU/dx) a - 2k da/dx + dU/dx da/dk - i NL[a]
/// with the window-convolved cubic term NL when include_cubic.
/// Discretized with the shared phase-space operators, so it is exactly the
/// variation of the Gabor Hamiltonian.
std::vector<cplx> master_rhs(const SlowAmplitude& a, const RealField& potential,
                             const GaborKernel& kernel, bool include_cubic);

struct MasterOptions {
    bool include_cubic = true;
    double amplitude_threshold = 0.1;  // weakness warning level
};

/// Advances every member. Homogeneous ensembles (single x node) evolve as
/// the exact window->delta limit, i.e. the periodic-box four-wave amplitude
/// equation; inhomogeneous 1D ensembles integrate master_rhs with RK4.
MasterEnsemble evolve_master(const MasterEnsemble& ens, const RealField& potential,
                             const GaborKernel& kernel, double dt, int steps,
                             const MasterOptions& opts = {});

// ---------------------------------------------------------------------------
// Phase-space kinetic solver

struct KineticLog {
    std::vector<double> total_waveaction;  // per step, after advection
    long clamped_nodes = 0;
    std::vector<std::string> warnings;
    std::vector<int> regime_three_wave;  // count of x nodes in 3-wave regime per step
};

struct KineticOptions {
    bool advection_only = false;
    /// Collision dimensionality used for the isotropic shell integrals.
    int collision_dim = 3;
};

/// Transport n(x,k) along rays (semi-Lagrangian, backward characteristics,
/// cubic interpolation) plus the local collision source at each x node; the
/// 3- vs 4-wave operator is chosen per node by regime_classify.
PhaseSpaceSpectrum kinetic_evolve(const PhaseSpaceSpectrum& spec, const Medium& medium,
                                  const DispersionModel& model, const CollisionConfig& cfg,
                                  double dt, int steps, const KineticOptions& opts = {},
                                  KineticLog* log = nullptr);

/// n(x,k) = T/(w(k,x) - mu) sampled on the phase-space grid.
PhaseSpaceSpectrum rj_phase_space(const std::shared_ptr<const PhaseSpaceGrid>& psg,
                                  const Medium& medium, const DispersionModel& model,
                                  const RJParams& rj);

}  // namespace wavetrap
