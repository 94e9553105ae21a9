#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>

#include "wavetrap/fft.hpp"
#include "wavetrap/grid.hpp"

namespace wavetrap {

/// Order parameter psi on a periodic grid with its trapping potential U.
/// Governing equation: i dpsi/dt + lap(psi) - |psi|^2 psi - U psi = 0.
struct FieldState {
    ComplexField psi;
    RealField potential;
    double time = 0.0;

    static FieldState make(const ComplexField& psi, const RealField& potential, double time = 0.0);
};

/// Madelung data of a (near-)stationary condensate: rho = |psi0|^2,
/// phase theta, flow velocity u = 2 grad(theta), chemical potential omega0.
struct CondensateProfile {
    Grid grid;
    RealField rho;
    RealField theta;
    std::array<RealField, 3> velocity;
    double omega0 = 0.0;
    /// 1 where |psi0| fell below the density floor and the phase was zeroed.
    std::vector<unsigned char> floor_mask;

    static CondensateProfile zero(const Grid& g);  // vacuum background
};

ComplexField reconstruct(const CondensateProfile& p);

struct LinearityWarning {
    double time;
    double max_amplitude;
};

/// Perturbation phi = a + i b relative to a condensate background,
/// psi = psi0 (1 + phi). re_part = a, im_part = b.
struct PerturbationState {
    RealField re_part;
    RealField im_part;
    double time = 0.0;
    std::shared_ptr<const CondensateProfile> background;
    std::vector<LinearityWarning> warnings;
    double linearity_threshold = 0.1;
};

/// CFL-like default step: resolves the fastest Bogoliubov frequency,
/// dt = 0.1 / max(k_max^2, max U + 2 max rho).
double default_dt(const FieldState& state);

/// Strang-split GP integrator (spectral kinetic step, pointwise
/// potential+nonlinear step). Conserves N exactly; energy drift O(dt^2).
/// nonlinear=false drops |psi|^2 psi (linear Schroedinger equation).
FieldState evolve_gp(const FieldState& state, double dt, int steps, bool nonlinear = true);

double particle_number(const FieldState& state);
/// E = int |grad psi|^2 + (1/2)|psi|^4 + U |psi|^2.
double energy(const FieldState& state);

struct ParticleNumberTarget { double value; };
struct ChemicalPotentialTarget { double value; };
using GroundStateTarget = std::variant<ParticleNumberTarget, ChemicalPotentialTarget>;

struct GroundStateOptions {
    int max_iterations = 200000;
    double dtau_initial = 0.0;  // 0 = auto
    double dtau_min = 1e-6;
};

/// Imaginary-time relaxation to the stationary state
/// Omega psi0 + lap(psi0) - rho psi0 - U psi0 = 0.
/// Converged when the Omega estimate changes by < tol per unit imaginary
/// time and the eigenvalue residual is below 10*tol.
CondensateProfile ground_state(const RealField& potential, const GroundStateTarget& target,
                               double tol, const GroundStateOptions& opts = {});

/// rho = max(0, omega0 - U), theta = 0. The strong-coupling analytic limit,
/// also used as the relaxation initializer.
CondensateProfile thomas_fermi_profile(const RealField& potential, double omega0);

/// rho = |psi0|^2, theta = unwrapped arg(psi0), u = 2 grad(theta).
/// Below the density floor (1e-12 max rho) the phase is zeroed and flagged.
CondensateProfile madelung_decompose(const ComplexField& psi0);

/// || Omega psi + lap psi - |psi|^2 psi - U psi || / || psi ||.
double ground_state_residual(const ComplexField& psi0, const RealField& potential, double omega0);

/// || div(rho u) ||_2, the stationarity defect of a profile.
double continuity_residual(const CondensateProfile& p);

/// Coupled evolution of (a, b) on the condensate background:
///   da/dt = -lap b - u.grad a - (grad rho/rho).grad b + rho (2ab + b(a^2+b^2))
///   db/dt = +lap a + (grad rho/rho).grad a - u.grad b - 2 rho a
///           - rho (3a^2 + b^2 + a(a^2+b^2))
/// with the cubic terms only when keep_nonlinear. Laplacian handled
/// spectrally, density-dependent terms pointwise, Strang order as evolve_gp.
/// The grad(rho)/rho coefficient is masked where rho is below floor
/// (the thin surface layer is outside the theory's validity anyway).
PerturbationState evolve_linearized(const PerturbationState& pert, double dt, int steps,
                                    bool keep_nonlinear = false);

}  // namespace wavetrap
