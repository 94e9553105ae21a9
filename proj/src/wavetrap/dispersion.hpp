#pragma once

#include <array>
#include <cmath>
#include <string>

#include "wavetrap/error.hpp"

namespace wavetrap {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Local medium data as seen by a wavepacket: trap potential, condensate
/// density and flow velocity u = 2*grad(theta), plus spatial gradients.
struct MediumSample {
    double potential = 0.0;
    double rho = 0.0;
    Vec3 velocity{0, 0, 0};
    Vec3 grad_potential{0, 0, 0};
    Vec3 grad_rho{0, 0, 0};
};

enum class DispersionLaw {
    Ehrenfest,   // w = k^2 + U          (no condensate)
    Bogoliubov,  // w = k sqrt(k^2+2 rho)
    Unified,     // w = k sqrt(k^2+2 rho) + U + rho
};

struct DispersionModel {
    DispersionLaw law = DispersionLaw::Unified;
    /// Adds the flow Doppler shift k.u (u = 2*grad theta) to the frequency.
    bool doppler = false;

    static DispersionModel ehrenfest() { return {DispersionLaw::Ehrenfest, false}; }
    static DispersionModel bogoliubov() { return {DispersionLaw::Bogoliubov, false}; }
    static DispersionModel unified() { return {DispersionLaw::Unified, false}; }
};

DispersionLaw dispersion_law_from_string(const std::string& s);
std::string to_string(DispersionLaw law);

/// w(k; x) for the selected law.
double frequency(const Vec3& k, const MediumSample& m, const DispersionModel& model);

/// dw/dk (the group velocity xdot of the ray equations).
Vec3 group_velocity(const Vec3& k, const MediumSample& m, const DispersionModel& model);

/// grad_x w (so kdot = -space_gradient). Uses the sampled field gradients;
/// the Doppler term is treated as locally uniform flow.
Vec3 space_gradient(const Vec3& k, const MediumSample& m, const DispersionModel& model);

/// Inverts the Bogoliubov part w_b = k sqrt(k^2 + 2 rho):
/// k = sqrt(sqrt(rho^2 + w_b^2) - rho). Positive for any rho >= 0, w_b > 0.
double wavenumber_from_frequency(double omega_b, double rho);

/// Characteristic three-wave interaction time k^(2-d) / (rho n).
double timescale_3wave(double k, double rho, double n_level, int dim);

enum class Regime { ThreeWave, FourWave };

/// Three-wave processes win when the condensate is stronger than the waves
/// (rho > n k^d) or comparable to the wave scale itself (rho ~ k^2).
Regime regime_classify(double k, double rho, double n_level, int dim);

}  // namespace wavetrap
