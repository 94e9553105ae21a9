#include "wavetrap/dispersion.hpp"

#include <limits>

namespace wavetrap {

DispersionLaw dispersion_law_from_string(const std::string& s) {
    if (s == "ehrenfest") return DispersionLaw::Ehrenfest;
    if (s == "bogoliubov") return DispersionLaw::Bogoliubov;
    if (s == "unified") return DispersionLaw::Unified;
    throw ValidationError("unknown dispersion variant: " + s);
}

std::string to_string(DispersionLaw law) {
    switch (law) {
        case DispersionLaw::Ehrenfest: return "ehrenfest";
        case DispersionLaw::Bogoliubov: return "bogoliubov";
        case DispersionLaw::Unified: return "unified";
    }
    return "?";
}

double frequency(const Vec3& k, const MediumSample& m, const DispersionModel& model) {
    const double k2 = dot(k, k);
    double w = 0.0;
    switch (model.law) {
        case DispersionLaw::Ehrenfest:
            w = k2 + m.potential;
            break;
        case DispersionLaw::Bogoliubov:
            w = std::sqrt(k2 * (k2 + 2.0 * m.rho));
            break;
        case DispersionLaw::Unified:
            // rho = 0 reduces to Ehrenfest exactly (bitwise), not just to round-off
            w = (m.rho == 0.0) ? k2 + m.potential
                               : std::sqrt(k2 * (k2 + 2.0 * m.rho)) + m.potential + m.rho;
            break;
    }
    if (model.doppler) w += dot(k, m.velocity);
    return w;
}

Vec3 group_velocity(const Vec3& k, const MediumSample& m, const DispersionModel& model) {
    Vec3 v{0, 0, 0};
    const double k2 = dot(k, k);
    switch (model.law) {
        case DispersionLaw::Ehrenfest:
            for (int a = 0; a < 3; ++a) v[a] = 2.0 * k[a];
            break;
        case DispersionLaw::Bogoliubov:
        case DispersionLaw::Unified: {
            if (m.rho == 0.0) {
                for (int a = 0; a < 3; ++a) v[a] = 2.0 * k[a];
                break;
            }
            // d/dk_a [ k sqrt(k^2+2 rho) ] = 2 k_a (k^2 + rho) / w_b
            const double wb = std::sqrt(k2 * (k2 + 2.0 * m.rho));
            if (wb == 0.0) break;  // k = 0: sonic limit, direction undefined
            const double s = 2.0 * (k2 + m.rho) / wb;
            for (int a = 0; a < 3; ++a) v[a] = s * k[a];
            break;
        }
    }
    if (model.doppler)
        for (int a = 0; a < 3; ++a) v[a] += m.velocity[a];
    return v;
}

Vec3 space_gradient(const Vec3& k, const MediumSample& m, const DispersionModel& model) {
    Vec3 g{0, 0, 0};
    const double k2 = dot(k, k);
    switch (model.law) {
        case DispersionLaw::Ehrenfest:
            g = m.grad_potential;
            break;
        case DispersionLaw::Bogoliubov:
        case DispersionLaw::Unified: {
            if (m.rho == 0.0 && model.law == DispersionLaw::Unified) {
                g = m.grad_potential;
                for (int a = 0; a < 3; ++a) g[a] += 2.0 * m.grad_rho[a];  // k^2/w_b + 1 -> 2
                break;
            }
            // dw_b/drho = k^2 / w_b
            const double wb = std::sqrt(k2 * (k2 + 2.0 * m.rho));
            const double drho = (wb > 0.0) ? k2 / wb : 0.0;  // k/sqrt(k^2+2rho) -> 0 at k = 0
            for (int a = 0; a < 3; ++a) g[a] = drho * m.grad_rho[a];
            if (model.law == DispersionLaw::Unified)
                for (int a = 0; a < 3; ++a) g[a] += m.grad_potential[a] + m.grad_rho[a];
            break;
        }
    }
    return g;
}

double wavenumber_from_frequency(double omega_b, double rho) {
    require(omega_b >= 0.0, "wavenumber_from_frequency: negative Bogoliubov frequency");
    require(rho >= 0.0, "wavenumber_from_frequency: negative density");
    if (omega_b == 0.0) return 0.0;
    // k^4 + 2 rho k^2 - w^2 = 0; cancellation-free form of the positive root
    const double k2 = omega_b * omega_b / (std::sqrt(rho * rho + omega_b * omega_b) + rho);
    return std::sqrt(k2);
}

double timescale_3wave(double k, double rho, double n_level, int dim) {
    require(k > 0.0, "timescale_3wave: k must be positive");
    if (rho <= 0.0 || n_level <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(k, 2.0 - dim) / (rho * n_level);
}

Regime regime_classify(double k, double rho, double n_level, int dim) {
    if (rho <= 0.0) return Regime::FourWave;
    if (rho > n_level * std::pow(k, dim)) return Regime::ThreeWave;
    if (rho >= 0.5 * k * k) return Regime::ThreeWave;
    return Regime::FourWave;
}

}  // namespace wavetrap
