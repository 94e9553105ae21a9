#pragma once

#include <functional>
#include <memory>
#include <span>

#include "wavetrap/dispersion.hpp"
#include "wavetrap/fields.hpp"

namespace wavetrap {

/// Medium seen by rays: samples (U, rho, u, gradients) at arbitrary points.
class Medium {
  public:
    virtual ~Medium() = default;
    virtual MediumSample sample(const Vec3& x) const = 0;
};

/// Grid-backed medium; gradients are spectral, sampling is periodic cubic.
class GridMedium : public Medium {
  public:
    GridMedium(const RealField& potential, const CondensateProfile& profile);
    /// Vacuum background: potential only.
    explicit GridMedium(const RealField& potential);

    MediumSample sample(const Vec3& x) const override;

    /// A copy with rho folded into the potential and the condensate removed
    /// (the "renormalized trapping potential" picture, for control runs).
    GridMedium folded_into_potential() const;

    const RealField& potential() const { return potential_; }
    const RealField& rho() const { return rho_; }

  private:
    void finalize();
    RealField potential_;
    RealField rho_;
    std::array<RealField, 3> velocity_;
    std::array<RealField, 3> grad_potential_;
    std::array<RealField, 3> grad_rho_;
};

/// Closed-form medium for exactness tests.
class FunctionMedium : public Medium {
  public:
    std::function<MediumSample(const Vec3&)> fn;
    explicit FunctionMedium(std::function<MediumSample(const Vec3&)> f) : fn(std::move(f)) {}
    MediumSample sample(const Vec3& x) const override { return fn(x); }
};

struct RayState {
    Vec3 position{0, 0, 0};
    Vec3 wavevector{0, 0, 0};
    double time = 0.0;
    double omega_init = 0.0;
};

struct ReflectionEvent {
    double time = 0.0;
    Vec3 position{0, 0, 0};
    double k_min = 0.0;  // refined |k| at the turning point
};

enum class RayStatus { Completed, OutOfDomain };

struct RayTrajectory {
    std::vector<RayState> samples;
    std::vector<ReflectionEvent> events;
    RayStatus status = RayStatus::Completed;
    double max_omega_drift = 0.0;  // max |w - w0| / |w0| seen
};

struct RayOptions {
    int record_stride = 1;
    /// Per-step relative frequency change that triggers substepping
    /// (catches e.g. crossings of a Thomas-Fermi edge kink); persistent
    /// failure raises NumericalError. Cumulative drift is recorded in the
    /// trajectory, not thrown on.
    double step_drift_tol = 1e-8;
    /// Accepted bound for irreducible (medium-limited) per-step drift.
    double step_drift_hard = 1e-4;
    int max_halvings = 8;
    /// Terminate with OutOfDomain beyond this |x_a| bound per axis (0 = off).
    double domain_halfwidth = 0.0;
};

/// Hamiltonian ray equations xdot = dw/dk, kdot = -grad w, classical RK4.
/// w is monitored against its launch value; drifting steps are recursively
/// halved before giving up.
RayTrajectory integrate_ray(const RayState& init, const Medium& medium,
                            const DispersionModel& model, double t_end, double dt,
                            const RayOptions& opts = {});

/// Turning points: local minima of |k| below threshold_rel * |k_launch|,
/// refined by fine re-integration and a parabolic fit of |k|^2(t).
std::vector<ReflectionEvent> find_reflections(const RayTrajectory& traj, const Medium& medium,
                                              const DispersionModel& model,
                                              double threshold_rel = 1e-3);

/// Transports q along the trajectory: value(t) = q0 + int source dt.
/// With no source the value is constant (the waveaction conservation law).
std::vector<std::pair<double, double>> advect_quantity(
    const RayTrajectory& traj, double q0,
    const std::function<double(const RayState&)>& source = nullptr);

struct ResidenceHistogram {
    std::vector<double> bin_edges;    // size nbins+1, over x[0]
    std::vector<double> fraction;     // time fraction per bin, sums to 1
};

/// Time-fraction histogram of ray positions (axis 0).
ResidenceHistogram residence_density(std::span<const RayTrajectory> ensemble, int nbins,
                                     double x_min, double x_max);

/// Frequency at a phase-space point for a given medium/model.
inline double ray_frequency(const Vec3& x, const Vec3& k, const Medium& medium,
                            const DispersionModel& model) {
    return frequency(k, medium.sample(x), model);
}

}  // namespace wavetrap
