#include "wavetrap/rays.hpp"

#include <algorithm>
#include <cmath>

#include "wavetrap/interpolate.hpp"

namespace wavetrap {

GridMedium::GridMedium(const RealField& potential, const CondensateProfile& profile)
    : potential_(potential), rho_(profile.rho), velocity_(profile.velocity) {
    require(potential.grid.compatible(profile.grid), "medium: grid mismatch");
    finalize();
}

GridMedium::GridMedium(const RealField& potential) : potential_(potential) {
    rho_ = RealField(potential.grid, 0.0);
    for (int a = 0; a < 3; ++a) velocity_[a] = RealField(potential.grid, 0.0);
    finalize();
}

namespace {

/// 4th-order centered difference, periodic wrap. Local, so a trap potential
/// that is non-periodic at box scale does not ring into the interior the way
/// a spectral derivative would.
RealField fd_gradient(const RealField& f, int axis) {
    const Grid& g = f.grid;
    RealField d(g, 0.0);
    const double inv = 1.0 / (12.0 * g.spacing(axis));
    const int n = g.npts[axis];
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unindex(i);
        auto shifted = [&](int off) {
            auto j = idx;
            j[axis] = ((idx[axis] + off) % n + n) % n;
            return f[g.index(j)];
        };
        d[i] = (-shifted(2) + 8.0 * shifted(1) - 8.0 * shifted(-1) + shifted(-2)) * inv;
    }
    return d;
}

}  // namespace

void GridMedium::finalize() {
    const Grid& g = potential_.grid;
    for (int a = 0; a < 3; ++a) {
        grad_potential_[a] = RealField(g, 0.0);
        grad_rho_[a] = RealField(g, 0.0);
        if (velocity_[a].size() == 0) velocity_[a] = RealField(g, 0.0);
    }
    for (int a = 0; a < g.dim; ++a) {
        grad_potential_[a] = fd_gradient(potential_, a);
        grad_rho_[a] = fd_gradient(rho_, a);
    }
}

GridMedium GridMedium::folded_into_potential() const {
    GridMedium m(*this);
    for (std::size_t i = 0; i < m.potential_.size(); ++i) {
        m.potential_[i] += m.rho_[i];
        m.rho_[i] = 0.0;
    }
    m.finalize();
    return m;
}

MediumSample GridMedium::sample(const Vec3& x) const {
    MediumSample s;
    s.potential = sample_periodic(potential_, x);
    s.rho = std::max(0.0, sample_periodic(rho_, x));
    const int dim = potential_.grid.dim;
    for (int a = 0; a < dim; ++a) {
        s.velocity[a] = sample_periodic(velocity_[a], x);
        s.grad_potential[a] = sample_periodic(grad_potential_[a], x);
        s.grad_rho[a] = sample_periodic(grad_rho_[a], x);
    }
    return s;
}

namespace {

struct PhasePoint {
    Vec3 x, k;
};

PhasePoint rhs(const PhasePoint& p, const Medium& medium, const DispersionModel& model) {
    const MediumSample m = medium.sample(p.x);
    PhasePoint d;
    d.x = group_velocity(p.k, m, model);
    const Vec3 g = space_gradient(p.k, m, model);
    for (int a = 0; a < 3; ++a) d.k[a] = -g[a];
    return d;
}

PhasePoint rk4_step(const PhasePoint& p, double h, const Medium& medium,
                    const DispersionModel& model) {
    const PhasePoint k1 = rhs(p, medium, model);
    PhasePoint q;
    for (int a = 0; a < 3; ++a) {
        q.x[a] = p.x[a] + 0.5 * h * k1.x[a];
        q.k[a] = p.k[a] + 0.5 * h * k1.k[a];
    }
    const PhasePoint k2 = rhs(q, medium, model);
    for (int a = 0; a < 3; ++a) {
        q.x[a] = p.x[a] + 0.5 * h * k2.x[a];
        q.k[a] = p.k[a] + 0.5 * h * k2.k[a];
    }
    const PhasePoint k3 = rhs(q, medium, model);
    for (int a = 0; a < 3; ++a) {
        q.x[a] = p.x[a] + h * k3.x[a];
        q.k[a] = p.k[a] + h * k3.k[a];
    }
    const PhasePoint k4 = rhs(q, medium, model);
    PhasePoint out;
    for (int a = 0; a < 3; ++a) {
        out.x[a] = p.x[a] + h / 6.0 * (k1.x[a] + 2.0 * k2.x[a] + 2.0 * k3.x[a] + k4.x[a]);
        out.k[a] = p.k[a] + h / 6.0 * (k1.k[a] + 2.0 * k2.k[a] + 2.0 * k3.k[a] + k4.k[a]);
    }
    return out;
}

/// Advance by h keeping the per-step frequency change within tol; retries
/// with 2, 4, ... substeps while that helps. Substepping cures stepper
/// error but not an inconsistency of the sampled medium itself, so once
/// refinement stops paying off the best attempt is accepted as long as it
/// stays under a hard ceiling.
PhasePoint guarded_step(const PhasePoint& p, double h, const Medium& medium,
                        const DispersionModel& model, double w_before, double scale, double tol,
                        double hard_tol, int max_halvings, double t_now) {
    PhasePoint best{};
    double best_err = std::numeric_limits<double>::infinity();
    double prev_err = std::numeric_limits<double>::infinity();
    for (int level = 0; level <= max_halvings; ++level) {
        const int nsub = 1 << level;
        PhasePoint q = p;
        for (int s = 0; s < nsub; ++s) q = rk4_step(q, h / nsub, medium, model);
        const double w = frequency(q.k, medium.sample(q.x), model);
        const double err = std::abs(w - w_before) / scale;
        if (err <= tol) return q;
        if (err < best_err) {
            best_err = err;
            best = q;
        }
        if (err > prev_err / 1.5) break;  // refinement no longer helps
        prev_err = err;
    }
    if (best_err <= hard_tol) return best;
    throw NumericalError("integrate_ray: frequency drift exceeds tolerance at t = " +
                         std::to_string(t_now) + " despite step halving");
}

}  // namespace

RayTrajectory integrate_ray(const RayState& init, const Medium& medium,
                            const DispersionModel& model, double t_end, double dt,
                            const RayOptions& opts) {
    require(dt != 0.0, "integrate_ray: dt must be nonzero");
    require((t_end - init.time) * dt > 0.0, "integrate_ray: dt sign must point at t_end");

    RayTrajectory traj;
    RayState s = init;
    const MediumSample m0 = medium.sample(s.position);
    s.omega_init = init.omega_init != 0.0 ? init.omega_init : frequency(s.wavevector, m0, model);
    const double w0 = frequency(s.wavevector, m0, model);
    traj.samples.push_back(s);

    const long nsteps = std::lround((t_end - init.time) / dt);
    PhasePoint p{s.position, s.wavevector};
    const double scale = std::max(std::abs(w0), 1e-12);
    double w_before = w0;
    for (long step = 1; step <= nsteps; ++step) {
        const double t = init.time + step * dt;
        p = guarded_step(p, dt, medium, model, w_before, scale, opts.step_drift_tol,
                         opts.step_drift_hard, opts.max_halvings, t);
        const double w = frequency(p.k, medium.sample(p.x), model);
        w_before = w;
        traj.max_omega_drift =
            std::max(traj.max_omega_drift, std::abs(w - w0) / std::max(std::abs(w0), 1e-12));
        if (!std::isfinite(p.x[0]) || !std::isfinite(p.k[0]))
            throw NumericalError("integrate_ray: non-finite state at t = " + std::to_string(t));
        if (opts.domain_halfwidth > 0.0) {
            bool out = false;
            for (int a = 0; a < 3; ++a) out |= std::abs(p.x[a]) > opts.domain_halfwidth;
            if (out) {
                traj.status = RayStatus::OutOfDomain;
                break;
            }
        }
        if (step % opts.record_stride == 0 || step == nsteps) {
            RayState r;
            r.position = p.x;
            r.wavevector = p.k;
            r.time = t;
            r.omega_init = s.omega_init;
            traj.samples.push_back(r);
        }
    }
    return traj;
}

std::vector<ReflectionEvent> find_reflections(const RayTrajectory& traj, const Medium& medium,
                                              const DispersionModel& model, double threshold_rel) {
    std::vector<ReflectionEvent> events;
    if (traj.samples.size() < 3) return events;
    const double k_launch = norm(traj.samples.front().wavevector);
    if (k_launch == 0.0) return events;

    auto kmag = [&](std::size_t i) { return norm(traj.samples[i].wavevector); };

    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        if (!(kmag(i) <= kmag(i - 1) && kmag(i) <= kmag(i + 1))) continue;
        if (kmag(i) > 0.05 * k_launch) continue;  // coarse candidate gate

        // refine: re-integrate [t_{i-1}, t_{i+1}] finely, then fit |k|^2(t)
        const RayState& a = traj.samples[i - 1];
        const double t0 = a.time, t1 = traj.samples[i + 1].time;
        const int nfine = 256;
        const double h = (t1 - t0) / nfine;
        PhasePoint p{a.position, a.wavevector};
        double best_k2 = dot(p.k, p.k);
        double best_t = t0;
        Vec3 best_x = p.x;
        double prev_k2 = best_k2, prev2_k2 = best_k2;
        double prev_t = t0;
        Vec3 prev_x = p.x;
        for (int s = 1; s <= nfine; ++s) {
            p = rk4_step(p, h, medium, model);
            const double k2 = dot(p.k, p.k);
            const double t = t0 + s * h;
            if (k2 < best_k2) {
                best_k2 = k2;
                best_t = t;
                best_x = p.x;
            }
            // parabolic refinement through the discrete minimum
            if (s >= 2 && prev_k2 <= prev2_k2 && prev_k2 <= k2) {
                const double denom = prev2_k2 - 2.0 * prev_k2 + k2;
                if (denom > 0.0) {
                    const double delta = 0.5 * (prev2_k2 - k2) / denom;  // in units of h
                    const double kmin2 = prev_k2 - 0.25 * (prev2_k2 - k2) * delta;
                    if (kmin2 < best_k2) best_k2 = std::max(kmin2, 0.0);
                    best_t = prev_t + delta * h;
                    best_x = prev_x;  // one fine step of drift, below reporting accuracy
                }
            }
            prev2_k2 = prev_k2;
            prev_k2 = k2;
            prev_t = t;
            prev_x = p.x;
        }
        const double kmin = std::sqrt(std::max(best_k2, 0.0));
        if (kmin < threshold_rel * k_launch) {
            ReflectionEvent ev;
            ev.time = best_t;
            ev.position = best_x;
            ev.k_min = kmin;
            events.push_back(ev);
        }
    }
    return events;
}

std::vector<std::pair<double, double>> advect_quantity(
    const RayTrajectory& traj, double q0, const std::function<double(const RayState&)>& source) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.samples.size());
    double q = q0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (i > 0 && source) {
            // trapezoidal accumulation along the characteristic
            const double dt = traj.samples[i].time - traj.samples[i - 1].time;
            q += 0.5 * dt * (source(traj.samples[i - 1]) + source(traj.samples[i]));
        }
        out.emplace_back(traj.samples[i].time, q);
    }
    return out;
}

ResidenceHistogram residence_density(std::span<const RayTrajectory> ensemble, int nbins,
                                     double x_min, double x_max) {
    require(nbins > 0 && x_max > x_min, "residence_density: bad binning");
    ResidenceHistogram h;
    h.bin_edges.resize(nbins + 1);
    for (int b = 0; b <= nbins; ++b)
        h.bin_edges[b] = x_min + (x_max - x_min) * b / nbins;
    h.fraction.assign(nbins, 0.0);
    double total = 0.0;
    const double inv_width = nbins / (x_max - x_min);
    for (const auto& traj : ensemble) {
        for (std::size_t i = 1; i < traj.samples.size(); ++i) {
            const double dt = traj.samples[i].time - traj.samples[i - 1].time;
            const double x = 0.5 * (traj.samples[i].position[0] + traj.samples[i - 1].position[0]);
            const int b = static_cast<int>((x - x_min) * inv_width);
            if (b >= 0 && b < nbins) {
                h.fraction[b] += dt;
                total += dt;
            }
        }
    }
    if (total > 0.0)
        for (auto& f : h.fraction) f /= total;
    return h;
}

}  // namespace wavetrap
