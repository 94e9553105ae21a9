#include "wavetrap/fields.hpp"

#include <algorithm>
#include <cmath>

namespace wavetrap {

FieldState FieldState::make(const ComplexField& psi, const RealField& potential, double time) {
    require(psi.grid.compatible(potential.grid), "psi and potential must share a grid");
    return FieldState{psi, potential, time};
}

CondensateProfile CondensateProfile::zero(const Grid& g) {
    CondensateProfile p;
    p.grid = g;
    p.rho = RealField(g, 0.0);
    p.theta = RealField(g, 0.0);
    for (int a = 0; a < 3; ++a) p.velocity[a] = RealField(g, 0.0);
    p.omega0 = 0.0;
    p.floor_mask.assign(g.size(), 1);
    return p;
}

ComplexField reconstruct(const CondensateProfile& p) {
    ComplexField psi(p.grid);
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = std::sqrt(std::max(p.rho[i], 0.0)) * std::exp(cplx(0.0, p.theta[i]));
    return psi;
}

double default_dt(const FieldState& state) {
    const Grid& g = state.psi.grid;
    double k2max = 0.0;
    for (int a = 0; a < g.dim; ++a) k2max += g.nyquist(a) * g.nyquist(a);
    double umax = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < state.psi.size(); ++i) {
        umax = std::max(umax, std::abs(state.potential[i]));
        rmax = std::max(rmax, std::norm(state.psi[i]));
    }
    return 0.1 / std::max(k2max, umax + 2.0 * rmax);
}

namespace {

void check_finite(double probe, int step) {
    if (!std::isfinite(probe))
        throw NumericalError("GP integration diverged at step " + std::to_string(step));
}

}  // namespace

FieldState evolve_gp(const FieldState& state, double dt, int steps, bool nonlinear) {
    const Grid& g = state.psi.grid;
    require(dt > 0.0, "evolve_gp: dt must be positive");
    double k2max = 0.0;
    for (int a = 0; a < g.dim; ++a) k2max += g.nyquist(a) * g.nyquist(a);
    require(dt * k2max < M_PI, "evolve_gp: dt too large for the spectral step (dt*k_max^2 >= pi)");

    const Fft& fft = fft_for(g);
    FieldState out = state;
    const std::size_t n = g.size();

    std::vector<cplx> kin_phase(n);
    for (std::size_t i = 0; i < n; ++i) kin_phase[i] = std::exp(cplx(0.0, -g.k_squared(i) * dt));

    ComplexField work(g);
    for (int s = 0; s < steps; ++s) {
        // half step of the pointwise potential (+ nonlinear) phase
        double probe = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = out.potential[i] + (nonlinear ? std::norm(out.psi[i]) : 0.0);
            out.psi[i] *= std::exp(cplx(0.0, -0.5 * dt * u));
        }
        // full spectral kinetic step
        fft.forward(out.psi, work);
        for (std::size_t i = 0; i < n; ++i) work[i] *= kin_phase[i];
        fft.inverse(work, out.psi);
        // second half step
        for (std::size_t i = 0; i < n; ++i) {
            const double u = out.potential[i] + (nonlinear ? std::norm(out.psi[i]) : 0.0);
            out.psi[i] *= std::exp(cplx(0.0, -0.5 * dt * u));
            probe += std::norm(out.psi[i]);
        }
        check_finite(probe, s);
        out.time += dt;
    }
    return out;
}

double particle_number(const FieldState& state) {
    double s = 0.0;
    for (const auto& z : state.psi.v) s += std::norm(z);
    return s * state.psi.grid.cell_volume();
}

double energy(const FieldState& state) {
    const Grid& g = state.psi.grid;
    ComplexField c = to_spectral(state.psi);
    double kin = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) kin += g.k_squared(i) * std::norm(c[i]);
    kin *= g.volume();
    double rest = 0.0;
    for (std::size_t i = 0; i < state.psi.size(); ++i) {
        const double r = std::norm(state.psi[i]);
        rest += 0.5 * r * r + state.potential[i] * r;
    }
    rest *= g.cell_volume();
    return kin + rest;
}

// ---------------------------------------------------------------------------
// Ground state

namespace {

/// One Strang step of exp(dtau (Omega + lap - U - |psi|^2)) psi.
/// omega_shift = 0 in particle-number mode (renormalization supplies it).
void imaginary_time_step(ComplexField& psi, const RealField& U, double omega_shift, double dtau,
                         const Fft& fft, const std::vector<double>& kin_decay, ComplexField& work) {
    const std::size_t n = psi.size();
    for (std::size_t i = 0; i < n; ++i)
        psi[i] *= std::exp(0.5 * dtau * (omega_shift - U[i] - std::norm(psi[i])));
    fft.forward(psi, work);
    for (std::size_t i = 0; i < n; ++i) work[i] *= kin_decay[i];
    fft.inverse(work, psi);
    for (std::size_t i = 0; i < n; ++i)
        psi[i] *= std::exp(0.5 * dtau * (omega_shift - U[i] - std::norm(psi[i])));
}

double omega_estimate(const ComplexField& psi, const RealField& U) {
    // Omega = int(|grad psi|^2 + U|psi|^2 + |psi|^4) / N  (stationarity identity)
    const Grid& g = psi.grid;
    ComplexField c = to_spectral(psi);
    double kin = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) kin += g.k_squared(i) * std::norm(c[i]);
    kin *= g.volume();
    double rest = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double r = std::norm(psi[i]);
        rest += U[i] * r + r * r;
        nrm += r;
    }
    rest *= g.cell_volume();
    nrm *= g.cell_volume();
    require(nrm > 0.0, "ground_state: zero norm");
    return (kin + rest) / nrm;
}

ComplexField gaussian_seed(const RealField& U, double number) {
    const Grid& g = U.grid;
    // width from the harmonic curvature at the potential minimum, if usable
    std::size_t imin = 0;
    for (std::size_t i = 1; i < U.size(); ++i)
        if (U[i] < U[imin]) imin = i;
    RealField lapU = laplacian(U);
    double curv = std::max(lapU[imin] / (2.0 * g.dim), 0.0);
    double width = curv > 1e-12 ? std::pow(1.0 / curv, 0.25) : 0.125 * g.extent[0];
    auto x0 = g.position(imin);
    ComplexField psi(g);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        auto x = g.position(i);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double d = x[a] - x0[a];
            r2 += d * d;
        }
        psi[i] = std::exp(-0.5 * r2 / (width * width));
    }
    double nrm = 0.0;
    for (const auto& z : psi.v) nrm += std::norm(z);
    nrm *= g.cell_volume();
    const double scale = std::sqrt(number / nrm);
    for (auto& z : psi.v) z *= scale;
    return psi;
}

void renormalize(ComplexField& psi, double number) {
    double nrm = 0.0;
    for (const auto& z : psi.v) nrm += std::norm(z);
    nrm *= psi.grid.cell_volume();
    require(nrm > 0.0, "ground_state: field collapsed to zero");
    const double s = std::sqrt(number / nrm);
    for (auto& z : psi.v) z *= s;
}

}  // namespace

namespace {

/// Polishes a near-converged state by preconditioned residual descent,
///   psi += eta (c - lap)^{-1} (Omega psi + lap psi - rho psi - U psi),
/// which has no time-splitting bias and converges at a rate set by the
/// Bogoliubov gap rather than by dtau.
bool polish_ground_state(ComplexField& psi, const RealField& U, bool number_mode,
                         double target_value, double tol, int max_iter, double& omega_out) {
    const Grid& g = psi.grid;
    const Fft& fft = fft_for(g);
    ComplexField r(g), work(g);
    double omega = number_mode ? omega_estimate(psi, U) : target_value;

    double umin = U[0], umax = U[0];
    for (double u : U.v) {
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }
    // shift must dominate the spread of U + 2 rho for the step to contract
    double rho_max = 0.0;
    for (const auto& z : psi.v) rho_max = std::max(rho_max, std::norm(z));
    const double c = std::max(std::abs(omega), 1.0) + (umax - umin) + 2.0 * rho_max;

    ComplexField best = psi;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        fft.forward(psi, work);
        for (std::size_t i = 0; i < g.size(); ++i) work[i] *= -g.k_squared(i);
        fft.inverse(work, r);
        double rnorm2 = 0.0, pnorm2 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            r[i] += (omega - U[i] - std::norm(psi[i])) * psi[i];
            rnorm2 += std::norm(r[i]);
            pnorm2 += std::norm(psi[i]);
        }
        const double res = std::sqrt(rnorm2 / pnorm2);
        if (res < best_res) {
            best_res = res;
            best = psi;
        }
        if (res < 2.0 * tol) {
            omega_out = omega;
            return true;
        }
        if (!std::isfinite(res) || res > 10.0 * best_res) break;  // diverging; keep best

        fft.forward(r, work);
        for (std::size_t i = 0; i < g.size(); ++i) work[i] /= c + g.k_squared(i);
        fft.inverse(work, r);
        for (std::size_t i = 0; i < g.size(); ++i) psi[i] += 0.9 * r[i];
        if (number_mode) {
            renormalize(psi, target_value);
            omega = omega_estimate(psi, U);
        }
    }
    psi = best;
    omega_out = number_mode ? omega_estimate(psi, U) : target_value;
    return false;
}

}  // namespace

double ground_state_residual(const ComplexField& psi0, const RealField& potential, double omega0) {
    ComplexField lhs = laplacian(psi0);
    for (std::size_t i = 0; i < psi0.size(); ++i)
        lhs[i] += (omega0 - std::norm(psi0[i]) - potential[i]) * psi0[i];
    const double nrm = l2_norm(psi0);
    return nrm > 0.0 ? l2_norm(lhs) / nrm : 0.0;
}

double continuity_residual(const CondensateProfile& p) {
    RealField div(p.grid, 0.0);
    for (int a = 0; a < p.grid.dim; ++a) {
        RealField flux(p.grid);
        for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = p.rho[i] * p.velocity[a][i];
        RealField d = gradient(flux, a);
        for (std::size_t i = 0; i < div.size(); ++i) div[i] += d[i];
    }
    return l2_norm(div);
}

CondensateProfile ground_state(const RealField& potential, const GroundStateTarget& target,
                               double tol, const GroundStateOptions& opts) {
    require(tol > 0.0, "ground_state: tol must be positive");
    const Grid& g = potential.grid;
    const Fft& fft = fft_for(g);

    const bool number_mode = std::holds_alternative<ParticleNumberTarget>(target);
    const double target_value = number_mode ? std::get<ParticleNumberTarget>(target).value
                                            : std::get<ChemicalPotentialTarget>(target).value;
    require(target_value > 0.0, "ground_state: target must be positive");

    double umin = potential[0], umax = potential[0];
    for (double u : potential.v) {
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }

    ComplexField psi = number_mode ? gaussian_seed(potential, target_value)
                                   : reconstruct(thomas_fermi_profile(potential, target_value));
    if (!number_mode) {
        // avoid an exactly-zero tail: relaxation cannot grow from 0
        for (auto& z : psi.v) z += 1e-6;
    }

    // Imaginary-time splitting is unconditionally stable; the useful step is
    // set by the low-lying energy scale, not by k_max^2.
    const double scale = std::max({umax - umin, target_value, 1.0});
    double dtau = opts.dtau_initial > 0.0 ? opts.dtau_initial : 0.5 / scale;

    std::vector<double> kin_decay(g.size());
    auto refresh_decay = [&] {
        for (std::size_t i = 0; i < g.size(); ++i) kin_decay[i] = std::exp(-g.k_squared(i) * dtau);
    };
    refresh_decay();

    ComplexField work(g);
    const int block = 16;
    double omega_prev = omega_estimate(psi, potential);
    double residual = std::numeric_limits<double>::infinity();
    double residual_prev = std::numeric_limits<double>::infinity();
    const double omega_shift = number_mode ? 0.0 : target_value;

    // Phase 1: imaginary-time relaxation toward the basin of the ground state.
    const double coarse_goal = std::max(100.0 * tol, 1e-4);
    const int coarse_iterations = opts.max_iterations / 2;
    for (int it = 0; it < coarse_iterations; ++it) {
        for (int s = 0; s < block; ++s) {
            imaginary_time_step(psi, potential, omega_shift, dtau, fft, kin_decay, work);
            if (number_mode) renormalize(psi, target_value);
        }
        const double omega_now = number_mode ? omega_estimate(psi, potential) : target_value;
        const double drift =
            std::abs(omega_now - omega_prev) / (std::abs(omega_now) * block * dtau);
        omega_prev = omega_now;
        residual = ground_state_residual(psi, potential, omega_now);
        const bool settled = !number_mode || drift < 10.0 * tol;
        if (settled && residual < coarse_goal) break;
        if (residual > 0.998 * residual_prev) {
            // stalled on the splitting-bias floor; refine the step
            if (dtau <= opts.dtau_min) break;
            dtau = std::max(0.5 * dtau, opts.dtau_min);
            refresh_decay();
            residual_prev = std::numeric_limits<double>::infinity();
        } else {
            residual_prev = residual;
        }
    }

    // Phase 2: bias-free residual descent down to the requested accuracy.
    double omega_final = omega_prev;
    polish_ground_state(psi, potential, number_mode, target_value, tol, opts.max_iterations,
                        omega_final);
    residual = ground_state_residual(psi, potential, omega_final);
    if (residual < 10.0 * tol) {
        CondensateProfile p = madelung_decompose(psi);
        p.omega0 = omega_final;
        return p;
    }
    throw NumericalError("ground_state: no convergence, last residual " + std::to_string(residual));
}

CondensateProfile thomas_fermi_profile(const RealField& potential, double omega0) {
    const Grid& g = potential.grid;
    double umin = potential[0];
    for (double u : potential.v) umin = std::min(umin, u);
    if (omega0 <= umin)
        throw ValidationError("thomas_fermi_profile: omega0 <= min(U), empty condensate");
    CondensateProfile p = CondensateProfile::zero(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        p.rho[i] = std::max(0.0, omega0 - potential[i]);
        p.floor_mask[i] = p.rho[i] > 0.0 ? 0 : 1;
    }
    p.omega0 = omega0;
    return p;
}

CondensateProfile madelung_decompose(const ComplexField& psi0) {
    const Grid& g = psi0.grid;
    CondensateProfile p;
    p.grid = g;
    p.rho = abs2(psi0);
    p.theta = RealField(g, 0.0);
    p.floor_mask.assign(g.size(), 0);

    double rmax = 0.0;
    for (double r : p.rho.v) rmax = std::max(rmax, r);
    const double floor = 1e-12 * rmax;

    // raw phase, zeroed under the floor
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (p.rho[i] > floor) {
            p.theta[i] = std::arg(psi0[i]);
        } else {
            p.floor_mask[i] = 1;
        }
    }

    // axis-sequential unwrap from the grid origin (assumes no vortices)
    auto unwrap_line = [&](std::array<int, 3> start, int axis) {
        auto prev_idx = start;
        for (int i = 1; i < g.npts[axis]; ++i) {
            auto idx = start;
            idx[axis] = i;
            const std::size_t cur = g.index(idx), prv = g.index(prev_idx);
            if (!p.floor_mask[cur] && !p.floor_mask[prv]) {
                double d = p.theta[cur] - p.theta[prv];
                d -= 2.0 * M_PI * std::round(d / (2.0 * M_PI));
                p.theta[cur] = p.theta[prv] + d;
            }
            prev_idx = idx;
        }
    };
    unwrap_line({0, 0, 0}, 0);
    if (g.dim >= 2)
        for (int i = 0; i < g.npts[0]; ++i) unwrap_line({i, 0, 0}, 1);
    if (g.dim >= 3)
        for (int i = 0; i < g.npts[0]; ++i)
            for (int j = 0; j < g.npts[1]; ++j) unwrap_line({i, j, 0}, 2);

    // u = 2 grad(theta) via the gauge-safe form 2 Im(psi* grad psi)/rho,
    // which tolerates winding that the pointwise theta cannot represent
    for (int a = 0; a < 3; ++a) p.velocity[a] = RealField(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        ComplexField dpsi = gradient(psi0, a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (p.floor_mask[i]) continue;
            p.velocity[a][i] = 2.0 * std::imag(std::conj(psi0[i]) * dpsi[i]) / p.rho[i];
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Linearized evolution

namespace {

struct LinearizedCoefficients {
    RealField rho;
    std::array<RealField, 3> gradlog_rho;  // grad(rho)/rho, masked below floor
    std::array<RealField, 3> velocity;
    bool uniform = true;  // no advection or gradient terms anywhere
};

LinearizedCoefficients make_coefficients(const CondensateProfile& bg) {
    LinearizedCoefficients c;
    const Grid& g = bg.grid;
    c.rho = bg.rho;
    double rmax = 0.0;
    for (double r : bg.rho.v) rmax = std::max(rmax, r);
    const double floor = 1e-8 * std::max(rmax, 1e-300);
    for (int a = 0; a < 3; ++a) {
        c.gradlog_rho[a] = RealField(g, 0.0);
        c.velocity[a] = bg.velocity[a];
    }
    for (int a = 0; a < g.dim; ++a) {
        RealField dr = gradient(bg.rho, a);
        for (std::size_t i = 0; i < g.size(); ++i)
            c.gradlog_rho[a][i] = bg.rho[i] > floor ? dr[i] / bg.rho[i] : 0.0;
    }
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (c.gradlog_rho[a][i] != 0.0 || c.velocity[a][i] != 0.0) c.uniform = false;
    return c;
}

/// Right side of the local (non-Laplacian) part of the (a,b) system.
void local_rhs(const LinearizedCoefficients& c, const RealField& a, const RealField& b,
               bool keep_nonlinear, RealField& da, RealField& db) {
    const Grid& g = a.grid;
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        da[i] = 0.0;
        db[i] = -2.0 * c.rho[i] * a[i];
    }
    if (!c.uniform) {
        for (int ax = 0; ax < g.dim; ++ax) {
            RealField ga = gradient(a, ax);
            RealField gb = gradient(b, ax);
            for (std::size_t i = 0; i < n; ++i) {
                da[i] += -c.velocity[ax][i] * ga[i] - c.gradlog_rho[ax][i] * gb[i];
                db[i] += -c.velocity[ax][i] * gb[i] + c.gradlog_rho[ax][i] * ga[i];
            }
        }
    }
    if (keep_nonlinear) {
        for (std::size_t i = 0; i < n; ++i) {
            const double a2b2 = a[i] * a[i] + b[i] * b[i];
            da[i] += c.rho[i] * (2.0 * a[i] * b[i] + b[i] * a2b2);
            db[i] -= c.rho[i] * (3.0 * a[i] * a[i] + b[i] * b[i] + a[i] * a2b2);
        }
    }
}

}  // namespace

PerturbationState evolve_linearized(const PerturbationState& pert, double dt, int steps,
                                    bool keep_nonlinear) {
    require(pert.background != nullptr, "evolve_linearized: background required");
    const CondensateProfile& bg = *pert.background;
    const Grid& g = bg.grid;
    require(pert.re_part.grid.compatible(g), "perturbation grid mismatch");

    LinearizedCoefficients coef = make_coefficients(bg);
    const Fft& fft = fft_for(g);
    const std::size_t n = g.size();

    std::vector<cplx> kin_phase(n);
    for (std::size_t i = 0; i < n; ++i) kin_phase[i] = std::exp(cplx(0.0, -g.k_squared(i) * dt));

    PerturbationState out = pert;
    RealField da(g), db(g), a1(g), b1(g), da2(g), db2(g);
    ComplexField phi(g), work(g);

    auto half_local = [&](RealField& a, RealField& b) {
        const double h = 0.5 * dt;
        if (coef.uniform && !keep_nonlinear) {
            // exact shear: a fixed, b -= 2 rho a h
            for (std::size_t i = 0; i < n; ++i) b[i] -= 2.0 * coef.rho[i] * a[i] * h;
            return;
        }
        // Heun step (second order, consistent with the Strang composition)
        local_rhs(coef, a, b, keep_nonlinear, da, db);
        for (std::size_t i = 0; i < n; ++i) {
            a1[i] = a[i] + h * da[i];
            b1[i] = b[i] + h * db[i];
        }
        local_rhs(coef, a1, b1, keep_nonlinear, da2, db2);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] += 0.5 * h * (da[i] + da2[i]);
            b[i] += 0.5 * h * (db[i] + db2[i]);
        }
    };

    for (int s = 0; s < steps; ++s) {
        half_local(out.re_part, out.im_part);
        // free Schroedinger rotation of phi = a + ib
        for (std::size_t i = 0; i < n; ++i) phi[i] = cplx(out.re_part[i], out.im_part[i]);
        fft.forward(phi, work);
        for (std::size_t i = 0; i < n; ++i) work[i] *= kin_phase[i];
        fft.inverse(work, phi);
        for (std::size_t i = 0; i < n; ++i) {
            out.re_part[i] = phi[i].real();
            out.im_part[i] = phi[i].imag();
        }
        half_local(out.re_part, out.im_part);
        out.time += dt;

        double amax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            amax = std::max(amax, out.re_part[i] * out.re_part[i] + out.im_part[i] * out.im_part[i]);
        amax = std::sqrt(amax);
        if (!std::isfinite(amax))
            throw NumericalError("evolve_linearized diverged at step " + std::to_string(s));
        if (amax > out.linearity_threshold &&
            (out.warnings.empty() || out.warnings.back().time < out.time - 0.5))
            out.warnings.push_back({out.time, amax});
    }
    return out;
}

}  // namespace wavetrap
