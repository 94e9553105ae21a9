#include "wavetrap/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wavetrap/phase_space_ops.hpp"

namespace wavetrap {

double IsotropicSpectrum::value(double k) const {
    if (k_shells.empty() || k < k_shells.front() || k > k_shells.back()) return 0.0;
    auto it = std::upper_bound(k_shells.begin(), k_shells.end(), k);
    if (it == k_shells.begin()) return n_values.front();
    if (it == k_shells.end()) return n_values.back();
    const std::size_t j = static_cast<std::size_t>(it - k_shells.begin());
    const double t = (k - k_shells[j - 1]) / (k_shells[j] - k_shells[j - 1]);
    return (1.0 - t) * n_values[j - 1] + t * n_values[j];
}

void IsotropicSpectrum::validate() const {
    require(k_shells.size() == n_values.size() && !k_shells.empty(),
            "isotropic spectrum: shell/value size mismatch");
    require(k_shells.front() > 0.0, "isotropic spectrum: shells must exclude k = 0");
    for (std::size_t i = 1; i < k_shells.size(); ++i)
        require(k_shells[i] > k_shells[i - 1], "isotropic spectrum: shells must increase");
    for (double n : n_values) require(n >= 0.0, "isotropic spectrum: negative occupation");
}

OmegaLaw make_omega_law(const MediumSample& m, const DispersionModel& model) {
    MediumSample local = m;  // capture by value: position-local law
    DispersionModel mod = model;
    return [local, mod](double k) { return frequency({k, 0, 0}, local, mod); };
}

namespace {

double gauss_delta(double x, double sigma) {
    return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
}

double ball_volume(int dim, double r) {
    return dim == 2 ? M_PI * r * r : 4.0 * M_PI * r * r * r / 3.0;
}

double sphere_area(int dim) { return dim == 2 ? 2.0 * M_PI : 4.0 * M_PI; }

/// Uniform point in the d-ball of radius r.
Vec3 sample_ball(std::mt19937_64& rng, int dim, double r) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vec3 v{0, 0, 0};
    double n2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        v[a] = gauss(rng);
        n2 += v[a] * v[a];
    }
    const double rad = r * std::pow(uni(rng), 1.0 / dim);
    const double scale = rad / std::sqrt(std::max(n2, 1e-300));
    for (int a = 0; a < dim; ++a) v[a] *= scale;
    return v;
}

double auto_delta_width(const IsotropicSpectrum& spec, const OmegaLaw& omega) {
    const double w_lo = omega(spec.k_shells.front());
    const double w_hi = omega(spec.k_shells.back());
    return 2.0 * (w_hi - w_lo) / static_cast<double>(spec.k_shells.size());
}

}  // namespace

ShellRates collision_4wave(const IsotropicSpectrum& spec, const OmegaLaw& omega,
                           const CollisionConfig& cfg) {
    spec.validate();
    require(spec.dim == 2 || spec.dim == 3,
            "collision_4wave: dim must be 2 or 3 (1D resonances are trivial)");
    require(cfg.mc_samples > 0, "collision_4wave: mc_samples must be positive");
    const double sigma = cfg.delta_width > 0.0 ? cfg.delta_width : auto_delta_width(spec, omega);
    const double kmax = spec.k_shells.back();
    const double vol2 = ball_volume(spec.dim, kmax) * ball_volume(spec.dim, kmax);

    ShellRates out;
    out.rate.resize(spec.k_shells.size());
    out.std_error.resize(spec.k_shells.size());

    for (std::size_t s = 0; s < spec.k_shells.size(); ++s) {
        const double k = spec.k_shells[s];
        const double nk = spec.n_values[s];
        const double wk = omega(k);
        std::mt19937_64 rng(cfg.seed + 7919 * s);
        double acc = 0.0, acc2 = 0.0;
        for (long m = 0; m < cfg.mc_samples; ++m) {
            const Vec3 k1 = sample_ball(rng, spec.dim, kmax);
            const Vec3 k2 = sample_ball(rng, spec.dim, kmax);
            Vec3 k3{0, 0, 0};
            k3[0] = k + k1[0] - k2[0];  // shell wavevector along axis 0
            for (int a = 1; a < spec.dim; ++a) k3[a] = k1[a] - k2[a];
            const double m1 = norm(k1), m2 = norm(k2), m3 = norm(k3);
            const double n1 = spec.value(m1), n2 = spec.value(m2), n3 = spec.value(m3);
            // n n1 n2 n3 (1/n + 1/n1 - 1/n2 - 1/n3), in product form
            const double bracket = n1 * n2 * n3 + nk * n2 * n3 - nk * n1 * n3 - nk * n1 * n2;
            double sample = 0.0;
            if (bracket != 0.0) {
                const double dw = wk + omega(m1) - omega(m2) - omega(m3);
                sample = bracket * gauss_delta(dw, sigma);
            }
            acc += sample;
            acc2 += sample * sample;
        }
        const double mean = acc / cfg.mc_samples;
        const double var = std::max(acc2 / cfg.mc_samples - mean * mean, 0.0);
        out.rate[s] = cfg.coupling * vol2 * mean;
        out.std_error[s] = cfg.coupling * vol2 * std::sqrt(var / cfg.mc_samples);
        if (std::abs(out.rate[s]) > 0.0 && out.std_error[s] > 0.2 * std::abs(out.rate[s]))
            out.insufficient_samples = true;
    }
    return out;
}

ShellRates collision_3wave(const IsotropicSpectrum& spec, const OmegaLaw& omega,
                           const CollisionConfig& cfg) {
    spec.validate();
    require(spec.dim == 2 || spec.dim == 3, "collision_3wave: dim must be 2 or 3");
    const double sigma = cfg.delta_width > 0.0 ? cfg.delta_width : auto_delta_width(spec, omega);
    const double kmax = spec.k_shells.back();
    const double vol = ball_volume(spec.dim, kmax);

    auto vertex2 = [&](double k, double k1, double k2) {
        if (cfg.vertex_model == VertexModel::UserTable) {
            require(static_cast<bool>(cfg.vertex_table), "collision_3wave: vertex table missing");
            return cfg.vertex_table(k, k1, k2);
        }
        return cfg.vertex_constant * k * k1 * k2;
    };

    ShellRates out;
    out.rate.resize(spec.k_shells.size());
    out.std_error.resize(spec.k_shells.size());

    for (std::size_t s = 0; s < spec.k_shells.size(); ++s) {
        const double k = spec.k_shells[s];
        const double nk = spec.n_values[s];
        const double wk = omega(k);
        std::mt19937_64 rng(cfg.seed + 104729 * s);
        double acc = 0.0, acc2 = 0.0;
        for (long m = 0; m < cfg.mc_samples; ++m) {
            // decay term: k -> k1 + k2, k2 = k - k1
            const Vec3 q1 = sample_ball(rng, spec.dim, kmax);
            Vec3 q2{0, 0, 0};
            q2[0] = k - q1[0];
            for (int a = 1; a < spec.dim; ++a) q2[a] = -q1[a];
            const double a1 = norm(q1), a2 = norm(q2);
            const double na1 = spec.value(a1), na2 = spec.value(a2);
            double sample = 0.0;
            {
                const double f = na1 * na2 - nk * (na1 + na2);
                if (f != 0.0)
                    sample += M_PI * vertex2(k, a1, a2) * f *
                              gauss_delta(wk - omega(a1) - omega(a2), sigma);
            }
            // absorption term: k1 -> k + k2, k1 = k + k2
            const Vec3 p2 = sample_ball(rng, spec.dim, kmax);
            Vec3 p1{0, 0, 0};
            p1[0] = k + p2[0];
            for (int a = 1; a < spec.dim; ++a) p1[a] = p2[a];
            const double b1 = norm(p1), b2 = norm(p2);
            const double nb1 = spec.value(b1), nb2 = spec.value(b2);
            {
                const double f = nk * nb2 - nb1 * (nk + nb2);
                if (f != 0.0)
                    sample -= 2.0 * M_PI * vertex2(b1, k, b2) * f *
                              gauss_delta(omega(b1) - wk - omega(b2), sigma);
            }
            acc += sample;
            acc2 += sample * sample;
        }
        const double mean = acc / cfg.mc_samples;
        const double var = std::max(acc2 / cfg.mc_samples - mean * mean, 0.0);
        out.rate[s] = vol * mean;
        out.std_error[s] = vol * std::sqrt(var / cfg.mc_samples);
        if (std::abs(out.rate[s]) > 0.0 && out.std_error[s] > 0.2 * std::abs(out.rate[s]))
            out.insufficient_samples = true;
    }
    return out;
}

ConservationResidual conservation_residuals(const IsotropicSpectrum& spec, const ShellRates& rates,
                                            const OmegaLaw& omega) {
    spec.validate();
    require(rates.rate.size() == spec.k_shells.size(), "conservation_residuals: size mismatch");
    const double sd = sphere_area(spec.dim);
    ConservationResidual out;
    double dn_var = 0.0, de_var = 0.0;
    const std::size_t n = spec.k_shells.size();
    for (std::size_t i = 0; i < n; ++i) {
        // trapezoidal weight
        double w = 0.0;
        if (i > 0) w += 0.5 * (spec.k_shells[i] - spec.k_shells[i - 1]);
        if (i + 1 < n) w += 0.5 * (spec.k_shells[i + 1] - spec.k_shells[i]);
        const double k = spec.k_shells[i];
        const double measure = w * sd * std::pow(k, spec.dim - 1);
        out.dn_dt += measure * rates.rate[i];
        out.de_dt += measure * omega(k) * rates.rate[i];
        dn_var += measure * measure * rates.std_error[i] * rates.std_error[i];
        de_var += measure * measure * omega(k) * omega(k) * rates.std_error[i] * rates.std_error[i];
    }
    out.dn_err = std::sqrt(dn_var);
    out.de_err = std::sqrt(de_var);
    return out;
}

// ---------------------------------------------------------------------------
// Master equation

std::vector<cplx> master_rhs(const SlowAmplitude& a, const RealField& potential,
                             const GaborKernel& kernel, bool include_cubic) {
    const auto& psg = *a.psg;
    require(potential.grid.compatible(psg.field_grid), "master_rhs: potential grid mismatch");
    const KBand band = contiguous_band(psg);
    const std::size_t nx = psg.nx(), nk = psg.nk();

    std::vector<double> u(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) u[ix] = potential[psg.x_flat[ix]];
    const std::vector<double> du = ps_grad_potential(psg, u);

    std::vector<cplx> dxa(psg.size()), dka(psg.size()), out(psg.size());
    ps_grad_x(psg, a.values, dxa);
    ps_grad_k(psg, band, a.values, dka);

    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = psg.x_pos[ix][0];
        for (std::size_t ik = 0; ik < nk; ++ik) {
            const std::size_t n = psg.node(ix, ik);
            const double k = band.k(static_cast<int>(ik));
            const double w_local = k * k + u[ix] - x * du[ix];
            out[n] = cplx(0.0, -w_local) * a.values[n] - 2.0 * k * dxa[n] + du[ix] * dka[n];
        }
    }

    if (include_cubic) {
        // window-convolved cubic term via the band's conjugate lattice
        const int nky = static_cast<int>(nk);
        const double dy = 2.0 * M_PI / (nky * band.dk);
        std::vector<double> fwin(nky);
        for (int j = 0; j < nky; ++j) {
            const double y = (j - nky / 2) * dy;
            fwin[j] = kernel.window(std::abs(y), 1);
        }
        std::vector<cplx> eminus(static_cast<std::size_t>(nky) * nk);  // e^{-i k_i y_j}
        for (int j = 0; j < nky; ++j) {
            const double y = (j - nky / 2) * dy;
            for (std::size_t ik = 0; ik < nk; ++ik)
                eminus[j * nk + ik] = std::exp(cplx(0.0, -band.k(static_cast<int>(ik)) * y));
        }
        std::vector<cplx> h(nky);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (int j = 0; j < nky; ++j) {
                cplx s = 0.0;
                for (std::size_t ik = 0; ik < nk; ++ik)
                    s += a.values[psg.node(ix, ik)] * eminus[j * nk + ik];
                h[j] = s * band.dk;
            }
            for (std::size_t ik = 0; ik < nk; ++ik) {
                cplx s = 0.0;
                for (int j = 0; j < nky; ++j)
                    s += fwin[j] * std::norm(h[j]) * h[j] * std::conj(eminus[j * nk + ik]);
                out[psg.node(ix, ik)] += cplx(0.0, -1.0) * s * dy;
            }
        }
    }
    return out;
}

namespace {

/// Homogeneous limit: members are Fourier coefficients on the full lattice;
/// the window becomes a delta and the dynamics is the periodic-box GP flow.
SlowAmplitude evolve_member_homogeneous(const SlowAmplitude& a, const RealField& potential,
                                        double dt, int steps, bool include_cubic) {
    const Grid& g = a.psg->field_grid;
    require(a.psg->nk() == g.size(), "homogeneous master evolution needs the full k lattice");
    ComplexField coeffs(g);
    for (std::size_t ik = 0; ik < a.psg->nk(); ++ik)
        coeffs[g.index(a.psg->k_index[ik])] = a.values[ik];
    FieldState st = FieldState::make(from_spectral(coeffs), potential, a.time);
    st = evolve_gp(st, dt, steps, include_cubic);
    ComplexField back = to_spectral(st.psi);
    SlowAmplitude out = a;
    for (std::size_t ik = 0; ik < a.psg->nk(); ++ik)
        out.values[ik] = back[g.index(a.psg->k_index[ik])];
    out.time = st.time;
    return out;
}

}  // namespace

MasterEnsemble evolve_master(const MasterEnsemble& ens, const RealField& potential,
                             const GaborKernel& kernel, double dt, int steps,
                             const MasterOptions& opts) {
    require(!ens.members.empty(), "evolve_master: empty ensemble");
    MasterEnsemble out;
    out.rng_seed = ens.rng_seed;
    out.members.reserve(ens.members.size());

    const bool homogeneous = ens.members.front().psg->nx() == 1;
    for (std::size_t m = 0; m < ens.members.size(); ++m) {
        const auto& a0 = ens.members[m];
        if (homogeneous) {
            out.members.push_back(
                evolve_member_homogeneous(a0, potential, dt, steps, opts.include_cubic));
        } else {
            SlowAmplitude a = a0;
            std::vector<cplx> k1, k2, k3, k4;
            std::vector<cplx> tmp(a.values.size());
            for (int s = 0; s < steps; ++s) {
                k1 = master_rhs(a, potential, kernel, opts.include_cubic);
                SlowAmplitude stage = a;
                for (std::size_t i = 0; i < tmp.size(); ++i)
                    stage.values[i] = a.values[i] + 0.5 * dt * k1[i];
                k2 = master_rhs(stage, potential, kernel, opts.include_cubic);
                for (std::size_t i = 0; i < tmp.size(); ++i)
                    stage.values[i] = a.values[i] + 0.5 * dt * k2[i];
                k3 = master_rhs(stage, potential, kernel, opts.include_cubic);
                for (std::size_t i = 0; i < tmp.size(); ++i)
                    stage.values[i] = a.values[i] + dt * k3[i];
                k4 = master_rhs(stage, potential, kernel, opts.include_cubic);
                double amax = 0.0;
                for (std::size_t i = 0; i < tmp.size(); ++i) {
                    a.values[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    amax = std::max(amax, std::abs(a.values[i]));
                }
                if (!std::isfinite(amax))
                    throw NumericalError("evolve_master diverged in member " + std::to_string(m) +
                                         " at step " + std::to_string(s));
                a.time += dt;
            }
            out.members.push_back(std::move(a));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase-space kinetic solver

namespace {

/// Cubic interpolation of n on the (x periodic, k clamped-to-zero) node
/// lattice of a 1D phase-space grid.
double sample_phase_space(const PhaseSpaceSpectrum& n, const KBand& band, double x, double k) {
    const auto& psg = *n.psg;
    const int nx = static_cast<int>(psg.nx());
    const int nk = band.n;
    const double hx = psg.dx_cell();
    const double x0 = psg.x_pos[0][0];

    double ux = (x - x0) / hx;
    ux -= std::floor(ux / nx) * nx;
    const int jx = static_cast<int>(std::floor(ux));
    const double tx = ux - jx;

    const double uk = (k - band.k0) / band.dk;
    const int jk = static_cast<int>(std::floor(uk));
    const double tk = uk - jk;

    auto val = [&](int ix, int ik) -> double {
        if (ik < 0 || ik >= nk) return 0.0;  // outside the band
        const int wx = ((ix % nx) + nx) % nx;
        return n.values[psg.node(static_cast<std::size_t>(wx), static_cast<std::size_t>(ik))];
    };
    auto cubic = [](double t, const double v[4]) {
        const double t2 = t * t, t3 = t2 * t;
        return 0.5 * ((-t3 + 2 * t2 - t) * v[0] + (3 * t3 - 5 * t2 + 2) * v[1] +
                      (-3 * t3 + 4 * t2 + t) * v[2] + (t3 - t2) * v[3]);
    };
    double rows[4];
    for (int r = 0; r < 4; ++r) {
        double cols[4];
        for (int c = 0; c < 4; ++c) cols[c] = val(jx - 1 + r, jk - 1 + c);
        rows[r] = cubic(tk, cols);
    }
    return cubic(tx, rows);
}

}  // namespace

PhaseSpaceSpectrum rj_phase_space(const std::shared_ptr<const PhaseSpaceGrid>& psg,
                                  const Medium& medium, const DispersionModel& model,
                                  const RJParams& rj) {
    PhaseSpaceSpectrum n;
    n.psg = psg;
    n.values.resize(psg->size());
    for (std::size_t ix = 0; ix < psg->nx(); ++ix) {
        const MediumSample m = medium.sample(psg->x_pos[ix]);
        for (std::size_t ik = 0; ik < psg->nk(); ++ik) {
            const double w = frequency(psg->k_vec[ik], m, model);
            require(w > rj.chem_potential, "rj_phase_space: mu must lie below the band");
            n.values[psg->node(ix, ik)] = rj.temperature / (w - rj.chem_potential);
        }
    }
    return n;
}

PhaseSpaceSpectrum kinetic_evolve(const PhaseSpaceSpectrum& spec, const Medium& medium,
                                  const DispersionModel& model, const CollisionConfig& cfg,
                                  double dt, int steps, const KineticOptions& opts,
                                  KineticLog* log) {
    const auto& psg = *spec.psg;
    const KBand band = contiguous_band(psg);
    PhaseSpaceSpectrum n = spec;
    const std::size_t nx = psg.nx(), nk = psg.nk();

    for (int s = 0; s < steps; ++s) {
        // (i) semi-Lagrangian advection: backward ray step from each node
        PhaseSpaceSpectrum adv = n;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t ik = 0; ik < nk; ++ik) {
                const double k = band.k(static_cast<int>(ik));
                RayState init;
                init.position = psg.x_pos[ix];
                init.wavevector = {k, 0, 0};
                RayOptions ropt;
                ropt.record_stride = 1;
                auto traj = integrate_ray(init, medium, model, -dt, -dt, ropt);
                const auto& foot = traj.samples.back();
                adv.values[psg.node(ix, ik)] =
                    sample_phase_space(n, band, foot.position[0], foot.wavevector[0]);
            }
        }
        n = adv;
        n.time += dt;

        if (log) log->total_waveaction.push_back(n.total());

        // (ii) local collision source per x node
        if (!opts.advection_only) {
            long clamped = 0;
            int three_wave_nodes = 0;
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const MediumSample m = medium.sample(psg.x_pos[ix]);
                const OmegaLaw law = make_omega_law(m, model);

                // isotropic shells from the +/- k average
                std::vector<double> shells, values;
                for (std::size_t ik = 0; ik < nk; ++ik) {
                    const double k = band.k(static_cast<int>(ik));
                    if (k <= 0.0) continue;
                    shells.push_back(k);
                    const double n_plus = n.values[psg.node(ix, ik)];
                    double n_avg = n_plus;
                    // locate -k on the band if present
                    const double um = (-k - band.k0) / band.dk;
                    const int im = static_cast<int>(std::lround(um));
                    if (im >= 0 && im < band.n && std::abs(band.k(im) + k) < 1e-9)
                        n_avg = 0.5 * (n_plus + n.values[psg.node(ix, static_cast<std::size_t>(im))]);
                    values.push_back(std::max(n_avg, 0.0));
                }
                if (shells.size() < 4) continue;

                IsotropicSpectrum iso;
                iso.k_shells = shells;
                iso.n_values = values;
                iso.dim = opts.collision_dim;
                iso.position = psg.x_pos[ix][0];

                // characteristic scales for the regime decision
                double ntot = 0.0, ksum = 0.0;
                for (std::size_t j = 0; j < shells.size(); ++j) {
                    ntot += values[j];
                    ksum += shells[j] * values[j];
                }
                if (ntot <= 0.0) continue;
                const double k_char = ksum / ntot;
                const double n_char = iso.value(k_char);
                const Regime regime =
                    regime_classify(k_char, m.rho, n_char, opts.collision_dim);
                if (regime == Regime::ThreeWave) ++three_wave_nodes;

                ShellRates rates = (regime == Regime::ThreeWave) ? collision_3wave(iso, law, cfg)
                                                                 : collision_4wave(iso, law, cfg);

                for (std::size_t j = 0, ik = 0; ik < nk; ++ik) {
                    const double k = band.k(static_cast<int>(ik));
                    if (k <= 0.0) continue;
                    const double dn = dt * rates.rate[j];
                    auto apply = [&](std::size_t node) {
                        n.values[node] += dn;
                        if (n.values[node] < 0.0) {
                            n.values[node] = 0.0;
                            ++clamped;
                        }
                    };
                    apply(psg.node(ix, ik));
                    const double um = (-k - band.k0) / band.dk;
                    const int im = static_cast<int>(std::lround(um));
                    if (im >= 0 && im < band.n && std::abs(band.k(im) + k) < 1e-9)
                        apply(psg.node(ix, static_cast<std::size_t>(im)));
                    ++j;
                }
            }
            if (log) {
                log->clamped_nodes += clamped;
                log->regime_three_wave.push_back(three_wave_nodes);
                if (clamped > static_cast<long>(psg.size() / 100))
                    log->warnings.push_back("step " + std::to_string(s) + ": clamped " +
                                            std::to_string(clamped) + " nodes");
            }
        }
    }
    return n;
}

}  // namespace wavetrap
