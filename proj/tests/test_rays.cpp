// Ray transport: Hamiltonian structure, reflections, residence statistics.
//
// The harmonic Ehrenfest system has the closed-form orbit
//   x(t) = x0 cos 2t + k0 sin 2t,  k(t) = k0 cos 2t - x0 sin 2t,
// used as the exact reference throughout.

#include <doctest.h>

#include <cmath>
#include <memory>

#include "wavetrap/rays.hpp"

using namespace wavetrap;

namespace {

FunctionMedium harmonic_medium() {
    return FunctionMedium([](const Vec3& x) {
        MediumSample m;
        m.potential = x[0] * x[0];
        m.grad_potential = {2.0 * x[0], 0.0, 0.0};
        return m;
    });
}

RealField harmonic_potential(const Grid& g) {
    RealField U(g);
    for (std::size_t i = 0; i < U.size(); ++i) {
        const double x = g.position(i)[0];
        U[i] = x * x;
    }
    return U;
}

}  // namespace

TEST_CASE("free ray moves on a straight line at 2k") {
    FunctionMedium vacuum([](const Vec3&) { return MediumSample{}; });
    RayState init;
    init.position = {0.3, 0, 0};
    init.wavevector = {1.2, 0, 0};
    auto traj = integrate_ray(init, vacuum, DispersionModel::ehrenfest(), 2.0, 1e-3);
    const auto& last = traj.samples.back();
    CHECK(last.position[0] == doctest::Approx(0.3 + 2.0 * 1.2 * 2.0).epsilon(1e-12));
    CHECK(last.wavevector[0] == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("harmonic Ehrenfest orbit matches the closed form") {
    auto medium = harmonic_medium();
    RayState init;
    init.position = {0.0, 0, 0};
    init.wavevector = {2.0, 0, 0};
    auto traj = integrate_ray(init, medium, DispersionModel::ehrenfest(), M_PI, 1e-3);
    for (std::size_t i = 0; i < traj.samples.size(); i += 100) {
        const auto& s = traj.samples[i];
        CHECK(std::abs(s.position[0] - 2.0 * std::sin(2.0 * s.time)) < 1e-8);
        CHECK(std::abs(s.wavevector[0] - 2.0 * std::cos(2.0 * s.time)) < 1e-8);
    }
    CHECK(traj.max_omega_drift < 1e-10);
}

TEST_CASE("frequency is conserved to 1e-6 over ten trap periods") {
    auto medium = harmonic_medium();
    RayState init;
    init.position = {0.7, 0, 0};
    init.wavevector = {1.9, 0, 0};
    auto traj = integrate_ray(init, medium, DispersionModel::ehrenfest(), 10.0 * M_PI, 1e-3);
    CHECK(traj.max_omega_drift < 1e-6);
}

TEST_CASE("time reversal returns to the initial state") {
    auto medium = harmonic_medium();
    RayState init;
    init.position = {0.4, 0, 0};
    init.wavevector = {1.1, 0, 0};
    auto fwd = integrate_ray(init, medium, DispersionModel::ehrenfest(), 2.0, 1e-3);
    RayState turn = fwd.samples.back();
    auto bwd = integrate_ray(turn, medium, DispersionModel::ehrenfest(), 0.0, -1e-3);
    const auto& end = bwd.samples.back();
    const double dist = std::hypot(end.position[0] - init.position[0],
                                   end.wavevector[0] - init.wavevector[0]);
    CHECK(dist / std::hypot(init.position[0], init.wavevector[0]) < 1e-6);
}

TEST_CASE("unified trajectories with rho = 0 are bitwise ehrenfest") {
    Grid g = Grid::make1d(256, 16.0);
    GridMedium medium(harmonic_potential(g));  // zero condensate
    RayState init;
    init.position = {0.5, 0, 0};
    init.wavevector = {1.5, 0, 0};
    auto ehr = integrate_ray(init, medium, DispersionModel::ehrenfest(), 3.0, 1e-3);
    auto uni = integrate_ray(init, medium, DispersionModel::unified(), 3.0, 1e-3);
    REQUIRE(ehr.samples.size() == uni.samples.size());
    for (std::size_t i = 0; i < ehr.samples.size(); ++i) {
        CHECK(ehr.samples[i].position[0] == uni.samples[i].position[0]);
        CHECK(ehr.samples[i].wavevector[0] == uni.samples[i].wavevector[0]);
    }
}

TEST_CASE("phase-space area of a small bundle is conserved") {
    auto medium = harmonic_medium();
    const double eps = 1e-3;
    std::array<RayState, 4> corners;
    const double x0 = 0.8, k0 = 1.3;
    const double dx[4] = {0, eps, eps, 0};
    const double dk[4] = {0, 0, eps, eps};
    std::array<RayTrajectory, 4> trajs;
    for (int c = 0; c < 4; ++c) {
        corners[c].position = {x0 + dx[c], 0, 0};
        corners[c].wavevector = {k0 + dk[c], 0, 0};
        trajs[c] = integrate_ray(corners[c], medium, DispersionModel::ehrenfest(), M_PI, 5e-4);
    }
    auto area = [&](std::size_t i) {
        double a = 0.0;
        for (int c = 0; c < 4; ++c) {
            const auto& p = trajs[c].samples[i];
            const auto& q = trajs[(c + 1) % 4].samples[i];
            a += p.position[0] * q.wavevector[0] - q.position[0] * p.wavevector[0];
        }
        return 0.5 * std::abs(a);
    };
    const double a0 = area(0);
    for (std::size_t i = 0; i < trajs[0].samples.size(); i += 200)
        CHECK(std::abs(area(i) - a0) / a0 < 1e-4);
}

TEST_CASE("harmonic turning points satisfy U(r_R) = k_max^2") {
    auto medium = harmonic_medium();
    RayState init;
    init.position = {0.0, 0, 0};
    init.wavevector = {2.0, 0, 0};
    auto traj = integrate_ray(init, medium, DispersionModel::ehrenfest(), 2.0 * M_PI, 1e-3);
    auto events = find_reflections(traj, medium, DispersionModel::ehrenfest());
    REQUIRE(events.size() == 4);  // two turning points per period
    for (const auto& ev : events) {
        CHECK(std::abs(std::abs(ev.position[0]) - 2.0) < 0.02);
        const double U_at = ev.position[0] * ev.position[0];
        CHECK(U_at == doctest::Approx(init.omega_init == 0.0 ? 4.0 : init.omega_init).epsilon(0.01));
        CHECK(ev.k_min < 1e-3 * 2.0);
    }
}

TEST_CASE("unified rays on a Thomas-Fermi cloud are not reflected inside it") {
    Grid g = Grid::make1d(512, 16.0);
    RealField U = harmonic_potential(g);
    // relaxed Thomas-Fermi-regime state; the analytic max(0, Omega - U)
    // has an edge kink that no consistent ray medium can carry
    auto tf = ground_state(U, ChemicalPotentialTarget{4.0}, 1e-7);  // r0 = 2
    GridMedium medium(U, tf);

    RayState init;
    init.position = {0.0, 0, 0};
    init.wavevector = {1.0, 0, 0};
    auto traj = integrate_ray(init, medium, DispersionModel::unified(), 6.0, 2e-4);

    // restrict to the cloud interior; |k| never drops below its launch value
    RayTrajectory interior;
    double kmin_inside = 1e300;
    for (const auto& s : traj.samples)
        if (std::abs(s.position[0]) < 0.95 * 2.0) {
            interior.samples.push_back(s);
            kmin_inside = std::min(kmin_inside, norm(s.wavevector));
        }
    CHECK(kmin_inside > 0.97 * 1.0);
    CHECK(traj.max_omega_drift < 1e-4);
    CHECK(find_reflections(interior, medium, DispersionModel::unified()).empty());
}

TEST_CASE("weak condensate leaves reflection points unchanged within 1%") {
    const double rho0 = 0.002;
    FunctionMedium weak([rho0](const Vec3& x) {
        MediumSample m;
        m.potential = x[0] * x[0];
        m.grad_potential = {2.0 * x[0], 0.0, 0.0};
        m.rho = std::max(0.0, rho0 * (1.0 - x[0] * x[0]));
        m.grad_rho = {x[0] * x[0] < 1.0 ? -2.0 * rho0 * x[0] : 0.0, 0.0, 0.0};
        return m;
    });
    auto bare = harmonic_medium();

    RayState init;
    init.position = {0.0, 0, 0};
    init.wavevector = {1.0, 0, 0};
    auto t_weak = integrate_ray(init, weak, DispersionModel::unified(), 2.0 * M_PI, 5e-4);
    auto t_bare = integrate_ray(init, bare, DispersionModel::ehrenfest(), 2.0 * M_PI, 5e-4);
    auto e_weak = find_reflections(t_weak, weak, DispersionModel::unified());
    auto e_bare = find_reflections(t_bare, bare, DispersionModel::ehrenfest());
    REQUIRE(!e_weak.empty());
    REQUIRE(!e_bare.empty());
    CHECK(std::abs(std::abs(e_weak[0].position[0]) - std::abs(e_bare[0].position[0])) /
              std::abs(e_bare[0].position[0]) <
          0.01);
}

TEST_CASE("advect_quantity integrates sources along the characteristic") {
    auto medium = harmonic_medium();
    RayState init;
    init.position = {0.0, 0, 0};
    init.wavevector = {1.0, 0, 0};
    auto traj = integrate_ray(init, medium, DispersionModel::ehrenfest(), 1.0, 1e-3);

    auto constant = advect_quantity(traj, 3.5);
    CHECK(constant.back().second == 3.5);

    auto linear = advect_quantity(traj, 1.0, [](const RayState&) { return 2.0; });
    CHECK(linear.back().second == doctest::Approx(1.0 + 2.0 * 1.0).epsilon(1e-12));
}

TEST_CASE("residence histogram matches the classical oscillator measure") {
    auto medium = harmonic_medium();
    const double A = 2.0;  // orbit amplitude at omega = 4
    std::vector<RayTrajectory> ensemble;
    const int nrays = 64;
    for (int r = 0; r < nrays; ++r) {
        // uniform orbit phases at fixed omega
        const double phase = 2.0 * M_PI * r / nrays;
        RayState init;
        init.position = {A * std::sin(phase), 0, 0};
        init.wavevector = {A * std::cos(phase), 0, 0};
        RayOptions opts;
        opts.record_stride = 2;
        ensemble.push_back(
            integrate_ray(init, medium, DispersionModel::ehrenfest(), M_PI, 1e-3, opts));
    }
    auto hist = residence_density(ensemble, 32, -2.2, 2.2);

    // p(x) = 1 / (pi sqrt(A^2 - x^2)): compare central bins
    for (int b = 8; b < 24; ++b) {
        const double lo = hist.bin_edges[b], hi = hist.bin_edges[b + 1];
        const double expect = (std::asin(std::clamp(hi / A, -1.0, 1.0)) -
                               std::asin(std::clamp(lo / A, -1.0, 1.0))) /
                              M_PI;
        CHECK(hist.fraction[b] == doctest::Approx(expect).epsilon(0.05));
    }
}
