#include "wavetrap/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace wavetrap {

struct Fft::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::vector<signed char> sign;   // (-1)^(sum of frequency indices): half-box offset phase
    mutable std::vector<cplx> scratch;
};

namespace {
std::mutex plan_mutex;  // FFTW planning is not thread-safe
}

Fft::Fft(const Grid& g) : grid_(g), impl_(std::make_unique<Impl>()) {
    const std::size_t n = g.size();
    impl_->scratch.resize(n);
    std::vector<cplx> a(n), b(n);
    int dims[3];
    for (int ax = 0; ax < g.dim; ++ax) dims[ax] = g.npts[ax];
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        impl_->fwd = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD, flags);
        impl_->bwd = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD, flags);
    }
    require(impl_->fwd && impl_->bwd, "fftw plan creation failed");

    // exp(-i k_q . x_j) = (-1)^(q+j indices) exp(-2*pi*i q.j/N) for x centered at -L/2
    impl_->sign.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto idx = g.unindex(i);
        int s = idx[0] + idx[1] + idx[2];
        impl_->sign[i] = (s & 1) ? -1 : 1;
    }
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(plan_mutex);
    if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

void Fft::forward(const cplx* in, cplx* out) const {
    const std::size_t n = grid_.size();
    auto& tmp = impl_->scratch;
    // out must not alias FFTW input while executing; route through scratch.
    fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(tmp.data()));
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = tmp[i] * (impl_->sign[i] > 0 ? norm : -norm);
}

void Fft::inverse(const cplx* in, cplx* out) const {
    const std::size_t n = grid_.size();
    auto& tmp = impl_->scratch;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = impl_->sign[i] > 0 ? in[i] : -in[i];
    fftw_execute_dft(impl_->bwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
}

const Fft& fft_for(const Grid& g) {
    static std::mutex m;
    static std::map<std::tuple<int, int, int, int, double, double, double>, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(g.dim, g.npts[0], g.npts[1], g.npts[2], g.extent[0], g.extent[1],
                               g.extent[2]);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Fft>(g)).first;
    return *it->second;
}

ComplexField to_spectral(const ComplexField& f) {
    ComplexField c(f.grid);
    fft_for(f.grid).forward(f, c);
    return c;
}

ComplexField from_spectral(const ComplexField& c) {
    ComplexField f(c.grid);
    fft_for(c.grid).inverse(c, f);
    return f;
}

ComplexField gradient(const ComplexField& f, int axis) {
    ComplexField c = to_spectral(f);
    const Grid& g = f.grid;
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto idx = g.unindex(i);
        c[i] *= cplx(0.0, g.wavenumber(axis, idx[axis]));
    }
    return from_spectral(c);
}

RealField gradient(const RealField& f, int axis) {
    ComplexField z(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) z[i] = f[i];
    ComplexField d = gradient(z, axis);
    RealField r(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = d[i].real();
    return r;
}

ComplexField laplacian(const ComplexField& f) {
    ComplexField c = to_spectral(f);
    const Grid& g = f.grid;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -g.k_squared(i);
    return from_spectral(c);
}

RealField laplacian(const RealField& f) {
    ComplexField z(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) z[i] = f[i];
    ComplexField d = laplacian(z);
    RealField r(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = d[i].real();
    return r;
}

}  // namespace wavetrap
