#pragma once

#include <memory>

#include "wavetrap/grid.hpp"

namespace wavetrap {

/// FFT on a Grid with physical phase conventions:
///
///   forward:  c_q = (1/Ntot) sum_j f(x_j) exp(-i k_q . x_j)
///   inverse:  f(x_j) = sum_q c_q exp(+i k_q . x_j)
///
/// so a plane wave exp(i k0 . x) transforms to a unit coefficient at k0.
/// Coordinates are the Grid's own x in [-L/2, L/2); the half-box offset is
/// absorbed into a per-node sign factor (exact for even point counts).
class Fft {
  public:
    explicit Fft(const Grid& g);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    const Grid& grid() const { return grid_; }

    /// Out-of-place; in == out is allowed (internal scratch).
    void forward(const cplx* in, cplx* out) const;
    void inverse(const cplx* in, cplx* out) const;

    void forward(const ComplexField& in, ComplexField& out) const { forward(in.v.data(), out.v.data()); }
    void inverse(const ComplexField& in, ComplexField& out) const { inverse(in.v.data(), out.v.data()); }

  private:
    struct Impl;
    Grid grid_;
    std::unique_ptr<Impl> impl_;
};

/// Shared per-grid FFT instances (plans are expensive to build).
const Fft& fft_for(const Grid& g);

/// Spectral coefficients of a complex field (plane-wave convention above).
ComplexField to_spectral(const ComplexField& f);
ComplexField from_spectral(const ComplexField& c);

/// d/dx_axis via ik multiplier. Exact for band-limited data.
ComplexField gradient(const ComplexField& f, int axis);
RealField gradient(const RealField& f, int axis);
ComplexField laplacian(const ComplexField& f);
RealField laplacian(const RealField& f);

}  // namespace wavetrap
