#include "wavetrap/grid.hpp"

namespace wavetrap {

namespace {
bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }
}  // namespace

Grid Grid::make(int dim, std::array<int, 3> npts, std::array<double, 3> extent) {
    require(dim >= 1 && dim <= 3, "grid: dim must be 1, 2 or 3");
    for (int a = 0; a < dim; ++a) {
        require(npts[a] >= 8, "grid: need at least 8 points per axis");
        require(power_of_two(npts[a]), "grid: points per axis must be a power of two");
        require(extent[a] > 0.0, "grid: extent must be positive");
    }
    for (int a = dim; a < 3; ++a) {
        npts[a] = 1;
        extent[a] = 0.0;
    }
    Grid g;
    g.dim = dim;
    g.npts = npts;
    g.extent = extent;
    return g;
}

}  // namespace wavetrap
