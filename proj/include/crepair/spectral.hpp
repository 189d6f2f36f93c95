#ifndef CREPAIR_SPECTRAL_HPP
#define CREPAIR_SPECTRAL_HPP

#include <vector>

#include "crepair/fields.hpp"

namespace crepair::spectral {

/// Integer wavevector grids for a real-input 2D transform on a 2*pi x 2*pi
/// domain: kx has length W/2+1 (rfft layout), ky has length H with the usual
/// symmetric negative-frequency second half.
struct SpectralGrid {
    int height = 0;
    int width = 0;
    std::vector<double> kx;  // size W/2+1
    std::vector<double> ky;  // size H

    SpectralGrid(int h, int w);
};

/// Exact periodic Hodge projection onto the divergence-free subspace.
/// Preserves the zero Fourier mode (component means) exactly and zeroes the
/// Nyquist rows/columns of the stream function for even dimensions.
VelocityField hodge_project(const VelocityField& f);

/// RMS over all cells of the spectral-derivative divergence du/dx + dv/dy.
double spectral_divergence_rms(const VelocityField& f);

/// (d_y psi, -d_x psi) computed with spectral derivatives.
VelocityField curl_from_streamfunction(const ScalarField& psi);

struct Decomposition {
    VelocityField solenoidal;
    VelocityField compressible;
};

/// f = solenoidal + compressible with solenoidal = hodge_project(f).
Decomposition decompose(const VelocityField& f);

}  // namespace crepair::spectral

#endif
