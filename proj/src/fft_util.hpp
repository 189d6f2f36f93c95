#ifndef CREPAIR_FFT_UTIL_HPP
#define CREPAIR_FFT_UTIL_HPP

#include <complex>
#include <vector>

#include "crepair/fields.hpp"

// Internal real-to-complex FFT helpers shared by the spectral and synthetic
// translation units. Plans are cached per grid size; execution is thread-safe
// via the new-array interface.
namespace crepair::fftutil {

using Spectrum = std::vector<std::complex<double>>;  // H x (W/2+1), row-major

Spectrum fft2(const ScalarField& f);
ScalarField ifft2(const Spectrum& s, int h, int w);  // includes the 1/(H*W) factor

}  // namespace crepair::fftutil

#endif
