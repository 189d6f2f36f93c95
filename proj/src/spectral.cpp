#include "crepair/spectral.hpp"

#include <cmath>
#include <complex>

#include "fft_util.hpp"

namespace crepair::spectral {
namespace {

using fftutil::Spectrum;
using fftutil::fft2;
using fftutil::ifft2;

constexpr std::complex<double> I{0.0, 1.0};

}  // namespace

SpectralGrid::SpectralGrid(int h, int w) : height(h), width(w) {
    if (h < 4 || w < 4) throw dimension_error("SpectralGrid: grid must be at least 4x4");
    kx.resize(w / 2 + 1);
    ky.resize(h);
    // Unit spacing of 2*pi/N makes the wavevectors integers.
    for (int j = 0; j <= w / 2; ++j) kx[j] = static_cast<double>(j);
    for (int i = 0; i < h; ++i) ky[i] = (i <= (h - 1) / 2) ? static_cast<double>(i)
                                                          : static_cast<double>(i - h);
}

VelocityField hodge_project(const VelocityField& f) {
    require_min_size(f, 4, 4, "hodge_project");
    if (!f.all_finite()) throw numeric_error("hodge_project: non-finite input");
    const int h = f.height(), w = f.width(), wc = w / 2 + 1;
    SpectralGrid grid(h, w);

    const double mean_u = component_mean_u(f);
    const double mean_v = component_mean_v(f);

    Spectrum u_hat = fft2(f.u_grid());
    Spectrum v_hat = fft2(f.v_grid());

    Spectrum psi_hat(static_cast<std::size_t>(h) * wc);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            const double kx = grid.kx[j], ky = grid.ky[i];
            const double k_sq = kx * kx + ky * ky;
            if (k_sq == 0.0) {
                psi_hat[k] = 0.0;
                continue;
            }
            const std::complex<double> vort = I * kx * v_hat[k] - I * ky * u_hat[k];
            psi_hat[k] = vort / k_sq;
        }
    }
    // Zero-Nyquist convention for even dimensions keeps the real-input
    // spectral derivatives skew-adjoint.
    if (h % 2 == 0)
        for (int j = 0; j < wc; ++j) psi_hat[static_cast<std::size_t>(h / 2) * wc + j] = 0.0;
    if (w % 2 == 0)
        for (int i = 0; i < h; ++i) psi_hat[static_cast<std::size_t>(i) * wc + (w / 2)] = 0.0;

    Spectrum uo(psi_hat.size()), vo(psi_hat.size());
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            uo[k] = I * grid.ky[i] * psi_hat[k];
            vo[k] = -I * grid.kx[j] * psi_hat[k];
        }
    }
    ScalarField u = ifft2(uo, h, w);
    ScalarField v = ifft2(vo, h, w);
    for (double& x : u.data()) x += mean_u;
    for (double& x : v.data()) x += mean_v;
    return VelocityField(std::move(u), std::move(v));
}

double spectral_divergence_rms(const VelocityField& f) {
    require_min_size(f, 4, 4, "spectral_divergence_rms");
    const int h = f.height(), w = f.width(), wc = w / 2 + 1;
    SpectralGrid grid(h, w);
    Spectrum u_hat = fft2(f.u_grid());
    Spectrum v_hat = fft2(f.v_grid());
    Spectrum div_hat(u_hat.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            div_hat[k] = I * grid.kx[j] * u_hat[k] + I * grid.ky[i] * v_hat[k];
        }
    ScalarField div = ifft2(div_hat, h, w);
    double sum_sq = 0.0;
    for (double x : div.data()) sum_sq += x * x;
    return std::sqrt(sum_sq / static_cast<double>(div.data().size()));
}

VelocityField curl_from_streamfunction(const ScalarField& psi) {
    const int h = psi.height(), w = psi.width(), wc = w / 2 + 1;
    if (h < 4 || w < 4) throw dimension_error("curl_from_streamfunction: grid too small");
    SpectralGrid grid(h, w);
    Spectrum psi_hat = fft2(psi);
    Spectrum uo(psi_hat.size()), vo(psi_hat.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            uo[k] = I * grid.ky[i] * psi_hat[k];
            vo[k] = -I * grid.kx[j] * psi_hat[k];
        }
    return VelocityField(ifft2(uo, h, w), ifft2(vo, h, w));
}

Decomposition decompose(const VelocityField& f) {
    Decomposition d{hodge_project(f), VelocityField(f.height(), f.width())};
    const std::size_t n = f.u_grid().data().size();
    for (std::size_t k = 0; k < n; ++k) {
        d.compressible.u_grid().data()[k] = f.u_grid().data()[k] - d.solenoidal.u_grid().data()[k];
        d.compressible.v_grid().data()[k] = f.v_grid().data()[k] - d.solenoidal.v_grid().data()[k];
    }
    return d;
}

}  // namespace crepair::spectral
