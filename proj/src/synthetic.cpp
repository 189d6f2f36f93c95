#include "crepair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "crepair/spectral.hpp"
#include "fft_util.hpp"

namespace crepair::synthetic {
namespace {

using fftutil::Spectrum;
using fftutil::fft2;
using fftutil::ifft2;

constexpr std::complex<double> I{0.0, 1.0};
constexpr double PI = 3.14159265358979323846;

// splitmix64-style mixing so each (seed, step) pair seeds an independent
// generator stream.
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

double ky_value(int i, int h) { return i <= (h - 1) / 2 ? static_cast<double>(i)
                                                        : static_cast<double>(i - h); }

// Spectral derivative factor, zeroed on the ambiguous Nyquist lines.
double kx_deriv(int j, int w) { return (w % 2 == 0 && j == w / 2) ? 0.0 : static_cast<double>(j); }
double ky_deriv(int i, int h) { return (h % 2 == 0 && i == h / 2) ? 0.0 : ky_value(i, h); }

// Zero-mean velocity with vorticity omega_hat: u = d_y psi, v = -d_x psi,
// psi = omega / k^2.
VelocityField velocity_from_vorticity(const Spectrum& omega_hat, int h, int w) {
    const int wc = w / 2 + 1;
    Spectrum uo(omega_hat.size()), vo(omega_hat.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            const double kx = kx_deriv(j, w), ky = ky_deriv(i, h);
            const double k_sq = kx * kx + ky * ky;
            if (k_sq == 0.0) {
                uo[k] = vo[k] = 0.0;
                continue;
            }
            const std::complex<double> psi = omega_hat[k] / k_sq;
            uo[k] = I * ky * psi;
            vo[k] = -I * kx * psi;
        }
    return VelocityField(ifft2(uo, h, w), ifft2(vo, h, w));
}

Spectrum vorticity_spectrum(const VelocityField& f) {
    const int h = f.height(), w = f.width(), wc = w / 2 + 1;
    Spectrum u_hat = fft2(f.u_grid());
    Spectrum v_hat = fft2(f.v_grid());
    Spectrum omega(u_hat.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            omega[k] = I * kx_deriv(j, w) * v_hat[k] - I * ky_deriv(i, h) * u_hat[k];
        }
    return omega;
}

// Right-hand side of the vorticity equation, pseudo-spectral with optional
// 2/3-rule dealiasing of the advection product.
Spectrum vorticity_rhs(const NSConfig& cfg, const Spectrum& omega_hat, const ScalarField& u,
                       const ScalarField& v) {
    const int h = u.height(), w = u.width(), wc = w / 2 + 1;
    Spectrum gx(omega_hat.size()), gy(omega_hat.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            gx[k] = I * kx_deriv(j, w) * omega_hat[k];
            gy[k] = I * ky_deriv(i, h) * omega_hat[k];
        }
    ScalarField wx = ifft2(gx, h, w);
    ScalarField wy = ifft2(gy, h, w);

    ScalarField advect(h, w);
    for (int i = 0; i < h; ++i) {
        const double y = 2.0 * PI * i / h;
        for (int j = 0; j < w; ++j)
            advect(i, j) = -(u(i, j) * wx(i, j) + v(i, j) * wy(i, j)) +
                           cfg.forcing * std::cos(4.0 * y);
    }
    Spectrum rhs = fft2(advect);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            if (cfg.dealias &&
                (std::abs(ky_value(i, h)) > h / 3.0 || j > w / 3.0))
                rhs[k] = 0.0;
            const double kx = kx_deriv(j, w), ky = ky_deriv(i, h);
            rhs[k] -= cfg.nu * (kx * kx + ky * ky) * omega_hat[k];
        }
    return rhs;
}

void check_cfl(const NSConfig& cfg, const VelocityField& f) {
    double max_u = 0.0, max_v = 0.0;
    for (double x : f.u_grid().data()) max_u = std::max(max_u, std::abs(x));
    for (double x : f.v_grid().data()) max_v = std::max(max_v, std::abs(x));
    const double cfl = cfg.dt * std::max(max_u / (2.0 * PI / f.width()),
                                         max_v / (2.0 * PI / f.height()));
    if (!(cfl < 0.5)) throw numeric_error("ns_step: CFL number " + std::to_string(cfl) +
                                          " exceeds 0.5");
}

// Band-limited (modes <= H/4) unit-RMS random field pair. kind selects the
// gradient (compressible) or curl (solenoidal) construction.
VelocityField spectral_noise(int h, int w, std::mt19937_64& rng, bool compressible) {
    const int wc = w / 2 + 1;
    std::normal_distribution<double> normal(0.0, 1.0);
    ScalarField white(h, w);
    for (double& x : white.data()) x = normal(rng);
    Spectrum phi = fft2(white);
    const double band = std::min(h, w) / 4.0;
    Spectrum uo(phi.size()), vo(phi.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < wc; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * wc + j;
            const double kx = kx_deriv(j, w), ky = ky_deriv(i, h);
            if (std::abs(ky_value(i, h)) > band || j > band || (kx == 0.0 && ky == 0.0)) {
                uo[k] = vo[k] = 0.0;
                continue;
            }
            if (compressible) {
                uo[k] = I * kx * phi[k];
                vo[k] = I * ky * phi[k];
            } else {
                uo[k] = I * ky * phi[k];
                vo[k] = -I * kx * phi[k];
            }
        }
    VelocityField n(ifft2(uo, h, w), ifft2(vo, h, w));
    const double e = energy(n);
    if (e == 0.0) return n;
    const double scale = 1.0 / std::sqrt(e);
    for (double& x : n.u_grid().data()) x *= scale;
    for (double& x : n.v_grid().data()) x *= scale;
    return n;
}

void add_scaled(VelocityField& f, const VelocityField& g, double scale) {
    for (std::size_t k = 0; k < f.u_grid().data().size(); ++k) {
        f.u_grid().data()[k] += scale * g.u_grid().data()[k];
        f.v_grid().data()[k] += scale * g.v_grid().data()[k];
    }
}

class SurrogatePredictor final : public Predictor {
  public:
    explicit SurrogatePredictor(SurrogateSpec spec) : spec_(std::move(spec)) {}

    VelocityField operator()(const VelocityField& state) override {
        VelocityField out = ns_step(spec_.dynamics, state);
        if (spec_.sigma_c > 0.0 || spec_.sigma_s > 0.0) {
            std::mt19937_64 rng(mix(spec_.seed, step_));
            if (spec_.sigma_c > 0.0)
                add_scaled(out, spectral_noise(out.height(), out.width(), rng, true),
                           spec_.sigma_c);
            if (spec_.sigma_s > 0.0)
                add_scaled(out, spectral_noise(out.height(), out.width(), rng, false),
                           spec_.sigma_s);
        }
        if (spec_.bias != 0.0)
            for (double& x : out.u_grid().data()) x += spec_.bias;
        ++step_;
        return out;
    }

    void reset() override { step_ = 0; }

  private:
    SurrogateSpec spec_;
    std::uint64_t step_ = 0;
};

class ReplayPredictor final : public Predictor {
  public:
    ReplayPredictor(std::vector<VelocityField> targets, double sigma, std::uint64_t seed)
        : targets_(std::move(targets)), sigma_(sigma), seed_(seed) {
        if (targets_.size() < 2)
            throw config_error("replay surrogate: need at least two frames");
        if (sigma_ < 0.0) throw config_error("replay surrogate: sigma must be non-negative");
    }

    VelocityField operator()(const VelocityField& state) override {
        (void)state;
        if (step_ + 1 >= targets_.size())
            throw config_error("replay surrogate: trajectory exhausted");
        VelocityField out = targets_[step_ + 1];
        if (sigma_ > 0.0) {
            std::mt19937_64 rng(mix(seed_, step_));
            add_scaled(out, spectral_noise(out.height(), out.width(), rng, true), sigma_);
        }
        ++step_;
        return out;
    }

    void reset() override { step_ = 0; }

  private:
    std::vector<VelocityField> targets_;
    double sigma_ = 0.0;
    std::uint64_t seed_ = 0;
    std::size_t step_ = 0;
};

}  // namespace

void NSConfig::validate() const {
    if (grid < 8) throw config_error("NSConfig: grid must be at least 8");
    if (!(dt > 0.0)) throw config_error("NSConfig: dt must be positive");
    if (!(nu >= 0.0)) throw config_error("NSConfig: nu must be non-negative");
    if (!(init_amplitude > 0.0)) throw config_error("NSConfig: init amplitude must be positive");
}

void SurrogateSpec::validate() const {
    dynamics.validate();
    if (sigma_c < 0.0 || sigma_s < 0.0)
        throw config_error("SurrogateSpec: noise amplitudes must be non-negative");
}

VelocityField ns_step(const NSConfig& cfg, const VelocityField& f) {
    cfg.validate();
    require_min_size(f, 8, 8, "ns_step");
    if (!f.all_finite()) throw numeric_error("ns_step: non-finite state");
    check_cfl(cfg, f);

    const int h = f.height(), w = f.width();
    const double mean_u = component_mean_u(f);
    const double mean_v = component_mean_v(f);

    Spectrum omega = vorticity_spectrum(f);
    VelocityField sol = velocity_from_vorticity(omega, h, w);

    // Non-solenoidal remainder of the state; it advects the vorticity but is
    // itself transported unchanged.
    VelocityField carry(h, w);
    for (std::size_t k = 0; k < carry.u_grid().data().size(); ++k) {
        carry.u_grid().data()[k] = f.u_grid().data()[k] - sol.u_grid().data()[k] - mean_u;
        carry.v_grid().data()[k] = f.v_grid().data()[k] - sol.v_grid().data()[k] - mean_v;
    }

    Spectrum rhs1 = vorticity_rhs(cfg, omega, f.u_grid(), f.v_grid());
    Spectrum omega_mid(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) omega_mid[k] = omega[k] + cfg.dt * rhs1[k];

    VelocityField mid = velocity_from_vorticity(omega_mid, h, w);
    for (std::size_t k = 0; k < mid.u_grid().data().size(); ++k) {
        mid.u_grid().data()[k] += mean_u + carry.u_grid().data()[k];
        mid.v_grid().data()[k] += mean_v + carry.v_grid().data()[k];
    }
    Spectrum rhs2 = vorticity_rhs(cfg, omega_mid, mid.u_grid(), mid.v_grid());

    for (std::size_t k = 0; k < omega.size(); ++k)
        omega[k] += 0.5 * cfg.dt * (rhs1[k] + rhs2[k]);

    VelocityField out = velocity_from_vorticity(omega, h, w);
    for (std::size_t k = 0; k < out.u_grid().data().size(); ++k) {
        out.u_grid().data()[k] += mean_u + carry.u_grid().data()[k];
        out.v_grid().data()[k] += mean_v + carry.v_grid().data()[k];
    }
    if (!out.all_finite()) throw numeric_error("ns_step: state became non-finite");
    return out;
}

std::vector<VelocityField> generate_periodic_trajectory(const NSConfig& cfg, int steps) {
    cfg.validate();
    if (steps < 0) throw config_error("generate_periodic_trajectory: negative step count");
    const int n = cfg.grid;
    VelocityField state(n, n);
    if (cfg.init == InitKind::taylor_green) {
        for (int i = 0; i < n; ++i) {
            const double y = 2.0 * PI * i / n;
            for (int j = 0; j < n; ++j) {
                const double x = 2.0 * PI * j / n;
                state.u(i, j) = std::sin(x) * std::cos(y);
                state.v(i, j) = -std::cos(x) * std::sin(y);
            }
        }
    } else {
        std::mt19937_64 rng(mix(cfg.seed, 0xa5a5a5a5ULL));
        state = spectral_noise(n, n, rng, false);
        for (double& x : state.u_grid().data()) x *= cfg.init_amplitude;
        for (double& x : state.v_grid().data()) x *= cfg.init_amplitude;
    }
    std::vector<VelocityField> frames;
    frames.reserve(static_cast<std::size_t>(steps) + 1);
    frames.push_back(state);
    for (int t = 0; t < steps; ++t) {
        state = ns_step(cfg, state);
        frames.push_back(state);
    }
    return frames;
}

std::unique_ptr<Predictor> make_surrogate(const SurrogateSpec& spec) {
    spec.validate();
    return std::make_unique<SurrogatePredictor>(spec);
}

std::unique_ptr<Predictor> make_replay_surrogate(std::vector<VelocityField> targets,
                                                 double sigma, std::uint64_t seed) {
    return std::make_unique<ReplayPredictor>(std::move(targets), sigma, seed);
}

std::vector<VelocityField> generate_bounded_targets(BoundedKind kind, int height, int width,
                                                    int count, std::uint64_t seed) {
    if (height < 8 || width < 8)
        throw dimension_error("generate_bounded_targets: grid must be at least 8x8");
    if (count < 1) throw config_error("generate_bounded_targets: count must be positive");

    std::vector<VelocityField> out;
    out.reserve(static_cast<std::size_t>(count));
    constexpr int MODES = 3;
    for (int t = 0; t < count; ++t) {
        std::mt19937_64 rng(mix(seed, static_cast<std::uint64_t>(t)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uflow(0.5, 1.5);

        double a[MODES][MODES];
        for (int p = 0; p < MODES; ++p)
            for (int q = 0; q < MODES; ++q)
                a[p][q] = normal(rng) / ((p + 1) * (p + 1) + (q + 1) * (q + 1));
        const double mean_flow = uflow(rng);

        VelocityField f(height, width);
        for (int i = 0; i < height; ++i) {
            const double y = static_cast<double>(i) / (height - 1);
            for (int j = 0; j < width; ++j) {
                const double x = static_cast<double>(j) / (width - 1);
                double u = 0.0, v = 0.0;
                if (kind == BoundedKind::cavity_like) {
                    // psi = sum a_pq sin^2(pi p x) sin^2(pi q y): double zeros
                    // at every wall, so both components vanish there.
                    for (int p = 1; p <= MODES; ++p)
                        for (int q = 1; q <= MODES; ++q) {
                            const double sx = std::sin(PI * p * x);
                            const double sy = std::sin(PI * q * y);
                            u += a[p - 1][q - 1] * PI * q * sx * sx * std::sin(2.0 * PI * q * y);
                            v -= a[p - 1][q - 1] * PI * p * std::sin(2.0 * PI * p * x) * sy * sy;
                        }
                } else {
                    // Parabolic through-flow plus a stream perturbation whose
                    // wall-normal component does not vanish at the side walls.
                    u = mean_flow * (1.0 - (2.0 * y - 1.0) * (2.0 * y - 1.0));
                    for (int p = 1; p <= MODES; ++p)
                        for (int q = 1; q <= MODES; ++q) {
                            const double amp = 0.1 * a[p - 1][q - 1];
                            u -= amp * PI * q * std::sin(PI * p * x) * std::sin(PI * q * y);
                            v -= amp * PI * p * std::cos(PI * p * x) * std::cos(PI * q * y);
                        }
                }
                f.u(i, j) = u;
                f.v(i, j) = v;
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

HierarchySeries generate_hierarchy_series(int levels, int fanout, int steps,
                                          std::uint64_t seed) {
    if (levels < 2) throw config_error("generate_hierarchy_series: need at least 2 levels");
    if (fanout < 2) throw config_error("generate_hierarchy_series: fanout must be at least 2");
    if (steps < 1) throw config_error("generate_hierarchy_series: need at least 1 step");

    std::size_t leaves = 1;
    for (int l = 1; l < levels; ++l) {
        leaves *= static_cast<std::size_t>(fanout);
        if (leaves > 4096) throw config_error("generate_hierarchy_series: tree too large");
    }
    const int b = static_cast<int>(leaves);
    int m = 0;
    {
        int width_l = 1;
        for (int l = 0; l < levels; ++l) {
            m += width_l;
            width_l *= fanout;
        }
    }

    // BFS node order; a node at level l, position k covers a contiguous run
    // of leaves of length fanout^(levels-1-l).
    std::vector<double> s(static_cast<std::size_t>(m) * b, 0.0);
    std::vector<std::string> labels(static_cast<std::size_t>(m));
    std::vector<int> bottom(static_cast<std::size_t>(b));
    int node = 0;
    int width_l = 1;
    for (int l = 0; l < levels; ++l) {
        int run = 1;
        for (int d = 0; d < levels - 1 - l; ++d) run *= fanout;
        for (int k = 0; k < width_l; ++k, ++node) {
            labels[node] = "L" + std::to_string(l) + "N" + std::to_string(k);
            for (int c = k * run; c < (k + 1) * run; ++c)
                s[static_cast<std::size_t>(node) * b + c] = 1.0;
            if (l == levels - 1) bottom[k] = node;
        }
        width_l *= fanout;
    }
    hierarchy::Hierarchy tree(std::move(s), m, b, 0, std::move(bottom), std::move(labels));

    std::mt19937_64 rng(mix(seed, 0x5e11e5ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> umean(1.0, 5.0);
    std::vector<double> mu(static_cast<std::size_t>(b));
    std::vector<double> z(static_cast<std::size_t>(b));
    for (int c = 0; c < b; ++c) mu[c] = umean(rng);
    z = mu;

    const double rho = 0.8;
    std::vector<std::vector<double>> slices;
    slices.reserve(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        for (int c = 0; c < b; ++c) {
            z[c] = mu[c] + rho * (z[c] - mu[c]) + 0.1 * mu[c] * normal(rng);
            z[c] = std::max(z[c], 0.05 * mu[c]);
        }
        slices.push_back(tree.apply_s(z));
    }
    return HierarchySeries{std::move(tree), std::move(slices)};
}

}  // namespace crepair::synthetic
