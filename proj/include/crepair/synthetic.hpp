#ifndef CREPAIR_SYNTHETIC_HPP
#define CREPAIR_SYNTHETIC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "crepair/fields.hpp"
#include "crepair/hierarchy.hpp"

namespace crepair::synthetic {

enum class InitKind { taylor_green, random_bandlimited };

/// Periodic incompressible solver configuration (vorticity-streamfunction
/// pseudo-spectral, explicit RK2, optional 2/3-rule dealiasing, optional
/// fixed cos(4y) vorticity forcing). Square 2*pi x 2*pi domain.
struct NSConfig {
    int grid = 64;
    double nu = 1e-3;
    double dt = 1e-2;
    double forcing = 0.0;
    bool dealias = true;
    InitKind init = InitKind::random_bandlimited;
    double init_amplitude = 1.0;  // RMS of the random initial field
    std::uint64_t seed = 0;

    void validate() const;
};

/// One explicit RK2 step of the vorticity dynamics. The advecting velocity is
/// the full input field, so any gradient contamination present in the state
/// perturbs the transported vorticity; the non-solenoidal part of the input
/// (and the component means) are carried through unchanged.
VelocityField ns_step(const NSConfig& cfg, const VelocityField& f);

/// steps+1 frames starting from the configured initial condition. Every frame
/// is solenoidal to spectral accuracy. Throws numeric_error on CFL violation.
std::vector<VelocityField> generate_periodic_trajectory(const NSConfig& cfg, int steps);

/// Imperfect one-step predictor built from the truth stepper plus controlled
/// per-step noise: sigma_c scales a unit-RMS gradient-of-potential (pure
/// compressible) field, sigma_s a unit-RMS divergence-free field, bias a
/// constant u-drift. Noise is a pure function of (seed, internal step index).
struct SurrogateSpec {
    NSConfig dynamics;
    double sigma_c = 0.0;
    double sigma_s = 0.0;
    double bias = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

class Predictor {
  public:
    virtual ~Predictor() = default;
    virtual VelocityField operator()(const VelocityField& state) = 0;
    virtual void reset() = 0;
};

std::unique_ptr<Predictor> make_surrogate(const SurrogateSpec& spec);

/// Predictor that replays a stored target trajectory with additive per-step
/// compressible noise; used for bounded-domain rollouts where no periodic
/// dynamics apply. Ignores its input state.
std::unique_ptr<Predictor> make_replay_surrogate(std::vector<VelocityField> targets,
                                                 double sigma, std::uint64_t seed);

enum class BoundedKind { cavity_like, channel_like };

/// Analytic stream-function families on the unit square sampled at
/// x = j/(W-1), y = i/(H-1). cavity_like velocities vanish on all walls;
/// channel_like has a parabolic mean through-flow and nonzero wall-normal
/// structure at the side walls.
std::vector<VelocityField> generate_bounded_targets(BoundedKind kind, int height, int width,
                                                    int count, std::uint64_t seed);

/// Balanced tree hierarchy plus T coherent node-vector slices whose bottom
/// rows follow positive AR(1) processes.
struct HierarchySeries {
    hierarchy::Hierarchy tree;
    std::vector<std::vector<double>> slices;  // each of length num_nodes
};

HierarchySeries generate_hierarchy_series(int levels, int fanout, int steps,
                                          std::uint64_t seed);

}  // namespace crepair::synthetic

#endif
