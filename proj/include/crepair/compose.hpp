#ifndef CREPAIR_COMPOSE_HPP
#define CREPAIR_COMPOSE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "crepair/cleanup.hpp"
#include "crepair/fields.hpp"

namespace crepair::compose {

struct BlendSpec {
    double alpha = 1.0;
    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw config_error("BlendSpec: alpha must lie in [0, 1]");
    }
};

/// Divergence-gated strength: gamma = min((d/tau)^q, 1) evaluated on the raw
/// state's interior divergence RMS.
struct GateSpec {
    double tau = 0.6;
    double q = 1.0;
    void validate() const {
        if (!(tau > 0.0) || !(q > 0.0)) throw config_error("GateSpec: tau and q must be positive");
    }
    double gamma(double div_rms) const {
        return std::min(std::pow(div_rms / tau, q), 1.0);
    }
};

enum class BaseKind { raw, fft, poisson };
enum class Mode { posthoc, inloop, raw };

/// Declarative description of one repair operator: base family, optional
/// fixed blend or divergence gate, optional boundary taper, and the frame the
/// operator runs in.
struct CleanupSpec {
    Mode mode = Mode::posthoc;
    BaseKind base = BaseKind::raw;

    // Poisson-family parameters (ignored for raw/fft).
    cleanup::SolverSpec solver = cleanup::SolverSpec::direct();
    bool geo = false;
    double lambda = 0.0;       // uniform screened shift
    double lambda_bdry = 0.0;  // geo family
    double lambda_core = 0.0;
    int geo_taper_width = 1;

    std::optional<cleanup::TaperMask> taper;
    std::optional<BlendSpec> blend;
    std::optional<GateSpec> gate;
    Frame frame = Frame::normalized;

    std::string spec_string;  // canonical grammar form, set by the parser

    void validate() const;
    cleanup::PoissonSystem make_system(int height, int width) const;
};

/// Entrywise convex combination (1-alpha) x + alpha cleaned.
VelocityField blend(const VelocityField& x, const VelocityField& cleaned, double alpha);

struct AlphaResult {
    double alpha_star = 0.0;
    bool all_optimal = false;  // cleanup increment was zero
    // phi(alpha) = a0 + a1 alpha + a2 alpha^2
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    double phi(double alpha) const { return a0 + a1 * alpha + a2 * alpha * alpha; }
};

/// Closed-form minimizer of the blend-error quadratic over [0, 1].
AlphaResult optimal_alpha(const VelocityField& x, const VelocityField& y,
                          const VelocityField& cleaned);

/// Base operator without gate/blend/frame wrapping.
VelocityField base_apply(const CleanupSpec& spec, const VelocityField& f);

/// f + gamma (base(f) - f) with gamma from the raw state's divergence.
VelocityField gated_apply(const VelocityField& f, const CleanupSpec& base_op,
                          const GateSpec& gate);

/// Full operator application: optionally denormalize, apply base with gate or
/// blend, renormalize. Raw mode is the identity.
VelocityField framed_apply(const VelocityField& f, const CleanupSpec& spec,
                           const NormFrame& frame);

}  // namespace crepair::compose

#endif
