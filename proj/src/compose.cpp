#include "crepair/compose.hpp"

#include "crepair/spectral.hpp"

namespace crepair::compose {

void CleanupSpec::validate() const {
    if (mode == Mode::raw) return;  // raw ignores every other field
    if (blend && gate)
        throw config_error("CleanupSpec: gate and fixed blend are mutually exclusive");
    if (blend) blend->validate();
    if (gate) gate->validate();
    if (taper) taper->validate();
    if (base == BaseKind::poisson) solver.validate();
}

cleanup::PoissonSystem CleanupSpec::make_system(int height, int width) const {
    if (geo)
        return cleanup::PoissonSystem::geo_screened(height, width, lambda_bdry, lambda_core,
                                                    geo_taper_width);
    return cleanup::PoissonSystem::screened(height, width, lambda);
}

VelocityField blend(const VelocityField& x, const VelocityField& cleaned, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw config_error("blend: alpha must lie in [0, 1]");
    return field_axpy(x, cleaned, alpha);
}

AlphaResult optimal_alpha(const VelocityField& x, const VelocityField& y,
                          const VelocityField& cleaned) {
    require_same_size(x, y, "optimal_alpha");
    require_same_size(x, cleaned, "optimal_alpha");
    VelocityField c = cleaned;
    const std::size_t n = x.u_grid().data().size();
    for (std::size_t k = 0; k < n; ++k) {
        c.u_grid().data()[k] -= x.u_grid().data()[k];
        c.v_grid().data()[k] -= x.v_grid().data()[k];
    }
    VelocityField e = x;
    for (std::size_t k = 0; k < n; ++k) {
        e.u_grid().data()[k] -= y.u_grid().data()[k];
        e.v_grid().data()[k] -= y.v_grid().data()[k];
    }
    AlphaResult r;
    r.a0 = field_dot(e, e);
    r.a1 = 2.0 * field_dot(e, c);
    r.a2 = field_dot(c, c);
    if (r.a2 == 0.0) {
        r.alpha_star = 0.0;
        r.all_optimal = true;
        return r;
    }
    const double unclipped = -0.5 * r.a1 / r.a2;
    r.alpha_star = std::min(std::max(unclipped, 0.0), 1.0);
    return r;
}

VelocityField base_apply(const CleanupSpec& spec, const VelocityField& f) {
    switch (spec.base) {
        case BaseKind::raw:
            return f;
        case BaseKind::fft:
            return spectral::hodge_project(f);
        case BaseKind::poisson: {
            cleanup::PoissonSystem sys = spec.make_system(f.height(), f.width());
            return cleanup::cleanup_apply(f, sys, spec.solver, spec.taper);
        }
    }
    throw config_error("base_apply: unknown base kind");
}

VelocityField gated_apply(const VelocityField& f, const CleanupSpec& base_op,
                          const GateSpec& gate) {
    gate.validate();
    const double d = divergence_rms(f);
    const double gamma = gate.gamma(d);
    if (gamma == 0.0) return f;
    VelocityField cleaned = base_apply(base_op, f);
    if (gamma == 1.0) return cleaned;
    return field_axpy(f, cleaned, gamma);
}

VelocityField framed_apply(const VelocityField& f, const CleanupSpec& spec,
                           const NormFrame& frame) {
    spec.validate();
    if (spec.mode == Mode::raw || spec.base == BaseKind::raw) return f;

    auto inner = [&](const VelocityField& g) {
        if (spec.gate) return gated_apply(g, spec, *spec.gate);
        VelocityField cleaned = base_apply(spec, g);
        if (spec.blend) return blend(g, cleaned, spec.blend->alpha);
        return cleaned;
    };

    if (spec.frame == Frame::physical) {
        VelocityField phys = to_physical(f, frame);
        return to_normalized(inner(phys), frame);
    }
    return inner(f);
}

}  // namespace crepair::compose
