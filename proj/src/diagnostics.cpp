#include "crepair/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crepair/cleanup.hpp"
#include "crepair/spectral.hpp"

namespace crepair::diagnostics {
namespace {

Stat make_stat(const std::vector<double>& xs) {
    Stat s;
    const std::size_t n = xs.size();
    if (n == 0) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double sum_sq = 0.0;
        for (double x : xs) sum_sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sum_sq / static_cast<double>(n - 1));
    }
    return s;
}

VelocityField apply(const compose::CleanupSpec& op, const NormFrame& frame,
                    const VelocityField& f) {
    return compose::framed_apply(f, op, frame);
}

// Divergence in the discretization the operator enforces: the spectral
// projector is audited against the spectral derivative, everything else
// against the backward-difference stencil the Poisson families solve.
double audit_divergence(const compose::CleanupSpec& op, const VelocityField& f) {
    if (op.mode != compose::Mode::raw && op.base == compose::BaseKind::fft)
        return spectral::spectral_divergence_rms(f);
    return divergence_rms(f);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw numeric_error("correlate: zero-variance input, correlation undefined");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

OperatorAudit audit_operator(const compose::CleanupSpec& op,
                             const std::vector<VelocityField>& targets,
                             const NormFrame& frame) {
    if (targets.empty()) throw config_error("audit_operator: need at least one target");
    op.validate();

    OperatorAudit audit;
    audit.spec = op.spec_string;
    audit.samples = static_cast<int>(targets.size());

    std::vector<double> before, after, distortion, residual, pct;
    const bool has_residual =
        op.mode != compose::Mode::raw && op.base == compose::BaseKind::poisson;
    for (const VelocityField& y : targets) {
        VelocityField repaired = apply(op, frame, y);
        before.push_back(audit_divergence(op, y));
        after.push_back(audit_divergence(op, repaired));
        const double d = mse(repaired, y);
        distortion.push_back(d);
        const double e = energy(y);
        pct.push_back(e > 0.0 ? 100.0 * d / e : 0.0);
        if (has_residual) {
            cleanup::PoissonSystem sys = op.make_system(y.height(), y.width());
            residual.push_back(cleanup::relative_system_residual(y, sys, op.solver));
        }
    }
    audit.div_before = make_stat(before);
    audit.div_after = make_stat(after);
    audit.distortion_mse = make_stat(distortion);
    audit.distortion_energy_pct = make_stat(pct);
    if (has_residual) audit.relative_residual = make_stat(residual);
    return audit;
}

ErrorDecomposition decompose_error(const compose::CleanupSpec& op, const VelocityField& x,
                                   const VelocityField& y, const NormFrame& frame) {
    require_same_size(x, y, "decompose_error");
    VelocityField px = apply(op, frame, x);
    VelocityField py = apply(op, frame, y);

    const std::size_t n = x.u_grid().data().size();
    VelocityField a(x.height(), x.width());  // op(x) - op(y)
    VelocityField b(x.height(), x.width());  // op(y) - y
    VelocityField t(x.height(), x.width());  // op(x) - y
    for (std::size_t k = 0; k < n; ++k) {
        a.u_grid().data()[k] = px.u_grid().data()[k] - py.u_grid().data()[k];
        a.v_grid().data()[k] = px.v_grid().data()[k] - py.v_grid().data()[k];
        b.u_grid().data()[k] = py.u_grid().data()[k] - y.u_grid().data()[k];
        b.v_grid().data()[k] = py.v_grid().data()[k] - y.v_grid().data()[k];
        t.u_grid().data()[k] = px.u_grid().data()[k] - y.u_grid().data()[k];
        t.v_grid().data()[k] = px.v_grid().data()[k] - y.v_grid().data()[k];
    }
    ErrorDecomposition d;
    d.transported_sq = field_dot(a, a);
    d.distortion_sq = field_dot(b, b);
    d.cross = 2.0 * field_dot(a, b);
    d.total_sq = field_dot(t, t);
    d.transported_norm = std::sqrt(d.transported_sq);
    d.distortion_norm = std::sqrt(d.distortion_sq);
    return d;
}

StripAudit strip_audit(const compose::CleanupSpec& op, const std::vector<VelocityField>& targets,
                       int strip_width, const NormFrame& frame) {
    if (targets.empty()) throw config_error("strip_audit: need at least one target");
    const int h = targets[0].height(), w = targets[0].width();
    if (strip_width < 1 || 2 * strip_width >= std::min(h, w))
        throw config_error("strip_audit: strip width must satisfy 1 <= w < min(H,W)/2");

    double strip_sq = 0.0, core_sq = 0.0, dist_sq = 0.0;
    std::size_t strip_n = 0, core_n = 0, dist_n = 0;
    for (const VelocityField& y : targets) {
        if (y.height() != h || y.width() != w)
            throw dimension_error("strip_audit: mixed target sizes");
        VelocityField repaired = apply(op, frame, y);
        ScalarField div = discrete_divergence(repaired);
        for (int i = 1; i < h - 1; ++i)
            for (int j = 1; j < w - 1; ++j) {
                const double d2 = div(i, j) * div(i, j);
                if (cleanup::boundary_distance(i, j, h, w) <= strip_width) {
                    strip_sq += d2;
                    ++strip_n;
                    const double du = repaired.u(i, j) - y.u(i, j);
                    const double dv = repaired.v(i, j) - y.v(i, j);
                    dist_sq += du * du + dv * dv;
                    dist_n += 2;
                } else {
                    core_sq += d2;
                    ++core_n;
                }
            }
    }
    StripAudit a;
    a.strip_width = strip_width;
    a.strip_div_rms = strip_n ? std::sqrt(strip_sq / static_cast<double>(strip_n)) : 0.0;
    a.core_div_rms = core_n ? std::sqrt(core_sq / static_cast<double>(core_n)) : 0.0;
    a.strip_to_core_ratio = a.strip_div_rms / std::max(a.core_div_rms, 1e-30);
    a.strip_distortion_mse = dist_n ? dist_sq / static_cast<double>(dist_n) : 0.0;
    return a;
}

Correlation correlate(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw dimension_error("correlate: length mismatch");
    if (xs.size() < 3) throw config_error("correlate: need at least 3 points");
    for (double x : xs)
        if (!std::isfinite(x)) throw numeric_error("correlate: non-finite input");
    for (double y : ys)
        if (!std::isfinite(y)) throw numeric_error("correlate: non-finite input");
    Correlation c;
    c.pearson = pearson(xs, ys);
    c.spearman = pearson(average_ranks(xs), average_ranks(ys));
    return c;
}

}  // namespace crepair::diagnostics
