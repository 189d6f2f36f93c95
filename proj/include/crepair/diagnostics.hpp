#ifndef CREPAIR_DIAGNOSTICS_HPP
#define CREPAIR_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "crepair/compose.hpp"
#include "crepair/fields.hpp"

namespace crepair::diagnostics {

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single sample
};

/// Per-operator audit over a target set: divergence before/after, target
/// distortion, solver residual (Poisson families only), and distortion as a
/// percentage of target energy.
struct OperatorAudit {
    std::string spec;
    int samples = 0;
    Stat div_before;
    Stat div_after;
    Stat distortion_mse;
    std::optional<Stat> relative_residual;
    Stat distortion_energy_pct;
};

OperatorAudit audit_operator(const compose::CleanupSpec& op,
                             const std::vector<VelocityField>& targets,
                             const NormFrame& frame = NormFrame::identity());

/// Squared-norm split of the repaired-state error:
///   ||op(x) - y||^2 = ||op(x) - op(y)||^2 + ||op(y) - y||^2
///                     + 2 <op(x) - op(y), op(y) - y>.
/// Norms are plain Euclidean sums over both components.
struct ErrorDecomposition {
    double transported_sq = 0.0;  // ||op(x) - op(y)||^2
    double distortion_sq = 0.0;   // ||op(y) - y||^2
    double cross = 0.0;           // 2 <op(x) - op(y), op(y) - y>
    double total_sq = 0.0;        // ||op(x) - y||^2, evaluated directly
    double transported_norm = 0.0;
    double distortion_norm = 0.0;
};

ErrorDecomposition decompose_error(const compose::CleanupSpec& op, const VelocityField& x,
                                   const VelocityField& y,
                                   const NormFrame& frame = NormFrame::identity());

/// Divergence concentration near the boundary after repair: strip = interior
/// cells within strip_width of the wall, core = the remaining interior.
struct StripAudit {
    int strip_width = 2;
    double strip_div_rms = 0.0;
    double core_div_rms = 0.0;
    double strip_to_core_ratio = 0.0;
    double strip_distortion_mse = 0.0;
};

StripAudit strip_audit(const compose::CleanupSpec& op, const std::vector<VelocityField>& targets,
                       int strip_width = 2, const NormFrame& frame = NormFrame::identity());

struct Correlation {
    double pearson = 0.0;
    double spearman = 0.0;
};

/// Pearson on values; Spearman = Pearson on average ranks (ties get the mean
/// rank). Throws numeric_error when either input has zero variance.
Correlation correlate(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace crepair::diagnostics

#endif
