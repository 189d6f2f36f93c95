#ifndef CREPAIR_CLEANUP_HPP
#define CREPAIR_CLEANUP_HPP

#include <algorithm>
#include <optional>

#include "crepair/fields.hpp"

namespace crepair::cleanup {

/// Cell-count distance to the nearest domain edge.
inline int boundary_distance(int i, int j, int h, int w) {
    return std::min(std::min(i, j), std::min(h - 1 - i, w - 1 - j));
}

/// Boundary taper M_w(i,j) = clip((d(i,j)-1)/w, 0, 1): zero on the first
/// interior ring, one for d >= w+1.
struct TaperMask {
    int width = 1;

    void validate() const {
        if (width < 1) throw config_error("TaperMask: width must be positive");
    }
    double value(int i, int j, int h, int w) const {
        const double m = (static_cast<double>(boundary_distance(i, j, h, w)) - 1.0) / width;
        return std::min(std::max(m, 0.0), 1.0);
    }
};

/// Dirichlet pressure system (A + Lambda) on interior cells, where
/// A = 4I - S_x^+ - S_x^- - S_y^+ - S_y^- with zero pressure on the ring and
/// Lambda >= 0 is a diagonal screened shift.
class PoissonSystem {
  public:
    static PoissonSystem pure(int height, int width) { return screened(height, width, 0.0); }
    static PoissonSystem screened(int height, int width, double lambda);
    static PoissonSystem geo_screened(int height, int width, double lambda_bdry,
                                      double lambda_core, int taper_width);

    int height() const { return h_; }
    int width() const { return w_; }
    bool constant_shift() const { return constant_; }
    double constant_lambda() const { return lambda_; }
    const ScalarField& shift() const { return shift_; }

    /// (A + Lambda) p on interior cells; p ring entries are treated as zero
    /// Dirichlet values. Output is zero on the ring.
    ScalarField apply(const ScalarField& p) const;

    /// Same geometry with an explicit (generally non-constant) shift field.
    PoissonSystem with_shift(ScalarField shift) const;

  private:
    PoissonSystem(int h, int w);
    int h_ = 0, w_ = 0;
    bool constant_ = true;
    double lambda_ = 0.0;
    ScalarField shift_;
};

enum class SolverKind { jacobi, sor, cg, mg, direct };

struct SolverSpec {
    SolverKind kind = SolverKind::direct;
    int iterations = 20;  // jacobi / sor / cg budget
    int v_cycles = 2;     // mg
    double omega = 1.5;   // sor relaxation
    int mg_smooth_sweeps = 2;
    double mg_jacobi_weight = 0.8;

    void validate() const;

    static SolverSpec jacobi(int k) { return {SolverKind::jacobi, k}; }
    static SolverSpec sor(int k, double omega = 1.5) { return {SolverKind::sor, k, 2, omega}; }
    static SolverSpec cg(int k) { return {SolverKind::cg, k}; }
    static SolverSpec mg(int cycles) { return {SolverKind::mg, 20, cycles}; }
    static SolverSpec direct() { return {SolverKind::direct}; }
};

struct PressureSolve {
    ScalarField p;         // zero on the boundary ring
    ScalarField residual;  // rhs - (A + Lambda) p, computed exactly
};

PressureSolve solve_pressure(const PoissonSystem& sys, const ScalarField& rhs,
                             const SolverSpec& solver);

/// Exact solve for spatially constant shift via the separable orthonormal
/// DST-I basis.
ScalarField direct_dst_solve(const PoissonSystem& sys, const ScalarField& rhs);

/// Boundary-preserving velocity cleanup: solve (A+Lambda)p = -div(f), update
/// interior velocities by the forward pressure gradient, copy the boundary
/// ring from the raw field. An optional taper blends the update back toward
/// the raw field near the boundary.
VelocityField cleanup_apply(const VelocityField& f, const PoissonSystem& sys,
                            const SolverSpec& solver,
                            const std::optional<TaperMask>& taper = std::nullopt);

/// ||rhs - (A+Lambda)p||_2 / max(||rhs||_2, 1e-30) for rhs = -div(f).
double relative_system_residual(const VelocityField& f, const PoissonSystem& sys,
                                const SolverSpec& solver);

}  // namespace crepair::cleanup

#endif
