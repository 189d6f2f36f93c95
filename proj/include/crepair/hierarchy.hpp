#ifndef CREPAIR_HIERARCHY_HPP
#define CREPAIR_HIERARCHY_HPP

#include <functional>
#include <string>
#include <vector>

#include "crepair/fields.hpp"

namespace crepair::hierarchy {

using Vector = std::vector<double>;

/// Historical bottom-level proportions: non-negative, summing to one.
struct Proportions {
    Vector p;
    void validate() const;
};

/// Summing-matrix hierarchy x = S z. S is m x b with 0/1 entries, full column
/// rank; each bottom node row is a distinct unit vector and the root row is
/// all ones over the bottom columns.
class Hierarchy {
  public:
    Hierarchy(std::vector<double> s_row_major, int num_nodes, int num_bottom, int root,
              std::vector<int> bottom, std::vector<std::string> labels = {});

    int num_nodes() const { return m_; }
    int num_bottom() const { return b_; }
    int root() const { return root_; }
    const std::vector<int>& bottom_indices() const { return bottom_; }
    const std::vector<std::string>& labels() const { return labels_; }
    double s(int row, int col) const { return s_[static_cast<std::size_t>(row) * b_ + col]; }
    const std::vector<double>& s_row_major() const { return s_; }

    Vector apply_s(const Vector& z) const;         // S z
    Vector bottom_solve(const Vector& x) const;    // least-squares bottom vector
    Vector ols_coeffs(const Vector& x) const;      // (S^T S)^{-1} S^T x

  private:
    int m_ = 0, b_ = 0, root_ = 0;
    std::vector<double> s_;       // m x b row-major
    std::vector<int> bottom_;     // node row of each bottom column
    std::vector<std::string> labels_;
    std::vector<double> chol_;    // Cholesky factor of S^T S (b x b, lower)
};

/// Orthogonal projection onto the coherent manifold: S (S^T S)^{-1} S^T x.
Vector reconcile_ols(const Hierarchy& h, const Vector& x);

/// Keep bottom entries, recompute every aggregate: S G_bu x.
Vector reconcile_bottom_up(const Hierarchy& h, const Vector& x);

/// Blended top-down: x + alpha (S p e_root^T x - x). alpha = 1 is the full
/// historical-proportions top-down operator.
Vector reconcile_top_down(const Hierarchy& h, const Proportions& p, const Vector& x, double alpha);

/// RMS of x - S * bottom_solve(x); zero exactly on the coherent manifold.
double coherence_rms(const Hierarchy& h, const Vector& x);

/// Mean over targets of the per-entry MSE ||op(y) - y||^2 / m.
double hier_distortion(const Hierarchy& h, const std::function<Vector(const Vector&)>& op,
                       const std::vector<Vector>& targets);

/// Mean per-leaf share of the root over the provided history (one slice per
/// time step, each of length num_nodes).
Proportions proportions_from_history(const Hierarchy& h, const std::vector<Vector>& history);

}  // namespace crepair::hierarchy

#endif
