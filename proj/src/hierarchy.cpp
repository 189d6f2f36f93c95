#include "crepair/hierarchy.hpp"

#include <cmath>

namespace crepair::hierarchy {
namespace {

// Lower Cholesky factor of a dense SPD matrix (row-major n x n). Throws on
// a non-positive pivot, which covers rank-deficient S^T S.
std::vector<double> cholesky(const std::vector<double>& a, int n) {
    std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                sum -= l[static_cast<std::size_t>(i) * n + k] * l[static_cast<std::size_t>(j) * n + k];
            if (i == j) {
                if (sum <= 0.0)
                    throw config_error("Hierarchy: S^T S is not positive definite (rank-deficient S)");
                l[static_cast<std::size_t>(i) * n + i] = std::sqrt(sum);
            } else {
                l[static_cast<std::size_t>(i) * n + j] = sum / l[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    return l;
}

Vector chol_solve(const std::vector<double>& l, int n, Vector rhs) {
    // L y = rhs
    for (int i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (int k = 0; k < i; ++k) sum -= l[static_cast<std::size_t>(i) * n + k] * rhs[k];
        rhs[i] = sum / l[static_cast<std::size_t>(i) * n + i];
    }
    // L^T z = y
    for (int i = n - 1; i >= 0; --i) {
        double sum = rhs[i];
        for (int k = i + 1; k < n; ++k) sum -= l[static_cast<std::size_t>(k) * n + i] * rhs[k];
        rhs[i] = sum / l[static_cast<std::size_t>(i) * n + i];
    }
    return rhs;
}

}  // namespace

void Proportions::validate() const {
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) throw config_error("Proportions: entries must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw config_error("Proportions: entries must sum to 1");
}

Hierarchy::Hierarchy(std::vector<double> s_row_major, int num_nodes, int num_bottom, int root,
                     std::vector<int> bottom, std::vector<std::string> labels)
    : m_(num_nodes), b_(num_bottom), root_(root), s_(std::move(s_row_major)),
      bottom_(std::move(bottom)), labels_(std::move(labels)) {
    if (m_ <= b_ || b_ < 1) throw config_error("Hierarchy: need m > b >= 1");
    if (s_.size() != static_cast<std::size_t>(m_) * b_)
        throw config_error("Hierarchy: summing matrix size mismatch");
    if (static_cast<int>(bottom_.size()) != b_)
        throw config_error("Hierarchy: bottom index count must equal b");
    if (root_ < 0 || root_ >= m_) throw config_error("Hierarchy: root index out of range");
    for (double x : s_)
        if (x != 0.0 && x != 1.0) throw config_error("Hierarchy: S entries must be 0 or 1");
    for (int c = 0; c < b_; ++c) {
        const int row = bottom_[c];
        if (row < 0 || row >= m_) throw config_error("Hierarchy: bottom index out of range");
        for (int cc = 0; cc < b_; ++cc)
            if (s(row, cc) != (cc == c ? 1.0 : 0.0))
                throw config_error("Hierarchy: bottom node row must be the matching unit vector");
    }
    for (int c = 0; c < b_; ++c)
        if (s(root_, c) != 1.0)
            throw config_error("Hierarchy: root row must be all ones over bottom columns");

    // Gram matrix and factorization, with a crude condition guard.
    std::vector<double> gram(static_cast<std::size_t>(b_) * b_, 0.0);
    for (int r = 0; r < m_; ++r)
        for (int i = 0; i < b_; ++i) {
            if (s(r, i) == 0.0) continue;
            for (int j = 0; j < b_; ++j)
                gram[static_cast<std::size_t>(i) * b_ + j] += s(r, i) * s(r, j);
        }
    chol_ = cholesky(gram, b_);
    double diag_max = 0.0, diag_min = chol_[0];
    for (int i = 0; i < b_; ++i) {
        const double d = chol_[static_cast<std::size_t>(i) * b_ + i];
        diag_max = std::max(diag_max, d);
        diag_min = std::min(diag_min, d);
    }
    if ((diag_max / diag_min) * (diag_max / diag_min) > 1e12)
        throw config_error("Hierarchy: S^T S too ill-conditioned");
}

Vector Hierarchy::apply_s(const Vector& z) const {
    if (static_cast<int>(z.size()) != b_) throw dimension_error("Hierarchy: bottom vector size");
    Vector out(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
        double sum = 0.0;
        for (int c = 0; c < b_; ++c) sum += s(r, c) * z[c];
        out[r] = sum;
    }
    return out;
}

Vector Hierarchy::ols_coeffs(const Vector& x) const {
    if (static_cast<int>(x.size()) != m_) throw dimension_error("Hierarchy: node vector size");
    Vector g(b_, 0.0);
    for (int r = 0; r < m_; ++r)
        for (int c = 0; c < b_; ++c) g[c] += s(r, c) * x[r];
    return chol_solve(chol_, b_, std::move(g));
}

Vector Hierarchy::bottom_solve(const Vector& x) const { return ols_coeffs(x); }

Vector reconcile_ols(const Hierarchy& h, const Vector& x) { return h.apply_s(h.ols_coeffs(x)); }

Vector reconcile_bottom_up(const Hierarchy& h, const Vector& x) {
    if (static_cast<int>(x.size()) != h.num_nodes())
        throw dimension_error("reconcile_bottom_up: node vector size");
    Vector z(h.num_bottom());
    for (int c = 0; c < h.num_bottom(); ++c) z[c] = x[h.bottom_indices()[c]];
    return h.apply_s(z);
}

Vector reconcile_top_down(const Hierarchy& h, const Proportions& p, const Vector& x,
                          double alpha) {
    p.validate();
    if (static_cast<int>(p.p.size()) != h.num_bottom())
        throw dimension_error("reconcile_top_down: proportions size");
    if (static_cast<int>(x.size()) != h.num_nodes())
        throw dimension_error("reconcile_top_down: node vector size");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw config_error("reconcile_top_down: alpha must lie in [0, 1]");
    const double root_value = x[h.root()];
    Vector z(h.num_bottom());
    for (int c = 0; c < h.num_bottom(); ++c) z[c] = p.p[c] * root_value;
    Vector td = h.apply_s(z);
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * (td[i] - x[i]);
    return out;
}

double coherence_rms(const Hierarchy& h, const Vector& x) {
    Vector fit = h.apply_s(h.bottom_solve(x));
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - fit[i];
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(x.size()));
}

double hier_distortion(const Hierarchy& h, const std::function<Vector(const Vector&)>& op,
                       const std::vector<Vector>& targets) {
    if (targets.empty()) throw config_error("hier_distortion: no targets");
    double total = 0.0;
    for (const Vector& y : targets) {
        Vector repaired = op(y);
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = repaired[i] - y[i];
            sum_sq += d * d;
        }
        total += sum_sq / static_cast<double>(y.size());
    }
    (void)h;
    return total / static_cast<double>(targets.size());
}

Proportions proportions_from_history(const Hierarchy& h, const std::vector<Vector>& history) {
    if (history.empty()) throw config_error("proportions_from_history: empty history");
    Proportions out;
    out.p.assign(h.num_bottom(), 0.0);
    int used = 0;
    for (const Vector& x : history) {
        const double root_value = x[h.root()];
        if (root_value == 0.0) continue;
        for (int c = 0; c < h.num_bottom(); ++c)
            out.p[c] += x[h.bottom_indices()[c]] / root_value;
        ++used;
    }
    if (used == 0) throw config_error("proportions_from_history: root is zero everywhere");
    double sum = 0.0;
    for (double& x : out.p) {
        x /= used;
        sum += x;
    }
    // Shares of each slice sum to 1 only when every slice is coherent; keep
    // the normalized mean so the result is always a valid proportion vector.
    for (double& x : out.p) x /= sum;
    return out;
}

}  // namespace crepair::hierarchy
