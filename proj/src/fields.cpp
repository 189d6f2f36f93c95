#include "crepair/fields.hpp"

#include <cmath>

namespace crepair {

ScalarField::ScalarField(int height, int width, double fill)
    : h_(height), w_(width), data_(static_cast<std::size_t>(height) * width, fill) {
    if (height < 1 || width < 1) throw dimension_error("ScalarField: empty grid");
}

bool ScalarField::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

VelocityField::VelocityField(int height, int width, double fill_u, double fill_v)
    : h_(height), w_(width), u_(height, width, fill_u), v_(height, width, fill_v) {}

VelocityField::VelocityField(ScalarField u, ScalarField v)
    : h_(u.height()), w_(u.width()), u_(std::move(u)), v_(std::move(v)) {
    if (u_.height() != v_.height() || u_.width() != v_.width())
        throw dimension_error("VelocityField: u/v size mismatch");
}

void require_min_size(const VelocityField& f, int min_h, int min_w, const char* who) {
    if (f.height() < min_h || f.width() < min_w)
        throw dimension_error(std::string(who) + ": grid too small (" +
                              std::to_string(f.height()) + "x" + std::to_string(f.width()) + ")");
}

void require_same_size(const VelocityField& a, const VelocityField& b, const char* who) {
    if (a.height() != b.height() || a.width() != b.width())
        throw dimension_error(std::string(who) + ": dimension mismatch");
}

ScalarField discrete_divergence(const VelocityField& f) {
    require_min_size(f, 3, 3, "discrete_divergence");
    const int h = f.height(), w = f.width();
    ScalarField d(h, w, 0.0);
    for (int i = 1; i < h - 1; ++i)
        for (int j = 1; j < w - 1; ++j)
            d(i, j) = f.u(i, j) - f.u(i, j - 1) + f.v(i, j) - f.v(i - 1, j);
    return d;
}

double divergence_rms(const VelocityField& f) {
    ScalarField d = discrete_divergence(f);
    const int h = f.height(), w = f.width();
    double sum_sq = 0.0;
    for (int i = 1; i < h - 1; ++i)
        for (int j = 1; j < w - 1; ++j) sum_sq += d(i, j) * d(i, j);
    const double n = static_cast<double>(h - 2) * (w - 2);
    return std::sqrt(sum_sq / n);
}

double mse(const VelocityField& a, const VelocityField& b) {
    require_same_size(a, b, "mse");
    const std::size_t n = a.u_grid().data().size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double du = a.u_grid().data()[k] - b.u_grid().data()[k];
        const double dv = a.v_grid().data()[k] - b.v_grid().data()[k];
        sum += du * du + dv * dv;
    }
    return sum / (2.0 * static_cast<double>(n));
}

double energy(const VelocityField& f) {
    const std::size_t n = f.u_grid().data().size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = f.u_grid().data()[k];
        const double v = f.v_grid().data()[k];
        sum += u * u + v * v;
    }
    return sum / static_cast<double>(n);
}

VelocityField field_axpy(const VelocityField& f, const VelocityField& g, double scale) {
    require_same_size(f, g, "field_axpy");
    VelocityField out = f;
    const std::size_t n = f.u_grid().data().size();
    for (std::size_t k = 0; k < n; ++k) {
        out.u_grid().data()[k] += scale * (g.u_grid().data()[k] - f.u_grid().data()[k]);
        out.v_grid().data()[k] += scale * (g.v_grid().data()[k] - f.v_grid().data()[k]);
    }
    return out;
}

double field_dot(const VelocityField& a, const VelocityField& b) {
    require_same_size(a, b, "field_dot");
    const std::size_t n = a.u_grid().data().size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += a.u_grid().data()[k] * b.u_grid().data()[k];
        sum += a.v_grid().data()[k] * b.v_grid().data()[k];
    }
    return sum;
}

double component_mean_u(const VelocityField& f) {
    double s = 0.0;
    for (double x : f.u_grid().data()) s += x;
    return s / static_cast<double>(f.u_grid().data().size());
}

double component_mean_v(const VelocityField& f) {
    double s = 0.0;
    for (double x : f.v_grid().data()) s += x;
    return s / static_cast<double>(f.v_grid().data().size());
}

VelocityField to_physical(const VelocityField& f, const NormFrame& frame) {
    frame.validate();
    VelocityField out = f;
    for (double& x : out.u_grid().data()) x = x * frame.std_u + frame.mean_u;
    for (double& x : out.v_grid().data()) x = x * frame.std_v + frame.mean_v;
    return out;
}

VelocityField to_normalized(const VelocityField& f, const NormFrame& frame) {
    frame.validate();
    VelocityField out = f;
    for (double& x : out.u_grid().data()) x = (x - frame.mean_u) / frame.std_u;
    for (double& x : out.v_grid().data()) x = (x - frame.mean_v) / frame.std_v;
    return out;
}

}  // namespace crepair
