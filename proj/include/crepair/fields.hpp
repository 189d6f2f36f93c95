#ifndef CREPAIR_FIELDS_HPP
#define CREPAIR_FIELDS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crepair {

struct dimension_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct frame_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// H x W scalar grid, row-major (i = row = y index, j = column = x index).
class ScalarField {
  public:
    ScalarField() = default;
    ScalarField(int height, int width, double fill = 0.0);

    int height() const { return h_; }
    int width() const { return w_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * w_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * w_ + j]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

  private:
    int h_ = 0;
    int w_ = 0;
    std::vector<double> data_;
};

/// Two-component collocated velocity grid (u, v) on an H x W lattice with
/// unit grid spacing. Component-major, row-major storage: the j-difference
/// acts on u, the i-difference acts on v.
class VelocityField {
  public:
    VelocityField() = default;
    VelocityField(int height, int width, double fill_u = 0.0, double fill_v = 0.0);
    VelocityField(ScalarField u, ScalarField v);

    int height() const { return h_; }
    int width() const { return w_; }

    double& u(int i, int j) { return u_(i, j); }
    double u(int i, int j) const { return u_(i, j); }
    double& v(int i, int j) { return v_(i, j); }
    double v(int i, int j) const { return v_(i, j); }

    ScalarField& u_grid() { return u_; }
    const ScalarField& u_grid() const { return u_; }
    ScalarField& v_grid() { return v_; }
    const ScalarField& v_grid() const { return v_; }

    bool all_finite() const { return u_.all_finite() && v_.all_finite(); }

  private:
    int h_ = 0;
    int w_ = 0;
    ScalarField u_;
    ScalarField v_;
};

/// Per-component affine normalization parameters and which frame a cleanup
/// operator should run in.
enum class Frame { physical, normalized };

struct NormFrame {
    double mean_u = 0.0;
    double std_u = 1.0;
    double mean_v = 0.0;
    double std_v = 1.0;

    void validate() const {
        if (!(std_u > 0.0) || !(std_v > 0.0))
            throw frame_error("NormFrame: std must be positive");
    }
    static NormFrame identity() { return NormFrame{}; }
};

/// Interior index ranges i in [1, H-2], j in [1, W-2]; the boundary ring is
/// exactly the complement.
struct InteriorRegion {
    int i_begin = 1, i_end = 0;  // half-open [i_begin, i_end)
    int j_begin = 1, j_end = 0;

    explicit InteriorRegion(int height, int width) : i_end(height - 1), j_end(width - 1) {
        if (height < 3 || width < 3)
            throw dimension_error("InteriorRegion: grid must be at least 3x3");
    }
    int rows() const { return i_end - i_begin; }
    int cols() const { return j_end - j_begin; }
};

void require_min_size(const VelocityField& f, int min_h, int min_w, const char* who);
void require_same_size(const VelocityField& a, const VelocityField& b, const char* who);

/// Backward-difference divergence on interior cells; boundary ring is zero.
/// (div f)_{i,j} = u_{i,j} - u_{i,j-1} + v_{i,j} - v_{i-1,j}.
ScalarField discrete_divergence(const VelocityField& f);

/// RMS of the discrete divergence over interior cells only.
double divergence_rms(const VelocityField& f);

/// Mean over all 2*H*W entries of the squared difference.
double mse(const VelocityField& a, const VelocityField& b);

/// Mean of u^2 + v^2 over all cells.
double energy(const VelocityField& f);

/// f + scale * (g - f), entrywise.
VelocityField field_axpy(const VelocityField& f, const VelocityField& g, double scale);

/// Sum over all entries of a*b (both components).
double field_dot(const VelocityField& a, const VelocityField& b);

double component_mean_u(const VelocityField& f);
double component_mean_v(const VelocityField& f);

VelocityField to_physical(const VelocityField& f, const NormFrame& frame);
VelocityField to_normalized(const VelocityField& f, const NormFrame& frame);

}  // namespace crepair

#endif
