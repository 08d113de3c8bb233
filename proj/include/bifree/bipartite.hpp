#pragma once

// Commuting left/right pairs given by a joint density on a rectangle:
// marginals, regularized Hilbert transforms, the integral form of the
// conjugate variables and their numerical Fisher information.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bifree {

inline constexpr double kMaskThreshold = 1e-10;
inline constexpr double kMassTolerance = 1e-6;

/// Uniform node grid on [xmin, xmax] x [ymin, ymax], endpoints included.
struct GridSpec {
    double xmin = -2.0;
    double xmax = 2.0;
    double ymin = -2.0;
    double ymax = 2.0;
    std::size_t nx = 256;
    std::size_t ny = 256;

    double hx() const { return (xmax - xmin) / static_cast<double>(nx - 1); }
    double hy() const { return (ymax - ymin) / static_cast<double>(ny - 1); }
    double x(std::size_t i) const { return xmin + static_cast<double>(i) * hx(); }
    double y(std::size_t j) const { return ymin + static_cast<double>(j) * hy(); }
    void validate() const;
};

/// Trapezoid weights for n nodes of spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Row-major samples, value (i, j) at i * ny + j. Construction rescales the
/// values to unit trapezoid mass; raw_mass() keeps the mass as sampled.
class DensityGrid {
public:
    DensityGrid(GridSpec spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t i, std::size_t j) const { return values_[i * spec_.ny + j]; }
    const std::vector<double>& x_weights() const { return wx_; }
    const std::vector<double>& y_weights() const { return wy_; }
    double weight(std::size_t i, std::size_t j) const { return wx_[i] * wy_[j]; }
    double raw_mass() const { return raw_mass_; }
    double mass() const;
    /// Integral of g(x, y) f(x, y) over the grid.
    template <class F>
    double expect(F&& g) const
    {
        double total = 0.0;
        for (std::size_t i = 0; i < spec_.nx; ++i)
            for (std::size_t j = 0; j < spec_.ny; ++j)
                total += g(spec_.x(i), spec_.y(j)) * value(i, j) * weight(i, j);
        return total;
    }

private:
    GridSpec spec_;
    std::vector<double> values_;
    std::vector<double> wx_;
    std::vector<double> wy_;
    double raw_mass_ = 0.0;
};

struct MarginalDensity {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> points;
    std::vector<double> samples;
    std::vector<double> weights;

    double spacing() const { return points.size() > 1 ? points[1] - points[0] : 0.0; }
    double mass() const;
};

/// Uniform sampling of a one-variable density, renormalized to unit mass.
MarginalDensity make_marginal(double lo, double hi, std::vector<double> samples);

std::pair<MarginalDensity, MarginalDensity> marginals(const DensityGrid& g);

/// h(x_i) = sum_s (x_i - s) / ((x_i - s)^2 + eps^2) f(s) w_s. As eps -> 0
/// with eps >= h this converges to the principal value integral; eps of one
/// or two spacings keeps the discrete kernel from oscillating.
std::vector<double> hilbert_pv(const MarginalDensity& f, double eps);

/// Free Fisher information of a single variable, integral of (2h)^2 f.
double free_fisher(const MarginalDensity& f, double eps);

struct ConjugateConfig {
    double eps = 0.0;                 // 0 means one grid spacing per axis
    bool richardson = false;          // 2 xi(eps/2) - xi(eps)
    double mask_threshold = kMaskThreshold;
    double max_mask_fraction = 0.05;  // of the product of marginal supports
};

struct ConjugateField {
    GridSpec spec;
    std::vector<double> left;
    std::vector<double> right;
    std::vector<std::uint8_t> mask;   // 1 where f is treated as zero
    double eps_x = 0.0;
    double eps_y = 0.0;
    double mask_fraction = 0.0;
    std::vector<std::string> warnings;
};

/// xi_l = h_X(x) + f_X(x) G_X(x, y) / f(x, y) off the mask and 0 on it, with
/// G_X(x, y) = sum_s K(x - s) f(s, y) w_s; xi_r symmetrically in y.
ConjugateField conjugate_field(const DensityGrid& g, const ConjugateConfig& cfg = {});

struct FisherNumeric {
    double value = 0.0;
    double left = 0.0;
    double right = 0.0;
    std::vector<std::string> warnings;
};

/// Integral of (xi_l^2 + xi_r^2) f.
FisherNumeric fisher_numeric(const DensityGrid& g, const ConjugateConfig& cfg = {});
FisherNumeric fisher_numeric(const DensityGrid& g, const ConjugateField& field);

/// Closed-form density of mu_c on [-2, 2]^2, zero outside.
double semicircular_pdf(double c, double x, double y);
/// mu_c sampled on `spec` (default [-2, 2]^2). Throws for |c| >= 1.
DensityGrid semicircular_density(double c, GridSpec spec);
DensityGrid semicircular_density(double c, std::size_t points);

}  // namespace bifree
