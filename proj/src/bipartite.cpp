#include "bifree/bipartite.hpp"

#include "bifree/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bifree {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double weighted_sum(const std::vector<double>& v, const std::vector<double>& w)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * w[i];
    return s;
}

// K(i, s) = (p_i - p_s) / ((p_i - p_s)^2 + eps^2) * w_s.
Eigen::MatrixXd kernel(const std::vector<double>& points, const std::vector<double>& weights, double eps)
{
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    const double e2 = eps * eps;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index s = 0; s < n; ++s) {
            const double d = points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(s)];
            k(i, s) = d / (d * d + e2) * weights[static_cast<std::size_t>(s)];
        }
    return k;
}

std::vector<double> axis_points(double lo, double h, std::size_t n)
{
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = lo + static_cast<double>(i) * h;
    return p;
}

// Left field for f viewed as f(a, b) with the transform along a.
RowMatrix left_field(const RowMatrix& f, const MarginalDensity& fa, double eps, const std::vector<std::uint8_t>& mask)
{
    const Eigen::MatrixXd k = kernel(fa.points, fa.weights, eps);
    const Eigen::Map<const Eigen::VectorXd> fa_vec(fa.samples.data(), static_cast<Eigen::Index>(fa.samples.size()));
    const Eigen::VectorXd h = k * fa_vec;
    const RowMatrix g = k * f;
    RowMatrix xi = RowMatrix::Zero(f.rows(), f.cols());
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            if (mask[static_cast<std::size_t>(i * f.cols() + j)]) continue;
            xi(i, j) = h(i) + fa_vec(i) * g(i, j) / f(i, j);
        }
    return xi;
}

}  // namespace

void GridSpec::validate() const
{
    if (nx < 3 || ny < 3) throw ValidationError("grid needs at least 3 points per axis");
    if (!(xmax > xmin) || !(ymax > ymin) || !std::isfinite(xmin) || !std::isfinite(xmax) || !std::isfinite(ymin) ||
        !std::isfinite(ymax))
        throw ValidationError("grid range must be finite and non-empty");
}

std::vector<double> trapezoid_weights(std::size_t n, double h)
{
    std::vector<double> w(n, h);
    if (n > 0) {
        w.front() = 0.5 * h;
        w.back() = 0.5 * h;
    }
    return w;
}

DensityGrid::DensityGrid(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values))
{
    spec_.validate();
    if (values_.size() != spec_.nx * spec_.ny) {
        std::ostringstream os;
        os << "grid expects " << spec_.nx * spec_.ny << " values, got " << values_.size();
        throw ValidationError(os.str());
    }
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("density values must be finite and nonnegative");
    wx_ = trapezoid_weights(spec_.nx, spec_.hx());
    wy_ = trapezoid_weights(spec_.ny, spec_.hy());
    raw_mass_ = mass();
    if (!(raw_mass_ > 0.0)) throw ValidationError("density has zero mass");
    for (double& v : values_) v /= raw_mass_;
}

double DensityGrid::mass() const
{
    double total = 0.0;
    for (std::size_t i = 0; i < spec_.nx; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < spec_.ny; ++j) row += value(i, j) * wy_[j];
        total += row * wx_[i];
    }
    return total;
}

double MarginalDensity::mass() const { return weighted_sum(samples, weights); }

MarginalDensity make_marginal(double lo, double hi, std::vector<double> samples)
{
    if (samples.size() < 3) throw ValidationError("marginal needs at least 3 samples");
    if (!(hi > lo)) throw ValidationError("marginal range must be non-empty");
    MarginalDensity m;
    m.lo = lo;
    m.hi = hi;
    const double h = (hi - lo) / static_cast<double>(samples.size() - 1);
    m.points = axis_points(lo, h, samples.size());
    m.weights = trapezoid_weights(samples.size(), h);
    m.samples = std::move(samples);
    for (double v : m.samples)
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("density values must be finite and nonnegative");
    const double total = m.mass();
    if (!(total > 0.0)) throw ValidationError("density has zero mass");
    for (double& v : m.samples) v /= total;
    return m;
}

std::pair<MarginalDensity, MarginalDensity> marginals(const DensityGrid& g)
{
    const GridSpec& s = g.spec();
    std::vector<double> fx(s.nx, 0.0), fy(s.ny, 0.0);
    for (std::size_t i = 0; i < s.nx; ++i)
        for (std::size_t j = 0; j < s.ny; ++j) {
            fx[i] += g.value(i, j) * g.y_weights()[j];
            fy[j] += g.value(i, j) * g.x_weights()[i];
        }
    return {make_marginal(s.xmin, s.xmax, std::move(fx)), make_marginal(s.ymin, s.ymax, std::move(fy))};
}

std::vector<double> hilbert_pv(const MarginalDensity& f, double eps)
{
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    const std::size_t n = f.points.size();
    std::vector<double> out(n, 0.0);
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double d = f.points[i] - f.points[s];
            acc += d / (d * d + e2) * f.samples[s] * f.weights[s];
        }
        out[i] = acc;
    }
    return out;
}

double free_fisher(const MarginalDensity& f, double eps)
{
    const auto h = hilbert_pv(f, eps);
    double total = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) total += 4.0 * h[i] * h[i] * f.samples[i] * f.weights[i];
    return total;
}

ConjugateField conjugate_field(const DensityGrid& g, const ConjugateConfig& cfg)
{
    if (cfg.eps < 0.0 || !std::isfinite(cfg.eps)) throw ValidationError("eps must be positive");
    if (!(cfg.mask_threshold >= 0.0)) throw ValidationError("mask threshold must be nonnegative");
    const GridSpec& s = g.spec();
    const auto nx = static_cast<Eigen::Index>(s.nx);
    const auto ny = static_cast<Eigen::Index>(s.ny);
    const auto [fx, fy] = marginals(g);
    const RowMatrix f = Eigen::Map<const RowMatrix>(g.values().data(), nx, ny);

    ConjugateField out;
    out.spec = s;
    out.eps_x = cfg.eps > 0.0 ? cfg.eps : s.hx();
    out.eps_y = cfg.eps > 0.0 ? cfg.eps : s.hy();

    const double cut = cfg.mask_threshold * f.maxCoeff();
    out.mask.assign(s.nx * s.ny, 0);
    const double fx_cut = cfg.mask_threshold * *std::max_element(fx.samples.begin(), fx.samples.end());
    const double fy_cut = cfg.mask_threshold * *std::max_element(fy.samples.begin(), fy.samples.end());
    std::size_t product_cells = 0, holes = 0;
    for (std::size_t i = 0; i < s.nx; ++i)
        for (std::size_t j = 0; j < s.ny; ++j) {
            const bool zero = !(g.value(i, j) > cut);
            out.mask[i * s.ny + j] = zero ? 1 : 0;
            if (fx.samples[i] > fx_cut && fy.samples[j] > fy_cut) {
                ++product_cells;
                if (zero) ++holes;
            }
        }
    out.mask_fraction = product_cells ? static_cast<double>(holes) / static_cast<double>(product_cells) : 0.0;
    if (out.mask_fraction > cfg.max_mask_fraction) {
        std::ostringstream os;
        os << "support is far from a product: " << out.mask_fraction
           << " of the product of marginal supports has zero density";
        out.warnings.push_back(os.str());
    }

    const RowMatrix ft = f.transpose();
    std::vector<std::uint8_t> mask_t(out.mask.size());
    for (std::size_t i = 0; i < s.nx; ++i)
        for (std::size_t j = 0; j < s.ny; ++j) mask_t[j * s.nx + i] = out.mask[i * s.ny + j];

    auto fields = [&](double ex, double ey) {
        RowMatrix l = left_field(f, fx, ex, out.mask);
        RowMatrix r = left_field(ft, fy, ey, mask_t).transpose();
        return std::pair<RowMatrix, RowMatrix>(std::move(l), std::move(r));
    };
    auto [l, r] = fields(out.eps_x, out.eps_y);
    if (cfg.richardson) {
        auto [l2, r2] = fields(0.5 * out.eps_x, 0.5 * out.eps_y);
        l = 2.0 * l2 - l;
        r = 2.0 * r2 - r;
    }
    out.left.assign(l.data(), l.data() + l.size());
    out.right.assign(r.data(), r.data() + r.size());
    return out;
}

FisherNumeric fisher_numeric(const DensityGrid& g, const ConjugateField& field)
{
    const GridSpec& s = g.spec();
    if (field.left.size() != g.values().size() || field.spec.nx != s.nx || field.spec.ny != s.ny)
        throw ValidationError("conjugate field does not match the grid");
    FisherNumeric out;
    for (std::size_t i = 0; i < s.nx; ++i) {
        double row_l = 0.0, row_r = 0.0;
        for (std::size_t j = 0; j < s.ny; ++j) {
            const std::size_t k = i * s.ny + j;
            const double fw = g.value(i, j) * g.y_weights()[j];
            row_l += field.left[k] * field.left[k] * fw;
            row_r += field.right[k] * field.right[k] * fw;
        }
        out.left += row_l * g.x_weights()[i];
        out.right += row_r * g.x_weights()[i];
    }
    out.value = out.left + out.right;
    out.warnings = field.warnings;
    return out;
}

FisherNumeric fisher_numeric(const DensityGrid& g, const ConjugateConfig& cfg)
{
    return fisher_numeric(g, conjugate_field(g, cfg));
}

double semicircular_pdf(double c, double x, double y)
{
    if (std::abs(x) >= 2.0 || std::abs(y) >= 2.0) return 0.0;
    const double c2 = c * c;
    const double denom = (1 - c2) * (1 - c2) - c * (1 + c2) * x * y + c2 * (x * x + y * y);
    return (1 - c2) / (4 * std::numbers::pi * std::numbers::pi) * std::sqrt(4 - x * x) * std::sqrt(4 - y * y) / denom;
}

DensityGrid semicircular_density(double c, GridSpec spec)
{
    if (!std::isfinite(c) || std::abs(c) >= 1.0) throw ValidationError("mu_c needs |c| < 1");
    spec.validate();
    std::vector<double> values(spec.nx * spec.ny);
    for (std::size_t i = 0; i < spec.nx; ++i)
        for (std::size_t j = 0; j < spec.ny; ++j) values[i * spec.ny + j] = semicircular_pdf(c, spec.x(i), spec.y(j));
    return DensityGrid(spec, std::move(values));
}

DensityGrid semicircular_density(double c, std::size_t points)
{
    GridSpec spec;
    spec.nx = spec.ny = points;
    return semicircular_density(c, spec);
}

}  // namespace bifree
