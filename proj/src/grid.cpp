#include "hetcap/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hetcap {

namespace {
constexpr double kValueFloor = 1e-300; // below this, p ln p contributes zero
}

Grid1D::Grid1D(double center_, double half_width_, int points_)
    : center(center_), half_width(half_width_), points(points_) {
    if (!std::isfinite(center) || !std::isfinite(half_width) || half_width <= 0.0)
        throw std::invalid_argument("Grid1D: half_width must be positive and finite");
    if (points < 16)
        throw std::invalid_argument("Grid1D: need at least 16 points");
}

Eigen::ArrayXd Grid1D::coords() const {
    Eigen::ArrayXd q(points);
    const double h = step();
    for (int i = 0; i < points; ++i) q[i] = lo() + i * h;
    return q;
}

Eigen::ArrayXd Grid1D::quad_weights() const {
    Eigen::ArrayXd w = Eigen::ArrayXd::Constant(points, step());
    w[0] *= 0.5;
    w[points - 1] *= 0.5;
    return w;
}

Density2D::Density2D(Grid2D grid, Eigen::ArrayXXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() != grid_.gx.points || values_.cols() != grid_.gy.points)
        throw std::invalid_argument("Density2D: value shape does not match grid");
    const double peak = values_.maxCoeff();
    const double worst = values_.minCoeff();
    if (worst < -1e-12 * std::max(peak, 1e-30))
        throw std::invalid_argument("Density2D: negative values");
    if (worst < 0.0) values_ = values_.max(0.0);
    mass_ = integrate_2d(*this);
}

bool Density2D::is_normalized(double tol_mass) const {
    return std::abs(mass_ - 1.0) <= tol_mass;
}

double integrate_2d(const Density2D& d) {
    const Eigen::ArrayXd wx = d.grid().gx.quad_weights();
    const Eigen::ArrayXd wy = d.grid().gy.quad_weights();
    return wx.matrix().transpose() * d.values().matrix() * wy.matrix();
}

double differential_entropy(const Density2D& d) {
    const Eigen::ArrayXd wx = d.grid().gx.quad_weights();
    const Eigen::ArrayXd wy = d.grid().gy.quad_weights();
    const auto& v = d.values();
    double acc = 0.0;
    for (int j = 0; j < v.cols(); ++j) {
        double col = 0.0;
        for (int i = 0; i < v.rows(); ++i) {
            const double p = v(i, j);
            if (p > kValueFloor) col += wx[i] * p * std::log(p);
        }
        acc += wy[j] * col;
    }
    return -acc;
}

double kl_divergence(const Density2D& p, const Density2D& q, KlStats* stats,
                     double max_clamped_pmass) {
    if (!(p.grid() == q.grid()))
        throw std::invalid_argument("kl_divergence: densities live on different grids");
    const Eigen::ArrayXd wx = p.grid().gx.quad_weights();
    const Eigen::ArrayXd wy = p.grid().gy.quad_weights();
    const auto& pv = p.values();
    const auto& qv = q.values();
    double acc = 0.0;
    KlStats st;
    for (int j = 0; j < pv.cols(); ++j) {
        double col = 0.0;
        for (int i = 0; i < pv.rows(); ++i) {
            const double pi = pv(i, j);
            if (pi <= kValueFloor) continue;
            double qi = qv(i, j);
            if (qi < kValueFloor) {
                ++st.clamped_cells;
                st.clamped_pmass += wx[i] * wy[j] * pi;
                qi = kValueFloor;
            }
            col += wx[i] * pi * std::log(pi / qi);
        }
        acc += wy[j] * col;
    }
    if (stats) *stats = st;
    if (st.clamped_pmass > max_clamped_pmass)
        throw std::domain_error("kl_divergence: support of p escapes support of q");
    return acc;
}

Density2D smooth_y(const Density2D& p, double t, double* mass_ratio) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("smooth_y: t must be positive");
    const double h = p.grid().gy.step();
    const int radius = static_cast<int>(std::ceil(8.0 * std::sqrt(t) / h));
    const auto& v = p.values();
    Eigen::ArrayXXd out;
    if (radius == 0) {
        out = v; // kernel narrower than one cell: identity
    } else {
        Eigen::ArrayXd kernel(2 * radius + 1);
        for (int r = -radius; r <= radius; ++r)
            kernel[r + radius] = std::exp(-0.5 * (r * h) * (r * h) / t);
        kernel /= kernel.sum() * h; // unit discrete mass
        out = Eigen::ArrayXXd::Zero(v.rows(), v.cols());
        const int ny = static_cast<int>(v.cols());
        for (int j = 0; j < ny; ++j) {
            const int rlo = std::max(-radius, j - (ny - 1));
            const int rhi = std::min(radius, j);
            for (int r = rlo; r <= rhi; ++r)
                out.col(j) += (kernel[r + radius] * h) * v.col(j - r);
        }
    }
    Density2D result(p.grid(), std::move(out));
    if (mass_ratio)
        *mass_ratio = p.mass() > 0.0 ? result.mass() / p.mass() : 1.0;
    return result;
}

Density2D gaussian_density(const Grid2D& grid, double mean_x, double mean_y,
                           double var_x, double var_y) {
    if (!(var_x > 0.0) || !(var_y > 0.0))
        throw std::invalid_argument("gaussian_density: variances must be positive");
    const Eigen::ArrayXd xs = grid.gx.coords();
    const Eigen::ArrayXd ys = grid.gy.coords();
    const Eigen::ArrayXd fx = (-0.5 * (xs - mean_x).square() / var_x).exp();
    const Eigen::ArrayXd fy = (-0.5 * (ys - mean_y).square() / var_y).exp();
    const double norm = 1.0 / (2.0 * M_PI * std::sqrt(var_x * var_y));
    Eigen::ArrayXXd v = norm * (fx.matrix() * fy.matrix().transpose()).array();
    return Density2D(grid, std::move(v));
}

Grid1D axis_for(double mean, double variance, int points, double nsigma) {
    if (!(variance > 0.0))
        throw std::invalid_argument("axis_for: variance must be positive");
    return Grid1D(mean, nsigma * std::sqrt(variance), points);
}

Grid1D hull_axis(const Grid1D& a, const Grid1D& b, int points) {
    const double lo = std::min(a.lo(), b.lo());
    const double hi = std::max(a.hi(), b.hi());
    return Grid1D(0.5 * (lo + hi), 0.5 * (hi - lo), points);
}

Grid2D outcome_grid(double mean_x, double mean_y, double var_x, double var_y,
                    int points_per_axis, double nsigma) {
    return Grid2D{axis_for(mean_x, var_x, points_per_axis, nsigma),
                  axis_for(mean_y, var_y, points_per_axis, nsigma)};
}

} // namespace hetcap
