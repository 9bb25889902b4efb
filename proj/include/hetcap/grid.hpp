#pragma once

#include <Eigen/Dense>

namespace hetcap {

/// Uniform 1D grid with inclusive endpoints, symmetric about `center`.
struct Grid1D {
    double center = 0.0;
    double half_width = 1.0;
    int points = 16;

    Grid1D(double center, double half_width, int points);

    double step() const { return 2.0 * half_width / (points - 1); }
    double lo() const { return center - half_width; }
    double hi() const { return center + half_width; }
    double point(int i) const { return lo() + i * step(); }
    Eigen::ArrayXd coords() const;
    /// Trapezoid quadrature weights (step everywhere, half step at the ends).
    Eigen::ArrayXd quad_weights() const;

    bool operator==(const Grid1D&) const = default;
};

/// Outcome grid: x axis times y axis.
struct Grid2D {
    Grid1D gx;
    Grid1D gy;

    bool operator==(const Grid2D&) const = default;
};

/// Nonnegative sampled function on a Grid2D. values(i, j) is the sample at
/// (gx.point(i), gy.point(j)). Tiny negative entries (rounding noise) are
/// clamped to zero at construction; anything worse is rejected.
class Density2D {
public:
    Density2D(Grid2D grid, Eigen::ArrayXXd values);

    const Grid2D& grid() const { return grid_; }
    const Eigen::ArrayXXd& values() const { return values_; }
    double mass() const { return mass_; }
    bool is_normalized(double tol_mass = 1e-6) const;

private:
    Grid2D grid_;
    Eigen::ArrayXXd values_;
    double mass_ = 0.0;
};

/// Composite trapezoid double integral of d over its grid.
double integrate_2d(const Density2D& d);

/// -sum p ln p over the grid (nats), with the 0 ln 0 = 0 convention.
double differential_entropy(const Density2D& d);

struct KlStats {
    long clamped_cells = 0;   // cells where q fell below the support floor
    double clamped_pmass = 0; // p-mass carried by those cells
};

/// Relative entropy integral of p from q (nats). Both must live on the same
/// grid. q is clamped below at the support floor; if the clamped cells carry
/// more than `max_clamped_pmass` of p-mass the support condition is violated
/// and the call throws.
double kl_divergence(const Density2D& p, const Density2D& q, KlStats* stats = nullptr,
                     double max_clamped_pmass = 1e-9);

/// Convolution of p with a centered Gaussian of variance t along the y axis
/// (direct discrete convolution, kernel truncated at 8 sqrt(t)). Mass is
/// conserved up to leakage past the grid edge; the input/output mass ratio is
/// reported through *mass_ratio when given.
Density2D smooth_y(const Density2D& p, double t, double* mass_ratio = nullptr);

/// Normalized 2D Gaussian density sampled on `grid`.
Density2D gaussian_density(const Grid2D& grid, double mean_x, double mean_y,
                           double var_x, double var_y);

/// Axis covering mean +- nsigma standard deviations.
Grid1D axis_for(double mean, double variance, int points, double nsigma = 8.0);

/// Axis covering both of the given axes' ranges with `points` points.
Grid1D hull_axis(const Grid1D& a, const Grid1D& b, int points);

Grid2D outcome_grid(double mean_x, double mean_y, double var_x, double var_y,
                    int points_per_axis, double nsigma = 8.0);

} // namespace hetcap
