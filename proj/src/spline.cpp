#include "sohkan/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sohkan {

double SplineGrid::knot(int j) const {
    if (j < 0 || j >= knot_count()) throw std::out_of_range("knot index out of range");
    return lo + (j - order) * spacing();
}

double SplineGrid::clamp(double x) const { return std::min(hi, std::max(lo, x)); }

void SplineGrid::validate() const {
    if (!(hi > lo)) throw std::invalid_argument("spline grid needs hi > lo");
    if (intervals < 1) throw std::invalid_argument("spline grid needs at least one interval");
    if (order < 1) throw std::invalid_argument("spline order must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("spline grid bounds must be finite");
    }
}

void bspline_basis_into(const SplineGrid& grid, double x, double* out) {
    grid.validate();
    const int p = grid.order;
    const int count = grid.basis_count();
    std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(count));

    const double xc = grid.clamp(x);
    const double h = grid.spacing();

    // Knot span index mu with knot(mu) <= xc < knot(mu + 1), clamped so the
    // right boundary evaluates on the last interior span.
    int mu = p + static_cast<int>(std::floor((xc - grid.lo) / h));
    mu = std::min(mu, p + grid.intervals - 1);
    mu = std::max(mu, p);

    // Triangular de Boor scheme: values[j] ends up as basis mu - p + j.
    double values[64];
    double left[64];
    double right[64];
    if (p + 1 > 64) throw std::invalid_argument("spline order too large");

    values[0] = 1.0;
    for (int level = 1; level <= p; ++level) {
        left[level] = xc - grid.knot(mu + 1 - level);
        right[level] = grid.knot(mu + level) - xc;
        double saved = 0.0;
        for (int j = 0; j < level; ++j) {
            const double denom = right[j + 1] + left[level - j];
            const double term = values[j] / denom;
            values[j] = saved + right[j + 1] * term;
            saved = left[level - j] * term;
        }
        values[level] = saved;
    }

    for (int j = 0; j <= p; ++j) {
        out[mu - p + j] = values[j];
    }
}

std::vector<double> bspline_basis(const SplineGrid& grid, double x) {
    std::vector<double> out(static_cast<std::size_t>(grid.basis_count()), 0.0);
    bspline_basis_into(grid, x, out.data());
    return out;
}

}  // namespace sohkan
