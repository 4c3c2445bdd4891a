#pragma once

#include <vector>

namespace sohkan {

/// Uniform B-spline grid on [lo, hi] with `order` extra knots mirrored past
/// each boundary, so the basis spans the whole domain and sums to one on it.
///
/// With G = intervals and p = order (the polynomial degree) there are G + p
/// basis functions over G + 2p + 1 knots.
struct SplineGrid {
    double lo = 0.0;
    double hi = 1.0;
    int intervals = 4;
    int order = 3;

    [[nodiscard]] int basis_count() const { return intervals + order; }
    [[nodiscard]] int knot_count() const { return intervals + 2 * order + 1; }
    [[nodiscard]] double spacing() const { return (hi - lo) / intervals; }

    /// Knot j for j in [0, knot_count()). Knot `order` sits at lo and knot
    /// `order + intervals` at hi.
    [[nodiscard]] double knot(int j) const;

    /// Clamps x into [lo, hi]. Spline evaluation saturates outside the grid.
    [[nodiscard]] double clamp(double x) const;

    void validate() const;

    [[nodiscard]] bool operator==(const SplineGrid&) const = default;
};

/// Evaluates every basis function at x via the Cox-de Boor recursion and
/// writes basis_count() values to out. x is clamped into the grid first.
void bspline_basis_into(const SplineGrid& grid, double x, double* out);

/// Convenience wrapper returning the basis vector.
[[nodiscard]] std::vector<double> bspline_basis(const SplineGrid& grid, double x);

}  // namespace sohkan
