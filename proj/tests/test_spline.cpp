#include "doctest.h"

#include "sohkan/spline.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace sohkan;

namespace {

/// Textbook Cox-de Boor recursion, written independently of the library's
/// triangular evaluation scheme so the two can cross-check each other.
double naive_basis(int i, int p, double x, const std::vector<double>& t) {
    if (p == 0) return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
    double value = 0.0;
    if (t[i + p] != t[i]) {
        value += (x - t[i]) / (t[i + p] - t[i]) * naive_basis(i, p - 1, x, t);
    }
    if (t[i + p + 1] != t[i + 1]) {
        value += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * naive_basis(i + 1, p - 1, x, t);
    }
    return value;
}

std::vector<double> naive_all(const SplineGrid& grid, double x) {
    std::vector<double> knots(grid.knot_count());
    for (int j = 0; j < grid.knot_count(); ++j) knots[j] = grid.knot(j);
    // Close the half-open support at the right edge of the domain.
    if (x >= grid.hi) x = grid.hi - 1e-12 * (grid.hi - grid.lo);
    std::vector<double> out(grid.basis_count());
    for (int i = 0; i < grid.basis_count(); ++i) out[i] = naive_basis(i, grid.order, x, knots);
    return out;
}

}  // namespace

TEST_CASE("grid geometry") {
    SplineGrid grid;
    CHECK(grid.basis_count() == 7);
    CHECK(grid.knot_count() == 11);
    CHECK(grid.spacing() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(grid.knot(grid.order) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(grid.knot(grid.order + grid.intervals) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(grid.knot(0) == doctest::Approx(-0.75).epsilon(1e-15));

    SplineGrid bad = grid;
    bad.intervals = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = grid;
    bad.order = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = grid;
    bad.hi = bad.lo;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("frozen basis values for the default cubic grid") {
    const SplineGrid grid;

    const auto at = [&](double x) { return bspline_basis(grid, x); };

    const std::vector<double> mid = at(0.5);
    const std::vector<double> mid_expect = {0.0, 0.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0.0, 0.0};
    for (std::size_t i = 0; i < mid.size(); ++i) {
        CHECK(mid[i] == doctest::Approx(mid_expect[i]).epsilon(1e-13));
    }

    const std::vector<double> left = at(0.0);
    const std::vector<double> left_expect = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < left.size(); ++i) {
        CHECK(left[i] == doctest::Approx(left_expect[i]).epsilon(1e-13));
    }

    const std::vector<double> inner = at(0.3);
    const std::vector<double> inner_expect = {0.0,       32.0 / 375.0, 473.0 / 750.0,
                                              106.0 / 375.0, 1.0 / 750.0, 0.0, 0.0};
    for (std::size_t i = 0; i < inner.size(); ++i) {
        CHECK(inner[i] == doctest::Approx(inner_expect[i]).epsilon(1e-13));
    }

    const std::vector<double> late = at(0.875);
    const std::vector<double> late_expect = {0.0, 0.0, 0.0, 1.0 / 48.0, 23.0 / 48.0,
                                             23.0 / 48.0, 1.0 / 48.0};
    for (std::size_t i = 0; i < late.size(); ++i) {
        CHECK(late[i] == doctest::Approx(late_expect[i]).epsilon(1e-13));
    }
}

TEST_CASE("partition of unity on the default grid") {
    const SplineGrid grid;
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = static_cast<double>(i) / 10000;
        const std::vector<double> basis = bspline_basis(grid, x);
        double sum = 0.0;
        for (double b : basis) {
            CHECK(b >= 0.0);
            sum += b;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("partition of unity on odd geometries") {
    for (const SplineGrid grid : {SplineGrid{-2.0, 3.0, 5, 2}, SplineGrid{0.0, 1.0, 1, 1},
                                  SplineGrid{1.0, 1.5, 7, 4}}) {
        for (int i = 0; i <= 500; ++i) {
            const double x = grid.lo + (grid.hi - grid.lo) * i / 500.0;
            const std::vector<double> basis = bspline_basis(grid, x);
            double sum = 0.0;
            for (double b : basis) sum += b;
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("agreement with the recursive oracle") {
    std::mt19937_64 rng(7);
    for (const SplineGrid grid : {SplineGrid{0.0, 1.0, 4, 3}, SplineGrid{-1.0, 2.0, 6, 3},
                                  SplineGrid{0.0, 4.0, 3, 2}}) {
        std::uniform_real_distribution<double> dist(grid.lo, grid.hi);
        for (int draw = 0; draw < 40; ++draw) {
            const double x = dist(rng);
            const std::vector<double> fast = bspline_basis(grid, x);
            const std::vector<double> slow = naive_all(grid, x);
            for (std::size_t i = 0; i < fast.size(); ++i) {
                CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("evaluation saturates outside the grid") {
    const SplineGrid grid;
    CHECK(bspline_basis(grid, -3.0) == bspline_basis(grid, 0.0));
    CHECK(bspline_basis(grid, 42.0) == bspline_basis(grid, 1.0));
}

TEST_CASE("degenerate linear grid gives hat functions") {
    const SplineGrid grid{0.0, 1.0, 1, 1};
    REQUIRE(grid.basis_count() == 2);
    const std::vector<double> basis = bspline_basis(grid, 0.3);
    CHECK(basis[0] == doctest::Approx(0.7).epsilon(1e-13));
    CHECK(basis[1] == doctest::Approx(0.3).epsilon(1e-13));
}
