#pragma once

#include "sohkan/kan.hpp"

#include <span>
#include <string>
#include <vector>

namespace sohkan {

/// A sampled univariate curve over normalized cycle number, k_bar in [0, 1].
struct ActivationCurve {
    std::vector<double> k_bar;
    std::vector<double> value;

    [[nodiscard]] std::size_t size() const { return k_bar.size(); }
    void validate() const;
};

/// Samples the cycle-channel activation A2 on a uniform k_bar grid.
[[nodiscard]] ActivationCurve sample_a2(const KanModel& model, int n_samples);

void save_curve_csv(const ActivationCurve& curve, const std::string& path);
[[nodiscard]] ActivationCurve load_curve_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Dictionary fits
// ---------------------------------------------------------------------------

enum class FitForm {
    affine,       ///< a + b k_bar
    power2,       ///< (a - b k_bar)^2
    power3,       ///< (a - b k_bar)^3
    power4,       ///< (a - b k_bar)^4
    exponential,  ///< a exp(b k_bar) + c
    logarithmic,  ///< a ln(b k_bar + 1) + c
};

[[nodiscard]] std::string to_string(FitForm form);

struct SymbolicFit {
    FitForm form = FitForm::affine;
    bool ok = false;
    std::string error;
    std::vector<double> params;
    double r2 = 0.0;

    /// Whether the state of health reconstructed from this fit is
    /// nonincreasing over [0, 1]. A decreasing heat curve implies rising SoH,
    /// which is flagged as non-physical downstream.
    bool soh_nonincreasing = false;

    [[nodiscard]] int parameter_count() const;
    [[nodiscard]] int polynomial_degree() const;  ///< large sentinel for exp/log
    [[nodiscard]] double eval(double k_bar) const;
    [[nodiscard]] std::string formula() const;
};

/// Coefficient of determination. Returns 1 when the residual is exactly zero
/// on a constant curve, otherwise -inf with a warning when the curve has no
/// variance.
[[nodiscard]] double r_squared(std::span<const double> y_true, std::span<const double> y_fit);

[[nodiscard]] SymbolicFit fit_affine(const ActivationCurve& curve);

/// Fits (a - b k_bar)^degree for degree in {2, 3, 4}: a coarse grid search
/// over a, b in [-20, 20] followed by damped Gauss-Newton refinement confined
/// to the same box. Both sign branches of the base are covered by the grid.
[[nodiscard]] SymbolicFit fit_power_form(const ActivationCurve& curve, int degree);

[[nodiscard]] SymbolicFit fit_exponential(const ActivationCurve& curve);
[[nodiscard]] SymbolicFit fit_logarithmic(const ActivationCurve& curve);

/// Runs every dictionary entry and ranks by R^2 descending; exact ties break
/// toward fewer parameters, then lower degree. Failed fits keep their error
/// string and rank last.
[[nodiscard]] std::vector<SymbolicFit> fit_dictionary(const ActivationCurve& curve);

void save_fits_json(const std::vector<SymbolicFit>& fits, const std::string& path);
[[nodiscard]] std::vector<SymbolicFit> load_fits_json(const std::string& path);

}  // namespace sohkan
