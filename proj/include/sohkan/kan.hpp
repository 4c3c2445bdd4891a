#pragma once

#include "sohkan/spline.hpp"
#include "sohkan/types.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sohkan {

[[nodiscard]] inline double silu(double x) { return x / (1.0 + std::exp(-x)); }

/// One learnable activation: a silu backbone plus a B-spline correction,
///
///     A(x) = w_silu silu(x) + sum_i c_i B_i(x)
///
/// The spline part saturates outside the grid (x is clamped), the silu part
/// sees the raw input.
struct Activation {
    double w_silu = 1.0;
    std::vector<double> coeffs;
    SplineGrid grid;

    [[nodiscard]] double eval(double x) const;
    void validate() const;
};

/// Two-input additive network of width [[2, 1]]: the prediction is
/// A1(T_bar) + A2(k_bar).
struct KanModel {
    Activation a1;  ///< input: normalized temperature
    Activation a2;  ///< input: normalized cycle number
    NormalizationParams norm;
    int horizon_n = 100;
    int last_cycle = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] double forward(double t_bar, double k_bar) const;
    [[nodiscard]] double forward(const HorizonPair& pair) const {
        return forward(pair.t_bar_in, pair.k_bar);
    }
    void validate() const;
};

/// Fresh model: unit silu weights and spline coefficients drawn uniformly
/// from [-0.1, 0.1] with the given seed.
[[nodiscard]] KanModel make_initial_model(const SplineGrid& grid, const NormalizationParams& norm,
                                          int horizon_n, int last_cycle, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Flattened parameter access. Layout: a1.w_silu, a1.coeffs, a2.w_silu,
// a2.coeffs.
// ---------------------------------------------------------------------------

[[nodiscard]] std::size_t param_count(const KanModel& model);
[[nodiscard]] std::vector<double> get_params(const KanModel& model);
void set_params(KanModel& model, std::span<const double> params);

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

struct LossBreakdown {
    double total = 0.0;
    double pred = 0.0;     ///< mean squared prediction error
    double l1 = 0.0;       ///< |A1| + |A2|, batch-mean output magnitudes
    double entropy = 0.0;  ///< magnitude entropy over the two activations
};

/// Batch-mean |A(x)| over the activation's own inputs.
[[nodiscard]] double activation_l1(const Activation& activation, std::span<const double> inputs);

/// Shannon entropy of the normalized magnitude pair. Zero when either
/// magnitude is zero (0 log 0 = 0); upper bound is ln 2.
[[nodiscard]] double activation_entropy(double l1_a, double l1_b);

/// Mean squared prediction error over the batch.
[[nodiscard]] double prediction_loss(const KanModel& model, std::span<const HorizonPair> batch);

/// Composite objective: pred + lambda (nu1 l1 + nu2 entropy). The breakdown
/// satisfies total = pred + lambda (nu1 l1 + nu2 entropy) bit for bit.
[[nodiscard]] LossBreakdown total_loss(const KanModel& model, std::span<const HorizonPair> batch,
                                       double lambda, double nu1, double nu2);

/// Analytic gradient of the composite objective with respect to the
/// flattened parameters. The L1 terms use sign(0) = 0; the entropy term is
/// skipped when either magnitude vanishes. With lambda = 0 this is the exact
/// gradient of the smooth prediction loss.
[[nodiscard]] std::vector<double> loss_gradient(const KanModel& model,
                                                std::span<const HorizonPair> batch, double lambda,
                                                double nu1, double nu2,
                                                LossBreakdown* breakdown = nullptr);

// ---------------------------------------------------------------------------
// Serialization (fixed field order, 17 significant digits)
// ---------------------------------------------------------------------------

[[nodiscard]] std::string model_to_json(const KanModel& model);
void save_model(const KanModel& model, const std::string& path);
[[nodiscard]] KanModel load_model(const std::string& path);

}  // namespace sohkan
