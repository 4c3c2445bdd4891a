#pragma once

#include "sohkan/dataset.hpp"
#include "sohkan/kan.hpp"
#include "sohkan/symbolic.hpp"
#include "sohkan/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sohkan {

// ===========================================================================
// State-of-health estimators. All of them are ratios against their own
// beginning-of-life value, so every curve starts at exactly 100 percent.
// ===========================================================================

/// Instantaneous-resistance baseline: reads R_k from the voltage jump at the
/// first current step of at least step_threshold_a amps in each cycle, then
/// reports R_0 / R_k. Throws when a cycle has no detectable step.
[[nodiscard]] SohCurve baseline_ir_soh(const CycleDataset& dataset,
                                       double step_threshold_a = 0.5);

/// Estimates the per-step temperature retention factor gamma from the raw
/// constant-current samples: within each cycle T(i+1) is affine in T(i) with
/// shared slope gamma, so a cycle-centered regression over all CC samples
/// recovers it.
[[nodiscard]] double estimate_gamma_step(const CycleDataset& dataset,
                                         const PairBuildConfig& config);

/// Additive per-cycle correction moving the learned cycle activation onto a
/// physically anchored scale.
///
/// The two activations are only identified up to exchanges that leave their
/// sum unchanged on the training pairs, because the training inputs lie on a
/// single degradation trajectory. The anchored mode pins the temperature
/// channel to the thermal response the raw data itself identifies,
/// A1_phys(T_bar) = gamma^N T_bar + (1 - gamma^N) T_bar_ambient, and moves
/// whatever the learned A1 carries beyond that into the cycle channel:
/// shift(k) = A1(T_bar_k) - A1_phys(T_bar_k) evaluated at each training
/// input. Between cycle points the shift is interpolated linearly.
struct AnchorShift {
    std::vector<double> k_bar;
    std::vector<double> shift;
    double gamma_step = 0.0;
    double gamma_pow_n = 0.0;
    double tbar_ambient = 0.0;

    [[nodiscard]] double at(double kb) const;
    void validate() const;
};

[[nodiscard]] AnchorShift calibrate_anchor(const KanModel& model,
                                           const std::vector<HorizonPair>& train_pairs,
                                           double gamma_step, double tbar_ambient);

/// SoH from the cycle activation: value(0) / value(k) in percent. Passing an
/// anchor applies its correction first (anchored mode); nullptr is the raw
/// mode that uses the learned activation as is. The curve must be sampled at
/// per-cycle resolution so each sample maps to one cycle index.
[[nodiscard]] SohCurve soh_from_a2(const ActivationCurve& curve, const AnchorShift* anchor,
                                   int last_cycle);

/// Closed-form SoH for a power-form fit, f(0)^n / f(k)^n as a percentage.
[[nodiscard]] double soh_closed_form(const SymbolicFit& fit, double k_bar);

/// Closed-form SoH evaluated at every cycle of a life ending at last_cycle.
[[nodiscard]] SohCurve closed_form_soh_curve(const SymbolicFit& fit, int last_cycle);

/// First cycle at or below the threshold, or nullopt if the curve never
/// crosses it.
[[nodiscard]] std::optional<int> crossing_cycle(const SohCurve& curve, double threshold_percent);

struct ErrorStats {
    double mae = 0.0;
    double rmse = 0.0;
    double max_abs = 0.0;
    std::vector<double> per_cycle;  ///< signed estimate - reference
};

/// Pointwise comparison of two curves over an identical cycle support.
[[nodiscard]] ErrorStats error_metrics(const SohCurve& estimate, const SohCurve& reference);

/// min, q1, median, q3, max of a sample (linear interpolation quartiles).
[[nodiscard]] std::array<double, 5> five_number_summary(std::vector<double> values);

/// Appends curves into one CSV, schema: cycle,soh_percent,source
void save_soh_csv(const std::vector<SohCurve>& curves, const std::string& path);

/// Reads the CSV back, grouping rows by source in order of first appearance.
[[nodiscard]] std::vector<SohCurve> load_soh_csv(const std::string& path);

}  // namespace sohkan
