#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sohkan {

/// Min-max temperature normalization, frozen from the training split.
///
/// Normalized temperature is T_bar = (T - t_min) / (t_max - t_min). Training
/// inputs land in [0, 1] by construction; other splits may fall outside and
/// are deliberately not clamped here.
struct NormalizationParams {
    double t_min_c = 0.0;
    double t_max_c = 1.0;

    [[nodiscard]] double delta_c() const { return t_max_c - t_min_c; }

    [[nodiscard]] double normalize(double t_c) const { return (t_c - t_min_c) / delta_c(); }
    [[nodiscard]] double denormalize(double t_bar) const { return t_min_c + t_bar * delta_c(); }

    void validate() const {
        if (!(t_max_c > t_min_c)) {
            throw std::invalid_argument("normalization range is degenerate: t_max <= t_min");
        }
    }
};

/// One long-horizon training sample: temperature now, cycle position, and the
/// temperature one horizon later. Temperatures are normalized, k_bar = k / E.
struct HorizonPair {
    double t_bar_in = 0.0;
    double k_bar = 0.0;
    double t_bar_target = 0.0;
    int cycle = 0;
};

enum class SohSource {
    oracle,
    baseline_ir,
    spline_a2,           ///< learned cycle activation used as is
    spline_a2_anchored,  ///< cycle activation after the physical re-anchoring
    affine_form,
    power_form_2,
    power_form_3,
    power_form_4,
};

[[nodiscard]] std::string to_string(SohSource source);
[[nodiscard]] SohSource soh_source_from_string(const std::string& name);

/// Per-cycle state of health in percent. The first entry is 100 by
/// construction because every estimator is a ratio against its own
/// beginning-of-life value.
struct SohCurve {
    std::vector<int> cycle;
    std::vector<double> soh_percent;
    SohSource source = SohSource::oracle;
    std::vector<double> formula_params;  // populated for closed-form sources

    [[nodiscard]] std::size_t size() const { return cycle.size(); }
    void validate() const;
};

}  // namespace sohkan
