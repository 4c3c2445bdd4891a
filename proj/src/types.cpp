#include "sohkan/types.hpp"

#include <cmath>

namespace sohkan {

std::string to_string(SohSource source) {
    switch (source) {
        case SohSource::oracle: return "oracle";
        case SohSource::baseline_ir: return "baseline_ir";
        case SohSource::spline_a2: return "spline_a2";
        case SohSource::spline_a2_anchored: return "spline_a2_anchored";
        case SohSource::affine_form: return "affine_form";
        case SohSource::power_form_2: return "power_form_2";
        case SohSource::power_form_3: return "power_form_3";
        case SohSource::power_form_4: return "power_form_4";
    }
    return "unknown";
}

SohSource soh_source_from_string(const std::string& name) {
    for (SohSource s : {SohSource::oracle, SohSource::baseline_ir, SohSource::spline_a2,
                        SohSource::spline_a2_anchored, SohSource::affine_form,
                        SohSource::power_form_2, SohSource::power_form_3,
                        SohSource::power_form_4}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown SoH source '" + name + "'");
}

void SohCurve::validate() const {
    if (cycle.empty()) throw std::invalid_argument("soh curve is empty");
    if (cycle.size() != soh_percent.size()) {
        throw std::invalid_argument("soh curve cycle/value size mismatch");
    }
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        if (cycle[i] <= cycle[i - 1]) {
            throw std::invalid_argument("soh curve cycles must be strictly increasing");
        }
    }
    for (double v : soh_percent) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw std::invalid_argument("soh curve values must be finite and positive");
        }
    }
}

}  // namespace sohkan
