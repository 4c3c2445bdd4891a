#include "sohkan/soh.hpp"

#include "sohkan/log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sohkan {

namespace {

constexpr double kMagnitudeFloor = 1e-9;

int curve_cycle(double k_bar, int last_cycle) {
    return static_cast<int>(std::lround(k_bar * last_cycle));
}

}  // namespace

SohCurve baseline_ir_soh(const CycleDataset& dataset, double step_threshold_a) {
    dataset.validate();
    if (!(step_threshold_a > 0.0)) throw std::invalid_argument("step threshold must be > 0");

    SohCurve curve;
    curve.source = SohSource::baseline_ir;
    double r_bol = 0.0;
    for (const CycleRecord& record : dataset.cycles) {
        double r_k = -1.0;
        for (std::size_t i = 0; i + 1 < record.size(); ++i) {
            const double di = record.current_a[i + 1] - record.current_a[i];
            if (std::abs(di) >= step_threshold_a) {
                const double dv = record.voltage_v[i + 1] - record.voltage_v[i];
                r_k = dv / di;
                break;
            }
        }
        if (r_k < 0.0) {
            throw std::runtime_error("cycle " + std::to_string(record.cycle) +
                                     " has no current step of at least " +
                                     std::to_string(step_threshold_a) +
                                     " A, cannot read the IR drop");
        }
        if (record.cycle == dataset.cycles.front().cycle) r_bol = r_k;
        curve.cycle.push_back(record.cycle);
        curve.soh_percent.push_back(100.0 * r_bol / r_k);
    }
    curve.validate();
    return curve;
}

double estimate_gamma_step(const CycleDataset& dataset, const PairBuildConfig& config) {
    dataset.validate();

    double sxx = 0.0;
    double sxy = 0.0;
    for (const CycleRecord& record : dataset.cycles) {
        const IndexRange cc = extract_cc_phase(record, config.cc_current, config.cc_tol, 2);
        const std::size_t n = cc.length() - 1;
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = cc.begin; i + 1 < cc.end; ++i) {
            mean_x += record.temp_c[i];
            mean_y += record.temp_c[i + 1];
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = cc.begin; i + 1 < cc.end; ++i) {
            const double x = record.temp_c[i] - mean_x;
            const double y = record.temp_c[i + 1] - mean_y;
            sxx += x * x;
            sxy += x * y;
        }
    }
    if (!(sxx > 0.0)) {
        throw std::runtime_error("constant-current temperatures have no variance, cannot "
                                 "estimate the per-step retention factor");
    }
    const double gamma = sxy / sxx;
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::runtime_error("per-step retention estimate " + std::to_string(gamma) +
                                 " is outside (0, 1); data does not look like a stable "
                                 "first-order cooling process");
    }
    return gamma;
}

double AnchorShift::at(double kb) const {
    if (k_bar.empty()) throw std::runtime_error("anchor shift is empty");
    if (kb <= k_bar.front()) return shift.front();
    if (kb >= k_bar.back()) return shift.back();
    const auto it = std::upper_bound(k_bar.begin(), k_bar.end(), kb);
    const std::size_t hi = static_cast<std::size_t>(it - k_bar.begin());
    const std::size_t lo = hi - 1;
    const double t = (kb - k_bar[lo]) / (k_bar[hi] - k_bar[lo]);
    return shift[lo] + t * (shift[hi] - shift[lo]);
}

void AnchorShift::validate() const {
    if (k_bar.size() != shift.size() || k_bar.empty()) {
        throw std::invalid_argument("anchor shift series are empty or mismatched");
    }
    for (std::size_t i = 1; i < k_bar.size(); ++i) {
        if (!(k_bar[i] > k_bar[i - 1])) {
            throw std::invalid_argument("anchor shift k_bar must be strictly increasing");
        }
    }
    if (!(gamma_pow_n > 0.0 && gamma_pow_n < 1.0)) {
        throw std::invalid_argument("anchor gamma^N must lie in (0, 1)");
    }
}

AnchorShift calibrate_anchor(const KanModel& model, const std::vector<HorizonPair>& train_pairs,
                             double gamma_step, double tbar_ambient) {
    model.validate();
    if (train_pairs.empty()) throw std::invalid_argument("anchor needs training pairs");
    if (!(gamma_step > 0.0 && gamma_step < 1.0)) {
        throw std::invalid_argument("gamma_step must lie in (0, 1)");
    }

    AnchorShift anchor;
    anchor.gamma_step = gamma_step;
    anchor.gamma_pow_n = std::pow(gamma_step, static_cast<double>(model.horizon_n));
    anchor.tbar_ambient = tbar_ambient;

    // The offset of the physical temperature channel follows from the model
    // identity xi * sum gamma^j = (1 - gamma^N) T_bar_ambient.
    const double gn = anchor.gamma_pow_n;
    for (const HorizonPair& pair : train_pairs) {
        const double physical = gn * pair.t_bar_in + (1.0 - gn) * tbar_ambient;
        anchor.k_bar.push_back(pair.k_bar);
        anchor.shift.push_back(model.a1.eval(pair.t_bar_in) - physical);
    }
    anchor.validate();
    return anchor;
}

SohCurve soh_from_a2(const ActivationCurve& curve, const AnchorShift* anchor, int last_cycle) {
    curve.validate();
    if (last_cycle < 0) throw std::invalid_argument("last cycle must be >= 0");

    SohCurve out;
    out.source = anchor != nullptr ? SohSource::spline_a2_anchored : SohSource::spline_a2;
    std::vector<double> corrected(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        corrected[i] = curve.value[i] + (anchor != nullptr ? anchor->at(curve.k_bar[i]) : 0.0);
        if (std::abs(corrected[i]) < kMagnitudeFloor ||
            corrected[i] * corrected.front() < 0.0) {
            throw std::runtime_error("A2 crosses zero near k_bar = " +
                                     std::to_string(curve.k_bar[i]) +
                                     "; offset calibration required");
        }
    }
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const int cycle = curve_cycle(curve.k_bar[i], last_cycle);
        if (!out.cycle.empty() && cycle <= out.cycle.back()) {
            throw std::invalid_argument("curve must be sampled at per-cycle resolution to "
                                        "convert into a SoH series");
        }
        out.cycle.push_back(cycle);
        out.soh_percent.push_back(100.0 * corrected.front() / corrected[i]);
    }
    out.validate();
    return out;
}

double soh_closed_form(const SymbolicFit& fit, double k_bar) {
    if (!fit.ok) throw std::invalid_argument("cannot evaluate a failed fit");
    if (fit.form != FitForm::power2 && fit.form != FitForm::power3 && fit.form != FitForm::power4) {
        throw std::invalid_argument("closed-form SoH is defined for power-form fits");
    }
    const double at_bol = fit.eval(0.0);
    const double at_k = fit.eval(k_bar);
    if (std::abs(at_k) < kMagnitudeFloor || std::abs(at_bol) < kMagnitudeFloor) {
        throw std::runtime_error("power-form base vanishes, SoH ratio undefined");
    }
    return 100.0 * at_bol / at_k;
}

SohCurve closed_form_soh_curve(const SymbolicFit& fit, int last_cycle) {
    if (last_cycle < 0) throw std::invalid_argument("last cycle must be >= 0");
    SohCurve out;
    switch (fit.form) {
        case FitForm::power2: out.source = SohSource::power_form_2; break;
        case FitForm::power3: out.source = SohSource::power_form_3; break;
        case FitForm::power4: out.source = SohSource::power_form_4; break;
        default:
            throw std::invalid_argument("closed-form SoH is defined for power-form fits");
    }
    out.formula_params = fit.params;
    const double denom = last_cycle > 0 ? static_cast<double>(last_cycle) : 1.0;
    const double at_bol = fit.eval(0.0);
    for (int k = 0; k <= last_cycle; ++k) {
        const double kb = static_cast<double>(k) / denom;
        if (fit.eval(kb) * at_bol < 0.0) {
            throw std::runtime_error("fitted base crosses zero inside the cycle range");
        }
        out.cycle.push_back(k);
        out.soh_percent.push_back(soh_closed_form(fit, kb));
    }
    out.validate();
    return out;
}

std::optional<int> crossing_cycle(const SohCurve& curve, double threshold_percent) {
    curve.validate();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.soh_percent[i] <= threshold_percent) return curve.cycle[i];
    }
    return std::nullopt;
}

ErrorStats error_metrics(const SohCurve& estimate, const SohCurve& reference) {
    estimate.validate();
    reference.validate();
    if (estimate.cycle != reference.cycle) {
        throw std::invalid_argument("curves cover different cycle supports, cannot compare");
    }

    ErrorStats stats;
    stats.per_cycle.resize(estimate.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double e = estimate.soh_percent[i] - reference.soh_percent[i];
        stats.per_cycle[i] = e;
        stats.mae += std::abs(e);
        sq += e * e;
        stats.max_abs = std::max(stats.max_abs, std::abs(e));
    }
    const double n = static_cast<double>(estimate.size());
    stats.mae /= n;
    stats.rmse = std::sqrt(sq / n);
    return stats;
}

std::array<double, 5> five_number_summary(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summary of an empty sample");
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double t = pos - static_cast<double>(lo);
        return values[lo] + t * (values[hi] - values[lo]);
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

void save_soh_csv(const std::vector<SohCurve>& curves, const std::string& path) {
    std::string out = "cycle,soh_percent,source\n";
    char buf[32];
    for (const SohCurve& curve : curves) {
        curve.validate();
        const std::string source = to_string(curve.source);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            out += std::to_string(curve.cycle[i]);
            out += ',';
            auto res = std::to_chars(buf, buf + sizeof(buf), curve.soh_percent[i]);
            out.append(buf, res.ptr);
            out += ',';
            out += source;
            out += '\n';
        }
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<SohCurve> load_soh_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line) || line != "cycle,soh_percent,source") {
        throw std::runtime_error(path + ": expected header 'cycle,soh_percent,source'");
    }

    std::vector<SohCurve> curves;
    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        }
        int cycle = 0;
        double soh = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + c1, cycle);
        auto r2 = std::from_chars(line.data() + c1 + 1, line.data() + c2, soh);
        if (r1.ec != std::errc{} || r1.ptr != line.data() + c1 || r2.ec != std::errc{} ||
            r2.ptr != line.data() + c2) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": cannot parse numeric fields");
        }
        const SohSource source = soh_source_from_string(line.substr(c2 + 1));
        auto it = std::find_if(curves.begin(), curves.end(),
                               [&](const SohCurve& c) { return c.source == source; });
        if (it == curves.end()) {
            curves.emplace_back();
            curves.back().source = source;
            it = curves.end() - 1;
        }
        it->cycle.push_back(cycle);
        it->soh_percent.push_back(soh);
    }
    for (const SohCurve& curve : curves) curve.validate();
    return curves;
}

}  // namespace sohkan
