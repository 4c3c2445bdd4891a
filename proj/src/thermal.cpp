#include "sohkan/thermal.hpp"

#include "sohkan/log.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sohkan {

void ThermalParams::validate() const {
    if (!(h_w_m2k > 0.0) || !(area_m2 > 0.0) || !(rho_kg_m3 > 0.0) || !(cp_j_kgk > 0.0) ||
        !(volume_m3 > 0.0) || !(tau_s > 0.0)) {
        throw std::invalid_argument("thermal parameters must all be positive");
    }
    if (!std::isfinite(t_ambient_c)) {
        throw std::invalid_argument("ambient temperature must be finite");
    }
    const double g = gamma();
    if (!(g > 0.0 && g < 1.0)) {
        throw std::invalid_argument("explicit Euler unstable: need 0 < h A tau / (rho c_p nu) < 1, "
                                    "got gamma = " + std::to_string(g));
    }
}

double xi_coeff(const ThermalParams& params, const NormalizationParams& norm) {
    params.validate();
    norm.validate();
    return (1.0 - params.gamma()) * (params.t_ambient_c - norm.t_min_c) / norm.delta_c();
}

double heat_input(const ThermalParams& params, double current_a, double resistance_ohm,
                  const NormalizationParams& norm) {
    params.validate();
    norm.validate();
    if (resistance_ohm < 0.0) throw std::invalid_argument("resistance must be >= 0");
    return params.tau_s * current_a * current_a * resistance_ohm /
           (params.heat_capacity() * norm.delta_c());
}

double step(const ThermalParams& params, double t_c, double current_a, double resistance_ohm) {
    if (!std::isfinite(t_c)) throw std::invalid_argument("temperature is non-finite");
    if (resistance_ohm < 0.0) throw std::invalid_argument("resistance must be >= 0");
    const double heating = current_a * current_a * resistance_ohm;
    const double cooling = params.conductance() * (t_c - params.t_ambient_c);
    return t_c + params.tau_s * (heating - cooling) / params.heat_capacity();
}

double closed_form_horizon(double t_bar, double d, double gamma, double xi, int n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (!std::isfinite(t_bar) || !std::isfinite(d) || !std::isfinite(gamma) || !std::isfinite(xi)) {
        throw std::invalid_argument("closed_form_horizon requires finite inputs");
    }
    if (gamma == 1.0) {
        return t_bar + (d + xi) * static_cast<double>(n);
    }
    const double gamma_n = std::pow(gamma, static_cast<double>(n));
    const double geometric_sum = (1.0 - gamma_n) / (1.0 - gamma);
    return gamma_n * t_bar + (d + xi) * geometric_sum;
}

// ---------------------------------------------------------------------------
// Resistance schedules
// ---------------------------------------------------------------------------

ResistanceSchedule ResistanceSchedule::constant(double r_ohm) {
    ResistanceSchedule s;
    s.kind = Kind::constant;
    s.r_bol_ohm = r_ohm;
    s.r_eol_ohm = r_ohm;
    return s;
}

ResistanceSchedule ResistanceSchedule::linear(double r_bol_ohm, double r_eol_ohm) {
    ResistanceSchedule s;
    s.kind = Kind::linear;
    s.r_bol_ohm = r_bol_ohm;
    s.r_eol_ohm = r_eol_ohm;
    return s;
}

ResistanceSchedule ResistanceSchedule::linear_to_soh(double r_bol_ohm, double soh_fraction) {
    if (!(soh_fraction > 0.0 && soh_fraction <= 1.0)) {
        throw std::invalid_argument("target SoH fraction must be in (0, 1]");
    }
    return linear(r_bol_ohm, r_bol_ohm / soh_fraction);
}

ResistanceSchedule ResistanceSchedule::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("polynomial schedule needs coefficients");
    ResistanceSchedule s;
    s.kind = Kind::polynomial;
    s.r_bol_ohm = coefficients.front();
    s.coefficients = std::move(coefficients);
    return s;
}

ResistanceSchedule ResistanceSchedule::table(std::vector<double> r_ohm) {
    if (r_ohm.empty()) throw std::invalid_argument("table schedule needs values");
    ResistanceSchedule s;
    s.kind = Kind::table;
    s.r_bol_ohm = r_ohm.front();
    s.coefficients = std::move(r_ohm);
    return s;
}

double ResistanceSchedule::at(int k, int last) const {
    if (k < 0 || k > last) {
        throw std::out_of_range("cycle " + std::to_string(k) + " outside life [0, " +
                                std::to_string(last) + "]");
    }
    const double k_bar = last > 0 ? static_cast<double>(k) / last : 0.0;
    switch (kind) {
        case Kind::constant:
            return r_bol_ohm;
        case Kind::linear:
            return r_bol_ohm + (r_eol_ohm - r_bol_ohm) * k_bar;
        case Kind::polynomial: {
            double r = 0.0;
            for (std::size_t i = coefficients.size(); i-- > 0;) {
                r = r * k_bar + coefficients[i];
            }
            return r;
        }
        case Kind::table:
            if (static_cast<std::size_t>(k) >= coefficients.size()) {
                throw std::out_of_range("table schedule has no entry for cycle " +
                                        std::to_string(k));
            }
            return coefficients[static_cast<std::size_t>(k)];
    }
    throw std::logic_error("unknown schedule kind");
}

void ResistanceSchedule::validate(int last) const {
    if (last < 0) throw std::invalid_argument("last cycle must be >= 0");
    if (!(r_bol_ohm > 0.0)) throw std::invalid_argument("beginning-of-life resistance must be > 0");
    if (kind == Kind::table && coefficients.size() != static_cast<std::size_t>(last) + 1) {
        throw std::invalid_argument("table schedule length must equal the cycle count");
    }
    const double r0 = at(0, last);
    if (std::abs(r0 - r_bol_ohm) > 1e-12 * r_bol_ohm) {
        throw std::invalid_argument("schedule must start at r_bol, got R(0) = " +
                                    std::to_string(r0));
    }
    for (int k = 0; k <= last; ++k) {
        const double r = at(k, last);
        if (!(r >= r_bol_ohm * (1.0 - 1e-12))) {
            throw std::invalid_argument("resistance dips below beginning-of-life at cycle " +
                                        std::to_string(k) + "; degradation cannot reverse");
        }
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace {

std::size_t phase_samples(double duration_s, double tau_s, const char* phase) {
    const double exact = duration_s / tau_s;
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-9) {
        logging::warn(std::string(phase) + " duration is not a multiple of tau, truncating");
        return static_cast<std::size_t>(std::floor(exact));
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

void CycleProfile::validate(const ThermalParams& params, int horizon_n) const {
    params.validate();
    if (!(current_a > 0.0)) throw std::invalid_argument("charge current must be > 0");
    if (cc_s < 0.0 || rest_s < 0.0 || lead_in_s < 0.0) {
        throw std::invalid_argument("phase durations must be >= 0");
    }
    if (n_cycles < 1) throw std::invalid_argument("need at least one cycle");
    if (horizon_n >= 1 && cc_s < horizon_n * params.tau_s) {
        throw std::invalid_argument("CC phase shorter than the prediction horizon");
    }
}

CycleRecord simulate_cycle(const ThermalParams& params, const CycleProfile& profile,
                           double resistance_ohm, double t0_c, int cycle_index) {
    params.validate();
    if (resistance_ohm < 0.0) throw std::invalid_argument("resistance must be >= 0");
    if (!std::isfinite(t0_c)) throw std::invalid_argument("initial temperature must be finite");

    const std::size_t n_lead = phase_samples(profile.lead_in_s, params.tau_s, "lead-in");
    const std::size_t n_cc = phase_samples(profile.cc_s, params.tau_s, "CC");
    const std::size_t n_rest = phase_samples(profile.rest_s, params.tau_s, "rest");
    const std::size_t n = n_lead + n_cc + n_rest;
    if (n < 2) throw std::invalid_argument("cycle profile produces fewer than two samples");

    CycleRecord record;
    record.cycle = cycle_index;
    record.t_ambient_c = params.t_ambient_c;
    record.t_s.resize(n);
    record.temp_c.resize(n);
    record.current_a.resize(n);
    record.voltage_v.resize(n);

    double t_c = t0_c;
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_cc = i >= n_lead && i < n_lead + n_cc;
        const double current = in_cc ? profile.current_a : 0.0;
        record.t_s[i] = static_cast<double>(i) * params.tau_s;
        record.temp_c[i] = t_c;
        record.current_a[i] = current;
        record.voltage_v[i] = kSyntheticOcvV + current * resistance_ohm;
        t_c = step(params, t_c, current, resistance_ohm);
        if (!std::isfinite(t_c)) {
            throw std::runtime_error("thermal state diverged in cycle " +
                                     std::to_string(cycle_index));
        }
    }
    return record;
}

LifeResult simulate_life(const ThermalParams& params, const CycleProfile& profile,
                         const ResistanceSchedule& schedule) {
    profile.validate(params, 0);
    const int last = profile.n_cycles - 1;
    schedule.validate(last);

    LifeResult result;
    result.dataset.cycles.reserve(static_cast<std::size_t>(profile.n_cycles));
    result.oracle.source = SohSource::oracle;
    result.oracle.cycle.reserve(static_cast<std::size_t>(profile.n_cycles));
    result.oracle.soh_percent.reserve(static_cast<std::size_t>(profile.n_cycles));

    for (int k = 0; k < profile.n_cycles; ++k) {
        const double r_k = schedule.at(k, last);
        result.dataset.cycles.push_back(
            simulate_cycle(params, profile, r_k, params.t_ambient_c, k));
        result.oracle.cycle.push_back(k);
        result.oracle.soh_percent.push_back(100.0 * schedule.r_bol_ohm / r_k);
    }
    result.oracle.validate();
    return result;
}

}  // namespace sohkan
