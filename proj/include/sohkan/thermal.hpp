#pragma once

#include "sohkan/dataset.hpp"
#include "sohkan/types.hpp"

#include <vector>

namespace sohkan {

// ===========================================================================
// Lumped-mass cell thermal model
//
// A single thermal node with Joule heating and convective loss:
//
//     dT/dt = (I^2 R - h A (T - T_inf)) / (rho c_p nu)
//
// integrated with an explicit Euler step of size tau. The discrete update in
// normalized temperature is
//
//     T_bar(i+1) = gamma T_bar(i) + d + xi
//
// with gamma = 1 - h A tau / (rho c_p nu), per-step heat input
// d = tau I^2 R / (rho c_p nu delta_T) and offset
// xi = (1 - gamma) (T_inf - t_min) / delta_T.
// ===========================================================================

struct ThermalParams {
    double h_w_m2k = 8.0;         ///< convection coefficient
    double area_m2 = 4.2e-3;      ///< cell surface area
    double rho_kg_m3 = 2700.0;    ///< effective density
    double cp_j_kgk = 900.0;      ///< effective specific heat
    double volume_m3 = 1.65e-5;   ///< cell volume
    double tau_s = 10.0;          ///< integration and sampling period
    double t_ambient_c = 23.0;

    /// rho c_p nu, the lumped heat capacity in J/K.
    [[nodiscard]] double heat_capacity() const { return rho_kg_m3 * cp_j_kgk * volume_m3; }

    /// h A in W/K.
    [[nodiscard]] double conductance() const { return h_w_m2k * area_m2; }

    /// Per-step retention factor gamma. Explicit Euler is stable for
    /// gamma in (0, 1), enforced by validate().
    [[nodiscard]] double gamma() const { return 1.0 - conductance() * tau_s / heat_capacity(); }

    /// Steady-state temperature rise above ambient for a constant current.
    [[nodiscard]] double steady_state_rise(double current_a, double resistance_ohm) const {
        return current_a * current_a * resistance_ohm / conductance();
    }

    void validate() const;
};

/// Normalized-offset coefficient xi for a given normalization.
[[nodiscard]] double xi_coeff(const ThermalParams& params, const NormalizationParams& norm);

/// Dimensionless per-step heat input d for a given current and resistance.
[[nodiscard]] double heat_input(const ThermalParams& params, double current_a,
                                double resistance_ohm, const NormalizationParams& norm);

/// One explicit Euler step in degrees C.
[[nodiscard]] double step(const ThermalParams& params, double t_c, double current_a,
                          double resistance_ohm);

/// One step of the normalized update, T_bar <- gamma T_bar + d + xi.
[[nodiscard]] inline double normalized_step(double t_bar, double d, double gamma, double xi) {
    return gamma * t_bar + d + xi;
}

/// Closed-form N-step propagation of the normalized update:
///
///     T_bar(N) = gamma^N T_bar(0) + (d + xi) * sum_{j=0}^{N-1} gamma^j
///
/// with the geometric sum evaluated exactly and the gamma = 1 limit handled
/// as N. Must agree with iterating normalized_step N times.
[[nodiscard]] double closed_form_horizon(double t_bar, double d, double gamma, double xi, int n);

// ---------------------------------------------------------------------------
// Cycle and life simulation
// ---------------------------------------------------------------------------

/// Internal resistance as a function of cycle index.
struct ResistanceSchedule {
    enum class Kind { constant, linear, polynomial, table };

    Kind kind = Kind::constant;
    double r_bol_ohm = 0.045;
    double r_eol_ohm = 0.045;          ///< linear only
    std::vector<double> coefficients;  ///< polynomial in k_bar, or per-cycle table

    [[nodiscard]] static ResistanceSchedule constant(double r_ohm);
    [[nodiscard]] static ResistanceSchedule linear(double r_bol_ohm, double r_eol_ohm);
    /// Linear schedule whose end-of-life resistance yields the given SoH
    /// fraction, r_eol = r_bol / soh_fraction.
    [[nodiscard]] static ResistanceSchedule linear_to_soh(double r_bol_ohm, double soh_fraction);
    [[nodiscard]] static ResistanceSchedule polynomial(std::vector<double> coefficients);
    [[nodiscard]] static ResistanceSchedule table(std::vector<double> r_ohm);

    /// Resistance at cycle k of a life ending at cycle last (E).
    [[nodiscard]] double at(int k, int last) const;

    /// Checks R(0) = r_bol and R(k) >= r_bol > 0 across the whole life.
    void validate(int last) const;
};

/// Charge profile applied every cycle: a short open-circuit lead-in, a
/// constant-current phase, then rest. The lead-in puts a 0 -> I current step
/// inside each cycle so the IR-drop baseline can read the jump.
struct CycleProfile {
    double current_a = 3.0;
    double cc_s = 3600.0;
    double rest_s = 600.0;
    double lead_in_s = 30.0;
    int n_cycles = 997;

    void validate(const ThermalParams& params, int horizon_n) const;
};

/// Open-circuit voltage placeholder for the synthetic voltage channel,
/// V = ocv + I R.
inline constexpr double kSyntheticOcvV = 3.7;

/// Simulates one cycle from initial temperature t0_c. Samples are emitted at
/// t = 0, tau, 2 tau, ... with the current of the phase the sample falls in;
/// sample i+1's temperature integrates the current at sample i.
[[nodiscard]] CycleRecord simulate_cycle(const ThermalParams& params, const CycleProfile& profile,
                                         double resistance_ohm, double t0_c, int cycle_index = 0);

struct LifeResult {
    CycleDataset dataset;
    SohCurve oracle;  ///< ground truth r_bol / R(k), in percent
};

/// Simulates a full life test. Every cycle starts at ambient temperature,
/// which the rest phase re-establishes between cycles.
[[nodiscard]] LifeResult simulate_life(const ThermalParams& params, const CycleProfile& profile,
                                       const ResistanceSchedule& schedule);

}  // namespace sohkan
