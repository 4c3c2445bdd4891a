#include "doctest.h"

#include "sohkan/thermal.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace sohkan;

// Expected values below were frozen from hand evaluation of the model
// equations at the default calibration.

TEST_CASE("lumped parameters at the default calibration") {
    const ThermalParams params;
    CHECK(params.heat_capacity() == doctest::Approx(40.095).epsilon(1e-14));
    CHECK(params.conductance() == doctest::Approx(0.0336).epsilon(1e-14));
    CHECK(params.gamma() == doctest::Approx(0.9916199027310139).epsilon(1e-14));
    CHECK(params.steady_state_rise(3.0, 0.045) ==
          doctest::Approx(12.053571428571429).epsilon(1e-14));
    CHECK_NOTHROW(params.validate());
}

TEST_CASE("parameter validation rejects unstable or nonsensical inputs") {
    ThermalParams params;
    params.tau_s = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    params = ThermalParams{};
    params.h_w_m2k = -1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);

    // hA tau / C > 1 pushes gamma below zero and explicit Euler blows up.
    params = ThermalParams{};
    params.tau_s = 2000.0;
    CHECK(params.gamma() < 0.0);
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}

TEST_CASE("one Euler step in physical units") {
    const ThermalParams params;
    // From ambient the convective term vanishes and only Joule heat remains.
    CHECK(step(params, 23.0, 3.0, 0.045) == doctest::Approx(23.1010101010101).epsilon(1e-13));
    // Above ambient both terms act.
    CHECK(step(params, 30.0, 3.0, 0.045) == doctest::Approx(30.0423494201272).epsilon(1e-13));
    // No current, at ambient: nothing moves.
    CHECK(step(params, 23.0, 0.0, 0.045) == doctest::Approx(23.0).epsilon(1e-15));

    CHECK_THROWS_AS(step(params, std::nan(""), 3.0, 0.045), std::invalid_argument);
    CHECK_THROWS_AS(step(params, 23.0, 3.0, -0.01), std::invalid_argument);
}

TEST_CASE("normalized coefficients") {
    const ThermalParams params;
    const NormalizationParams norm{20.0, 40.0};
    CHECK(heat_input(params, 3.0, 0.045, norm) ==
          doctest::Approx(0.005050505050505051).epsilon(1e-13));
    const double expected_xi = (1.0 - params.gamma()) * (23.0 - 20.0) / 20.0;
    CHECK(xi_coeff(params, norm) == doctest::Approx(expected_xi).epsilon(1e-14));

    NormalizationParams degenerate{25.0, 25.0};
    CHECK_THROWS_AS(xi_coeff(params, degenerate), std::invalid_argument);
}

TEST_CASE("closed-form horizon matches the frozen reference") {
    const double closed = closed_form_horizon(0.2, 0.004, 0.98, 0.001, 100);
    CHECK(closed == doctest::Approx(0.24336902220526216).epsilon(1e-13));

    double iterated = 0.2;
    for (int i = 0; i < 100; ++i) iterated = normalized_step(iterated, 0.004, 0.98, 0.001);
    CHECK(std::abs(closed - iterated) < 1e-10);
}

TEST_CASE("closed-form horizon equals iteration across random coefficients") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gamma_dist(0.01, 0.999);
    std::uniform_real_distribution<double> coeff_dist(0.0, 0.05);
    std::uniform_real_distribution<double> state_dist(-0.5, 1.5);
    std::uniform_int_distribution<int> n_dist(1, 400);
    for (int trial = 0; trial < 200; ++trial) {
        const double gamma = gamma_dist(rng);
        const double d = coeff_dist(rng);
        const double xi = coeff_dist(rng);
        const double t0 = state_dist(rng);
        const int n = n_dist(rng);
        double iterated = t0;
        for (int i = 0; i < n; ++i) iterated = normalized_step(iterated, d, gamma, xi);
        CHECK(std::abs(closed_form_horizon(t0, d, gamma, xi, n) - iterated) < 1e-10);
    }
}

TEST_CASE("closed-form horizon handles the gamma = 1 limit") {
    CHECK(closed_form_horizon(0.3, 0.002, 1.0, 0.0005, 50) ==
          doctest::Approx(0.3 + 0.0025 * 50).epsilon(1e-14));
    CHECK_THROWS_AS(closed_form_horizon(0.3, 0.002, 1.0, 0.0005, 0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_horizon(std::nan(""), 0.0, 0.5, 0.0, 10), std::invalid_argument);
}

TEST_CASE("offset term accumulates to the ambient pull") {
    // With no heat input and a zero start, N steps leave xi * sum gamma^j,
    // which must equal (1 - gamma^N) times the normalized ambient.
    const ThermalParams params;
    const NormalizationParams norm{20.0, 40.0};
    const double gamma = params.gamma();
    const double xi = xi_coeff(params, norm);
    const double t_bar_amb = norm.normalize(params.t_ambient_c);
    for (int n : {1, 10, 100, 1000}) {
        const double accumulated = closed_form_horizon(0.0, 0.0, gamma, xi, n);
        const double expected = (1.0 - std::pow(gamma, n)) * t_bar_amb;
        CHECK(accumulated == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("resistance schedules") {
    const auto flat = ResistanceSchedule::constant(0.05);
    CHECK(flat.at(0, 100) == doctest::Approx(0.05));
    CHECK(flat.at(73, 100) == doctest::Approx(0.05));
    CHECK_NOTHROW(flat.validate(100));

    const auto ramp = ResistanceSchedule::linear(0.045, 0.09);
    CHECK(ramp.at(0, 100) == doctest::Approx(0.045).epsilon(1e-14));
    CHECK(ramp.at(50, 100) == doctest::Approx(0.0675).epsilon(1e-14));
    CHECK(ramp.at(100, 100) == doctest::Approx(0.09).epsilon(1e-14));

    const auto to_soh = ResistanceSchedule::linear_to_soh(0.045, 0.68);
    CHECK(to_soh.r_eol_ohm == doctest::Approx(0.06617647058823528).epsilon(1e-14));
    CHECK(100.0 * to_soh.r_bol_ohm / to_soh.at(100, 100) == doctest::Approx(68.0).epsilon(1e-12));
    CHECK_THROWS_AS(ResistanceSchedule::linear_to_soh(0.045, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ResistanceSchedule::linear_to_soh(0.045, 1.2), std::invalid_argument);

    const auto poly = ResistanceSchedule::polynomial({0.045, 0.01, 0.02});
    CHECK(poly.at(0, 10) == doctest::Approx(0.045).epsilon(1e-14));
    CHECK(poly.at(5, 10) == doctest::Approx(0.045 + 0.01 * 0.5 + 0.02 * 0.25).epsilon(1e-14));
    CHECK_THROWS_AS(ResistanceSchedule::polynomial({}), std::invalid_argument);

    const auto lut = ResistanceSchedule::table({0.045, 0.05, 0.06});
    CHECK(lut.at(1, 2) == doctest::Approx(0.05));
    CHECK_NOTHROW(lut.validate(2));
    CHECK_THROWS_AS(lut.validate(1), std::invalid_argument);
    CHECK_THROWS_AS(ResistanceSchedule::table({}), std::invalid_argument);

    CHECK_THROWS_AS(flat.at(-1, 100), std::out_of_range);
    CHECK_THROWS_AS(flat.at(101, 100), std::out_of_range);

    // Degradation cannot reverse: a falling schedule is rejected.
    CHECK_THROWS_AS(ResistanceSchedule::linear(0.045, 0.040).validate(10), std::invalid_argument);
    CHECK_THROWS_AS(ResistanceSchedule::constant(0.0).validate(10), std::invalid_argument);
}

TEST_CASE("single cycle layout and channels") {
    const ThermalParams params;
    const CycleProfile profile;
    const CycleRecord record = simulate_cycle(params, profile, 0.045, 23.0, 5);

    // 3 lead-in + 360 CC + 60 rest samples at tau = 10 s.
    REQUIRE(record.size() == 423);
    CHECK(record.cycle == 5);
    CHECK(record.t_ambient_c == doctest::Approx(23.0));
    CHECK(record.t_s[0] == doctest::Approx(0.0));
    CHECK(record.t_s[1] == doctest::Approx(10.0));
    CHECK(record.tau_s() == doctest::Approx(10.0));

    for (std::size_t i = 0; i < 3; ++i) CHECK(record.current_a[i] == doctest::Approx(0.0));
    for (std::size_t i = 3; i < 363; ++i) CHECK(record.current_a[i] == doctest::Approx(3.0));
    for (std::size_t i = 363; i < 423; ++i) CHECK(record.current_a[i] == doctest::Approx(0.0));

    // Synthetic voltage is OCV plus the IR drop of the instantaneous current.
    CHECK(record.voltage_v[0] == doctest::Approx(3.7));
    CHECK(record.voltage_v[10] == doctest::Approx(3.7 + 3.0 * 0.045).epsilon(1e-14));
    CHECK(record.voltage_v[422] == doctest::Approx(3.7));

    // Starting at ambient, the lead-in holds temperature and the CC phase
    // heats monotonically toward the steady state.
    CHECK(record.temp_c[0] == doctest::Approx(23.0));
    CHECK(record.temp_c[3] == doctest::Approx(23.0));
    for (std::size_t i = 4; i < 363; ++i) CHECK(record.temp_c[i] > record.temp_c[i - 1]);
    CHECK(record.temp_c[362] < 23.0 + params.steady_state_rise(3.0, 0.045));
    // Rest decays back toward ambient.
    CHECK(record.temp_c[422] < record.temp_c[363]);
    CHECK(record.temp_c[422] > 23.0);

    CHECK_NOTHROW(record.validate());
}

TEST_CASE("profile validation") {
    const ThermalParams params;
    CycleProfile profile;
    profile.current_a = 0.0;
    CHECK_THROWS_AS(profile.validate(params, 0), std::invalid_argument);

    profile = CycleProfile{};
    profile.n_cycles = 0;
    CHECK_THROWS_AS(profile.validate(params, 0), std::invalid_argument);

    profile = CycleProfile{};
    profile.cc_s = 500.0;  // 50 samples, shorter than a 100-step horizon
    CHECK_THROWS_AS(profile.validate(params, 100), std::invalid_argument);
    CHECK_NOTHROW(profile.validate(params, 0));
}

TEST_CASE("life simulation produces the oracle by construction") {
    ThermalParams params;
    CycleProfile profile;
    profile.cc_s = 100.0;
    profile.rest_s = 20.0;
    profile.lead_in_s = 10.0;
    profile.n_cycles = 5;

    const auto schedule = ResistanceSchedule::linear_to_soh(0.045, 0.68);
    const LifeResult life = simulate_life(params, profile, schedule);

    REQUIRE(life.dataset.size() == 5);
    CHECK(life.dataset.last_cycle() == 4);
    CHECK(life.oracle.source == SohSource::oracle);
    REQUIRE(life.oracle.size() == 5);
    CHECK(life.oracle.soh_percent.front() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(life.oracle.soh_percent.back() == doctest::Approx(68.0).epsilon(1e-12));
    for (std::size_t k = 1; k < 5; ++k) {
        CHECK(life.oracle.soh_percent[k] < life.oracle.soh_percent[k - 1]);
    }

    // Every cycle restarts at ambient; the rest phase justifies that.
    for (const CycleRecord& record : life.dataset.cycles) {
        CHECK(record.temp_c.front() == doctest::Approx(params.t_ambient_c));
    }
    CHECK_NOTHROW(life.dataset.validate());
}
