#include "doctest.h"

#include "sohkan/soh.hpp"
#include "sohkan/thermal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sohkan;

namespace {

/// Cycle with a 0 -> 2 A current step and the matching synthetic voltage,
/// V = 3.7 + I R.
CycleRecord step_cycle(int index, double resistance_ohm) {
    CycleRecord record;
    record.cycle = index;
    record.t_ambient_c = 23.0;
    for (int i = 0; i < 12; ++i) {
        const double current = i >= 2 ? 2.0 : 0.0;
        record.t_s.push_back(10.0 * i);
        record.temp_c.push_back(23.0 + 0.1 * i);
        record.current_a.push_back(current);
        record.voltage_v.push_back(3.7 + current * resistance_ohm);
    }
    return record;
}

CycleDataset step_dataset(const std::vector<double>& resistances) {
    CycleDataset dataset;
    for (std::size_t k = 0; k < resistances.size(); ++k) {
        dataset.cycles.push_back(step_cycle(static_cast<int>(k), resistances[k]));
    }
    return dataset;
}

ActivationCurve make_curve(int n, double (*fn)(double)) {
    ActivationCurve curve;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(i) / (n - 1);
        curve.k_bar.push_back(k);
        curve.value.push_back(fn(k));
    }
    return curve;
}

SymbolicFit manual_power_fit(FitForm form, double a, double b) {
    SymbolicFit fit;
    fit.form = form;
    fit.ok = true;
    fit.params = {a, b};
    return fit;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("tmp_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }

    void write(const std::string& content) const {
        std::ofstream file(path, std::ios::binary);
        file << content;
    }
};

}  // namespace

TEST_CASE("ir-drop baseline reads resistance from the current step") {
    const CycleDataset dataset = step_dataset({0.025, 0.05});
    const SohCurve curve = baseline_ir_soh(dataset);
    CHECK(curve.source == SohSource::baseline_ir);
    REQUIRE(curve.size() == 2);
    CHECK(curve.soh_percent[0] == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(curve.soh_percent[1] == doctest::Approx(50.0).epsilon(1e-10));

    const SohCurve flat = baseline_ir_soh(step_dataset({0.04, 0.04, 0.04}));
    for (double soh : flat.soh_percent) CHECK(soh == doctest::Approx(100.0).epsilon(1e-10));

    CHECK_THROWS_AS((void)baseline_ir_soh(dataset, 0.0), std::invalid_argument);
}

TEST_CASE("ir-drop baseline names the cycle without a step") {
    CycleDataset dataset = step_dataset({0.03, 0.03});
    for (double& current : dataset.cycles[1].current_a) current = 0.0;
    try {
        (void)baseline_ir_soh(dataset);
        FAIL("expected a missing-step error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("cycle 1") != std::string::npos);
    }
}

TEST_CASE("per-step retention factor from raw samples") {
    ThermalParams params;
    CycleProfile profile;
    profile.cc_s = 300.0;
    profile.rest_s = 30.0;
    profile.lead_in_s = 20.0;
    profile.n_cycles = 4;
    const LifeResult life =
        simulate_life(params, profile, ResistanceSchedule::constant(0.045));

    PairBuildConfig config;
    const double estimate = estimate_gamma_step(life.dataset, config);
    CHECK(estimate == doctest::Approx(params.gamma()).epsilon(1e-10));
}

TEST_CASE("retention estimation rejects unusable data") {
    CycleRecord record;
    record.cycle = 0;
    record.t_ambient_c = 23.0;
    for (int i = 0; i < 8; ++i) {
        record.t_s.push_back(10.0 * i);
        record.temp_c.push_back(25.0);  // no variance
        record.current_a.push_back(2.0);
        record.voltage_v.push_back(3.8);
    }
    CycleDataset flat;
    flat.cycles.push_back(record);
    CHECK_THROWS_AS((void)estimate_gamma_step(flat, PairBuildConfig{}), std::runtime_error);

    // A heating run with slope above one is not a stable cooling process.
    CycleDataset runaway = flat;
    for (int i = 0; i < 8; ++i) {
        runaway.cycles[0].temp_c[static_cast<std::size_t>(i)] = 20.0 * std::pow(1.1, i);
    }
    CHECK_THROWS_AS((void)estimate_gamma_step(runaway, PairBuildConfig{}), std::runtime_error);
}

TEST_CASE("anchor shift interpolation") {
    AnchorShift anchor;
    anchor.k_bar = {0.0, 0.5, 1.0};
    anchor.shift = {1.0, 2.0, 4.0};
    anchor.gamma_step = 0.99;
    anchor.gamma_pow_n = 0.5;
    anchor.tbar_ambient = 0.15;
    CHECK_NOTHROW(anchor.validate());

    CHECK(anchor.at(0.0) == doctest::Approx(1.0));
    CHECK(anchor.at(0.25) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(anchor.at(0.75) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(anchor.at(-0.5) == doctest::Approx(1.0));  // clamped outside the range
    CHECK(anchor.at(2.0) == doctest::Approx(4.0));

    AnchorShift bad = anchor;
    bad.shift.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = anchor;
    bad.k_bar[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = anchor;
    bad.gamma_pow_n = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    AnchorShift empty;
    CHECK_THROWS_AS((void)empty.at(0.5), std::runtime_error);
}

TEST_CASE("anchor calibration against the physical channel") {
    KanModel model = make_initial_model(SplineGrid{}, NormalizationParams{20.0, 40.0}, 10, 9, 1);
    model.a1.w_silu = 0.0;
    model.a2.w_silu = 0.0;
    for (double& c : model.a1.coeffs) c = 0.0;
    for (double& c : model.a2.coeffs) c = 0.0;

    std::vector<HorizonPair> pairs(2);
    pairs[0] = HorizonPair{0.3, 0.0, 0.0, 0};
    pairs[1] = HorizonPair{0.6, 1.0, 0.0, 9};

    const double gamma = 0.9;
    const double ambient = 0.15;
    const AnchorShift anchor = calibrate_anchor(model, pairs, gamma, ambient);

    const double gn = std::pow(0.9, 10.0);
    CHECK(anchor.gamma_pow_n == doctest::Approx(gn).epsilon(1e-14));
    CHECK(anchor.gamma_step == doctest::Approx(0.9));
    // A1 is identically zero here, so the shift is minus the physical channel.
    CHECK(anchor.shift[0] == doctest::Approx(-(gn * 0.3 + (1.0 - gn) * ambient)).epsilon(1e-13));
    CHECK(anchor.shift[1] == doctest::Approx(-(gn * 0.6 + (1.0 - gn) * ambient)).epsilon(1e-13));

    CHECK_THROWS_AS((void)calibrate_anchor(model, pairs, 1.5, ambient), std::invalid_argument);
    CHECK_THROWS_AS((void)calibrate_anchor(model, {}, gamma, ambient), std::invalid_argument);
}

TEST_CASE("soh from the cycle activation") {
    SUBCASE("constant activation means no degradation") {
        const ActivationCurve curve = make_curve(5, [](double) { return 2.0; });
        const SohCurve soh = soh_from_a2(curve, nullptr, 4);
        CHECK(soh.source == SohSource::spline_a2);
        REQUIRE(soh.size() == 5);
        CHECK((soh.cycle == std::vector<int>{0, 1, 2, 3, 4}));
        for (double v : soh.soh_percent) CHECK(v == doctest::Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("rising activation decays the ratio") {
        const ActivationCurve curve = make_curve(5, [](double k) { return 2.0 + 2.0 * k; });
        const SohCurve soh = soh_from_a2(curve, nullptr, 4);
        CHECK(soh.soh_percent.front() == doctest::Approx(100.0));
        CHECK(soh.soh_percent.back() == doctest::Approx(50.0).epsilon(1e-12));
    }

    SUBCASE("anchored mode applies the correction first") {
        const ActivationCurve curve = make_curve(5, [](double k) { return 2.0 + 2.0 * k; });
        AnchorShift anchor;
        anchor.k_bar = {0.0, 1.0};
        anchor.shift = {-1.0, -1.0};
        anchor.gamma_step = 0.99;
        anchor.gamma_pow_n = 0.5;
        anchor.tbar_ambient = 0.15;
        const SohCurve soh = soh_from_a2(curve, &anchor, 4);
        CHECK(soh.source == SohSource::spline_a2_anchored);
        // Corrected curve is 1 + 2 k_bar, so the final ratio is 1/3.
        CHECK(soh.soh_percent.back() == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("sign changes are refused") {
        ActivationCurve curve;
        curve.k_bar = {0.0, 0.5, 1.0};
        curve.value = {1.0, 0.5, -1.0};
        try {
            (void)soh_from_a2(curve, nullptr, 2);
            FAIL("expected a zero-crossing error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("offset calibration required") != std::string::npos);
        }

        curve.value = {1.0, 0.5, 1e-12};
        CHECK_THROWS_AS((void)soh_from_a2(curve, nullptr, 2), std::runtime_error);
    }

    SUBCASE("curve must resolve individual cycles") {
        const ActivationCurve curve = make_curve(5, [](double k) { return 2.0 + k; });
        CHECK_THROWS_AS((void)soh_from_a2(curve, nullptr, 2), std::invalid_argument);
        CHECK_THROWS_AS((void)soh_from_a2(curve, nullptr, -1), std::invalid_argument);
    }
}

TEST_CASE("closed-form soh") {
    const SymbolicFit fit = manual_power_fit(FitForm::power2, 1.0, -0.5);
    CHECK(soh_closed_form(fit, 0.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(soh_closed_form(fit, 1.0) == doctest::Approx(100.0 / 2.25).epsilon(1e-12));

    SymbolicFit affine;
    affine.form = FitForm::affine;
    affine.ok = true;
    affine.params = {1.0, 0.5};
    CHECK_THROWS_AS((void)soh_closed_form(affine, 0.5), std::invalid_argument);

    SymbolicFit failed;
    CHECK_THROWS_AS((void)soh_closed_form(failed, 0.5), std::invalid_argument);

    // Base hits zero at k = 0.5.
    const SymbolicFit vanishing = manual_power_fit(FitForm::power2, 0.5, 1.0);
    CHECK_THROWS_AS((void)soh_closed_form(vanishing, 0.5), std::runtime_error);
}

TEST_CASE("closed-form soh curves") {
    const SymbolicFit fit = manual_power_fit(FitForm::power2, 1.0, -0.5);
    const SohCurve curve = closed_form_soh_curve(fit, 4);
    CHECK(curve.source == SohSource::power_form_2);
    CHECK(curve.formula_params == fit.params);
    REQUIRE(curve.size() == 5);
    CHECK(curve.soh_percent.front() == doctest::Approx(100.0));
    CHECK(curve.soh_percent.back() == doctest::Approx(100.0 / 2.25).epsilon(1e-12));
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve.soh_percent[i] < curve.soh_percent[i - 1]);
    }

    // An odd power whose base flips sign mid-life is non-physical.
    const SymbolicFit flipping = manual_power_fit(FitForm::power3, 0.5, 1.0);
    CHECK_THROWS_AS((void)closed_form_soh_curve(flipping, 4), std::runtime_error);

    SymbolicFit affine;
    affine.form = FitForm::affine;
    affine.ok = true;
    affine.params = {1.0, 0.5};
    CHECK_THROWS_AS((void)closed_form_soh_curve(affine, 4), std::invalid_argument);
}

TEST_CASE("threshold crossing") {
    SohCurve fading;
    fading.source = SohSource::oracle;
    for (int k = 0; k <= 100; ++k) {
        fading.cycle.push_back(k);
        fading.soh_percent.push_back(100.0 - 0.4 * k);
    }
    CHECK(crossing_cycle(fading, 70.0) == 75);
    CHECK(crossing_cycle(fading, 100.0) == 0);
    CHECK(crossing_cycle(fading, 50.0) == std::nullopt);

    SohCurve flat;
    flat.cycle = {0, 1, 2};
    flat.soh_percent = {100.0, 100.0, 100.0};
    CHECK(crossing_cycle(flat, 70.0) == std::nullopt);
}

TEST_CASE("error metrics") {
    SohCurve reference;
    reference.cycle = {0, 1, 2};
    reference.soh_percent = {100.0, 98.0, 86.0};

    SohCurve same = reference;
    const ErrorStats zero = error_metrics(same, reference);
    CHECK(zero.mae == doctest::Approx(0.0));
    CHECK(zero.rmse == doctest::Approx(0.0));
    CHECK(zero.max_abs == doctest::Approx(0.0));

    SohCurve estimate = reference;
    estimate.soh_percent = {100.0, 96.0, 90.0};
    const ErrorStats stats = error_metrics(estimate, reference);
    CHECK((stats.per_cycle == std::vector<double>{0.0, -2.0, 4.0}));
    CHECK(stats.mae == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(stats.rmse == doctest::Approx(std::sqrt(20.0 / 3.0)).epsilon(1e-14));
    CHECK(stats.max_abs == doctest::Approx(4.0));

    SohCurve offset = reference;
    for (double& v : offset.soh_percent) v += 2.0;
    const ErrorStats biased = error_metrics(offset, reference);
    CHECK(biased.mae == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(biased.rmse == doctest::Approx(2.0).epsilon(1e-13));

    SohCurve shifted = reference;
    shifted.cycle = {0, 1, 3};
    CHECK_THROWS_AS((void)error_metrics(shifted, reference), std::invalid_argument);
}

TEST_CASE("five number summary") {
    const auto odd = five_number_summary({4.0, 1.0, 3.0, 2.0, 5.0});
    CHECK(odd[0] == doctest::Approx(1.0));
    CHECK(odd[1] == doctest::Approx(2.0));
    CHECK(odd[2] == doctest::Approx(3.0));
    CHECK(odd[3] == doctest::Approx(4.0));
    CHECK(odd[4] == doctest::Approx(5.0));

    const auto even = five_number_summary({1.0, 2.0, 3.0, 4.0});
    CHECK(even[1] == doctest::Approx(1.75).epsilon(1e-14));
    CHECK(even[2] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(even[3] == doctest::Approx(3.25).epsilon(1e-14));

    CHECK_THROWS_AS((void)five_number_summary({}), std::invalid_argument);
}

TEST_CASE("soh source names round-trip") {
    for (SohSource source :
         {SohSource::oracle, SohSource::baseline_ir, SohSource::spline_a2,
          SohSource::spline_a2_anchored, SohSource::affine_form, SohSource::power_form_2,
          SohSource::power_form_3, SohSource::power_form_4}) {
        CHECK(soh_source_from_string(to_string(source)) == source);
    }
    CHECK_THROWS_AS((void)soh_source_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("soh curve validation") {
    SohCurve curve;
    CHECK_THROWS_AS(curve.validate(), std::invalid_argument);

    curve.cycle = {0, 1};
    curve.soh_percent = {100.0};
    CHECK_THROWS_AS(curve.validate(), std::invalid_argument);

    curve.soh_percent = {100.0, -5.0};
    CHECK_THROWS_AS(curve.validate(), std::invalid_argument);

    curve.cycle = {0, 0};
    curve.soh_percent = {100.0, 90.0};
    CHECK_THROWS_AS(curve.validate(), std::invalid_argument);

    curve.cycle = {0, 1};
    CHECK_NOTHROW(curve.validate());
}

TEST_CASE("soh csv round-trip keeps sources separate") {
    SohCurve oracle;
    oracle.source = SohSource::oracle;
    oracle.cycle = {0, 1, 2};
    oracle.soh_percent = {100.0, 95.5, 91.25};

    SohCurve baseline;
    baseline.source = SohSource::baseline_ir;
    baseline.cycle = {0, 1, 2};
    baseline.soh_percent = {100.0, 95.0, 90.0};

    const TempFile file("soh.csv");
    save_soh_csv({oracle, baseline}, file.path);

    const std::vector<SohCurve> loaded = load_soh_csv(file.path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].source == SohSource::oracle);
    CHECK(loaded[1].source == SohSource::baseline_ir);
    CHECK(loaded[0].cycle == oracle.cycle);
    CHECK(loaded[0].soh_percent == oracle.soh_percent);
    CHECK(loaded[1].soh_percent == baseline.soh_percent);

    const TempFile bad_header("soh_header.csv");
    bad_header.write("a,b,c\n");
    CHECK_THROWS_AS((void)load_soh_csv(bad_header.path), std::runtime_error);

    const TempFile bad_source("soh_source.csv");
    bad_source.write("cycle,soh_percent,source\n0,100,bogus\n");
    CHECK_THROWS_AS((void)load_soh_csv(bad_source.path), std::invalid_argument);

    const TempFile bad_row("soh_row.csv");
    bad_row.write("cycle,soh_percent,source\n0,100\n");
    CHECK_THROWS_AS((void)load_soh_csv(bad_row.path), std::runtime_error);
}
