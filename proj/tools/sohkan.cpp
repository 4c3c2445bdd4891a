#include "CLI11.hpp"

#include "sohkan/config.hpp"
#include "sohkan/dataset.hpp"
#include "sohkan/jsonio.hpp"
#include "sohkan/kan.hpp"
#include "sohkan/log.hpp"
#include "sohkan/soh.hpp"
#include "sohkan/svg.hpp"
#include "sohkan/symbolic.hpp"
#include "sohkan/thermal.hpp"
#include "sohkan/trainer.hpp"
#include "sohkan/types.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sohkan;

namespace {

constexpr const char* kVersion = "0.1.0";

// Published reference results for the VAH17 aging dataset, logged alongside
// our numbers when reference_compare is enabled. No tolerance is attached:
// a single training run on external data is a comparison, not a gate.
constexpr double kReferenceTestRmseC = 0.67;
constexpr double kReferenceCubicR2 = 0.997;
constexpr int kReferenceCrossingCycle = 948;

/// Collects inputs/outputs while a command runs and writes run_manifest.json
/// last, so the manifest's existence marks a completed run.
class Manifest {
public:
    Manifest(std::string command, const Config& config, std::uint64_t seed)
        : command_(std::move(command)), config_(&config), seed_(seed),
          start_(std::chrono::steady_clock::now()) {}

    void add_input(const fs::path& path) { inputs_.push_back(path.string()); }
    void add_output(const fs::path& path) { outputs_.push_back(path.string()); }

    void write(const fs::path& out_dir) const {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        JsonWriter w;
        w.begin_object();
        w.field("command", command_);
        w.field("version", std::string(kVersion));
        w.field("seed", static_cast<unsigned long long>(seed_));
        w.begin_object("config");
        for (const auto& [key, value] : config_->values()) w.field(key, value);
        w.end_object();
        w.begin_array("inputs");
        for (const std::string& p : inputs_) w.array_element(p);
        w.end_array();
        w.begin_array("outputs");
        for (const std::string& p : outputs_) w.array_element(p);
        w.end_array();
        w.field("wall_time_s", elapsed);
        w.end_object();
        w.write_file((out_dir / "run_manifest.json").string());
    }

private:
    std::string command_;
    const Config* config_;
    std::uint64_t seed_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> values;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::runtime_error("config key '" + key + "': cannot parse '" + item + "'");
        }
    }
    if (values.empty()) throw std::runtime_error("config key '" + key + "' is empty");
    return values;
}

ThermalParams thermal_from(const Config& cfg) {
    ThermalParams p;
    p.h_w_m2k = cfg.get_double("h_w_m2k", p.h_w_m2k);
    p.area_m2 = cfg.get_double("area_m2", p.area_m2);
    p.rho_kg_m3 = cfg.get_double("rho_kg_m3", p.rho_kg_m3);
    p.cp_j_kgk = cfg.get_double("cp_j_kgk", p.cp_j_kgk);
    p.volume_m3 = cfg.get_double("volume_m3", p.volume_m3);
    p.tau_s = cfg.get_double("tau_s", p.tau_s);
    p.t_ambient_c = cfg.get_double("t_ambient_c", p.t_ambient_c);
    return p;
}

CycleProfile profile_from(const Config& cfg) {
    CycleProfile p;
    p.current_a = cfg.get_double("current_a", p.current_a);
    p.cc_s = cfg.get_double("cc_s", p.cc_s);
    p.rest_s = cfg.get_double("rest_s", p.rest_s);
    p.lead_in_s = cfg.get_double("lead_in_s", p.lead_in_s);
    p.n_cycles = cfg.get_int("cycles", p.n_cycles);
    return p;
}

ResistanceSchedule schedule_from(const Config& cfg) {
    const std::string kind = cfg.get_string("schedule", "linear_to_soh");
    const double r_bol = cfg.get_double("r_bol_ohm", 0.045);
    if (kind == "constant") return ResistanceSchedule::constant(r_bol);
    if (kind == "linear") {
        return ResistanceSchedule::linear(r_bol, cfg.get_double("r_eol_ohm", r_bol));
    }
    if (kind == "linear_to_soh") {
        return ResistanceSchedule::linear_to_soh(r_bol, cfg.get_double("soh_eol", 0.68));
    }
    if (kind == "polynomial") {
        return ResistanceSchedule::polynomial(
            parse_double_list(cfg.get_string("r_poly", ""), "r_poly"));
    }
    throw std::runtime_error("unknown schedule '" + kind +
                             "' (constant|linear|linear_to_soh|polynomial)");
}

SplineGrid grid_from(const Config& cfg) {
    SplineGrid grid;
    grid.intervals = cfg.get_int("grid_intervals", grid.intervals);
    grid.order = cfg.get_int("spline_degree", grid.order);
    grid.validate();
    return grid;
}

PairBuildConfig pair_config_from(const Config& cfg) {
    PairBuildConfig pc;
    pc.cc_current = cfg.get_double("cc_current", pc.cc_current);
    pc.cc_tol = cfg.get_double("cc_tol", pc.cc_tol);
    pc.horizon_n = cfg.get_int("horizon_n", pc.horizon_n);
    pc.offsets = default_split_offsets(pc.horizon_n);
    pc.offsets.train = cfg.get_int("offset_train", pc.offsets.train);
    pc.offsets.validation = cfg.get_int("offset_val", pc.offsets.validation);
    pc.offsets.test = cfg.get_int("offset_test", pc.offsets.test);
    pc.validate();
    return pc;
}

TrainConfig train_config_from(const Config& cfg) {
    TrainConfig tc;
    tc.lambda = cfg.get_double("lambda", tc.lambda);
    tc.nu1 = cfg.get_double("nu1", tc.nu1);
    tc.nu2 = cfg.get_double("nu2", tc.nu2);
    tc.steps = cfg.get_int("steps", tc.steps);
    tc.batch_size = cfg.get_int("batch_size", tc.batch_size);
    tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
    tc.seed = cfg.get_u64("seed", 42);
    tc.divergence_limit = cfg.get_double("divergence_limit", tc.divergence_limit);
    tc.validate();
    return tc;
}

// ---------------------------------------------------------------------------
// Command workers. Each appends what it reads/writes to the manifest; the
// wrapper writes the manifest after the worker returns.
// ---------------------------------------------------------------------------

struct SimulateOut {
    fs::path dataset;
    fs::path oracle;
};

SimulateOut do_simulate(const Config& cfg, const fs::path& out, Manifest& manifest) {
    const ThermalParams thermal = thermal_from(cfg);
    const CycleProfile profile = profile_from(cfg);
    const ResistanceSchedule schedule = schedule_from(cfg);

    const LifeResult life = simulate_life(thermal, profile, schedule);
    logging::info("simulated " + std::to_string(life.dataset.size()) + " cycles, " +
                  std::to_string(life.dataset.cycles.front().size()) +
                  " samples each, gamma per step " + format_g17(thermal.gamma()));

    SimulateOut paths{out / "dataset.csv", out / "oracle_soh.csv"};
    save_dataset_csv(life.dataset, paths.dataset.string());
    manifest.add_output(paths.dataset);
    save_soh_csv({life.oracle}, paths.oracle.string());
    manifest.add_output(paths.oracle);
    return paths;
}

fs::path do_ingest(const Config& cfg, const fs::path& out, const fs::path& dataset_path,
                   Manifest& manifest) {
    manifest.add_input(dataset_path);
    const CycleDataset dataset = load_dataset_csv(dataset_path.string());
    const PairBuildConfig pc = pair_config_from(cfg);
    const NormalizationParams norm = compute_normalization(dataset, pc);
    const SplitPairs pairs = build_pairs(dataset, norm, pc);
    logging::info("normalization [" + format_g17(norm.t_min_c) + ", " + format_g17(norm.t_max_c) +
                  "] C over " + std::to_string(pairs.train.size()) + " train pairs");

    const fs::path pairs_path = out / "pairs.csv";
    save_pairs_csv(pairs, pairs_path.string());
    manifest.add_output(pairs_path);
    return pairs_path;
}

fs::path do_train(const Config& cfg, const fs::path& out, const fs::path& dataset_path,
                  Manifest& manifest) {
    manifest.add_input(dataset_path);
    const CycleDataset dataset = load_dataset_csv(dataset_path.string());
    const PairBuildConfig pc = pair_config_from(cfg);
    const NormalizationParams norm = compute_normalization(dataset, pc);
    const SplitPairs pairs = build_pairs(dataset, norm, pc);

    const TrainConfig tc = train_config_from(cfg);
    KanModel model =
        make_initial_model(grid_from(cfg), norm, pc.horizon_n, dataset.last_cycle(), tc.seed);
    const TrainReport report = train(model, pairs.train, pairs.validation, tc);

    const fs::path model_path = out / "model.json";
    save_model(model, model_path.string());
    manifest.add_output(model_path);

    const fs::path report_path = out / "train_report.csv";
    save_train_report_csv(report, report_path.string());
    manifest.add_output(report_path);

    LineChart chart;
    chart.title = "Training and validation loss";
    chart.x_label = "step";
    chart.y_label = "loss";
    chart.log_y = true;
    PlotSeries train_series{"train (composite)", "", false, {}, {}};
    PlotSeries val_series{"validation (prediction)", "", true, {}, {}};
    for (std::size_t i = 0; i < report.train_loss.size(); ++i) {
        train_series.x.push_back(static_cast<double>(i));
        train_series.y.push_back(report.train_loss[i]);
        val_series.x.push_back(static_cast<double>(i));
        val_series.y.push_back(report.val_loss[i]);
    }
    chart.series = {train_series, val_series};
    const fs::path loss_path = out / "loss.svg";
    write_line_chart_svg(chart, loss_path.string());
    manifest.add_output(loss_path);

    logging::info("final train loss " + format_g17(report.train_loss.back()) +
                  ", validation loss " + format_g17(report.val_loss.back()));
    logging::info("test RMSE " + format_g17(evaluate_rmse_c(model, pairs.test)) + " C");
    return model_path;
}

struct ExtractOut {
    fs::path fits;
    fs::path curve;
};

/// Re-anchors the learned activations onto the physical scale identified
/// from the raw temperature series (per-step retention regression).
AnchorShift make_anchor(const Config& cfg, const KanModel& model, const CycleDataset& dataset) {
    const PairBuildConfig pc = pair_config_from(cfg);
    const double gamma_step = estimate_gamma_step(dataset, pc);
    const SplitPairs pairs = build_pairs(dataset, model.norm, pc);
    const double tbar_ambient = model.norm.normalize(dataset.cycles.front().t_ambient_c);
    return calibrate_anchor(model, pairs.train, gamma_step, tbar_ambient);
}

ExtractOut do_extract(const Config& cfg, const fs::path& out, const fs::path& model_path,
                      const fs::path& dataset_path, Manifest& manifest) {
    manifest.add_input(model_path);
    const KanModel model = load_model(model_path.string());
    const int samples = std::max(model.last_cycle + 1, 2);
    ActivationCurve curve = sample_a2(model, samples);
    const ActivationCurve raw = curve;

    // With a dataset at hand the fits target the anchored curve: the raw
    // A1/A2 split is only determined up to exchanges along the training
    // trajectory, so formulas extracted from the raw curve inherit whatever
    // share of the temperature channel leaked across.
    bool anchored = false;
    if (!dataset_path.empty()) {
        manifest.add_input(dataset_path);
        const CycleDataset dataset = load_dataset_csv(dataset_path.string());
        const AnchorShift anchor = make_anchor(cfg, model, dataset);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            curve.value[i] += anchor.at(curve.k_bar[i]);
        }
        anchored = true;
        logging::info("fitting the anchored cycle activation (gamma^N " +
                      format_g17(anchor.gamma_pow_n) + ")");
    }

    ExtractOut paths{out / "fits.json", out / "a2_curve.csv"};
    save_curve_csv(curve, paths.curve.string());
    manifest.add_output(paths.curve);

    const std::vector<SymbolicFit> fits = fit_dictionary(curve);
    save_fits_json(fits, paths.fits.string());
    manifest.add_output(paths.fits);
    for (const SymbolicFit& fit : fits) {
        if (fit.ok) {
            logging::info(fit.formula() + "  (R^2 = " + format_g17(fit.r2) + ")");
        } else {
            logging::info(to_string(fit.form) + ": failed, " + fit.error);
        }
    }

    LineChart chart;
    chart.title = "Learned cycle activation A2";
    chart.x_label = "normalized cycle k_bar";
    chart.y_label = "A2(k_bar)";
    if (anchored) {
        chart.series.push_back({"anchored A2 (physical scale)", "", false, curve.k_bar,
                                curve.value});
        chart.series.push_back({"raw learned A2", "#bbbbbb", false, raw.k_bar, raw.value});
    } else {
        chart.series.push_back({"learned A2", "", false, curve.k_bar, curve.value});
    }
    if (!fits.empty() && fits.front().ok) {
        PlotSeries best{"best fit: " + to_string(fits.front().form), "", true, curve.k_bar, {}};
        for (double kb : curve.k_bar) best.y.push_back(fits.front().eval(kb));
        chart.series.push_back(best);
    }
    const fs::path plot_path = out / "a2_curve.svg";
    write_line_chart_svg(chart, plot_path.string());
    manifest.add_output(plot_path);
    return paths;
}

void do_soh(const Config& cfg, const fs::path& out, const fs::path& model_path,
            const fs::path& fits_path, const fs::path& dataset_path, const fs::path& oracle_path,
            Manifest& manifest) {
    manifest.add_input(model_path);
    manifest.add_input(fits_path);
    manifest.add_input(dataset_path);
    const KanModel model = load_model(model_path.string());
    const std::vector<SymbolicFit> fits = load_fits_json(fits_path.string());
    const CycleDataset dataset = load_dataset_csv(dataset_path.string());
    const int last = dataset.last_cycle();
    if (last != model.last_cycle) {
        logging::warn("dataset spans cycle 0.." + std::to_string(last) +
                      " but the model was trained to cycle " + std::to_string(model.last_cycle));
    }

    std::vector<SohCurve> curves;
    if (!oracle_path.empty()) {
        manifest.add_input(oracle_path);
        for (SohCurve& c : load_soh_csv(oracle_path.string())) curves.push_back(std::move(c));
    }

    curves.push_back(baseline_ir_soh(dataset, cfg.get_double("step_threshold_a", 0.5)));

    const ActivationCurve a2 = sample_a2(model, std::max(last + 1, 2));
    try {
        curves.push_back(soh_from_a2(a2, nullptr, last));
    } catch (const std::exception& e) {
        logging::warn(std::string("raw A2 mode unavailable: ") + e.what());
    }

    try {
        const AnchorShift anchor = make_anchor(cfg, model, dataset);
        curves.push_back(soh_from_a2(a2, &anchor, last));
        logging::info("anchored with gamma_step " + format_g17(anchor.gamma_step) +
                      ", gamma^N " + format_g17(anchor.gamma_pow_n));
    } catch (const std::exception& e) {
        logging::warn(std::string("anchored A2 mode unavailable: ") + e.what());
    }

    for (const SymbolicFit& fit : fits) {
        if (!fit.ok) continue;
        if (fit.form != FitForm::power2 && fit.form != FitForm::power3 &&
            fit.form != FitForm::power4) {
            continue;
        }
        try {
            curves.push_back(closed_form_soh_curve(fit, last));
        } catch (const std::exception& e) {
            logging::warn("closed form " + to_string(fit.form) + " unavailable: " + e.what());
        }
    }

    const fs::path soh_path = out / "soh.csv";
    save_soh_csv(curves, soh_path.string());
    manifest.add_output(soh_path);

    const double threshold = cfg.get_double("soh_threshold", 70.0);
    LineChart chart;
    chart.title = "State of health by source";
    chart.x_label = "cycle";
    chart.y_label = "SoH (%)";
    chart.rule_y = threshold;
    for (const SohCurve& c : curves) {
        PlotSeries s{to_string(c.source), "", c.source == SohSource::oracle, {}, {}};
        for (std::size_t i = 0; i < c.size(); ++i) {
            s.x.push_back(c.cycle[i]);
            s.y.push_back(c.soh_percent[i]);
        }
        chart.series.push_back(std::move(s));
    }
    const fs::path cmp_path = out / "soh_comparison.svg";
    write_line_chart_svg(chart, cmp_path.string());
    manifest.add_output(cmp_path);

    // Error statistics against the oracle when present, the IR baseline
    // otherwise.
    const SohCurve* reference = &curves.front();
    std::string errors_csv = "source,cycle,error_pp\n";
    std::string box_csv = "source,min_pp,q1_pp,median_pp,q3_pp,max_pp\n";
    LineChart err_chart;
    err_chart.title = "SoH error vs " + to_string(reference->source);
    err_chart.x_label = "cycle";
    err_chart.y_label = "error (pp)";
    err_chart.rule_y = 0.0;
    struct NamedStats {
        std::string source;
        ErrorStats stats;
    };
    std::vector<NamedStats> all_stats;
    for (const SohCurve& c : curves) {
        if (&c == reference) continue;
        if (c.cycle != reference->cycle) {
            logging::warn(to_string(c.source) + " support differs from " +
                          to_string(reference->source) + "; skipping error stats");
            continue;
        }
        const ErrorStats stats = error_metrics(c, *reference);
        all_stats.push_back({to_string(c.source), stats});
        PlotSeries s{to_string(c.source), "", false, {}, {}};
        for (std::size_t i = 0; i < c.size(); ++i) {
            errors_csv += to_string(c.source) + ',' + std::to_string(c.cycle[i]) + ',' +
                          format_g17(stats.per_cycle[i]) + '\n';
            s.x.push_back(c.cycle[i]);
            s.y.push_back(stats.per_cycle[i]);
        }
        err_chart.series.push_back(std::move(s));
        const auto box = five_number_summary(stats.per_cycle);
        box_csv += all_stats.back().source;
        for (double v : box) box_csv += ',' + format_g17(v);
        box_csv += '\n';
    }

    const fs::path errors_path = out / "error_series.csv";
    {
        std::ofstream f(errors_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + errors_path.string() + "'");
        f << errors_csv;
    }
    manifest.add_output(errors_path);

    const fs::path box_path = out / "error_box.csv";
    {
        std::ofstream f(box_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + box_path.string() + "'");
        f << box_csv;
    }
    manifest.add_output(box_path);

    if (!err_chart.series.empty()) {
        const fs::path err_path = out / "error_series.svg";
        write_line_chart_svg(err_chart, err_path.string());
        manifest.add_output(err_path);
    }

    const SplitPairs pairs = build_pairs(dataset, model.norm, pair_config_from(cfg));
    const double test_rmse_c = evaluate_rmse_c(model, pairs.test);

    JsonWriter w;
    w.begin_object();
    w.field("soh_threshold_percent", threshold);
    w.begin_object("milestones");
    for (const SohCurve& c : curves) {
        const auto crossing = crossing_cycle(c, threshold);
        w.field(to_string(c.source), crossing ? *crossing : -1);
    }
    w.end_object();
    w.begin_object("errors_vs_" + to_string(reference->source));
    for (const NamedStats& ns : all_stats) {
        w.begin_object(ns.source);
        w.field("mae_pp", ns.stats.mae);
        w.field("rmse_pp", ns.stats.rmse);
        w.field("max_abs_pp", ns.stats.max_abs);
        w.end_object();
    }
    w.end_object();
    w.begin_array("formulas");
    for (const SymbolicFit& fit : fits) {
        if (fit.ok) w.array_element(fit.formula() + "  [R^2 = " + format_g17(fit.r2) + "]");
    }
    w.end_array();
    if (!fits.empty() && fits.front().ok) w.field("best_form", to_string(fits.front().form));
    w.field("test_rmse_c", test_rmse_c);
    w.end_object();
    const fs::path report_path = out / "report.json";
    w.write_file(report_path.string());
    manifest.add_output(report_path);

    if (cfg.get_bool("reference_compare", false)) {
        double cubic_r2 = std::numeric_limits<double>::quiet_NaN();
        for (const SymbolicFit& fit : fits) {
            if (fit.form == FitForm::power3 && fit.ok) cubic_r2 = fit.r2;
        }
        std::optional<int> crossing;
        for (const SohCurve& c : curves) {
            if (c.source == SohSource::power_form_3) crossing = crossing_cycle(c, threshold);
        }
        logging::info("reference comparison (published VAH17 results, informational only):");
        logging::info("  test RMSE " + format_g17(test_rmse_c) + " C, published " +
                      format_g17(kReferenceTestRmseC) + " C");
        logging::info("  cubic fit R^2 " + format_g17(cubic_r2) + ", published " +
                      format_g17(kReferenceCubicR2));
        logging::info("  cubic 70% crossing " +
                      (crossing ? std::to_string(*crossing) : std::string("none")) +
                      ", published cycle " + std::to_string(kReferenceCrossingCycle));
    }
}

void finish(const Manifest& manifest, const fs::path& out) {
    manifest.write(out);
    logging::info("run complete, manifest at " + (out / "run_manifest.json").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sohkan: battery thermal aging pipeline (simulate, train, extract, estimate)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    app.add_option("-c,--config", config_path, "flat key = value configuration file");
    app.add_option("-o,--out", out_dir, "output directory, created if missing");
    auto* seed_opt = app.add_option("-s,--seed", seed, "seed override for RNG-driven stages");

    auto* sim = app.add_subcommand("simulate", "generate a synthetic aging dataset + oracle SoH");
    int cycles = 0;
    auto* cycles_opt = sim->add_option("--cycles", cycles, "number of cycles to simulate");

    auto* ing = app.add_subcommand("ingest", "build horizon pairs from a dataset CSV");
    std::string ing_dataset;
    ing->add_option("--dataset", ing_dataset, "dataset CSV (default <out>/dataset.csv)");

    auto* trn = app.add_subcommand("train", "train the additive spline network");
    std::string trn_dataset;
    trn->add_option("--dataset", trn_dataset, "dataset CSV (default <out>/dataset.csv)");
    int steps = 0;
    int batch_size = 0;
    double lambda = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double learning_rate = 0.0;
    auto* steps_opt = trn->add_option("--steps", steps, "training steps");
    auto* batch_opt = trn->add_option("--batch-size", batch_size, "minibatch size");
    auto* lambda_opt = trn->add_option("--lambda", lambda, "regularization weight");
    auto* nu1_opt = trn->add_option("--nu1", nu1, "magnitude term weight");
    auto* nu2_opt = trn->add_option("--nu2", nu2, "entropy term weight");
    auto* lr_opt = trn->add_option("--learning-rate", learning_rate, "optimizer step size");

    auto* ext = app.add_subcommand("extract", "fit symbolic forms to the cycle activation");
    std::string ext_model;
    std::string ext_dataset;
    ext->add_option("--model", ext_model, "model JSON (default <out>/model.json)");
    ext->add_option("--dataset", ext_dataset,
                    "dataset CSV; when given, fits target the anchored physical scale");

    auto* soh = app.add_subcommand("soh", "estimate SoH curves, milestones and errors");
    std::string soh_model;
    std::string soh_fits;
    std::string soh_dataset;
    std::string soh_oracle;
    soh->add_option("--model", soh_model, "model JSON (default <out>/model.json)");
    soh->add_option("--fits", soh_fits, "fits JSON (default <out>/fits.json)");
    soh->add_option("--dataset", soh_dataset, "dataset CSV (default <out>/dataset.csv)");
    soh->add_option("--oracle", soh_oracle, "oracle SoH CSV for error statistics (optional)");

    auto* rep = app.add_subcommand("report", "run the whole pipeline end to end");
    auto* rep_cycles_opt = rep->add_option("--cycles", cycles, "number of cycles to simulate");
    auto* rep_steps_opt = rep->add_option("--steps", steps, "training steps");

    for (CLI::App* sub : {sim, ing, trn, ext, soh, rep}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = config_path.empty() ? Config() : Config::load(config_path);
        if (seed_opt->count() > 0) cfg.set("seed", std::to_string(seed));
        if (cycles_opt->count() > 0 || rep_cycles_opt->count() > 0) {
            cfg.set("cycles", std::to_string(cycles));
        }
        if (steps_opt->count() > 0 || rep_steps_opt->count() > 0) {
            cfg.set("steps", std::to_string(steps));
        }
        if (batch_opt->count() > 0) cfg.set("batch_size", std::to_string(batch_size));
        if (lambda_opt->count() > 0) cfg.set("lambda", format_g17(lambda));
        if (nu1_opt->count() > 0) cfg.set("nu1", format_g17(nu1));
        if (nu2_opt->count() > 0) cfg.set("nu2", format_g17(nu2));
        if (lr_opt->count() > 0) cfg.set("learning_rate", format_g17(learning_rate));

        const fs::path out(out_dir);
        fs::create_directories(out);
        const std::uint64_t run_seed = cfg.get_u64("seed", 42);

        const auto default_path = [&](const std::string& given, const char* name) {
            return given.empty() ? out / name : fs::path(given);
        };

        if (sim->parsed()) {
            Manifest manifest("simulate", cfg, run_seed);
            do_simulate(cfg, out, manifest);
            finish(manifest, out);
        } else if (ing->parsed()) {
            Manifest manifest("ingest", cfg, run_seed);
            do_ingest(cfg, out, default_path(ing_dataset, "dataset.csv"), manifest);
            finish(manifest, out);
        } else if (trn->parsed()) {
            Manifest manifest("train", cfg, run_seed);
            do_train(cfg, out, default_path(trn_dataset, "dataset.csv"), manifest);
            finish(manifest, out);
        } else if (ext->parsed()) {
            Manifest manifest("extract", cfg, run_seed);
            do_extract(cfg, out, default_path(ext_model, "model.json"),
                       ext_dataset.empty() ? fs::path() : fs::path(ext_dataset), manifest);
            finish(manifest, out);
        } else if (soh->parsed()) {
            Manifest manifest("soh", cfg, run_seed);
            do_soh(cfg, out, default_path(soh_model, "model.json"),
                   default_path(soh_fits, "fits.json"),
                   default_path(soh_dataset, "dataset.csv"),
                   soh_oracle.empty() ? fs::path() : fs::path(soh_oracle), manifest);
            finish(manifest, out);
        } else if (rep->parsed()) {
            Manifest manifest("report", cfg, run_seed);
            const SimulateOut sim_out = do_simulate(cfg, out, manifest);
            do_ingest(cfg, out, sim_out.dataset, manifest);
            const fs::path model_path = do_train(cfg, out, sim_out.dataset, manifest);
            const ExtractOut ext_out = do_extract(cfg, out, model_path, sim_out.dataset, manifest);
            do_soh(cfg, out, model_path, ext_out.fits, sim_out.dataset, sim_out.oracle, manifest);
            finish(manifest, out);
        }
        return 0;
    } catch (const std::exception& e) {
        logging::error(e.what());
        return 1;
    }
}
