#include "sohkan/symbolic.hpp"

#include "sohkan/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sohkan {

namespace {

constexpr double kParamBox = 20.0;

/// Curvature floor for the exp and log entries. Both families degenerate to
/// an affine function as |b| -> 0, which would duplicate the affine entry and
/// always outrank it on curved residuals; keeping |b| away from zero keeps
/// the dictionary shapes distinct.
constexpr double kMinCurvatureB = 0.5;

double power_int(double base, int n) {
    double acc = base;
    for (int i = 1; i < n; ++i) acc *= base;
    return acc;
}

double sse_power(const ActivationCurve& curve, double a, double b, int n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double r = power_int(a - b * curve.k_bar[i], n) - curve.value[i];
        acc += r * r;
    }
    return acc;
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

/// Least squares for y ~ alpha * g + beta over the curve; returns false when
/// the normal equations are singular.
bool linear_solve_2(const std::vector<double>& g, const std::vector<double>& y, double& alpha,
                    double& beta) {
    const double n = static_cast<double>(g.size());
    double sg = 0.0, sgg = 0.0, sy = 0.0, sgy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        sg += g[i];
        sgg += g[i] * g[i];
        sy += y[i];
        sgy += g[i] * y[i];
    }
    const double det = n * sgg - sg * sg;
    if (std::abs(det) < 1e-300) return false;
    alpha = (n * sgy - sg * sy) / det;
    beta = (sgg * sy - sg * sgy) / det;
    return true;
}

bool nondecreasing_magnitude(const SymbolicFit& fit) {
    constexpr int kProbes = 512;
    double prev = std::abs(fit.eval(0.0));
    for (int i = 1; i <= kProbes; ++i) {
        const double here = std::abs(fit.eval(static_cast<double>(i) / kProbes));
        if (here < prev * (1.0 - 1e-9) - 1e-15) return false;
        prev = std::max(prev, here);
    }
    return true;
}

/// SoH from a fit is value(0) / value(k); it is nonincreasing exactly when
/// the magnitude of the fitted curve never falls.
void finalize_fit(SymbolicFit& fit, const ActivationCurve& curve) {
    fit.ok = true;
    std::vector<double> predicted(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) predicted[i] = fit.eval(curve.k_bar[i]);
    fit.r2 = r_squared(curve.value, predicted);
    fit.soh_nonincreasing = nondecreasing_magnitude(fit);
}

}  // namespace

void ActivationCurve::validate() const {
    if (k_bar.size() != value.size()) throw std::invalid_argument("curve size mismatch");
    if (k_bar.size() < 2) throw std::invalid_argument("curve needs at least two samples");
    for (std::size_t i = 0; i < k_bar.size(); ++i) {
        if (!std::isfinite(k_bar[i]) || !std::isfinite(value[i])) {
            throw std::invalid_argument("curve contains non-finite sample");
        }
        if (i > 0 && !(k_bar[i] > k_bar[i - 1])) {
            throw std::invalid_argument("curve k_bar must be strictly increasing");
        }
    }
}

ActivationCurve sample_a2(const KanModel& model, int n_samples) {
    model.validate();
    if (n_samples < 2) throw std::invalid_argument("need at least two curve samples");
    ActivationCurve curve;
    curve.k_bar.resize(static_cast<std::size_t>(n_samples));
    curve.value.resize(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double k = static_cast<double>(i) / (n_samples - 1);
        curve.k_bar[static_cast<std::size_t>(i)] = k;
        curve.value[static_cast<std::size_t>(i)] = model.a2.eval(k);
    }
    return curve;
}

void save_curve_csv(const ActivationCurve& curve, const std::string& path) {
    curve.validate();
    std::string out = "k_bar,value\n";
    char buf[32];
    const auto append = [&](double value) {
        auto res = std::to_chars(buf, buf + sizeof(buf), value);
        out.append(buf, res.ptr);
    };
    for (std::size_t i = 0; i < curve.size(); ++i) {
        append(curve.k_bar[i]);
        out += ',';
        append(curve.value[i]);
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

ActivationCurve load_curve_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open curve '" + path + "'");
    ActivationCurve curve;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "k_bar,value") {
                throw std::runtime_error("curve '" + path + "' has unexpected header");
            }
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("curve line " + std::to_string(line_no) + ": expected 2 columns");
        }
        double k = 0.0, v = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, k);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw std::runtime_error("curve line " + std::to_string(line_no) + ": bad number");
        }
        curve.k_bar.push_back(k);
        curve.value.push_back(v);
    }
    curve.validate();
    return curve;
}

std::string to_string(FitForm form) {
    switch (form) {
        case FitForm::affine: return "affine";
        case FitForm::power2: return "power2";
        case FitForm::power3: return "power3";
        case FitForm::power4: return "power4";
        case FitForm::exponential: return "exp";
        case FitForm::logarithmic: return "log";
    }
    return "unknown";
}

int SymbolicFit::parameter_count() const {
    switch (form) {
        case FitForm::affine:
        case FitForm::power2:
        case FitForm::power3:
        case FitForm::power4:
            return 2;
        case FitForm::exponential:
        case FitForm::logarithmic:
            return 3;
    }
    return 0;
}

int SymbolicFit::polynomial_degree() const {
    switch (form) {
        case FitForm::affine: return 1;
        case FitForm::power2: return 2;
        case FitForm::power3: return 3;
        case FitForm::power4: return 4;
        case FitForm::exponential:
        case FitForm::logarithmic:
            return 99;
    }
    return 99;
}

double SymbolicFit::eval(double k_bar) const {
    if (!ok || params.size() < 2) throw std::runtime_error("cannot evaluate a failed fit");
    switch (form) {
        case FitForm::affine:
            return params[0] + params[1] * k_bar;
        case FitForm::power2:
            return power_int(params[0] - params[1] * k_bar, 2);
        case FitForm::power3:
            return power_int(params[0] - params[1] * k_bar, 3);
        case FitForm::power4:
            return power_int(params[0] - params[1] * k_bar, 4);
        case FitForm::exponential:
            return params[0] * std::exp(params[1] * k_bar) + params[2];
        case FitForm::logarithmic:
            return params[0] * std::log(params[1] * k_bar + 1.0) + params[2];
    }
    throw std::logic_error("unknown fit form");
}

std::string SymbolicFit::formula() const {
    if (!ok) return "<failed: " + error + ">";
    switch (form) {
        case FitForm::affine:
            return format_number(params[0]) + " + " + format_number(params[1]) + "*k_bar";
        case FitForm::power2:
        case FitForm::power3:
        case FitForm::power4:
            return "(" + format_number(params[0]) + " - " + format_number(params[1]) +
                   "*k_bar)^" + std::to_string(polynomial_degree());
        case FitForm::exponential:
            return format_number(params[0]) + "*exp(" + format_number(params[1]) + "*k_bar) + " +
                   format_number(params[2]);
        case FitForm::logarithmic:
            return format_number(params[0]) + "*log(" + format_number(params[1]) + "*k_bar + 1) + " +
                   format_number(params[2]);
    }
    return "?";
}

double r_squared(std::span<const double> y_true, std::span<const double> y_fit) {
    if (y_true.size() != y_fit.size() || y_true.empty()) {
        throw std::invalid_argument("r_squared needs equal-length non-empty series");
    }
    double mean = 0.0;
    for (double y : y_true) mean += y;
    mean /= static_cast<double>(y_true.size());

    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        const double r = y_true[i] - y_fit[i];
        ss_res += r * r;
    }
    if (ss_tot == 0.0) {
        if (ss_res == 0.0) return 1.0;
        logging::warn("curve has no variance, R^2 undefined; reporting -inf");
        return -std::numeric_limits<double>::infinity();
    }
    return 1.0 - ss_res / ss_tot;
}

SymbolicFit fit_affine(const ActivationCurve& curve) {
    curve.validate();
    SymbolicFit fit;
    fit.form = FitForm::affine;
    double slope = 0.0, intercept = 0.0;
    if (!linear_solve_2(curve.k_bar, curve.value, slope, intercept)) {
        fit.error = "degenerate k_bar grid";
        return fit;
    }
    fit.params = {intercept, slope};
    finalize_fit(fit, curve);
    return fit;
}

SymbolicFit fit_power_form(const ActivationCurve& curve, int degree) {
    curve.validate();
    SymbolicFit fit;
    switch (degree) {
        case 2: fit.form = FitForm::power2; break;
        case 3: fit.form = FitForm::power3; break;
        case 4: fit.form = FitForm::power4; break;
        default: throw std::invalid_argument("power form degree must be 2, 3 or 4");
    }

    // Coarse 200 x 200 sweep over the parameter box. Negative a covers the
    // opposite sign branch of the base.
    constexpr int kGrid = 200;
    double best_a = 0.0, best_b = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia < kGrid; ++ia) {
        const double a = -kParamBox + 2.0 * kParamBox * ia / (kGrid - 1);
        for (int ib = 0; ib < kGrid; ++ib) {
            const double b = -kParamBox + 2.0 * kParamBox * ib / (kGrid - 1);
            const double sse = sse_power(curve, a, b, degree);
            if (sse < best_sse) {
                best_sse = sse;
                best_a = a;
                best_b = b;
            }
        }
    }

    // Damped Gauss-Newton, projected back into the search box.
    double a = best_a, b = best_b;
    double sse = best_sse;
    double mu = 1e-6;
    for (int iter = 0; iter < 200; ++iter) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double base = a - b * curve.k_bar[i];
            const double f = power_int(base, degree);
            const double d = degree * power_int(base, degree - 1);
            const double ja = d;
            const double jb = -curve.k_bar[i] * d;
            const double r = f - curve.value[i];
            jtj00 += ja * ja;
            jtj01 += ja * jb;
            jtj11 += jb * jb;
            jtr0 += ja * r;
            jtr1 += jb * r;
        }
        bool moved = false;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double d00 = jtj00 + mu * (1.0 + jtj00);
            const double d11 = jtj11 + mu * (1.0 + jtj11);
            const double det = d00 * d11 - jtj01 * jtj01;
            if (std::abs(det) < 1e-300) break;
            const double da = (-jtr0 * d11 + jtr1 * jtj01) / det;
            const double db = (-jtr1 * d00 + jtr0 * jtj01) / det;
            const double na = std::clamp(a + da, -kParamBox, kParamBox);
            const double nb = std::clamp(b + db, -kParamBox, kParamBox);
            const double new_sse = sse_power(curve, na, nb, degree);
            if (new_sse <= sse) {
                const double gain = sse - new_sse;
                a = na;
                b = nb;
                sse = new_sse;
                mu = std::max(mu / 3.0, 1e-12);
                moved = true;
                if (gain < 1e-15 * (1.0 + sse)) iter = 200;
                break;
            }
            mu *= 4.0;
        }
        if (!moved) break;
    }

    // For even degrees (a, b) and (-a, -b) are the same function; report the
    // branch with a positive leading base value.
    if (degree % 2 == 0 && (a < 0.0 || (a == 0.0 && b < 0.0))) {
        a = -a;
        b = -b;
    }

    fit.params = {a, b};
    finalize_fit(fit, curve);
    return fit;
}

namespace {

SymbolicFit fit_profiled(const ActivationCurve& curve, FitForm form,
                         const std::vector<double>& b_grid,
                         double (*shape)(double b, double k)) {
    SymbolicFit fit;
    fit.form = form;

    std::vector<double> g(curve.size());
    double best_sse = std::numeric_limits<double>::infinity();
    double best_a = 0.0, best_b = 0.0, best_c = 0.0;
    bool found = false;

    const auto try_b = [&](double b) {
        // The curvature floor also binds during refinement; otherwise these
        // forms flatten into a disguised affine and win ties they should not.
        if (std::abs(b) < kMinCurvatureB) return;
        for (std::size_t i = 0; i < curve.size(); ++i) g[i] = shape(b, curve.k_bar[i]);
        double alpha = 0.0, beta = 0.0;
        if (!linear_solve_2(g, curve.value, alpha, beta)) return;
        double sse = 0.0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double r = alpha * g[i] + beta - curve.value[i];
            sse += r * r;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_a = alpha;
            best_b = b;
            best_c = beta;
            found = true;
        }
    };

    for (double b : b_grid) try_b(b);
    if (!found) {
        fit.error = "no admissible curvature parameter";
        return fit;
    }

    // Local refinement of b between its grid neighbours.
    double lo = best_b, hi = best_b;
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
        if (b_grid[i] == best_b) {
            if (i > 0 && (b_grid[i - 1] < best_b) == (b_grid[i - 1] < b_grid[i])) lo = b_grid[i - 1];
            if (i + 1 < b_grid.size()) hi = b_grid[i + 1];
        }
    }
    if (lo > hi) std::swap(lo, hi);
    for (int pass = 0; pass < 3; ++pass) {
        const double span = (hi - lo) / 40.0;
        if (span <= 0.0) break;
        const double center = best_b;
        for (int i = 0; i <= 40; ++i) try_b(lo + span * i);
        const double width = (hi - lo) / 8.0;
        lo = std::max(lo, best_b - width);
        hi = std::min(hi, best_b + width);
        if (best_b == center && pass > 0) break;
    }

    fit.params = {best_a, best_b, best_c};
    finalize_fit(fit, curve);
    return fit;
}

std::vector<double> signed_log_grid(double lo, double hi, int per_side, bool include_negative,
                                    double negative_floor) {
    std::vector<double> grid;
    for (int i = 0; i < per_side; ++i) {
        const double t = static_cast<double>(i) / (per_side - 1);
        const double mag = lo * std::pow(hi / lo, t);
        grid.push_back(mag);
        if (include_negative && -mag > negative_floor) grid.push_back(-mag);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

}  // namespace

SymbolicFit fit_exponential(const ActivationCurve& curve) {
    curve.validate();
    const std::vector<double> grid = signed_log_grid(kMinCurvatureB, 10.0, 60, true, -10.0);
    return fit_profiled(curve, FitForm::exponential, grid,
                        [](double b, double k) { return std::exp(b * k); });
}

SymbolicFit fit_logarithmic(const ActivationCurve& curve) {
    curve.validate();
    // b k + 1 must stay positive on [0, 1], so negative b is floored at -0.95.
    const std::vector<double> grid = signed_log_grid(kMinCurvatureB, 20.0, 60, true, -0.95);
    return fit_profiled(curve, FitForm::logarithmic, grid,
                        [](double b, double k) { return std::log(b * k + 1.0); });
}

std::vector<SymbolicFit> fit_dictionary(const ActivationCurve& curve) {
    curve.validate();
    std::vector<SymbolicFit> fits;
    const auto guarded = [&](auto&& fn, FitForm form) {
        try {
            fits.push_back(fn());
        } catch (const std::exception& e) {
            SymbolicFit failed;
            failed.form = form;
            failed.error = e.what();
            fits.push_back(failed);
            logging::warn("dictionary fit " + to_string(form) + " failed: " + e.what());
        }
    };
    guarded([&] { return fit_affine(curve); }, FitForm::affine);
    guarded([&] { return fit_power_form(curve, 2); }, FitForm::power2);
    guarded([&] { return fit_power_form(curve, 3); }, FitForm::power3);
    guarded([&] { return fit_power_form(curve, 4); }, FitForm::power4);
    guarded([&] { return fit_exponential(curve); }, FitForm::exponential);
    guarded([&] { return fit_logarithmic(curve); }, FitForm::logarithmic);

    std::stable_sort(fits.begin(), fits.end(), [](const SymbolicFit& x, const SymbolicFit& y) {
        if (x.ok != y.ok) return x.ok;
        if (!x.ok) return false;
        if (x.r2 != y.r2) return x.r2 > y.r2;
        if (x.parameter_count() != y.parameter_count()) {
            return x.parameter_count() < y.parameter_count();
        }
        return x.polynomial_degree() < y.polynomial_degree();
    });
    return fits;
}

void save_fits_json(const std::vector<SymbolicFit>& fits, const std::string& path) {
    nlohmann::ordered_json root;
    root["fits"] = nlohmann::ordered_json::array();
    for (const SymbolicFit& fit : fits) {
        nlohmann::ordered_json entry;
        entry["form"] = to_string(fit.form);
        entry["ok"] = fit.ok;
        entry["error"] = fit.error;
        entry["params"] = fit.params;
        entry["r2"] = fit.r2;
        entry["soh_nonincreasing"] = fit.soh_nonincreasing;
        entry["formula"] = fit.ok ? fit.formula() : "";
        root["fits"].push_back(std::move(entry));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << root.dump(2) << "\n";
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<SymbolicFit> load_fits_json(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open fits '" + path + "'");
    nlohmann::json root;
    try {
        file >> root;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("fits '" + path + "' is not valid JSON: " + e.what());
    }

    std::vector<SymbolicFit> fits;
    try {
        for (const auto& entry : root.at("fits")) {
            SymbolicFit fit;
            const std::string form = entry.at("form").get<std::string>();
            bool known = false;
            for (FitForm candidate :
                 {FitForm::affine, FitForm::power2, FitForm::power3, FitForm::power4,
                  FitForm::exponential, FitForm::logarithmic}) {
                if (to_string(candidate) == form) {
                    fit.form = candidate;
                    known = true;
                }
            }
            if (!known) throw std::runtime_error("unknown fit form '" + form + "'");
            fit.ok = entry.at("ok").get<bool>();
            fit.error = entry.at("error").get<std::string>();
            fit.params = entry.at("params").get<std::vector<double>>();
            fit.r2 = entry.at("r2").get<double>();
            fit.soh_nonincreasing = entry.at("soh_nonincreasing").get<bool>();
            fits.push_back(std::move(fit));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("fits '" + path + "' has unexpected schema: " + e.what());
    }
    return fits;
}

}  // namespace sohkan
