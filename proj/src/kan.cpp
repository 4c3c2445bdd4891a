#include "sohkan/kan.hpp"

#include "sohkan/jsonio.hpp"
#include "sohkan/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

namespace sohkan {

namespace {

constexpr std::size_t kMaxBasis = 64;

double spline_part(const Activation& activation, double x) {
    double basis[kMaxBasis];
    bspline_basis_into(activation.grid, x, basis);
    double acc = 0.0;
    for (std::size_t i = 0; i < activation.coeffs.size(); ++i) {
        acc += activation.coeffs[i] * basis[i];
    }
    return acc;
}

}  // namespace

double Activation::eval(double x) const {
    return w_silu * silu(x) + spline_part(*this, x);
}

void Activation::validate() const {
    grid.validate();
    if (coeffs.size() != static_cast<std::size_t>(grid.basis_count())) {
        throw std::invalid_argument("activation has " + std::to_string(coeffs.size()) +
                                    " coefficients, grid expects " +
                                    std::to_string(grid.basis_count()));
    }
    if (!std::isfinite(w_silu)) throw std::invalid_argument("silu weight is non-finite");
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw std::invalid_argument("spline coefficient is non-finite");
    }
}

double KanModel::forward(double t_bar, double k_bar) const {
    return a1.eval(t_bar) + a2.eval(k_bar);
}

void KanModel::validate() const {
    a1.validate();
    a2.validate();
    norm.validate();
    if (horizon_n < 1) throw std::invalid_argument("model horizon must be >= 1");
    if (last_cycle < 0) throw std::invalid_argument("model last cycle must be >= 0");
}

KanModel make_initial_model(const SplineGrid& grid, const NormalizationParams& norm, int horizon_n,
                            int last_cycle, std::uint64_t seed) {
    grid.validate();
    norm.validate();
    KanModel model;
    model.a1.grid = grid;
    model.a2.grid = grid;
    model.norm = norm;
    model.horizon_n = horizon_n;
    model.last_cycle = last_cycle;
    model.seed = seed;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    const std::size_t count = static_cast<std::size_t>(grid.basis_count());
    model.a1.coeffs.resize(count);
    model.a2.coeffs.resize(count);
    for (double& c : model.a1.coeffs) c = init(rng);
    for (double& c : model.a2.coeffs) c = init(rng);

    model.validate();
    return model;
}

std::size_t param_count(const KanModel& model) {
    return 2 * (1 + model.a1.coeffs.size());
}

std::vector<double> get_params(const KanModel& model) {
    std::vector<double> params;
    params.reserve(param_count(model));
    params.push_back(model.a1.w_silu);
    params.insert(params.end(), model.a1.coeffs.begin(), model.a1.coeffs.end());
    params.push_back(model.a2.w_silu);
    params.insert(params.end(), model.a2.coeffs.begin(), model.a2.coeffs.end());
    return params;
}

void set_params(KanModel& model, std::span<const double> params) {
    if (params.size() != param_count(model)) {
        throw std::invalid_argument("parameter vector has wrong length");
    }
    std::size_t at = 0;
    model.a1.w_silu = params[at++];
    for (double& c : model.a1.coeffs) c = params[at++];
    model.a2.w_silu = params[at++];
    for (double& c : model.a2.coeffs) c = params[at++];
}

double activation_l1(const Activation& activation, std::span<const double> inputs) {
    if (inputs.empty()) throw std::invalid_argument("activation_l1 needs a non-empty batch");
    double acc = 0.0;
    for (double x : inputs) acc += std::abs(activation.eval(x));
    return acc / static_cast<double>(inputs.size());
}

double activation_entropy(double l1_a, double l1_b) {
    if (l1_a < 0.0 || l1_b < 0.0) throw std::invalid_argument("magnitudes must be >= 0");
    const double total = l1_a + l1_b;
    if (total == 0.0) {
        logging::warn("both activation magnitudes are zero, entropy defined as 0");
        return 0.0;
    }
    double s = 0.0;
    for (double m : {l1_a, l1_b}) {
        if (m > 0.0) {
            const double p = m / total;
            s -= p * std::log(p);
        }
    }
    return s;
}

double prediction_loss(const KanModel& model, std::span<const HorizonPair> batch) {
    if (batch.empty()) throw std::invalid_argument("prediction_loss needs a non-empty batch");
    double acc = 0.0;
    for (const HorizonPair& pair : batch) {
        const double r = model.forward(pair) - pair.t_bar_target;
        acc += r * r;
    }
    return acc / static_cast<double>(batch.size());
}

LossBreakdown total_loss(const KanModel& model, std::span<const HorizonPair> batch, double lambda,
                         double nu1, double nu2) {
    if (batch.empty()) throw std::invalid_argument("total_loss needs a non-empty batch");
    if (lambda < 0.0 || nu1 < 0.0 || nu2 < 0.0) {
        throw std::invalid_argument("regularization weights must be >= 0");
    }

    LossBreakdown out;
    double m1 = 0.0;
    double m2 = 0.0;
    for (const HorizonPair& pair : batch) {
        const double v1 = model.a1.eval(pair.t_bar_in);
        const double v2 = model.a2.eval(pair.k_bar);
        const double r = v1 + v2 - pair.t_bar_target;
        out.pred += r * r;
        m1 += std::abs(v1);
        m2 += std::abs(v2);
    }
    const double n = static_cast<double>(batch.size());
    out.pred /= n;
    m1 /= n;
    m2 /= n;
    out.l1 = m1 + m2;
    out.entropy = activation_entropy(m1, m2);
    out.total = out.pred + lambda * (nu1 * out.l1 + nu2 * out.entropy);
    return out;
}

std::vector<double> loss_gradient(const KanModel& model, std::span<const HorizonPair> batch,
                                  double lambda, double nu1, double nu2,
                                  LossBreakdown* breakdown) {
    if (batch.empty()) throw std::invalid_argument("loss_gradient needs a non-empty batch");
    model.validate();

    const std::size_t nc = model.a1.coeffs.size();
    const std::size_t stride = 1 + nc;
    std::vector<double> grad(2 * stride, 0.0);
    std::vector<double> l1_grad(2 * stride, 0.0);

    double pred = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    const double n = static_cast<double>(batch.size());

    double basis1[kMaxBasis];
    double basis2[kMaxBasis];
    for (const HorizonPair& pair : batch) {
        bspline_basis_into(model.a1.grid, pair.t_bar_in, basis1);
        bspline_basis_into(model.a2.grid, pair.k_bar, basis2);
        const double silu1 = silu(pair.t_bar_in);
        const double silu2 = silu(pair.k_bar);

        double v1 = model.a1.w_silu * silu1;
        for (std::size_t i = 0; i < nc; ++i) v1 += model.a1.coeffs[i] * basis1[i];
        double v2 = model.a2.w_silu * silu2;
        for (std::size_t i = 0; i < nc; ++i) v2 += model.a2.coeffs[i] * basis2[i];

        const double r = v1 + v2 - pair.t_bar_target;
        pred += r * r;
        m1 += std::abs(v1);
        m2 += std::abs(v2);

        const double w = 2.0 * r / n;
        grad[0] += w * silu1;
        for (std::size_t i = 0; i < nc; ++i) grad[1 + i] += w * basis1[i];
        grad[stride] += w * silu2;
        for (std::size_t i = 0; i < nc; ++i) grad[stride + 1 + i] += w * basis2[i];

        const double s1 = v1 > 0.0 ? 1.0 : (v1 < 0.0 ? -1.0 : 0.0);
        const double s2 = v2 > 0.0 ? 1.0 : (v2 < 0.0 ? -1.0 : 0.0);
        l1_grad[0] += s1 * silu1 / n;
        for (std::size_t i = 0; i < nc; ++i) l1_grad[1 + i] += s1 * basis1[i] / n;
        l1_grad[stride] += s2 * silu2 / n;
        for (std::size_t i = 0; i < nc; ++i) l1_grad[stride + 1 + i] += s2 * basis2[i] / n;
    }
    pred /= n;
    m1 /= n;
    m2 /= n;

    if (lambda > 0.0) {
        // d entropy / d m1 = (p2 / L)(ln p2 - ln p1), symmetric for m2. The
        // term is skipped when a magnitude vanishes (the true derivative is
        // unbounded there; zero is the stable subgradient choice).
        double ds_dm1 = 0.0;
        double ds_dm2 = 0.0;
        const double total_m = m1 + m2;
        if (m1 > 0.0 && m2 > 0.0) {
            const double p1 = m1 / total_m;
            const double p2 = m2 / total_m;
            ds_dm1 = p2 / total_m * (std::log(p2) - std::log(p1));
            ds_dm2 = p1 / total_m * (std::log(p1) - std::log(p2));
        }
        for (std::size_t i = 0; i < stride; ++i) {
            grad[i] += lambda * (nu1 + nu2 * ds_dm1) * l1_grad[i];
            grad[stride + i] += lambda * (nu1 + nu2 * ds_dm2) * l1_grad[stride + i];
        }
    }

    if (breakdown != nullptr) {
        breakdown->pred = pred;
        breakdown->l1 = m1 + m2;
        breakdown->entropy = activation_entropy(m1, m2);
        breakdown->total = pred + lambda * (nu1 * breakdown->l1 + nu2 * breakdown->entropy);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string model_to_json(const KanModel& model) {
    model.validate();
    JsonWriter json;
    json.begin_object();
    json.begin_object("grid");
    json.field("lo", model.a1.grid.lo);
    json.field("hi", model.a1.grid.hi);
    json.field("intervals", model.a1.grid.intervals);
    json.field("order", model.a1.grid.order);
    json.end_object();
    json.begin_object("a1");
    json.field("w_silu", model.a1.w_silu);
    json.field("coeffs", model.a1.coeffs);
    json.end_object();
    json.begin_object("a2");
    json.field("w_silu", model.a2.w_silu);
    json.field("coeffs", model.a2.coeffs);
    json.end_object();
    json.begin_object("norm");
    json.field("t_min", model.norm.t_min_c);
    json.field("t_max", model.norm.t_max_c);
    json.end_object();
    json.begin_object("meta");
    json.field("horizon_n", model.horizon_n);
    json.field("last_cycle", model.last_cycle);
    json.field("seed", static_cast<unsigned long long>(model.seed));
    json.end_object();
    json.end_object();
    return json.str() + "\n";
}

void save_model(const KanModel& model, const std::string& path) {
    const std::string text = model_to_json(model);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

KanModel load_model(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open model '" + path + "'");
    nlohmann::json json;
    try {
        file >> json;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model '" + path + "' is not valid JSON: " + e.what());
    }

    try {
        KanModel model;
        const auto& grid = json.at("grid");
        SplineGrid g;
        g.lo = grid.at("lo").get<double>();
        g.hi = grid.at("hi").get<double>();
        g.intervals = grid.at("intervals").get<int>();
        g.order = grid.at("order").get<int>();
        model.a1.grid = g;
        model.a2.grid = g;
        model.a1.w_silu = json.at("a1").at("w_silu").get<double>();
        model.a1.coeffs = json.at("a1").at("coeffs").get<std::vector<double>>();
        model.a2.w_silu = json.at("a2").at("w_silu").get<double>();
        model.a2.coeffs = json.at("a2").at("coeffs").get<std::vector<double>>();
        model.norm.t_min_c = json.at("norm").at("t_min").get<double>();
        model.norm.t_max_c = json.at("norm").at("t_max").get<double>();
        model.horizon_n = json.at("meta").at("horizon_n").get<int>();
        model.last_cycle = json.at("meta").at("last_cycle").get<int>();
        model.seed = json.at("meta").at("seed").get<std::uint64_t>();
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model '" + path + "' has unexpected schema: " + e.what());
    }
}

}  // namespace sohkan
