#include "sohkan/trainer.hpp"

#include "sohkan/log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sohkan {

void TrainConfig::validate() const {
    if (lambda < 0.0 || nu1 < 0.0 || nu2 < 0.0) {
        throw std::invalid_argument("regularization weights must be >= 0");
    }
    if (steps < 1) throw std::invalid_argument("need at least one training step");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (!(divergence_limit > 0.0)) throw std::invalid_argument("divergence limit must be > 0");
}

TrainReport train(KanModel& model, const std::vector<HorizonPair>& train_pairs,
                  const std::vector<HorizonPair>& validation_pairs, const TrainConfig& config) {
    config.validate();
    model.validate();
    if (train_pairs.empty()) throw std::invalid_argument("training split is empty");
    if (validation_pairs.empty()) throw std::invalid_argument("validation split is empty");

    const std::size_t n_train = train_pairs.size();
    const std::size_t batch =
        std::min(static_cast<std::size_t>(config.batch_size), n_train);
    if (batch < static_cast<std::size_t>(config.batch_size)) {
        logging::info("batch size clipped to the " + std::to_string(n_train) +
                      " available training pairs");
    }

    std::vector<double> params = get_params(model);
    const std::size_t n_params = params.size();

    // Adam state.
    std::vector<double> m(n_params, 0.0);
    std::vector<double> v(n_params, 0.0);
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;

    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = n_train;  // forces a shuffle on first use

    std::vector<HorizonPair> scratch(batch);
    const auto next_batch = [&]() -> const std::vector<HorizonPair>& {
        for (std::size_t i = 0; i < batch; ++i) {
            if (cursor >= n_train) {
                std::shuffle(order.begin(), order.end(), shuffle_rng);
                cursor = 0;
            }
            scratch[i] = train_pairs[order[cursor++]];
        }
        return scratch;
    };

    TrainReport report;
    report.train_loss.reserve(static_cast<std::size_t>(config.steps) + 1);
    report.val_loss.reserve(static_cast<std::size_t>(config.steps) + 1);

    const auto record = [&](const LossBreakdown& breakdown, double val) {
        report.train_loss.push_back(breakdown.total);
        report.pred_loss.push_back(breakdown.pred);
        report.l1_loss.push_back(breakdown.l1);
        report.entropy_loss.push_back(breakdown.entropy);
        report.val_loss.push_back(val);
    };

    const auto check_finite = [&](const LossBreakdown& breakdown, int step) {
        if (!std::isfinite(breakdown.total) || breakdown.total > config.divergence_limit) {
            throw std::runtime_error("training diverged at step " + std::to_string(step) +
                                     " (loss = " + std::to_string(breakdown.total) + ")");
        }
    };

    // Step 0: untrained model.
    {
        const LossBreakdown initial =
            total_loss(model, train_pairs, config.lambda, config.nu1, config.nu2);
        check_finite(initial, 0);
        record(initial, prediction_loss(model, validation_pairs));
    }

    for (int step_index = 1; step_index <= config.steps; ++step_index) {
        const std::vector<HorizonPair>& minibatch = next_batch();
        LossBreakdown breakdown;
        const std::vector<double> grad =
            loss_gradient(model, minibatch, config.lambda, config.nu1, config.nu2, &breakdown);
        check_finite(breakdown, step_index);

        const double t = static_cast<double>(step_index);
        const double correction1 = 1.0 - std::pow(beta1, t);
        const double correction2 = 1.0 - std::pow(beta2, t);
        for (std::size_t i = 0; i < n_params; ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
        }
        set_params(model, params);

        record(breakdown, prediction_loss(model, validation_pairs));
    }

    return report;
}

double evaluate_rmse_c(const KanModel& model, const std::vector<HorizonPair>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("evaluation split is empty");
    double acc = 0.0;
    for (const HorizonPair& pair : pairs) {
        const double r = model.forward(pair) - pair.t_bar_target;
        acc += r * r;
    }
    const double rmse_bar = std::sqrt(acc / static_cast<double>(pairs.size()));
    return rmse_bar * model.norm.delta_c();
}

void save_train_report_csv(const TrainReport& report, const std::string& path) {
    if (report.train_loss.size() != report.val_loss.size()) {
        throw std::invalid_argument("train report has mismatched series lengths");
    }
    std::string out = "step,train_loss,val_loss\n";
    char buf[32];
    const auto append = [&](double value) {
        auto res = std::to_chars(buf, buf + sizeof(buf), value);
        out.append(buf, res.ptr);
    };
    for (std::size_t i = 0; i < report.train_loss.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        append(report.train_loss[i]);
        out += ',';
        append(report.val_loss[i]);
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace sohkan
