#pragma once

#include "sohkan/kan.hpp"
#include "sohkan/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sohkan {

struct TrainConfig {
    double lambda = 0.001;
    double nu1 = 0.12;
    double nu2 = 0.15;
    int steps = 400;
    int batch_size = 128;
    double learning_rate = 0.01;
    std::uint64_t seed = 42;

    /// Training aborts when the composite loss exceeds this or goes
    /// non-finite.
    double divergence_limit = 1e6;

    void validate() const;
};

/// Per-step loss history. Index 0 holds the untrained model's losses; entry
/// s >= 1 holds the batch loss seen at step s (before its update) and the
/// validation prediction loss after that update.
struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> pred_loss;     ///< prediction component of train_loss
    std::vector<double> l1_loss;       ///< magnitude component
    std::vector<double> entropy_loss;  ///< entropy component

    [[nodiscard]] std::size_t steps() const { return train_loss.empty() ? 0 : train_loss.size() - 1; }
};

/// Runs seeded minibatch training with an adaptive-moment (Adam) update.
/// Batches come from a per-epoch reshuffle of the training pairs; the
/// effective batch size is min(batch_size, n_train). Deterministic for a
/// fixed seed and inputs.
TrainReport train(KanModel& model, const std::vector<HorizonPair>& train_pairs,
                  const std::vector<HorizonPair>& validation_pairs, const TrainConfig& config);

/// Root mean square prediction error in degrees C over a split, using the
/// model's own normalization to return to physical units.
[[nodiscard]] double evaluate_rmse_c(const KanModel& model,
                                     const std::vector<HorizonPair>& pairs);

/// Writes the loss history as CSV, schema: step,train_loss,val_loss
void save_train_report_csv(const TrainReport& report, const std::string& path);

}  // namespace sohkan
