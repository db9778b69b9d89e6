#pragma once

#include "epf/neural/network.hpp"
#include "epf/splits/splits.hpp"

#include <cstdint>

namespace epf::neural {

struct TrainConfig {
    std::size_t max_epochs = 200;
    std::size_t batch_size = 32;
    std::size_t patience = 20;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    // Record the training loss by a full pass after each epoch; otherwise the
    // mean of the minibatch losses seen during the epoch.
    bool full_train_loss = true;

    // Throws ConfigError unless every field is positive.
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct TrainedModel {
    Network network;
    TrainConfig config;
    std::vector<double> train_loss;       // per epoch
    std::vector<double> validation_loss;  // per epoch; empty without validation data
    std::size_t best_epoch = 0;           // 0-based epoch whose parameters were kept

    std::vector<double> predict(const splits::WindowedDataset& data);

    nlohmann::json to_json();
    static TrainedModel from_json(const nlohmann::json& j);
};

double mse(std::span<const double> predicted, std::span<const double> actual);

/// Adam on MSE over shuffled minibatches. Initialization and shuffling both
/// draw from Rng(config.seed). The returned network holds the parameters of
/// the epoch with the lowest validation loss (training loss if `validation`
/// is empty); training stops after `patience` epochs without improvement.
/// A non-finite loss throws TrainingError carrying the epoch. A non-empty
/// `initial` (flat parameters of the same spec) replaces the random start.
TrainedModel train(const NetworkSpec& spec, const splits::WindowedDataset& train_data,
                   const splits::WindowedDataset& validation, const TrainConfig& config,
                   std::span<const double> initial = {});

}  // namespace epf::neural
