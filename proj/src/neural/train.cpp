#include "epf/neural/train.hpp"

#include "epf/errors.hpp"
#include "epf/neural/adam.hpp"

#include <cmath>
#include <numeric>

namespace epf::neural {

void TrainConfig::validate() const {
    if (max_epochs == 0 || batch_size == 0 || patience == 0 || !(learning_rate > 0.0)) {
        throw ConfigError("train config: epochs, batch size, patience and learning rate must be positive");
    }
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"max_epochs", c.max_epochs}, {"batch_size", c.batch_size},
            {"patience", c.patience},     {"learning_rate", c.learning_rate},
            {"seed", c.seed},             {"full_train_loss", c.full_train_loss}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    try {
        c.max_epochs = j.value("max_epochs", c.max_epochs);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.patience = j.value("patience", c.patience);
        c.learning_rate = j.value("learning_rate", c.learning_rate);
        c.seed = j.value("seed", c.seed);
        c.full_train_loss = j.value("full_train_loss", c.full_train_loss);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed train config: ") + e.what());
    }
    c.validate();
    return c;
}

double mse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size() || predicted.empty()) {
        throw ShapeError("mse: size mismatch or empty input");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        const double e = predicted[k] - actual[k];
        s += e * e;
    }
    return s / static_cast<double>(predicted.size());
}

std::vector<double> TrainedModel::predict(const splits::WindowedDataset& data) {
    if (data.size() == 0) {
        return {};
    }
    return network.predict(data.inputs);
}

nlohmann::json TrainedModel::to_json() {
    auto j = network.to_json();
    j["train_config"] = neural::to_json(config);
    j["train_loss"] = train_loss;
    j["validation_loss"] = validation_loss;
    j["best_epoch"] = best_epoch;
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    TrainedModel m{Network::from_json(j), {}, {}, {}, 0};
    try {
        if (j.contains("train_config")) {
            m.config = train_config_from_json(j.at("train_config"));
        }
        m.train_loss = j.value("train_loss", std::vector<double>{});
        m.validation_loss = j.value("validation_loss", std::vector<double>{});
        m.best_epoch = j.value("best_epoch", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model document: ") + e.what());
    }
    return m;
}

TrainedModel train(const NetworkSpec& spec, const splits::WindowedDataset& train_data,
                   const splits::WindowedDataset& validation, const TrainConfig& config,
                   std::span<const double> initial) {
    config.validate();
    if (train_data.size() == 0) {
        throw DataError("train: empty training set");
    }
    numkernel::Rng rng(config.seed);
    TrainedModel model{Network(spec, rng), config, {}, {}, 0};
    Network& net = model.network;
    if (!initial.empty()) {
        net.set_flat_parameters(initial);
    }
    auto shuffle_rng = rng.fork(1);

    AdamState adam;
    adam.learning_rate = config.learning_rate;
    std::vector<std::size_t> order(train_data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> best = net.flat_parameters();
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double batch_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            const Matrix y = net.forward(make_batch(train_data.inputs, rows));
            Matrix grad(y.rows(), 1);
            const double scale = 2.0 / static_cast<double>(y.rows());
            for (Eigen::Index r = 0; r < y.rows(); ++r) {
                const double e = y(r, 0) - train_data.targets[rows[static_cast<std::size_t>(r)]];
                batch_loss_sum += e * e;
                grad(r, 0) = scale * e;
            }
            if (!std::isfinite(batch_loss_sum)) {
                throw TrainingError("non-finite training loss", epoch);
            }
            net.zero_grad();
            net.backward(grad);
            adam_step(adam, net.params());
        }

        const double train_loss = config.full_train_loss
                                      ? mse(net.predict(train_data.inputs), train_data.targets)
                                      : batch_loss_sum / static_cast<double>(order.size());
        if (!std::isfinite(train_loss)) {
            throw TrainingError("non-finite training loss", epoch);
        }
        model.train_loss.push_back(train_loss);
        double monitored = train_loss;
        if (validation.size() > 0) {
            monitored = mse(net.predict(validation.inputs), validation.targets);
            if (!std::isfinite(monitored)) {
                throw TrainingError("non-finite validation loss", epoch);
            }
            model.validation_loss.push_back(monitored);
        }
        if (monitored < best_loss) {
            best_loss = monitored;
            best = net.flat_parameters();
            model.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    net.set_flat_parameters(best);
    return model;
}

}  // namespace epf::neural
