#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "collneg/rng.hpp"
#include "collneg/samples.hpp"

namespace collneg {

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;     // out
};

double relu(double x) noexcept;
double softplus(double x) noexcept;

// Feed-forward regressor: affine + ReLU on every hidden layer, affine +
// SoftPlus on the single output. Inputs pass through a fixed per-feature
// standardisation (x - offset) * scale before the first layer; identity
// unless the trainer fitted one.
class MlpModel {
public:
    // dims = (inputs, hidden..., 1). All parameters zero.
    explicit MlpModel(std::vector<int> dims);

    // He-uniform hidden layers, Glorot-uniform output layer, zero biases.
    static MlpModel initialized(std::vector<int> dims, Rng& rng);

    const std::vector<int>& dims() const noexcept { return dims_; }
    int input_dim() const noexcept { return dims_.front(); }

    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    const Eigen::VectorXd& input_offset() const noexcept { return input_offset_; }
    const Eigen::VectorXd& input_scale() const noexcept { return input_scale_; }
    void set_input_transform(Eigen::VectorXd offset, Eigen::VectorXd scale);

    std::size_t parameter_count() const noexcept;

    // Raw network output (the N^2 estimate); always positive.
    double forward(std::span<const double> x) const;
    // Column-per-sample batch, inputs x n -> n outputs.
    Eigen::VectorXd forward_batch(const Eigen::MatrixXd& inputs) const;

    // Standardised copy of a column batch.
    Eigen::MatrixXd transform_inputs(const Eigen::MatrixXd& inputs) const;

private:
    std::vector<int> dims_;
    std::vector<DenseLayer> layers_;
    Eigen::VectorXd input_offset_;
    Eigen::VectorXd input_scale_;
};

// Same layout as MlpModel::layers(); one gradient per parameter.
using MlpGradients = std::vector<DenseLayer>;

// Mean squared error (1/n) sum (f(x_i) - y_i)^2 over a column batch, with
// its gradient by backpropagation written into grad.
double mse_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::VectorXd& targets, MlpGradients& grad);
double mse_loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 256;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<int> hidden{256, 128};
    bool standardize_inputs = true;

    void validate() const;
};

struct TrainResult {
    MlpModel model;
    double initial_loss = 0.0;          // full training-set MSE before the first step
    std::vector<double> loss_history;   // mean minibatch MSE per epoch
};

// Minibatch Adam over freshly shuffled epochs. Labels are used as given;
// callers pass N^2. The rng drives initialisation and shuffling only.
TrainResult mlp_train(const LabeledSet& train, const TrainConfig& cfg, Rng& rng);

// min(1, sqrt(forward(x))).
double predict_negativity(const MlpModel& model, std::span<const double> x);
double negativity_from_output(double output) noexcept;

// Binary model file: "COLLNEGM", u32 version, u32 dim count, u32 dims,
// f64 input offset and scale, then per layer row-major weights and bias.
// Everything little-endian.
void save_mlp(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_mlp(const std::filesystem::path& path);
bool is_mlp_file(const std::filesystem::path& path);

}  // namespace collneg
