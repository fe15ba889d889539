#include "collneg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/core.h>

#include "binary_io.hpp"
#include "collneg/error.hpp"

namespace collneg {

namespace {

constexpr char kMlpMagic[8] = {'C', 'O', 'L', 'L', 'N', 'E', 'G', 'M'};
constexpr std::uint32_t kMlpVersion = 1;

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void check_dims(const std::vector<int>& dims) {
    if (dims.size() < 2) throw DimensionError("MlpModel: need at least input and output sizes");
    for (int d : dims) {
        if (d < 1) throw DimensionError(fmt::format("MlpModel: non-positive layer size {}", d));
    }
    if (dims.back() != 1) throw DimensionError("MlpModel: output layer must have size 1");
}

void fill_uniform(Eigen::MatrixXd& m, double limit, Rng& rng) {
    // Row-major draw order so the stream layout does not depend on Eigen's storage.
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = limit * (2.0 * rng.uniform() - 1.0);
}

struct Activations {
    std::vector<Eigen::MatrixXd> pre;   // z per layer
    std::vector<Eigen::MatrixXd> post;  // a per layer, post[0] = inputs
};

Activations forward_all(const MlpModel& model, const Eigen::MatrixXd& inputs) {
    const auto& layers = model.layers();
    Activations act;
    act.pre.reserve(layers.size());
    act.post.reserve(layers.size() + 1);
    act.post.push_back(model.transform_inputs(inputs));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = layers[l].weights * act.post.back();
        z.colwise() += layers[l].bias;
        const bool last = l + 1 == layers.size();
        Eigen::MatrixXd a = last ? z.unaryExpr([](double v) { return softplus(v); }).eval()
                                 : z.cwiseMax(0.0).eval();
        act.pre.push_back(std::move(z));
        act.post.push_back(std::move(a));
    }
    return act;
}

void require_batch(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    if (inputs.rows() != model.input_dim()) {
        throw DimensionError(fmt::format("MlpModel: batch has {} features, model expects {}",
                                         inputs.rows(), model.input_dim()));
    }
    if (inputs.cols() != targets.size() || targets.size() == 0) {
        throw DimensionError("MlpModel: batch and target sizes differ or are empty");
    }
}

}  // namespace

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

double softplus(double x) noexcept {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

MlpModel::MlpModel(std::vector<int> dims) : dims_(std::move(dims)) {
    check_dims(dims_);
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        layers_.push_back(DenseLayer{Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]),
                                     Eigen::VectorXd::Zero(dims_[l + 1])});
    }
    input_offset_ = Eigen::VectorXd::Zero(dims_.front());
    input_scale_ = Eigen::VectorXd::Ones(dims_.front());
}

MlpModel MlpModel::initialized(std::vector<int> dims, Rng& rng) {
    MlpModel model(std::move(dims));
    for (std::size_t l = 0; l < model.layers_.size(); ++l) {
        auto& w = model.layers_[l].weights;
        const auto fan_in = static_cast<double>(w.cols());
        const auto fan_out = static_cast<double>(w.rows());
        const bool last = l + 1 == model.layers_.size();
        const double limit = last ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
        fill_uniform(w, limit, rng);
    }
    return model;
}

void MlpModel::set_input_transform(Eigen::VectorXd offset, Eigen::VectorXd scale) {
    if (offset.size() != input_dim() || scale.size() != input_dim()) {
        throw DimensionError("MlpModel: input transform size mismatch");
    }
    if (!offset.allFinite() || !scale.allFinite()) {
        throw DimensionError("MlpModel: non-finite input transform");
    }
    input_offset_ = std::move(offset);
    input_scale_ = std::move(scale);
}

std::size_t MlpModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return n;
}

Eigen::MatrixXd MlpModel::transform_inputs(const Eigen::MatrixXd& inputs) const {
    return ((inputs.colwise() - input_offset_).array().colwise() * input_scale_.array()).matrix();
}

Eigen::VectorXd MlpModel::forward_batch(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != input_dim()) {
        throw DimensionError(fmt::format("MlpModel: input has {} features, model expects {}",
                                         inputs.rows(), input_dim()));
    }
    return forward_all(*this, inputs).post.back().row(0).transpose();
}

double MlpModel::forward(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(input_dim())) {
        throw DimensionError(
            fmt::format("MlpModel: input has {} features, model expects {}", x.size(), input_dim()));
    }
    const Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward_batch(col)(0);
}

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    require_batch(model, inputs, targets);
    return (model.forward_batch(inputs) - targets).squaredNorm() / static_cast<double>(targets.size());
}

double mse_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::VectorXd& targets, MlpGradients& grad) {
    require_batch(model, inputs, targets);
    const auto& layers = model.layers();
    const Activations act = forward_all(model, inputs);
    const auto n = static_cast<double>(targets.size());

    const Eigen::RowVectorXd residual = act.post.back().row(0) - targets.transpose();
    const double loss = residual.squaredNorm() / n;

    grad.resize(layers.size());
    // dL/dz at the output: 2 r / n * softplus'(z).
    Eigen::MatrixXd delta =
        (2.0 / n) * residual.cwiseProduct(act.pre.back().unaryExpr([](double v) { return sigmoid(v); }));
    for (std::size_t l = layers.size(); l-- > 0;) {
        grad[l].weights.noalias() = delta * act.post[l].transpose();
        grad[l].bias = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd upstream = layers[l].weights.transpose() * delta;
        delta = upstream.cwiseProduct((act.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    return loss;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw TrainingError(fmt::format("epochs = {} must be >= 1", epochs));
    if (batch_size < 1) throw TrainingError(fmt::format("batch size = {} must be >= 1", batch_size));
    if (!(learning_rate > 0.0)) throw TrainingError("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw TrainingError("Adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw TrainingError("Adam epsilon must be positive");
    for (int h : hidden) {
        if (h < 1) throw TrainingError(fmt::format("hidden layer size {} must be positive", h));
    }
}

TrainResult mlp_train(const LabeledSet& train, const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t n = train.rows();
    if (n == 0) throw TrainingError("mlp_train: empty training set");
    if (train.features.size() != n * static_cast<std::size_t>(train.b)) {
        throw DimensionError("mlp_train: feature table does not match label count");
    }

    std::vector<int> dims{train.b};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);
    MlpModel model = MlpModel::initialized(dims, rng);

    // Column-per-sample copy of the whole set.
    const Eigen::Map<const Eigen::MatrixXd> all_inputs(train.features.data(), train.b,
                                                       static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> all_targets(train.labels.data(), static_cast<Eigen::Index>(n));

    if (cfg.standardize_inputs) {
        const Eigen::VectorXd mean = all_inputs.rowwise().mean();
        const Eigen::VectorXd var =
            (all_inputs.colwise() - mean).array().square().rowwise().mean().matrix();
        const Eigen::VectorXd scale = var.unaryExpr([](double v) { return v > 1e-24 ? 1.0 / std::sqrt(v) : 1.0; });
        model.set_input_transform(mean, scale);
    }

    TrainResult result{model, mse_loss(model, all_inputs, all_targets), {}};
    MlpModel& net = result.model;

    MlpGradients grad;
    MlpGradients first(net.layers().size());
    MlpGradients second(net.layers().size());
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const auto& layer = net.layers()[l];
        first[l] = {Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())};
        second[l] = first[l];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    Eigen::MatrixXd batch_inputs(train.b, 0);
    Eigen::VectorXd batch_targets;
    long long step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += batch, ++batch_index) {
            const std::size_t m = std::min(batch, n - start);
            batch_inputs.resize(train.b, static_cast<Eigen::Index>(m));
            batch_targets.resize(static_cast<Eigen::Index>(m));
            for (std::size_t k = 0; k < m; ++k) {
                const auto src = order[start + k];
                batch_inputs.col(static_cast<Eigen::Index>(k)) = all_inputs.col(static_cast<Eigen::Index>(src));
                batch_targets(static_cast<Eigen::Index>(k)) = train.labels[src];
            }

            const double loss = mse_loss_and_gradient(net, batch_inputs, batch_targets, grad);
            if (!std::isfinite(loss)) {
                throw TrainingError(
                    fmt::format("mlp_train: non-finite loss at epoch {}, batch {}", epoch + 1, batch_index));
            }
            epoch_loss += loss * static_cast<double>(m);

            ++step;
            const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            const double lr = cfg.learning_rate;
            const double eps = cfg.epsilon;
            auto update = [&](auto& param, auto& m1, auto& m2, const auto& g) {
                m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g;
                m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g.cwiseProduct(g);
                param.array() -= lr * (m1.array() / correction1) /
                                 ((m2.array() / correction2).sqrt() + eps);
            };
            for (std::size_t l = 0; l < net.layers().size(); ++l) {
                auto& layer = net.layers()[l];
                update(layer.weights, first[l].weights, second[l].weights, grad[l].weights);
                update(layer.bias, first[l].bias, second[l].bias, grad[l].bias);
            }
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    return result;
}

double negativity_from_output(double output) noexcept {
    return std::min(1.0, std::sqrt(std::max(0.0, output)));
}

double predict_negativity(const MlpModel& model, std::span<const double> x) {
    return negativity_from_output(model.forward(x));
}

void save_mlp(const MlpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    using detail::write_le;
    out.write(kMlpMagic, sizeof kMlpMagic);
    write_le<std::uint32_t>(out, kMlpVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.dims().size()));
    for (int d : model.dims()) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (Eigen::Index i = 0; i < model.input_dim(); ++i) write_le<double>(out, model.input_offset()(i));
    for (Eigen::Index i = 0; i < model.input_dim(); ++i) write_le<double>(out, model.input_scale()(i));
    for (const auto& layer : model.layers()) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) write_le<double>(out, layer.weights(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) write_le<double>(out, layer.bias(r));
    }
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

bool is_mlp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[sizeof kMlpMagic] = {};
    return in.read(magic, sizeof magic) && std::equal(magic, magic + sizeof magic, kMlpMagic);
}

MlpModel load_mlp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    using detail::read_le;
    char magic[sizeof kMlpMagic] = {};
    if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMlpMagic)) {
        throw FormatError(fmt::format("'{}' is not a collneg network file", path.string()));
    }
    if (const auto version = read_le<std::uint32_t>(in, "version"); version != kMlpVersion) {
        throw FormatError(fmt::format("'{}': unsupported network file version {}", path.string(), version));
    }
    const auto count = read_le<std::uint32_t>(in, "dim count");
    if (count < 2 || count > 64) throw FormatError(fmt::format("'{}': bad layer count {}", path.string(), count));
    std::vector<int> dims;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto d = read_le<std::uint32_t>(in, "layer size");
        if (d == 0 || d > (1u << 20)) throw FormatError(fmt::format("'{}': bad layer size {}", path.string(), d));
        dims.push_back(static_cast<int>(d));
    }
    MlpModel model(dims);
    Eigen::VectorXd offset(model.input_dim());
    Eigen::VectorXd scale(model.input_dim());
    for (Eigen::Index i = 0; i < offset.size(); ++i) offset(i) = read_le<double>(in, "input offset");
    for (Eigen::Index i = 0; i < scale.size(); ++i) scale(i) = read_le<double>(in, "input scale");
    model.set_input_transform(offset, scale);
    for (auto& layer : model.layers()) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = read_le<double>(in, "weights");
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = read_le<double>(in, "bias");
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
            throw FormatError(fmt::format("'{}': non-finite parameters", path.string()));
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError(fmt::format("'{}': trailing bytes after parameters", path.string()));
    }
    return model;
}

}  // namespace collneg
