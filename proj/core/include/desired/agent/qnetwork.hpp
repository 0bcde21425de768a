#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "desired/sim/rng.hpp"

namespace desired::agent {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fully connected network, ReLU on hidden layers, linear output. Parameters
// live in one flat vector: for each layer the weight matrix (out x in,
// row-major) followed by the bias vector.
class QNetwork {
 public:
  QNetwork() = default;
  /// All-zero parameters. Throws ShapeError for fewer than two layers or a
  /// zero-width layer.
  explicit QNetwork(std::vector<std::size_t> sizes);

  /// Weights uniform in +-sqrt(6 / fan_in), biases zero.
  static QNetwork he_uniform(std::vector<std::size_t> sizes, sim::RngStream& rng);

  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t layer_count() const noexcept { return sizes_.size() - 1; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  /// Throws ShapeError on a size mismatch.
  void set_parameters(std::span<const double> values);

  std::size_t weight_offset(std::size_t layer) const { return offsets_.at(layer); }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_.at(layer) + sizes_[layer] * sizes_[layer + 1];
  }
  double& weight(std::size_t layer, std::size_t out, std::size_t in) {
    return params_[weight_offset(layer) + out * sizes_[layer] + in];
  }
  double& bias(std::size_t layer, std::size_t out) { return params_[bias_offset(layer) + out]; }

  std::vector<double> forward(std::span<const double> x) const;

  /// Forward pass keeping every layer's activations (post-ReLU for hidden
  /// layers); acts[0] is the input.
  void forward_trace(std::span<const double> x, std::vector<std::vector<double>>& acts) const;

  bool same_shape(const QNetwork& other) const noexcept { return sizes_ == other.sizes_; }
  bool operator==(const QNetwork& other) const noexcept {
    return sizes_ == other.sizes_ && params_ == other.params_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// One regression sample: only output \p action is fitted to \p target.
struct FitSample {
  std::span<const double> input;
  std::size_t action = 0;
  double target = 0.0;
};

/// Mean squared error over the batch and its gradient with respect to every
/// parameter (same layout as QNetwork::parameters()). \p grad is resized.
double loss_and_gradient(const QNetwork& net, std::span<const FitSample> batch,
                         std::vector<double>& grad);

double loss_only(const QNetwork& net, std::span<const FitSample> batch);

// SGD with Nesterov momentum in the form v <- m*v - lr*g, w <- w + m*v - lr*g.
class NesterovSgd {
 public:
  NesterovSgd(double learning_rate, double momentum)
      : lr_(learning_rate), momentum_(momentum) {}

  void step(std::span<double> params, std::span<const double> grad);

  double learning_rate() const noexcept { return lr_; }
  double momentum() const noexcept { return momentum_; }
  const std::vector<double>& velocity() const noexcept { return velocity_; }

 private:
  double lr_;
  double momentum_;
  std::vector<double> velocity_;
};

}  // namespace desired::agent
