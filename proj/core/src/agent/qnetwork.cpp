#include "desired/agent/qnetwork.hpp"

#include <algorithm>
#include <cmath>

namespace desired::agent {

QNetwork::QNetwork(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ShapeError("QNetwork: need at least input and output layers");
  if (std::find(sizes_.begin(), sizes_.end(), std::size_t{0}) != sizes_.end()) {
    throw ShapeError("QNetwork: zero-width layer");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

QNetwork QNetwork::he_uniform(std::vector<std::size_t> sizes, sim::RngStream& rng) {
  QNetwork net(std::move(sizes));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const std::size_t fan_in = net.sizes_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    const std::size_t n = fan_in * net.sizes_[l + 1];
    double* w = net.params_.data() + net.offsets_[l];
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-limit, limit);
  }
  return net;
}

void QNetwork::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) throw ShapeError("QNetwork: parameter count mismatch");
  std::copy(values.begin(), values.end(), params_.begin());
}

namespace {

void dense(const double* w, const double* b, std::span<const double> in, std::size_t out_n,
           double* out, bool relu) {
  const std::size_t in_n = in.size();
  for (std::size_t o = 0; o < out_n; ++o) {
    const double* row = w + o * in_n;
    double acc = b[o];
    for (std::size_t i = 0; i < in_n; ++i) acc += row[i] * in[i];
    out[o] = relu ? std::max(0.0, acc) : acc;
  }
}

}  // namespace

void QNetwork::forward_trace(std::span<const double> x,
                             std::vector<std::vector<double>>& acts) const {
  if (x.size() != input_size()) throw ShapeError("QNetwork: input size mismatch");
  acts.resize(sizes_.size());
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    acts[l + 1].resize(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    dense(w, b, acts[l], sizes_[l + 1], acts[l + 1].data(), l + 1 < layer_count());
  }
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
  std::vector<std::vector<double>> acts;
  forward_trace(x, acts);
  return std::move(acts.back());
}

double loss_only(const QNetwork& net, std::span<const FitSample> batch) {
  if (batch.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : batch) {
    const double e = net.forward(s.input).at(s.action) - s.target;
    sum += e * e;
  }
  return sum / static_cast<double>(batch.size());
}

double loss_and_gradient(const QNetwork& net, std::span<const FitSample> batch,
                         std::vector<double>& grad) {
  grad.assign(net.parameter_count(), 0.0);
  if (batch.empty()) return 0.0;
  const auto& sizes = net.sizes();
  const std::size_t layers = net.layer_count();
  const auto params = net.parameters();
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  std::vector<std::vector<double>> acts;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double loss = 0.0;
  for (const auto& s : batch) {
    net.forward_trace(s.input, acts);
    const std::size_t a = s.action;
    if (a >= net.output_size()) throw ShapeError("loss_and_gradient: action out of range");
    const double err = acts.back()[a] - s.target;
    loss += err * err;

    delta.assign(net.output_size(), 0.0);
    delta[a] = 2.0 * err * inv_n;
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in_n = sizes[l];
      const std::size_t out_n = sizes[l + 1];
      const auto& in = acts[l];
      double* gw = grad.data() + net.weight_offset(l);
      double* gb = grad.data() + net.bias_offset(l);
      for (std::size_t o = 0; o < out_n; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* row = gw + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) row[i] += d * in[i];
      }
      if (l == 0) break;
      prev_delta.assign(in_n, 0.0);
      const double* w = params.data() + net.weight_offset(l);
      for (std::size_t o = 0; o < out_n; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = w + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) prev_delta[i] += d * row[i];
      }
      // ReLU derivative, taken as 0 at the kink.
      for (std::size_t i = 0; i < in_n; ++i) {
        if (in[i] <= 0.0) prev_delta[i] = 0.0;
      }
      delta.swap(prev_delta);
    }
  }
  return loss * inv_n;
}

void NesterovSgd::step(std::span<double> params, std::span<const double> grad) {
  if (grad.size() != params.size()) throw ShapeError("NesterovSgd: gradient size mismatch");
  if (velocity_.size() != params.size()) velocity_.assign(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity_[i] = momentum_ * velocity_[i] - lr_ * grad[i];
    params[i] += momentum_ * velocity_[i] - lr_ * grad[i];
  }
}

}  // namespace desired::agent
