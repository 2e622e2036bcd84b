#include "coexsim/agent/qnetwork.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coexsim::agent {

QNetwork::QNetwork(int input_dim, std::vector<int> hidden_dims, int output_dim) {
  if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("network dims must be >= 1");
  dims_.push_back(input_dim);
  for (const int h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("hidden dims must be >= 1");
    dims_.push_back(h);
  }
  dims_.push_back(output_dim);

  std::size_t total = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    weight_off_.push_back(total);
    total += static_cast<std::size_t>(dims_[l]) * static_cast<std::size_t>(dims_[l + 1]);
    bias_off_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]);
  }
  params_.assign(total, 0.0);
}

void QNetwork::init(sim::RngStream& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const int fan_in = dims_[l];
    const int fan_out = dims_[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    double* w = params_.data() + weight_off_[l];
    const std::size_t n = static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out);
    for (std::size_t i = 0; i < n; ++i) w[i] = (2.0 * rng.next_unit() - 1.0) * limit;
    double* b = params_.data() + bias_off_[l];
    for (int j = 0; j < fan_out; ++j) b[j] = 0.0;
  }
}

void QNetwork::copy_parameters_from(const QNetwork& other) {
  if (other.params_.size() != params_.size() || other.dims_ != dims_) {
    throw std::invalid_argument("network shape mismatch");
  }
  params_ = other.params_;
}

void QNetwork::forward_cached(std::span<const double> input, Workspace& ws) const {
  if (static_cast<int>(input.size()) != dims_.front()) {
    throw std::invalid_argument("input dimension " + std::to_string(input.size()) +
                                " does not match network input " + std::to_string(dims_.front()));
  }
  ws.activations.resize(dims_.size());
  ws.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto& x = ws.activations[l];
    auto& y = ws.activations[l + 1];
    const int in = dims_[l];
    const int out = dims_[l + 1];
    y.assign(static_cast<std::size_t>(out), 0.0);
    const double* w = params_.data() + weight_off_[l];
    const double* b = params_.data() + bias_off_[l];
    for (int j = 0; j < out; ++j) {
      double acc = b[j];
      const double* row = w + static_cast<std::size_t>(j) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      if (l + 1 < dims_.size() - 1 && acc < 0.0) acc = 0.0;  // ReLU on hidden layers
      y[static_cast<std::size_t>(j)] = acc;
    }
  }
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  Workspace ws;
  forward_cached(input, ws);
  return ws.activations.back();
}

void QNetwork::backward(const Workspace& ws, std::span<const double> d_output,
                        std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient size mismatch");
  if (static_cast<int>(d_output.size()) != dims_.back()) {
    throw std::invalid_argument("output-gradient dimension mismatch");
  }
  std::vector<double> delta(d_output.begin(), d_output.end());
  std::vector<double> next_delta;
  for (std::size_t l = layer_count(); l-- > 0;) {
    const int in = dims_[l];
    const int out = dims_[l + 1];
    const auto& x = ws.activations[l];
    const double* w = params_.data() + weight_off_[l];
    double* gw = grad.data() + weight_off_[l];
    double* gb = grad.data() + bias_off_[l];

    // Hidden layers: gate the incoming gradient through the ReLU mask.
    if (l + 1 < dims_.size() - 1) {
      const auto& y = ws.activations[l + 1];
      for (int j = 0; j < out; ++j) {
        if (y[static_cast<std::size_t>(j)] <= 0.0) delta[static_cast<std::size_t>(j)] = 0.0;
      }
    }

    next_delta.assign(static_cast<std::size_t>(in), 0.0);
    for (int j = 0; j < out; ++j) {
      const double dj = delta[static_cast<std::size_t>(j)];
      if (dj == 0.0) continue;
      gb[j] += dj;
      double* gw_row = gw + static_cast<std::size_t>(j) * static_cast<std::size_t>(in);
      const double* w_row = w + static_cast<std::size_t>(j) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) {
        gw_row[i] += dj * x[static_cast<std::size_t>(i)];
        next_delta[static_cast<std::size_t>(i)] += dj * w_row[i];
      }
    }
    delta.swap(next_delta);
  }
}

}  // namespace coexsim::agent
