#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coexsim/sim/rng.hpp"

namespace coexsim::agent {

/// Fully connected network with rectified-linear hidden layers and a linear
/// output, in 64-bit floats throughout. Parameters live in one flat array
/// (per layer: weights row-major, then biases) so the optimizer, gradient
/// checks, and checkpoints all share the same layout.
class QNetwork {
 public:
  QNetwork(int input_dim, std::vector<int> hidden_dims, int output_dim);

  /// Uniform Xavier/Glorot initialization, deterministic under the stream.
  void init(sim::RngStream& rng);

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const std::vector<int>& layer_dims() const { return dims_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  void copy_parameters_from(const QNetwork& other);

  std::vector<double> forward(std::span<const double> input) const;

  /// Activation cache for one forward pass; activations[l] is the input to
  /// layer l, activations.back() is the network output.
  struct Workspace {
    std::vector<std::vector<double>> activations;
  };
  void forward_cached(std::span<const double> input, Workspace& ws) const;

  /// Accumulate dLoss/dparams into `grad` (same layout as parameters())
  /// given dLoss/doutput for the pass cached in `ws`.
  void backward(const Workspace& ws, std::span<const double> d_output,
                std::span<double> grad) const;

 private:
  std::size_t layer_count() const { return dims_.size() - 1; }

  std::vector<int> dims_;                 // input, hidden..., output
  std::vector<std::size_t> weight_off_;   // per layer into params_
  std::vector<std::size_t> bias_off_;
  std::vector<double> params_;
};

}  // namespace coexsim::agent
