#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lpbf/common.hpp"

namespace lpbf::ppo {

class NonFiniteActivation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class Activation { Tanh, Identity };

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;  // out
};

/// Fully connected network evaluated on column batches (one sample per
/// column). Hidden layers share one activation; the last layer has its own.
class Mlp {
 public:
  /// Intermediate values kept by forward() for backward().
  struct Tape {
    std::vector<Eigen::MatrixXd> outputs;  // input, then each activated layer
  };

  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation hidden, Activation output);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const;

  /// Glorot-uniform weights, zero biases; the last layer is scaled by
  /// `output_gain`.
  void init_glorot(std::mt19937_64& rng, double output_gain);

  /// x is input_size x batch. Throws NonFiniteActivation on NaN/Inf output.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape* tape = nullptr) const;

  /// Accumulates parameter gradients for dL/d(output) into `grads`, which
  /// must have the same shapes as layers().
  void backward(const Tape& tape, const Eigen::MatrixXd& d_output,
                std::vector<DenseLayer>& grads) const;

  /// Zero-valued gradient holder with matching shapes.
  std::vector<DenseLayer> zero_like() const;

  /// Parameters in storage order: per layer, w row-major then b.
  void write_to(double* out) const;
  void read_from(const double* in);

 private:
  std::vector<int> sizes_;
  Activation hidden_ = Activation::Tanh;
  Activation output_ = Activation::Identity;
  std::vector<DenseLayer> layers_;
};

/// Flattens gradient holders in the same order as Mlp::write_to.
void write_layers(const std::vector<DenseLayer>& layers, double* out);

}  // namespace lpbf::ppo
