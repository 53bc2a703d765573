#include "lpbf/ppo/mlp.hpp"

#include <cmath>

namespace lpbf::ppo {

Mlp::Mlp(std::vector<int> sizes, Activation hidden, Activation output)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw InvalidArgument("an MLP needs at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw InvalidArgument("MLP layer sizes must be >= 1");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]),
                       Eigen::VectorXd::Zero(sizes_[l + 1])});
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

void Mlp::init_glorot(std::mt19937_64& rng, double output_gain) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.w.rows() + layer.w.cols()));
    const double gain = l + 1 == layers_.size() ? output_gain : 1.0;
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index c = 0; c < layer.w.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.w.rows(); ++r) layer.w(r, c) = gain * u(rng);
    layer.b.setZero();
  }
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::Tanh) z = z.array().tanh().matrix();
}

// Multiplies dL/d(activated) by the activation derivative, given the output.
void activation_grad(Eigen::MatrixXd& d, const Eigen::MatrixXd& y, Activation a) {
  if (a == Activation::Tanh) d.array() *= (1.0 - y.array().square());
}

}  // namespace

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape* tape) const {
  if (x.rows() != input_size()) throw InvalidArgument("MLP input has the wrong size");
  if (tape) {
    tape->outputs.clear();
    tape->outputs.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].w * h;
    z.colwise() += layers_[l].b;
    activate(z, l + 1 == layers_.size() ? output_ : hidden_);
    h = std::move(z);
    if (tape) tape->outputs.push_back(h);
  }
  if (!h.allFinite()) throw NonFiniteActivation("MLP produced a non-finite output");
  return h;
}

void Mlp::backward(const Tape& tape, const Eigen::MatrixXd& d_output,
                   std::vector<DenseLayer>& grads) const {
  Eigen::MatrixXd d = d_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    activation_grad(d, tape.outputs[l + 1], l + 1 == layers_.size() ? output_ : hidden_);
    grads[l].w.noalias() += d * tape.outputs[l].transpose();
    grads[l].b += d.rowwise().sum();
    if (l > 0) d = layers_[l].w.transpose() * d;
  }
}

std::vector<DenseLayer> Mlp::zero_like() const {
  std::vector<DenseLayer> g;
  for (const auto& l : layers_)
    g.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())});
  return g;
}

void write_layers(const std::vector<DenseLayer>& layers, double* out) {
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r)
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) *out++ = l.w(r, c);
    for (Eigen::Index r = 0; r < l.b.size(); ++r) *out++ = l.b(r);
  }
}

void Mlp::write_to(double* out) const { write_layers(layers_, out); }

void Mlp::read_from(const double* in) {
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r)
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = *in++;
    for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = *in++;
  }
}

}  // namespace lpbf::ppo
