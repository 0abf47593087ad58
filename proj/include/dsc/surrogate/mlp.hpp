#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsc/core/rng.hpp"
#include "dsc/core/types.hpp"

namespace dsc::surrogate {

enum class Activation { tanh, relu };
enum class Optimizer { adam, sgd };

inline const char* to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }
inline const char* to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation '" + s + "' (expected tanh or relu)");
}

inline Optimizer optimizer_from_string(const std::string& s) {
  if (s == "adam") return Optimizer::adam;
  if (s == "sgd") return Optimizer::sgd;
  throw std::invalid_argument("unknown optimizer '" + s + "' (expected adam or sgd)");
}

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MLPConfig {
  std::vector<std::size_t> hidden_layers{16, 32, 32, 16};
  Activation hidden_activation = Activation::tanh;
  Optimizer optimizer = Optimizer::adam;
  std::size_t epochs = 1000;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  std::size_t patience = 50;  // epochs without validation improvement before stopping

  void validate() const {
    if (hidden_layers.empty()) throw std::invalid_argument("mlp: at least one hidden layer is required");
    for (auto w : hidden_layers) {
      if (w == 0) throw std::invalid_argument("mlp: hidden layer widths must be >= 1");
    }
    if (epochs == 0) throw std::invalid_argument("mlp: epochs must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("mlp: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("mlp: learning_rate must be > 0");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
      throw std::invalid_argument("mlp: validation_fraction must lie in [0, 1)");
    }
  }
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // outputs x inputs
  Eigen::VectorXd bias;
};

struct LabelledPoint {
  Vector d;
  double prob = 0.0;
};

struct TrainingSummary {
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  double validation_mse = std::numeric_limits<double>::quiet_NaN();
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
};

struct Prediction {
  double value = 0.0;
  bool extrapolated = false;  // input outside the training domain
};

/// Feed-forward regressor d -> feasibility probability with a logistic
/// output unit. Inputs are mapped affinely from K onto [-1, 1]^n_d.
class FeasibilityMapMLP {
 public:
  FeasibilityMapMLP(KnowledgeSpace domain, std::vector<DenseLayer> layers, Activation hidden_activation)
      : domain_(std::move(domain)), activation_(hidden_activation) {
    set_layers(std::move(layers));
  }

  std::size_t input_dim() const noexcept { return domain_.dim(); }
  const KnowledgeSpace& domain() const noexcept { return domain_; }
  Activation hidden_activation() const noexcept { return activation_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  std::vector<std::size_t> hidden_widths() const {
    std::vector<std::size_t> widths;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) widths.push_back(static_cast<std::size_t>(layers_[l].weights.rows()));
    return widths;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return n;
  }

  void set_layers(std::vector<DenseLayer> layers) {
    if (layers.size() < 2) throw std::invalid_argument("mlp: network needs at least one hidden layer");
    Eigen::Index fan_in = static_cast<Eigen::Index>(domain_.dim());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      if (layer.weights.cols() != fan_in || layer.bias.size() != layer.weights.rows() || layer.weights.rows() == 0) {
        throw std::invalid_argument("mlp: layer " + std::to_string(l) + " has inconsistent shape");
      }
      fan_in = layer.weights.rows();
    }
    if (fan_in != 1) throw std::invalid_argument("mlp: output layer must have a single unit");
    layers_ = std::move(layers);
  }

  Eigen::VectorXd canonicalize(std::span<const double> d) const {
    if (d.size() != input_dim()) {
      throw std::invalid_argument("mlp: input has dimension " + std::to_string(d.size()) + ", expected " +
                                  std::to_string(input_dim()));
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double lo = domain_.lower()[i];
      const double hi = domain_.upper()[i];
      x(static_cast<Eigen::Index>(i)) = (2.0 * d[i] - (lo + hi)) / (hi - lo);
    }
    return x;
  }

  /// Network output for canonical inputs (one column per point), before clamping.
  Eigen::RowVectorXd forward(const Eigen::MatrixXd& canonical) const {
    Eigen::MatrixXd a = canonical;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Eigen::MatrixXd z = (layers_[l].weights * a).colwise() + layers_[l].bias;
      if (l + 1 < layers_.size()) {
        a = activate(z);
      } else {
        a = (1.0 + (-z.array()).exp()).inverse().matrix();
      }
    }
    return a.row(0);
  }

  double predict(std::span<const double> d) const {
    const Eigen::MatrixXd x = canonicalize(d);
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(forward(x)(0), lo, hi);
  }

  Prediction predict_checked(std::span<const double> d) const {
    const double v = predict(d);
    return {v, !domain_.contains(d)};
  }

  Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const {
    if (activation_ == Activation::tanh) return z.array().tanh().matrix();
    return z.cwiseMax(0.0);
  }

  /// Derivative of the hidden activation given pre-activation z and activation a.
  Eigen::MatrixXd activation_derivative(const Eigen::MatrixXd& z, const Eigen::MatrixXd& a) const {
    if (activation_ == Activation::tanh) return (1.0 - a.array().square()).matrix();
    return (z.array() > 0.0).cast<double>().matrix();
  }

  TrainingSummary training;

 private:
  KnowledgeSpace domain_;
  Activation activation_;
  std::vector<DenseLayer> layers_;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<DenseLayer> grads;
};

/// Mean squared error over canonical inputs (columns) and its gradient.
inline LossGradient mse_gradient_canonical(const FeasibilityMapMLP& net, const Eigen::MatrixXd& x,
                                           const Eigen::RowVectorXd& y) {
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();
  std::vector<Eigen::MatrixXd> pre(depth);
  std::vector<Eigen::MatrixXd> act(depth + 1);
  act[0] = x;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = (layers[l].weights * act[l]).colwise() + layers[l].bias;
    if (l + 1 < depth) {
      act[l + 1] = net.activate(pre[l]);
    } else {
      act[l + 1] = (1.0 + (-pre[l].array()).exp()).inverse().matrix();
    }
  }
  const double batch = static_cast<double>(x.cols());
  const Eigen::RowVectorXd yhat = act[depth].row(0);
  const Eigen::RowVectorXd residual = yhat - y;

  LossGradient out;
  out.loss = residual.squaredNorm() / batch;
  out.grads.resize(depth);
  Eigen::MatrixXd delta = ((2.0 / batch) * residual.array() * yhat.array() * (1.0 - yhat.array())).matrix();
  for (std::size_t l = depth; l-- > 0;) {
    out.grads[l].weights = delta * act[l].transpose();
    out.grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = ((layers[l].weights.transpose() * delta).array() * net.activation_derivative(pre[l - 1], act[l]).array())
                  .matrix();
    }
  }
  return out;
}

inline LossGradient mse_gradient(const FeasibilityMapMLP& net, std::span<const LabelledPoint> data) {
  if (data.empty()) throw std::invalid_argument("mlp: gradient requires at least one point");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(net.input_dim()), static_cast<Eigen::Index>(data.size()));
  Eigen::RowVectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t k = 0; k < data.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = net.canonicalize(data[k].d);
    y(static_cast<Eigen::Index>(k)) = data[k].prob;
  }
  return mse_gradient_canonical(net, x, y);
}

/// Random initialization: uniform on +/- sqrt(k / fan_in), k = 3 for tanh
/// and 6 for relu; zero biases.
inline FeasibilityMapMLP initialize_mlp(const KnowledgeSpace& domain, const MLPConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<DenseLayer> layers;
  std::size_t fan_in = domain.dim();
  auto widths = cfg.hidden_layers;
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const bool hidden = l + 1 < widths.size();
    const double gain = (hidden && cfg.hidden_activation == Activation::relu) ? 6.0 : 3.0;
    const double limit = std::sqrt(gain / static_cast<double>(fan_in));
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(widths[l]), static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
    }
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(widths[l]));
    layers.push_back(std::move(layer));
    fan_in = widths[l];
  }
  return FeasibilityMapMLP(domain, std::move(layers), cfg.hidden_activation);
}

namespace detail {

class ParameterUpdater {
 public:
  ParameterUpdater(const MLPConfig& cfg, const std::vector<DenseLayer>& shape) : cfg_(cfg) {
    for (const auto& layer : shape) {
      m_.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    Eigen::VectorXd::Zero(layer.bias.size())});
    }
    v_ = m_;
  }

  void step(std::vector<DenseLayer>& params, const std::vector<DenseLayer>& grads) {
    if (cfg_.optimizer == Optimizer::sgd) {
      for (std::size_t l = 0; l < params.size(); ++l) {
        params[l].weights -= cfg_.learning_rate * grads[l].weights;
        params[l].bias -= cfg_.learning_rate * grads[l].bias;
      }
      return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double rate = cfg_.learning_rate * std::sqrt(1.0 - std::pow(beta2, t_)) / (1.0 - std::pow(beta1, t_));
    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
      m = beta1 * m + (1.0 - beta1) * g;
      v = (beta2 * v.array() + (1.0 - beta2) * g.array().square()).matrix();
      p.array() -= rate * m.array() / (v.array().sqrt() + eps);
    };
    for (std::size_t l = 0; l < params.size(); ++l) {
      update(params[l].weights, m_[l].weights, v_[l].weights, grads[l].weights);
      update(params[l].bias, m_[l].bias, v_[l].bias, grads[l].bias);
    }
  }

 private:
  const MLPConfig& cfg_;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
  double t_ = 0.0;
};

inline double mse(const FeasibilityMapMLP& net, const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y) {
  if (x.cols() == 0) return std::numeric_limits<double>::quiet_NaN();
  return (net.forward(x) - y).squaredNorm() / static_cast<double>(x.cols());
}

}  // namespace detail

/// Trains the surrogate on labelled samples with mini-batch gradient descent
/// on the MSE loss. A seeded shuffle holds out validation_fraction of the
/// data for early stopping; the weights of the best validation epoch are kept.
inline FeasibilityMapMLP fit(std::span<const LabelledPoint> data, const KnowledgeSpace& domain, const MLPConfig& cfg) {
  cfg.validate();
  if (data.size() < 10) {
    throw std::invalid_argument("mlp: training requires at least 10 samples, got " + std::to_string(data.size()));
  }
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!domain.contains(data[k].d)) {
      throw std::invalid_argument("mlp: sample " + std::to_string(k) + " at " + format_point(data[k].d) +
                                  " lies outside the knowledge space");
    }
    if (!(data[k].prob >= 0.0 && data[k].prob <= 1.0)) {
      throw std::invalid_argument("mlp: sample " + std::to_string(k) + " has a label outside [0, 1]");
    }
  }

  Rng rng = make_stream(cfg.seed, Stream::surrogate);
  FeasibilityMapMLP net = initialize_mlp(domain, cfg, rng);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with our own uniform draws; std::shuffle is implementation-defined.
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
  };
  shuffle(order);
  std::size_t n_val = static_cast<std::size_t>(std::lround(cfg.validation_fraction * static_cast<double>(data.size())));
  if (cfg.validation_fraction > 0.0) n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);

  const auto dim = static_cast<Eigen::Index>(domain.dim());
  auto gather = [&](std::span<const std::size_t> idx, Eigen::MatrixXd& x, Eigen::RowVectorXd& y) {
    x.resize(dim, static_cast<Eigen::Index>(idx.size()));
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      x.col(static_cast<Eigen::Index>(k)) = net.canonicalize(data[idx[k]].d);
      y(static_cast<Eigen::Index>(k)) = data[idx[k]].prob;
    }
  };
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  Eigen::MatrixXd x_train, x_val;
  Eigen::RowVectorXd y_train, y_val;
  gather(train_idx, x_train, y_train);
  gather(val_idx, x_val, y_val);

  detail::ParameterUpdater updater(cfg, net.layers());
  std::vector<DenseLayer> params = net.layers();
  std::vector<DenseLayer> best = params;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<std::size_t> perm(train_idx.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Eigen::MatrixXd xb;
  Eigen::RowVectorXd yb;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(perm);
    for (std::size_t start = 0; start < perm.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, perm.size() - start);
      xb.resize(dim, static_cast<Eigen::Index>(len));
      yb.resize(static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        xb.col(static_cast<Eigen::Index>(k)) = x_train.col(static_cast<Eigen::Index>(perm[start + k]));
        yb(static_cast<Eigen::Index>(k)) = y_train(static_cast<Eigen::Index>(perm[start + k]));
      }
      net.set_layers(params);
      const auto lg = mse_gradient_canonical(net, xb, yb);
      if (!std::isfinite(lg.loss)) throw TrainingError("training diverged; reduce learning rate");
      updater.step(params, lg.grads);
      for (const auto& layer : params) {
        // bounded outputs can hide overflowing weights from the loss
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
          throw TrainingError("training diverged; reduce learning rate");
        }
      }
    }
    net.set_layers(params);
    epochs_run = epoch;
    const double train_loss = detail::mse(net, x_train, y_train);
    if (!std::isfinite(train_loss)) throw TrainingError("training diverged; reduce learning rate");
    const double score = n_val > 0 ? detail::mse(net, x_val, y_val) : train_loss;
    if (score < best_score) {
      best_score = score;
      best = params;
      best_epoch = epoch;
    } else if (n_val > 0 && epoch - best_epoch >= cfg.patience) {
      break;
    }
  }

  net.set_layers(std::move(best));
  net.training.train_mse = detail::mse(net, x_train, y_train);
  net.training.validation_mse = n_val > 0 ? detail::mse(net, x_val, y_val) : std::numeric_limits<double>::quiet_NaN();
  net.training.epochs_run = epochs_run;
  net.training.best_epoch = best_epoch;
  net.training.train_size = train_idx.size();
  net.training.validation_size = n_val;
  return net;
}

/// Compares back-propagated gradients with central finite differences on a
/// small random network and dataset; returns the largest relative error
/// over `probe_count` randomly chosen parameters. For relu networks, probes
/// whose perturbation flips any unit across its kink are redrawn.
inline double gradient_check(const MLPConfig& cfg, std::size_t probe_count) {
  cfg.validate();
  const KnowledgeSpace domain({-1.0, -1.0}, {1.0, 1.0});
  Rng rng = make_stream(cfg.seed, Stream::surrogate);
  FeasibilityMapMLP net = initialize_mlp(domain, cfg, rng);
  // Nonzero biases so that the check exercises every parameter.
  auto layers = net.layers();
  for (auto& layer : layers) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = 0.2 * (2.0 * uniform01(rng) - 1.0);
  }
  net.set_layers(layers);

  std::vector<LabelledPoint> data(16);
  for (auto& p : data) {
    p.d = {2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0};
    p.prob = uniform01(rng);
  }
  const auto analytic = mse_gradient(net, data);

  auto relu_pattern = [&](const FeasibilityMapMLP& n) {
    std::vector<bool> mask;
    for (const auto& p : data) {
      Eigen::MatrixXd a = n.canonicalize(p.d);
      for (std::size_t l = 0; l + 1 < n.layers().size(); ++l) {
        const Eigen::MatrixXd z = (n.layers()[l].weights * a).colwise() + n.layers()[l].bias;
        for (Eigen::Index i = 0; i < z.size(); ++i) mask.push_back(z(i) > 0.0);
        a = n.activate(z);
      }
    }
    return mask;
  };
  auto loss_of = [&](const FeasibilityMapMLP& n) { return mse_gradient(n, data).loss; };

  struct Slot {
    std::size_t layer;
    bool is_bias;
    Eigen::Index index;
  };
  std::vector<Slot> slots;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (Eigen::Index i = 0; i < layers[l].weights.size(); ++i) slots.push_back({l, false, i});
    for (Eigen::Index i = 0; i < layers[l].bias.size(); ++i) slots.push_back({l, true, i});
  }

  double worst = 0.0;
  std::size_t done = 0;
  std::size_t attempts = 0;
  while (done < probe_count && attempts < 100 * probe_count + 100) {
    ++attempts;
    const Slot s = slots[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(slots.size()))];
    auto perturbed = [&](double delta) {
      auto l2 = layers;
      double& w = s.is_bias ? l2[s.layer].bias(s.index) : l2[s.layer].weights.data()[s.index];
      w += delta;
      FeasibilityMapMLP n = net;
      n.set_layers(std::move(l2));
      return n;
    };
    const double w0 = s.is_bias ? layers[s.layer].bias(s.index) : layers[s.layer].weights.data()[s.index];
    const double h = 1e-6 * std::max(1.0, std::abs(w0));
    const FeasibilityMapMLP plus = perturbed(h);
    const FeasibilityMapMLP minus = perturbed(-h);
    if (cfg.hidden_activation == Activation::relu && relu_pattern(plus) != relu_pattern(minus)) continue;
    const double numeric = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
    const double exact = s.is_bias ? analytic.grads[s.layer].bias(s.index) : analytic.grads[s.layer].weights.data()[s.index];
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(exact - numeric) / denom);
    ++done;
  }
  return worst;
}

}  // namespace dsc::surrogate
