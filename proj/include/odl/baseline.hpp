// Prediction-only comparators: a backprop/SGD-trained dense MLP (autoencoder
// or softmax classifier) and a frozen OS-ELM ensemble trained in one
// environment and evaluated without updates in another.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "odl/common.hpp"
#include "odl/ensemble.hpp"
#include "odl/matrix.hpp"
#include "odl/oselm.hpp"

namespace odl {

enum class MlpKind : std::uint8_t { autoencoder = 0, classifier = 1 };

struct TrainConfig {
  std::size_t batch_size = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.002;
  std::uint64_t seed = 1;

  void validate() const {
    if (batch_size == 0 || epochs == 0 || learning_rate < 0.0)
      throw InvalidInput("TrainConfig: batch_size and epochs must be positive");
  }
};

template <typename Scalar = double>
struct Mlp {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix<Scalar>> weights;          // [l]: sizes[l] x sizes[l+1]
  std::vector<std::vector<Scalar>> biases;      // [l]: sizes[l+1]
  MlpKind kind = MlpKind::autoencoder;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
};

// Seeded uniform init scaled by 1/sqrt(fan_in).
template <typename Scalar = double>
Mlp<Scalar> init_mlp(const std::vector<std::size_t>& layer_sizes, MlpKind kind,
                     std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw InvalidInput("init_mlp: need at least 2 layers");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw InvalidInput("init_mlp: zero-width layer");
  Mlp<Scalar> model;
  model.layer_sizes = layer_sizes;
  model.kind = kind;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(double(in));
    Matrix<Scalar> w(in, out);
    for (std::size_t i = 0; i < in; ++i)
      for (std::size_t j = 0; j < out; ++j) w(i, j) = Scalar(rng.uniform(-scale, scale));
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(out, Scalar(0));
  }
  return model;
}

namespace detail {

template <typename Scalar>
void softmax_inplace(std::vector<Scalar>& v) {
  Scalar mx = *std::max_element(v.begin(), v.end());
  Scalar sum = 0;
  for (Scalar& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (Scalar& x : v) x /= sum;
}

}  // namespace detail

// Feedforward pass, optionally capturing post-activation values per layer
// (activations[0] = input, activations.back() = output).
template <typename Scalar>
std::vector<Scalar> mlp_forward(const Mlp<Scalar>& model, const std::vector<Scalar>& x,
                                std::vector<std::vector<Scalar>>* activations = nullptr) {
  if (x.size() != model.input_dim())
    throw InvalidInput("mlp_forward: input length mismatch");
  if (activations) {
    activations->clear();
    activations->push_back(x);
  }
  std::vector<Scalar> cur = x;
  const std::size_t layers = model.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = model.weights[l];
    std::vector<Scalar> next = model.biases[l];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const Scalar xi = cur[i];
      for (std::size_t j = 0; j < w.cols(); ++j) next[j] += xi * w(i, j);
    }
    const bool last = (l + 1 == layers);
    if (!last) {
      for (Scalar& v : next) v = sigmoid(v);
    } else if (model.kind == MlpKind::classifier) {
      detail::softmax_inplace(next);
    }  // autoencoder output stays linear
    cur = std::move(next);
    if (activations) activations->push_back(cur);
  }
  return cur;
}

// MSE for the autoencoder, cross-entropy for the classifier (target is a
// one-hot class index in that case).
template <typename Scalar>
double mlp_sample_loss(const Mlp<Scalar>& model, const std::vector<Scalar>& out,
                       const std::vector<Scalar>& target) {
  if (model.kind == MlpKind::autoencoder) return double(loss(out, target));
  double ce = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (target[j] > Scalar(0.5)) ce -= std::log(std::max(double(out[j]), 1e-300));
  return ce;
}

// Accumulates gradients for one sample into grads/bias_grads (same shapes
// as the model parameters). Returns the sample loss.
template <typename Scalar>
double mlp_backprop(const Mlp<Scalar>& model, const std::vector<Scalar>& x,
                    const std::vector<Scalar>& target, std::vector<Matrix<Scalar>>& grads,
                    std::vector<std::vector<Scalar>>& bias_grads) {
  std::vector<std::vector<Scalar>> acts;
  const std::vector<Scalar> out = mlp_forward(model, x, &acts);
  const double sample_loss = mlp_sample_loss(model, out, target);
  const std::size_t layers = model.weights.size();

  // Output delta. MSE with linear output: 2/m (y - t).
  // Cross-entropy with softmax: y - t. Both are d(loss)/d(pre-activation).
  std::vector<Scalar> delta(out.size());
  if (model.kind == MlpKind::autoencoder) {
    const Scalar c = Scalar(2) / Scalar(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) delta[j] = c * (out[j] - target[j]);
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) delta[j] = out[j] - target[j];
  }

  for (std::size_t l = layers; l-- > 0;) {
    const auto& below = acts[l];
    for (std::size_t i = 0; i < below.size(); ++i)
      for (std::size_t j = 0; j < delta.size(); ++j)
        grads[l](i, j) += below[i] * delta[j];
    for (std::size_t j = 0; j < delta.size(); ++j) bias_grads[l][j] += delta[j];
    if (l == 0) break;
    // propagate through W^T and the sigmoid derivative a(1-a)
    std::vector<Scalar> prev(below.size(), Scalar(0));
    for (std::size_t i = 0; i < below.size(); ++i) {
      Scalar acc = 0;
      for (std::size_t j = 0; j < delta.size(); ++j) acc += model.weights[l](i, j) * delta[j];
      prev[i] = acc * below[i] * (Scalar(1) - below[i]);
    }
    delta = std::move(prev);
  }
  return sample_loss;
}

// Plain mini-batch SGD, seeded shuffle each epoch. Returns the mean loss
// per epoch.
template <typename Scalar>
std::vector<double> sgd_train(Mlp<Scalar>& model,
                              const std::vector<std::vector<Scalar>>& inputs,
                              const std::vector<std::vector<Scalar>>& targets,
                              const TrainConfig& config) {
  config.validate();
  if (inputs.empty() || inputs.size() != targets.size())
    throw InvalidInput("sgd_train: dataset empty or mismatched");

  const std::size_t layers = model.weights.size();
  std::vector<Matrix<Scalar>> grads(layers);
  std::vector<std::vector<Scalar>> bias_grads(layers);

  Rng rng(config.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::vector<double> epoch_losses;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);

    double loss_acc = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      for (std::size_t l = 0; l < layers; ++l) {
        grads[l] = Matrix<Scalar>(model.weights[l].rows(), model.weights[l].cols());
        bias_grads[l].assign(model.biases[l].size(), Scalar(0));
      }
      for (std::size_t i = start; i < end; ++i)
        loss_acc += mlp_backprop(model, inputs[order[i]], targets[order[i]], grads, bias_grads);

      const Scalar step = Scalar(config.learning_rate / double(end - start));
      for (std::size_t l = 0; l < layers; ++l) {
        auto& w = model.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i)
          for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) -= step * grads[l](i, j);
        for (std::size_t j = 0; j < model.biases[l].size(); ++j)
          model.biases[l][j] -= step * bias_grads[l][j];
      }
    }
    const double mean_loss = loss_acc / double(order.size());
    if (!std::isfinite(mean_loss))
      throw NumericalFailure("sgd_train: non-finite loss", epoch);
    epoch_losses.push_back(mean_loss);
  }
  return epoch_losses;
}

// Trains a K-instance ensemble on train_samples (k-means init plus
// sequential training), then scores eval_samples with no further updates.
template <typename Scalar>
std::vector<double> frozen_oselm_scores(
    OdlEnsemble<Scalar>& ensemble, const std::vector<std::vector<Scalar>>& train_samples,
    const std::vector<std::vector<Scalar>>& eval_samples, std::size_t init_count) {
  init_count = std::min(init_count, train_samples.size());
  std::vector<std::vector<Scalar>> init_part(train_samples.begin(),
                                             train_samples.begin() + init_count);
  ensemble.kmeans_init(init_part);
  ensemble.set_mode(Mode::train);
  for (std::size_t i = init_count; i < train_samples.size(); ++i)
    ensemble.train_step(train_samples[i]);
  ensemble.set_mode(Mode::predict);
  std::vector<double> scores;
  scores.reserve(eval_samples.size());
  for (const auto& x : eval_samples) scores.push_back(ensemble.predict(x).score_l);
  return scores;
}

}  // namespace odl
