// Single OS-ELM autoencoder: fixed random hidden projection, linear output
// layer, and the batch-size-1 sequential update. With P0 = (1/delta)*I the
// recursion reproduces ridge regression exactly, which is what the tests
// check it against.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "odl/common.hpp"
#include "odl/matrix.hpp"

namespace odl {

enum class Activation : std::uint8_t { sigmoid = 0 };

template <typename Scalar = double>
struct HiddenProjection {
  Matrix<Scalar> alpha;          // n x N
  std::vector<Scalar> bias;      // N
  Activation activation = Activation::sigmoid;

  std::size_t input_dim() const { return alpha.rows(); }
  std::size_t hidden_dim() const { return alpha.cols(); }
};

template <typename Scalar = double>
struct OselmInstance {
  Matrix<Scalar> beta;           // N x m
  Matrix<Scalar> P;              // N x N, symmetric positive definite
  std::uint64_t trained_count = 0;

  std::size_t hidden_dim() const { return P.rows(); }
  std::size_t output_dim() const { return beta.cols(); }
};

// alpha and b entries are i.i.d. uniform on [-1, 1] from a seeded generator;
// the same seed gives a bit-identical projection.
template <typename Scalar = double>
HiddenProjection<Scalar> init_projection(std::uint64_t seed, std::size_t n, std::size_t N) {
  if (n == 0 || N == 0)
    throw InvalidInput("init_projection: dimensions must be positive");
  HiddenProjection<Scalar> proj;
  proj.alpha = Matrix<Scalar>(n, N);
  proj.bias.resize(N);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < N; ++j)
      proj.alpha(i, j) = Scalar(rng.uniform(-1.0, 1.0));
  for (std::size_t j = 0; j < N; ++j) proj.bias[j] = Scalar(rng.uniform(-1.0, 1.0));
  return proj;
}

template <typename Scalar>
Scalar sigmoid(Scalar v) {
  return Scalar(1) / (Scalar(1) + std::exp(-v));
}

// h = sigmoid(x*alpha + b)
template <typename Scalar>
std::vector<Scalar> hidden(const HiddenProjection<Scalar>& proj, const std::vector<Scalar>& x) {
  if (x.size() != proj.input_dim())
    throw InvalidInput("hidden: input length " + std::to_string(x.size()) +
                       " != n = " + std::to_string(proj.input_dim()));
  const std::size_t n = proj.input_dim();
  const std::size_t N = proj.hidden_dim();
  std::vector<Scalar> h(N);
  for (std::size_t j = 0; j < N; ++j) {
    Scalar acc = proj.bias[j];
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * proj.alpha(i, j);
    h[j] = sigmoid(acc);
  }
  return h;
}

// y = h * beta
template <typename Scalar>
std::vector<Scalar> predict(const OselmInstance<Scalar>& inst, const std::vector<Scalar>& h) {
  if (h.size() != inst.hidden_dim())
    throw InvalidInput("predict: hidden length mismatch");
  const std::size_t N = inst.hidden_dim();
  const std::size_t m = inst.output_dim();
  std::vector<Scalar> y(m, Scalar(0));
  for (std::size_t j = 0; j < N; ++j) {
    const Scalar hj = h[j];
    for (std::size_t k = 0; k < m; ++k) y[k] += hj * inst.beta(j, k);
  }
  return y;
}

// mean squared error
template <typename Scalar>
Scalar loss(const std::vector<Scalar>& y, const std::vector<Scalar>& t) {
  if (y.size() != t.size()) throw InvalidInput("loss: length mismatch");
  if (y.empty()) throw InvalidInput("loss: empty vectors");
  Scalar acc = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Scalar d = y[i] - t[i];
    acc += d * d;
  }
  return acc / Scalar(y.size());
}

// Reconstruction error of x through the autoencoder (requires n == m).
template <typename Scalar>
Scalar anomaly_score(const HiddenProjection<Scalar>& proj, const OselmInstance<Scalar>& inst,
                     const std::vector<Scalar>& x) {
  if (proj.input_dim() != inst.output_dim())
    throw ConfigError("anomaly_score: autoencoder requires n == m");
  return loss(predict(inst, hidden(proj, x)), x);
}

// beta = 0, P = (1/delta) * I.
template <typename Scalar = double>
OselmInstance<Scalar> init_instance(std::size_t N, std::size_t m, double delta) {
  if (N == 0 || m == 0) throw InvalidInput("init_instance: dimensions must be positive");
  if (delta <= 0.0) throw InvalidInput("init_instance: delta must be positive");
  OselmInstance<Scalar> inst;
  inst.beta = Matrix<Scalar>(N, m);
  inst.P = Matrix<Scalar>::identity(N, Scalar(1.0 / delta));
  inst.trained_count = 0;
  return inst;
}

// Batch-size-1 recursion. The pseudo-inverse of the mini-batch form
// collapses to the scalar reciprocal 1/s with s = 1 + h P h^T:
//   P <- P - (P h^T)(h P) / s
//   beta <- beta + P h^T (t - h beta)
// P is re-symmetrized afterwards to stop drift over long runs.
template <typename Scalar>
void seq_update(const HiddenProjection<Scalar>& proj, OselmInstance<Scalar>& inst,
                const std::vector<Scalar>& x, const std::vector<Scalar>& t) {
  if (t.size() != inst.output_dim())
    throw InvalidInput("seq_update: target length mismatch");
  const std::size_t N = inst.hidden_dim();
  const std::size_t m = inst.output_dim();
  const std::vector<Scalar> h = hidden(proj, x);

  // q = P h^T
  std::vector<Scalar> q(N, Scalar(0));
  for (std::size_t i = 0; i < N; ++i) {
    Scalar acc = 0;
    for (std::size_t j = 0; j < N; ++j) acc += inst.P(i, j) * h[j];
    q[i] = acc;
  }
  Scalar s = Scalar(1);
  for (std::size_t j = 0; j < N; ++j) s += h[j] * q[j];
  if (!std::isfinite(double(s)) || double(s) < 1.0 - 1e-9)
    throw NumericalFailure("seq_update: non-positive gain denominator", inst.trained_count);

  const Scalar inv_s = Scalar(1) / s;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      inst.P(i, j) -= q[i] * q[j] * inv_s;
  // (P + P^T)/2
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const Scalar avg = (inst.P(i, j) + inst.P(j, i)) / Scalar(2);
      inst.P(i, j) = avg;
      inst.P(j, i) = avg;
    }

  // e = t - h beta, then beta += (P_new h^T) e
  std::vector<Scalar> e(m);
  for (std::size_t k = 0; k < m; ++k) {
    Scalar acc = 0;
    for (std::size_t j = 0; j < N; ++j) acc += h[j] * inst.beta(j, k);
    e[k] = t[k] - acc;
  }
  std::vector<Scalar> g(N, Scalar(0));  // P_new h^T
  for (std::size_t i = 0; i < N; ++i) {
    Scalar acc = 0;
    for (std::size_t j = 0; j < N; ++j) acc += inst.P(i, j) * h[j];
    g[i] = acc;
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < m; ++k) inst.beta(i, k) += g[i] * e[k];

  if (!inst.beta.all_finite() || !inst.P.all_finite())
    throw NumericalFailure("seq_update: non-finite state", inst.trained_count);
  ++inst.trained_count;
}

}  // namespace odl
