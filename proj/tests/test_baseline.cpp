#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "odl/baseline.hpp"
#include "odl/common.hpp"
#include "odl/datasets.hpp"
#include "odl/metrics.hpp"

using namespace odl;

namespace {

std::vector<std::vector<double>> random_dataset(Rng& rng, std::size_t count, std::size_t dim) {
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (auto& row : out)
    for (double& v : row) v = rng.uniform(-1.0, 1.0);
  return out;
}

double total_loss(const Mlp<double>& model, const std::vector<std::vector<double>>& xs,
                  const std::vector<std::vector<double>>& ts) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    acc += mlp_sample_loss(model, mlp_forward(model, xs[i]), ts[i]);
  return acc / double(xs.size());
}

// central finite differences over every parameter
double max_gradient_rel_error(Mlp<double>& model, const std::vector<double>& x,
                              const std::vector<double>& t) {
  const std::size_t layers = model.weights.size();
  std::vector<Matrix<double>> grads(layers);
  std::vector<std::vector<double>> bias_grads(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    grads[l] = Matrix<double>(model.weights[l].rows(), model.weights[l].cols());
    bias_grads[l].assign(model.biases[l].size(), 0.0);
  }
  mlp_backprop(model, x, t, grads, bias_grads);

  const double eps = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + eps;
    const double up = mlp_sample_loss(model, mlp_forward(model, x), t);
    param = saved - eps;
    const double down = mlp_sample_loss(model, mlp_forward(model, x), t);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  };
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t i = 0; i < model.weights[l].rows(); ++i)
      for (std::size_t j = 0; j < model.weights[l].cols(); ++j)
        probe(model.weights[l](i, j), grads[l](i, j));
    for (std::size_t j = 0; j < model.biases[l].size(); ++j)
      probe(model.biases[l][j], bias_grads[l][j]);
  }
  return worst;
}

}  // namespace

TEST_CASE("autoencoder with zero weights outputs the last bias") {
  auto model = init_mlp<double>({4, 3, 4}, MlpKind::autoencoder, 1);
  for (auto& w : model.weights)
    for (double& v : w.data()) v = 0.0;
  model.biases[1] = {0.5, -0.5, 1.0, 2.0};
  const auto y = mlp_forward(model, {1.0, 2.0, 3.0, 4.0});
  CHECK(y == model.biases[1]);
}

TEST_CASE("classifier outputs sum to one") {
  Rng rng(3);
  auto model = init_mlp<double>({6, 5, 4}, MlpKind::classifier, 7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(6);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const auto y = mlp_forward(model, x);
    double sum = 0.0;
    for (double v : y) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("forward pass matches a layer-by-layer oracle") {
  Rng rng(5);
  auto model = init_mlp<double>({3, 4, 2}, MlpKind::autoencoder, 11);
  std::vector<double> x = {0.3, -0.7, 1.1};
  // oracle: explicit two layers
  std::vector<double> h(4);
  for (std::size_t j = 0; j < 4; ++j) {
    double acc = model.biases[0][j];
    for (std::size_t i = 0; i < 3; ++i) acc += x[i] * model.weights[0](i, j);
    h[j] = 1.0 / (1.0 + std::exp(-acc));
  }
  std::vector<double> y(2);
  for (std::size_t k = 0; k < 2; ++k) {
    double acc = model.biases[1][k];
    for (std::size_t j = 0; j < 4; ++j) acc += h[j] * model.weights[1](j, k);
    y[k] = acc;
  }
  const auto got = mlp_forward(model, x);
  for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(got[k] - y[k]) < 1e-12);
  CHECK_THROWS_AS(mlp_forward(model, std::vector<double>{1.0}), InvalidInput);
}

TEST_CASE("analytic gradients match finite differences on a 6-4-6 net") {
  Rng rng(7);
  for (int point = 0; point < 5; ++point) {
    auto model = init_mlp<double>({6, 4, 6}, MlpKind::autoencoder, 100 + point);
    std::vector<double> x(6), t(6);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    for (double& v : t) v = rng.uniform(-1.0, 1.0);
    CHECK(max_gradient_rel_error(model, x, t) < 1e-3);
  }
}

TEST_CASE("classifier gradients match finite differences") {
  Rng rng(9);
  for (int point = 0; point < 5; ++point) {
    auto model = init_mlp<double>({5, 4, 3}, MlpKind::classifier, 200 + point);
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<double> t(3, 0.0);
    t[point % 3] = 1.0;
    CHECK(max_gradient_rel_error(model, x, t) < 1e-3);
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Rng rng(11);
  auto model = init_mlp<double>({4, 3, 4}, MlpKind::autoencoder, 13);
  const auto before = model.weights;
  const auto data = random_dataset(rng, 12, 4);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.seed = 1;
  sgd_train(model, data, data, cfg);
  CHECK(model.weights == before);
}

TEST_CASE("training loss is non-increasing on a reconstructable toy set") {
  Rng rng(13);
  // inputs in a 2-dimensional subspace of R^6: linearly reconstructable
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 40; ++i) {
    const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
    data.push_back({a, b, a + b, a - b, 0.5 * a, 0.5 * b});
  }
  auto model = init_mlp<double>({6, 8, 6}, MlpKind::autoencoder, 17);
  TrainConfig cfg;
  cfg.batch_size = 5;
  cfg.epochs = 30;
  cfg.learning_rate = 0.01;
  cfg.seed = 19;
  const auto curve = sgd_train(model, data, data, cfg);
  REQUIRE(curve.size() == 30);
  for (std::size_t e = 1; e < curve.size(); ++e) CHECK(curve[e] <= curve[e - 1] + 1e-6);
}

TEST_CASE("sgd_train is deterministic and validates input") {
  Rng rng(15);
  const auto data = random_dataset(rng, 10, 4);
  auto a = init_mlp<double>({4, 3, 4}, MlpKind::autoencoder, 23);
  auto b = init_mlp<double>({4, 3, 4}, MlpKind::autoencoder, 23);
  TrainConfig cfg;
  cfg.seed = 29;
  cfg.learning_rate = 0.05;
  sgd_train(a, data, data, cfg);
  sgd_train(b, data, data, cfg);
  CHECK(a.weights == b.weights);
  CHECK_THROWS_AS(sgd_train(a, {}, {}, cfg), InvalidInput);
}

TEST_CASE("frozen OS-ELM scores are reproducible") {
  const TaskData task = build_task("0rpm", 3);
  auto make_scores = [&]() {
    OdlEnsemble<double> ens(
        init_projection<double>(3, task.eval.samples[0].spectrum.bins.size(), 16), 2, 0.01);
    std::vector<std::vector<double>> train, eval;
    for (const auto& s : task.train_silent.samples) train.push_back(s.spectrum.bins);
    for (const auto& s : task.eval.samples) eval.push_back(s.spectrum.bins);
    return frozen_oselm_scores(ens, train, eval, train.size() / 2);
  };
  CHECK(make_scores() == make_scores());
}

TEST_CASE("frozen baseline is close to ODL without a shift, worse with one") {
  // no-shift control: evaluate both on a silent-environment task analog
  auto run = [&](const std::string& task_name, bool use_deployed_train, std::uint64_t seed) {
    const TaskData task = build_task(task_name, seed);
    const LabeledStream& train = use_deployed_train ? task.train_deployed : task.train_silent;
    const std::size_t n = train.samples[0].spectrum.bins.size();
    OdlEnsemble<double> ens(init_projection<double>(seed, n, 32), 4, 0.01);
    std::vector<std::vector<double>> train_x, eval_x;
    for (const auto& s : train.samples) train_x.push_back(s.spectrum.bins);
    for (const auto& s : task.eval.samples) eval_x.push_back(s.spectrum.bins);
    const auto scores = frozen_oselm_scores(ens, train_x, eval_x, train_x.size() / 2);
    std::vector<ScoredSample> scored;
    for (std::size_t i = 0; i < scores.size(); ++i)
      scored.push_back({scores[i], task.eval.samples[i].label == "anomalous"});
    return auc(scored);
  };
  const double auc_deployed = run("2500rpm", true, 51);
  const double auc_frozen = run("2500rpm", false, 51);
  CHECK(auc_deployed - auc_frozen > 0.0);  // shift hurts the silent-trained model
}
