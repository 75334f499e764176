// Task evaluation: trains the chosen method on a task's streams and
// reports AUC (anomaly tasks) or classification accuracy (4speeds).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odl/baseline.hpp"
#include "odl/common.hpp"
#include "odl/datasets.hpp"
#include "odl/ensemble.hpp"
#include "odl/metrics.hpp"
#include "odl/oselm.hpp"

namespace odl {

enum class Method { odl, oselm_frozen, dnn_ae, dnn_classifier };

inline Method method_from_name(const std::string& name) {
  if (name == "odl") return Method::odl;
  if (name == "oselm-frozen") return Method::oselm_frozen;
  if (name == "dnn-ae") return Method::dnn_ae;
  if (name == "dnn-classifier") return Method::dnn_classifier;
  throw InvalidInput("unknown method '" + name + "'; expected odl, oselm-frozen, dnn-ae, or dnn-classifier");
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::odl: return "odl";
    case Method::oselm_frozen: return "oselm-frozen";
    case Method::dnn_ae: return "dnn-ae";
    default: return "dnn-classifier";
  }
}

struct ModelShape {
  std::size_t hidden = 32;   // N
  std::size_t instances = 4; // K
  double delta = 0.01;
};

struct EvalResult {
  std::string task;
  std::string method;
  std::string metric;  // "auc" or "accuracy"
  double value = 0.0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::vector<double>> segment_inputs(const LabeledStream& stream, Segment seg) {
  std::vector<std::vector<double>> out;
  for (const auto& s : stream.samples)
    if (s.segment == seg) out.push_back(s.spectrum.bins);
  return out;
}

// k-means init on the init segment, then min-loss-routed sequential
// training over the train segment.
inline OdlEnsemble<double> train_ensemble(const LabeledStream& stream, const ModelShape& shape,
                                          std::uint64_t seed) {
  const std::size_t n = stream.samples.front().spectrum.bins.size();
  OdlEnsemble<double> ens(init_projection<double>(seed, n, shape.hidden), shape.instances,
                          shape.delta);
  ens.kmeans_init(segment_inputs(stream, Segment::init));
  ens.set_mode(Mode::train);
  for (const auto& s : stream.samples)
    if (s.segment == Segment::train) ens.train_step(s.spectrum.bins);
  ens.set_mode(Mode::predict);
  return ens;
}

inline double ensemble_auc(const OdlEnsemble<double>& ens, const LabeledStream& eval_stream) {
  std::vector<ScoredSample> scored;
  scored.reserve(eval_stream.samples.size());
  for (const auto& s : eval_stream.samples)
    scored.push_back({ens.predict(s.spectrum.bins).score_l, s.label == "anomalous"});
  return auc(scored);
}

inline std::vector<std::size_t> class_labels(const LabeledStream& stream, Segment seg) {
  std::vector<std::size_t> out;
  for (const auto& s : stream.samples)
    if (s.segment == seg) out.push_back(std::stoul(s.label));
  return out;
}

}  // namespace detail

inline EvalResult evaluate_task(const TaskData& task, Method method, const ModelShape& shape,
                                std::uint64_t seed) {
  EvalResult result;
  result.task = task.task_name;
  result.method = method_name(method);
  result.seed = seed;
  result.n_eval = task.eval.samples.size();

  const LabeledStream& train_stream =
      method == Method::odl ? task.train_deployed : task.train_silent;
  result.n_train = train_stream.samples.size();

  if (task.metric == TaskMetric::classification) {
    if (method == Method::dnn_ae)
      throw InvalidInput("dnn-ae reports AUC; the 4speeds task needs a classifier method");
    result.metric = "accuracy";
    const auto truth = detail::class_labels(task.eval, Segment::predict);
    std::size_t n_classes = 0;
    for (std::size_t c : truth) n_classes = std::max(n_classes, c + 1);

    if (method == Method::dnn_classifier) {
      const auto inputs = detail::segment_inputs(train_stream, Segment::init);
      auto more = detail::segment_inputs(train_stream, Segment::train);
      std::vector<std::vector<double>> all_inputs = inputs;
      all_inputs.insert(all_inputs.end(), more.begin(), more.end());
      std::vector<std::size_t> labels = detail::class_labels(train_stream, Segment::init);
      const auto more_labels = detail::class_labels(train_stream, Segment::train);
      labels.insert(labels.end(), more_labels.begin(), more_labels.end());
      std::vector<std::vector<double>> targets;
      for (std::size_t c : labels) {
        std::vector<double> one_hot(n_classes, 0.0);
        one_hot[c] = 1.0;
        targets.push_back(std::move(one_hot));
      }
      const std::size_t n = all_inputs.front().size();
      Mlp<double> model = init_mlp<double>({n, 64, 32, n_classes}, MlpKind::classifier, seed);
      TrainConfig cfg;
      cfg.batch_size = 24;
      cfg.epochs = 5;
      cfg.learning_rate = 0.1;
      cfg.seed = seed;
      sgd_train(model, all_inputs, targets, cfg);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < task.eval.samples.size(); ++i) {
        const auto out = mlp_forward(model, task.eval.samples[i].spectrum.bins);
        const std::size_t pred =
            std::max_element(out.begin(), out.end()) - out.begin();
        if (pred == truth[i]) ++hits;
      }
      result.value = double(hits) / double(truth.size());
      return result;
    }

    // ODL / frozen OS-ELM: route each sample to its argmin instance, map
    // instances to classes by majority vote on the init segment.
    OdlEnsemble<double> ens = detail::train_ensemble(train_stream, shape, seed);
    std::vector<std::size_t> init_instances;
    std::vector<std::size_t> init_truth;
    for (const auto& s : train_stream.samples)
      if (s.segment == Segment::init) {
        init_instances.push_back(ens.predict(s.spectrum.bins).class_k);
        init_truth.push_back(std::stoul(s.label));
      }
    auto mapping = InstanceClassMapping::fit(init_instances, init_truth);
    std::vector<std::size_t> predicted;
    for (const auto& s : task.eval.samples)
      predicted.push_back(ens.predict(s.spectrum.bins).class_k);
    result.value = classification_accuracy(predicted, truth, mapping);
    return result;
  }

  result.metric = "auc";
  if (method == Method::dnn_classifier)
    throw InvalidInput("dnn-classifier only applies to the 4speeds task");

  if (method == Method::dnn_ae) {
    auto inputs = detail::segment_inputs(train_stream, Segment::init);
    auto more = detail::segment_inputs(train_stream, Segment::train);
    inputs.insert(inputs.end(), more.begin(), more.end());
    const std::size_t n = inputs.front().size();
    Mlp<double> model = init_mlp<double>({n, 64, 32, 64, n}, MlpKind::autoencoder, seed);
    TrainConfig cfg;
    cfg.batch_size = 5;
    cfg.epochs = 5;
    cfg.learning_rate = 0.05;
    cfg.seed = seed;
    sgd_train(model, inputs, inputs, cfg);
    std::vector<ScoredSample> scored;
    for (const auto& s : task.eval.samples) {
      const auto y = mlp_forward(model, s.spectrum.bins);
      scored.push_back({double(loss(y, s.spectrum.bins)), s.label == "anomalous"});
    }
    result.value = auc(scored);
    return result;
  }

  OdlEnsemble<double> ens = detail::train_ensemble(train_stream, shape, seed);
  result.value = detail::ensemble_auc(ens, task.eval);
  return result;
}

inline EvalResult evaluate_synthetic(const std::string& task_name, Method method,
                                     const ModelShape& shape, std::uint64_t seed) {
  return evaluate_task(build_task(task_name, seed), method, shape, seed);
}

}  // namespace odl
