// ROC-AUC (rank form of the Mann-Whitney statistic), classification
// accuracy via instance-to-class majority mapping, and per-instance
// standardized loss traces.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "odl/common.hpp"

namespace odl {

struct ScoredSample {
  double score;
  bool is_anomalous;
};

// P(score_anom > score_norm) + 1/2 P(equal), via average ranks.
inline double auc(const std::vector<ScoredSample>& set) {
  std::size_t n_anom = 0, n_norm = 0;
  for (const auto& s : set) (s.is_anomalous ? n_anom : n_norm)++;
  if (n_anom == 0 || n_norm == 0)
    throw InvalidInput("auc: both classes must be present");

  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return set[a].score < set[b].score; });

  double rank_sum_anom = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && set[order[j]].score == set[order[i]].score) ++j;
    const double avg_rank = 0.5 * double(i + 1 + j);  // 1-based average rank of the tie group
    for (std::size_t k = i; k < j; ++k)
      if (set[order[k]].is_anomalous) rank_sum_anom += avg_rank;
    i = j;
  }
  const double u = rank_sum_anom - 0.5 * double(n_anom) * double(n_anom + 1);
  return u / (double(n_anom) * double(n_norm));
}

// Maps each instance to the majority ground-truth class it emitted during
// the reference (init) segment, then scores the eval segment. Instances
// never seen in the reference segment stay unmapped; eval samples routed
// to them count as errors.
struct InstanceClassMapping {
  std::map<std::size_t, std::size_t> instance_to_class;
  std::size_t unmapped_hits = 0;

  static InstanceClassMapping fit(const std::vector<std::size_t>& instance_ids,
                                  const std::vector<std::size_t>& true_classes) {
    if (instance_ids.size() != true_classes.size())
      throw InvalidInput("InstanceClassMapping: length mismatch");
    std::map<std::size_t, std::map<std::size_t, std::size_t>> votes;
    for (std::size_t i = 0; i < instance_ids.size(); ++i)
      votes[instance_ids[i]][true_classes[i]]++;
    InstanceClassMapping m;
    for (const auto& [inst, counts] : votes) {
      std::size_t best_class = 0, best_count = 0;
      for (const auto& [cls, cnt] : counts)
        if (cnt > best_count) {
          best_count = cnt;
          best_class = cls;
        }
      m.instance_to_class[inst] = best_class;
    }
    return m;
  }
};

inline double classification_accuracy(const std::vector<std::size_t>& predicted_instances,
                                      const std::vector<std::size_t>& truth,
                                      InstanceClassMapping& mapping) {
  if (predicted_instances.size() != truth.size())
    throw InvalidInput("classification_accuracy: length mismatch");
  if (predicted_instances.empty())
    throw InvalidInput("classification_accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto it = mapping.instance_to_class.find(predicted_instances[i]);
    if (it == mapping.instance_to_class.end()) {
      ++mapping.unmapped_hits;
      continue;
    }
    if (it->second == truth[i]) ++hits;
  }
  return double(hits) / double(truth.size());
}

// Z-score of a loss trace against the mean/stddev of its reference
// (normal) prefix of length ref_len.
inline std::vector<double> standardized_loss(const std::vector<double>& trace,
                                             std::size_t ref_len) {
  if (trace.size() < 2 || ref_len < 2 || ref_len > trace.size())
    throw InvalidInput("standardized_loss: need a trace and reference prefix of length >= 2");
  double mean = 0.0;
  for (std::size_t i = 0; i < ref_len; ++i) mean += trace[i];
  mean /= double(ref_len);
  double var = 0.0;
  for (std::size_t i = 0; i < ref_len; ++i) {
    const double d = trace[i] - mean;
    var += d * d;
  }
  var /= double(ref_len - 1);
  if (var <= 0.0)
    throw ConfigError(
        "standardized_loss: zero variance in reference segment; use a longer reference");
  const double inv_sd = 1.0 / std::sqrt(var);
  std::vector<double> out(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) out[i] = (trace[i] - mean) * inv_sd;
  return out;
}

}  // namespace odl
