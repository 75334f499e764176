// K OS-ELM autoencoder instances sharing one hidden projection.
// Min-loss routing both for prediction and for choosing the instance
// that trains on a sample; sequential k-means seeds the specialization.
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "odl/common.hpp"
#include "odl/oselm.hpp"

namespace odl {

enum class Mode : std::uint8_t { predict = 0, train = 1 };

struct Detection {
  double score_l = 0.0;          // min reconstruction loss
  std::size_t class_k = 0;       // argmin instance index
  Mode mode_at_emit = Mode::predict;
};

template <typename Scalar = double>
class OdlEnsemble {
 public:
  OdlEnsemble(HiddenProjection<Scalar> projection, std::size_t instance_count, double delta)
      : projection_(std::move(projection)), delta_(delta) {
    if (instance_count == 0) throw InvalidInput("OdlEnsemble: K must be >= 1");
    const std::size_t n = projection_.input_dim();
    const std::size_t N = projection_.hidden_dim();
    for (std::size_t k = 0; k < instance_count; ++k)
      instances_.push_back(init_instance<Scalar>(N, n, delta));
    centroids_.assign(instance_count, std::vector<Scalar>(n, Scalar(0)));
    centroid_counts_.assign(instance_count, 0);
  }

  std::size_t instance_count() const { return instances_.size(); }
  std::size_t input_dim() const { return projection_.input_dim(); }
  Mode mode() const { return mode_; }
  double delta() const { return delta_; }

  const HiddenProjection<Scalar>& projection() const { return projection_; }
  std::vector<OselmInstance<Scalar>>& instances() { return instances_; }
  const std::vector<OselmInstance<Scalar>>& instances() const { return instances_; }
  std::vector<std::vector<Scalar>>& centroids() { return centroids_; }
  const std::vector<std::vector<Scalar>>& centroids() const { return centroids_; }
  std::vector<std::uint64_t>& centroid_counts() { return centroid_counts_; }
  const std::vector<std::uint64_t>& centroid_counts() const { return centroid_counts_; }

  void set_mode(Mode m) { mode_ = m; }

  // Pure read: scores all K instances, returns min loss and its index.
  // Ties break to the lowest instance index.
  Detection predict(const std::vector<Scalar>& x) const {
    Detection d;
    d.mode_at_emit = mode_;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < instances_.size(); ++k) {
      const double l = double(anomaly_score(projection_, instances_[k], x));
      if (l < best) {
        best = l;
        d.class_k = k;
      }
    }
    d.score_l = best;
    return d;
  }

  // Scores, then trains only the argmin instance with target t = x.
  // Returns the pre-update detection.
  Detection train_step(const std::vector<Scalar>& x) {
    if (mode_ != Mode::train)
      throw ModeError("train_step: ensemble is in predict mode");
    Detection d = predict(x);
    seq_update(projection_, instances_[d.class_k], x, x);
    return d;
  }

  Detection process(const std::vector<Scalar>& x) {
    return mode_ == Mode::train ? train_step(x) : predict(x);
  }

  // Sequential k-means over the initial segment, then per-cluster
  // sequential autoencoder training in arrival order. Centroids are
  // seeded from the first K distinct samples; every later sample moves
  // its nearest centroid by a running mean. Returns one assignment per
  // sample, in arrival order.
  std::vector<std::size_t> kmeans_init(const std::vector<std::vector<Scalar>>& samples) {
    const std::size_t K = instances_.size();
    if (samples.size() < K)
      throw InvalidInput("kmeans_init: need at least K = " + std::to_string(K) +
                         " samples, got " + std::to_string(samples.size()));
    for (auto& c : centroids_) c.assign(input_dim(), Scalar(0));
    centroid_counts_.assign(K, 0);

    std::vector<std::size_t> assignment(samples.size());
    std::size_t seeded = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& x = samples[i];
      if (x.size() != input_dim())
        throw InvalidInput("kmeans_init: sample length mismatch");
      if (seeded < K && !matches_existing_seed(x, seeded)) {
        centroids_[seeded] = x;
        centroid_counts_[seeded] = 1;
        assignment[i] = seeded;
        ++seeded;
        continue;
      }
      const std::size_t c = nearest_centroid(x, seeded);
      ++centroid_counts_[c];
      const Scalar inv = Scalar(1) / Scalar(centroid_counts_[c]);
      for (std::size_t j = 0; j < x.size(); ++j)
        centroids_[c][j] += (x[j] - centroids_[c][j]) * inv;
      assignment[i] = c;
    }
    // Streams with fewer than K distinct values leave the tail centroids
    // as copies of centroid 0; tie-break keeps them memberless.
    for (; seeded < K; ++seeded) {
      centroids_[seeded] = centroids_[0];
      centroid_counts_[seeded] = 0;
    }

    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (assignment[i] == k)
          seq_update(projection_, instances_[k], samples[i], samples[i]);
    return assignment;
  }

 private:
  bool matches_existing_seed(const std::vector<Scalar>& x, std::size_t seeded) const {
    for (std::size_t k = 0; k < seeded; ++k)
      if (centroids_[k] == x) return true;
    return false;
  }

  std::size_t nearest_centroid(const std::vector<Scalar>& x, std::size_t live) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < live; ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = double(x[j] - centroids_[k][j]);
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }

  HiddenProjection<Scalar> projection_;
  std::vector<OselmInstance<Scalar>> instances_;
  Mode mode_ = Mode::predict;
  double delta_;
  std::vector<std::vector<Scalar>> centroids_;
  std::vector<std::uint64_t> centroid_counts_;
};

// Mode-switch trigger interface. The real drift detection algorithm is a
// separate concern; the default below is a plain moving-average ratio
// against the level recorded at the end of initial training.
class DriftDetector {
 public:
  virtual ~DriftDetector() = default;
  virtual void set_baseline(double level) = 0;
  virtual bool update(double score) = 0;
};

class MovingAverageDrift final : public DriftDetector {
 public:
  MovingAverageDrift(std::size_t window, double threshold_factor)
      : window_(window), factor_(threshold_factor) {
    if (window == 0) throw ConfigError("MovingAverageDrift: window must be >= 1");
  }

  void set_baseline(double level) override { baseline_ = level; }

  // Feed scores during the baseline phase too; call freeze_baseline() at
  // the end of initial training to record the reference level.
  void freeze_baseline() { baseline_ = current_average(); }

  bool update(double score) override {
    recent_.push_back(score);
    if (recent_.size() > window_) recent_.pop_front();
    if (baseline_ <= 0.0 || recent_.size() < window_) return false;
    return current_average() > factor_ * baseline_;
  }

  double current_average() const {
    if (recent_.empty()) return 0.0;
    double acc = 0.0;
    for (double v : recent_) acc += v;
    return acc / double(recent_.size());
  }

 private:
  std::size_t window_;
  double factor_;
  double baseline_ = 0.0;
  std::deque<double> recent_;
};

}  // namespace odl
