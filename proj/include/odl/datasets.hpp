// Labeled spectrum streams: a synthetic desk-scale vibration generator
// (default source for the offline evaluation tasks) and a loader for the
// public cooling-fan CSV dataset.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "odl/common.hpp"
#include "odl/preprocess.hpp"

namespace odl {

enum class Segment : std::uint8_t { init = 0, train = 1, predict = 2 };

struct StreamSample {
  Spectrum spectrum;
  std::string label;     // "normal", "anomalous", or a class id
  Segment segment = Segment::predict;
};

struct LabeledStream {
  std::vector<StreamSample> samples;
  std::string task_name;
  std::string environment;  // "silent" or "noisy"
};

struct SynthMode {
  double fundamental_hz = 0.0;
  double harmonic_decay = 0.5;
  double amplitude = 1.0;
};

struct SynthNoiseSource {
  std::vector<double> peak_hz;
  double amplitude = 0.0;
};

struct SynthDamage {
  double sideband_hz = 0.0;
  double amplitude = 0.0;
};

struct SynthConfig {
  std::vector<SynthMode> modes;
  double noise_floor = 0.0;
  SynthNoiseSource noise_source;   // empty peak list = silent environment
  SynthDamage damage;              // zero amplitude = healthy
  std::size_t spectrum_len = 256;
  double freq_start_hz = 1.0;
  double freq_step_hz = 2.0;
  std::uint64_t seed = 1;

  double max_hz() const { return freq_start_hz + freq_step_hz * double(spectrum_len - 1); }

  void validate() const {
    if (spectrum_len == 0 || freq_step_hz <= 0.0)
      throw InvalidInput("SynthConfig: bad spectrum shape");
    auto check_freq = [&](double f) {
      if (f < 0.0 || f > max_hz())
        throw InvalidInput("SynthConfig: frequency outside spectrum range");
    };
    for (const auto& m : modes) {
      check_freq(m.fundamental_hz);
      if (m.amplitude < 0.0) throw InvalidInput("SynthConfig: negative amplitude");
    }
    for (double f : noise_source.peak_hz) check_freq(f);
    if (noise_floor < 0.0 || noise_source.amplitude < 0.0 || damage.amplitude < 0.0)
      throw InvalidInput("SynthConfig: negative amplitude");
  }
};

namespace detail {

// Gaussian-shaped peak, sigma fixed at 1.5 bins.
inline void add_peak(std::vector<double>& bins, double bin_pos, double amplitude) {
  const double sigma = 1.5;
  const int lo = std::max(0, int(bin_pos - 5 * sigma));
  const int hi = std::min(int(bins.size()) - 1, int(bin_pos + 5 * sigma) + 1);
  for (int i = lo; i <= hi; ++i) {
    const double d = (double(i) - bin_pos) / sigma;
    bins[i] += amplitude * std::exp(-0.5 * d * d);
  }
}

}  // namespace detail

inline Spectrum synth_spectrum(const SynthConfig& config, Rng& rng) {
  Spectrum s;
  s.freq_start_hz = config.freq_start_hz;
  s.freq_step_hz = config.freq_step_hz;
  s.bins.assign(config.spectrum_len, 0.0);
  auto to_bin = [&](double hz) { return (hz - config.freq_start_hz) / config.freq_step_hz; };

  for (const auto& mode : config.modes) {
    if (mode.fundamental_hz <= 0.0 || mode.amplitude <= 0.0) continue;
    const double jitter = rng.uniform(0.9, 1.1);
    double amp = mode.amplitude * jitter;
    for (double f = mode.fundamental_hz; f <= config.max_hz(); f += mode.fundamental_hz) {
      detail::add_peak(s.bins, to_bin(f), amp);
      if (config.damage.amplitude > 0.0 && config.damage.sideband_hz > 0.0) {
        const double side = config.damage.amplitude * jitter;
        if (f - config.damage.sideband_hz > 0.0)
          detail::add_peak(s.bins, to_bin(f - config.damage.sideband_hz), side);
        if (f + config.damage.sideband_hz <= config.max_hz())
          detail::add_peak(s.bins, to_bin(f + config.damage.sideband_hz), side);
      }
      amp *= mode.harmonic_decay;
      if (amp < 1e-3) break;
    }
  }
  if (config.noise_source.amplitude > 0.0) {
    // the noise source wanders more than the fan under test; its peaks
    // drift independently of one another
    for (double f : config.noise_source.peak_hz)
      detail::add_peak(s.bins, to_bin(f), config.noise_source.amplitude * rng.uniform(0.6, 1.4));
  }
  if (config.noise_floor > 0.0)
    for (double& b : s.bins) b += config.noise_floor * std::abs(rng.normal());
  return s;
}

inline LabeledStream synth_stream(const SynthConfig& config, std::size_t count,
                                  const std::string& label = "normal",
                                  Segment segment = Segment::predict) {
  config.validate();
  if (count == 0) throw InvalidInput("synth_stream: count must be >= 1");
  Rng rng(config.seed);
  LabeledStream stream;
  stream.environment = config.noise_source.peak_hz.empty() ? "silent" : "noisy";
  stream.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    stream.samples.push_back({synth_spectrum(config, rng), label, segment});
  return stream;
}

// ---------------------------------------------------------------------------
// Evaluation tasks

enum class TaskMetric { auc, classification };

struct TaskData {
  LabeledStream train_deployed;  // noisy environment, normal data; init + train segments
  LabeledStream train_silent;    // silent environment, for prediction-only baselines
  LabeledStream eval;            // noisy environment, predict segment, mixed labels
  TaskMetric metric = TaskMetric::auc;
  std::string task_name;
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "2500rpm", "2000rpm", "1500rpm", "0rpm", "damage1", "damage2", "4speeds"};
  return names;
}

namespace detail {

inline SynthConfig base_config(std::uint64_t seed) {
  SynthConfig c;
  c.noise_floor = 0.02;
  c.seed = seed;
  return c;
}

inline SynthMode speed_mode(int rpm) {
  // fan fundamentals scale with speed; desk-scale stand-ins
  switch (rpm) {
    case 2500: return {124.0, 0.5, 1.4};
    case 2000: return {100.0, 0.5, 1.4};
    case 1500: return {76.0, 0.5, 1.4};
    default: return {0.0, 0.5, 0.0};  // 0 rpm: no vibration modes
  }
}

inline SynthNoiseSource ventilation_noise() { return {{45.0, 187.0, 310.0}, 1.05}; }

inline SynthConfig speed_config(int rpm, bool noisy, std::uint64_t seed) {
  SynthConfig c = base_config(seed);
  const SynthMode m = speed_mode(rpm);
  if (m.amplitude > 0.0) c.modes.push_back(m);
  if (noisy) c.noise_source = ventilation_noise();
  return c;
}

inline void append(LabeledStream& dst, const LabeledStream& src) {
  dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
}

inline void mark_segments(LabeledStream& s, std::size_t init_len, Segment rest) {
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    s.samples[i].segment = i < init_len ? Segment::init : rest;
}

}  // namespace detail

// Seven tasks mirroring the cooling-fan evaluation, generated synthetically.
// rpm tasks: 300 train / 235 eval; damage and 4speeds tasks: 1200 / 470.
inline TaskData build_task(const std::string& task_name, std::uint64_t seed) {
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), task_name) == names.end())
    throw InvalidInput("build_task: unknown task '" + task_name + "'");

  const std::vector<int> speeds = {2500, 2000, 1500, 0};
  TaskData task;
  task.task_name = task_name;
  auto sub_seed = [&](std::uint64_t salt) { return seed * 1000003ULL + salt; };

  if (task_name == "4speeds") {
    task.metric = TaskMetric::classification;
    const std::size_t train_per_class = 300, eval_total = 470;
    std::vector<LabeledStream> train_parts, eval_parts;
    for (std::size_t c = 0; c < speeds.size(); ++c) {
      train_parts.push_back(synth_stream(detail::speed_config(speeds[c], true, sub_seed(c)),
                                         train_per_class, std::to_string(c)));
      eval_parts.push_back(synth_stream(detail::speed_config(speeds[c], true, sub_seed(40 + c)),
                                        (eval_total + c) / speeds.size(), std::to_string(c)));
    }
    // interleave classes round-robin so initial clustering sees all of them
    task.train_deployed.task_name = task_name;
    task.train_deployed.environment = "noisy";
    for (std::size_t i = 0; i < train_per_class; ++i)
      for (std::size_t c = 0; c < speeds.size(); ++c)
        task.train_deployed.samples.push_back(train_parts[c].samples[i]);
    detail::mark_segments(task.train_deployed, task.train_deployed.samples.size() / 2,
                          Segment::train);
    std::size_t remaining = eval_total, idx = 0;
    while (remaining > 0) {
      for (std::size_t c = 0; c < speeds.size() && remaining > 0; ++c) {
        if (idx < eval_parts[c].samples.size()) {
          task.eval.samples.push_back(eval_parts[c].samples[idx]);
          --remaining;
        }
      }
      ++idx;
    }
    task.eval.task_name = task_name;
    task.eval.environment = "noisy";
    // silent training stream for prediction-only baselines, same interleave
    std::vector<LabeledStream> silent_parts;
    for (std::size_t c = 0; c < speeds.size(); ++c)
      silent_parts.push_back(synth_stream(detail::speed_config(speeds[c], false, sub_seed(80 + c)),
                                          train_per_class, std::to_string(c)));
    task.train_silent.task_name = task_name;
    task.train_silent.environment = "silent";
    for (std::size_t i = 0; i < train_per_class; ++i)
      for (std::size_t c = 0; c < speeds.size(); ++c)
        task.train_silent.samples.push_back(silent_parts[c].samples[i]);
    detail::mark_segments(task.train_silent, task.train_silent.samples.size() / 2,
                          Segment::train);
    return task;
  }

  if (task_name == "damage1" || task_name == "damage2") {
    const SynthDamage damage = task_name == "damage1" ? SynthDamage{14.0, 0.7}
                                                      : SynthDamage{26.0, 0.5};
    const std::size_t train_total = 1200, eval_half = 235;
    const std::vector<int> run_speeds = {2500, 2000, 1500};
    auto make = [&](bool noisy, bool damaged, std::size_t count, std::uint64_t salt,
                    const std::string& label) {
      LabeledStream out;
      out.environment = noisy ? "noisy" : "silent";
      std::size_t per = count / run_speeds.size();
      for (std::size_t c = 0; c < run_speeds.size(); ++c) {
        SynthConfig cfg = detail::speed_config(run_speeds[c], noisy, sub_seed(salt + c));
        if (damaged) cfg.damage = damage;
        std::size_t want = c + 1 == run_speeds.size() ? count - per * (run_speeds.size() - 1) : per;
        detail::append(out, synth_stream(cfg, want, label));
      }
      return out;
    };
    task.train_deployed = make(true, false, train_total, 100, "normal");
    detail::mark_segments(task.train_deployed, train_total / 2, Segment::train);
    task.train_deployed.task_name = task_name;
    task.train_deployed.environment = "noisy";
    task.train_silent = make(false, false, train_total, 200, "normal");
    detail::mark_segments(task.train_silent, train_total / 2, Segment::train);
    task.eval = make(true, false, eval_half, 300, "normal");
    detail::append(task.eval, make(true, true, eval_half, 400, "anomalous"));
    task.eval.task_name = task_name;
    task.eval.environment = "noisy";
    return task;
  }

  // rpm tasks: one speed is normal, the other three are anomalous
  const int normal_rpm = task_name == "2500rpm"   ? 2500
                         : task_name == "2000rpm" ? 2000
                         : task_name == "1500rpm" ? 1500
                                                  : 0;
  const std::size_t train_total = 300;
  task.train_deployed =
      synth_stream(detail::speed_config(normal_rpm, true, sub_seed(1)), train_total, "normal");
  detail::mark_segments(task.train_deployed, train_total / 2, Segment::train);
  task.train_deployed.task_name = task_name;
  task.train_silent =
      synth_stream(detail::speed_config(normal_rpm, false, sub_seed(2)), train_total, "normal");
  detail::mark_segments(task.train_silent, train_total / 2, Segment::train);

  // eval: 61 normal then 58 of each other speed = 235
  detail::append(task.eval,
                 synth_stream(detail::speed_config(normal_rpm, true, sub_seed(3)), 61, "normal"));
  std::uint64_t salt = 4;
  for (int rpm : speeds)
    if (rpm != normal_rpm)
      detail::append(task.eval, synth_stream(detail::speed_config(rpm, true, sub_seed(salt++)),
                                             58, "anomalous"));
  task.eval.task_name = task_name;
  task.eval.environment = "noisy";
  return task;
}

// Assembles a task from loaded dataset streams (cooling-fan layout).
// Counts follow the evaluation protocol: rpm tasks 300/235, damage and
// 4speeds 1200/470.
inline TaskData build_task_from_streams(const std::string& task_name,
                                        const std::vector<LabeledStream>& streams) {
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), task_name) == names.end())
    throw InvalidInput("build_task: unknown task '" + task_name + "'");

  auto collect = [&](int rpm, const std::string& condition, const std::string& env,
                     std::size_t want, const std::string& label, Segment seg) {
    std::vector<StreamSample> out;
    const std::string key = std::to_string(rpm) + "rpm/" + condition;
    for (const auto& s : streams) {
      if (s.task_name != key) continue;
      if (env != "any" && s.environment != env && s.environment != "unknown") continue;
      for (const auto& sample : s.samples) {
        if (out.size() == want) break;
        out.push_back({sample.spectrum, label, seg});
      }
    }
    if (out.size() < want)
      throw InvalidInput("build_task: need " + std::to_string(want) + " samples for " + key +
                         " (" + env + "), found " + std::to_string(out.size()));
    return out;
  };

  const std::vector<int> speeds = {2500, 2000, 1500, 0};
  TaskData task;
  task.task_name = task_name;
  task.eval.task_name = task_name;
  task.eval.environment = "noisy";
  task.train_deployed.task_name = task_name;
  task.train_deployed.environment = "noisy";
  task.train_silent.task_name = task_name;
  task.train_silent.environment = "silent";

  auto fill_train = [&](LabeledStream& dst, const std::vector<StreamSample>& samples) {
    dst.samples = samples;
    detail::mark_segments(dst, dst.samples.size() / 2, Segment::train);
  };

  if (task_name == "4speeds") {
    task.metric = TaskMetric::classification;
    std::vector<StreamSample> train_noisy, train_silent, eval;
    for (std::size_t c = 0; c < speeds.size(); ++c) {
      const std::string cls = std::to_string(c);
      auto tn = collect(speeds[c], "normal", "noisy", 300, cls, Segment::init);
      auto ts = collect(speeds[c], "normal", "silent", 300, cls, Segment::init);
      auto ev = collect(speeds[c], "normal", "noisy", 300 + (470 + c) / 4, cls, Segment::predict);
      ev.erase(ev.begin(), ev.begin() + 300);  // keep eval disjoint from training
      for (std::size_t i = 0; i < tn.size(); ++i) {
        train_noisy.push_back(tn[i]);
        train_silent.push_back(ts[i]);
      }
      eval.insert(eval.end(), ev.begin(), ev.end());
    }
    fill_train(task.train_deployed, train_noisy);
    fill_train(task.train_silent, train_silent);
    task.eval.samples = eval;
    return task;
  }

  if (task_name == "damage1" || task_name == "damage2") {
    fill_train(task.train_deployed, collect(2500, "normal", "noisy", 1200, "normal", Segment::init));
    fill_train(task.train_silent, collect(2500, "normal", "silent", 1200, "normal", Segment::init));
    auto normal_eval = collect(2500, "normal", "noisy", 1200 + 235, "normal", Segment::predict);
    normal_eval.erase(normal_eval.begin(), normal_eval.begin() + 1200);
    auto damaged = collect(2500, task_name, "noisy", 235, "anomalous", Segment::predict);
    task.eval.samples = normal_eval;
    task.eval.samples.insert(task.eval.samples.end(), damaged.begin(), damaged.end());
    return task;
  }

  const int normal_rpm = task_name == "2500rpm"   ? 2500
                         : task_name == "2000rpm" ? 2000
                         : task_name == "1500rpm" ? 1500
                                                  : 0;
  fill_train(task.train_deployed,
             collect(normal_rpm, "normal", "noisy", 300, "normal", Segment::init));
  fill_train(task.train_silent,
             collect(normal_rpm, "normal", "silent", 300, "normal", Segment::init));
  auto normal_eval = collect(normal_rpm, "normal", "noisy", 300 + 61, "normal", Segment::predict);
  normal_eval.erase(normal_eval.begin(), normal_eval.begin() + 300);
  task.eval.samples = normal_eval;
  for (int rpm : speeds)
    if (rpm != normal_rpm) {
      auto part = collect(rpm, "normal", "noisy", 58, "anomalous", Segment::predict);
      task.eval.samples.insert(task.eval.samples.end(), part.begin(), part.end());
    }
  return task;
}

// ---------------------------------------------------------------------------
// Public cooling-fan dataset loader

struct CoolingFanKey {
  int rpm = -1;                 // 2500 / 2000 / 1500 / 0
  std::string condition;        // normal / damage1 / damage2
  std::string environment;      // silent / noisy / unknown
};

namespace detail {

inline CoolingFanKey key_from_name(const std::string& name) {
  auto lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  CoolingFanKey key;
  for (int rpm : {2500, 2000, 1500}) {
    if (lower.find(std::to_string(rpm)) != std::string::npos) key.rpm = rpm;
  }
  if (key.rpm < 0 && (lower.find("0rpm") != std::string::npos ||
                      lower.find("off") != std::string::npos ||
                      lower.find("_0_") != std::string::npos))
    key.rpm = 0;
  key.condition = lower.find("damage1") != std::string::npos   ? "damage1"
                  : lower.find("damage2") != std::string::npos ? "damage2"
                                                               : "normal";
  key.environment = lower.find("noisy") != std::string::npos    ? "noisy"
                    : lower.find("silent") != std::string::npos ? "silent"
                                                                : "unknown";
  return key;
}

inline std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    row.push_back(std::stod(cell));
  }
  return row;
}

}  // namespace detail

// Expects a directory tree of CSV files where each row is one waveform
// spectrum and filenames carry speed/condition/environment tokens
// (e.g. noisy_2500rpm_normal.csv). Rows must have expected_len columns.
inline std::vector<LabeledStream> load_cooling_fan(const std::string& path,
                                                   std::size_t expected_len = 512) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("load_cooling_fan: no such path: " + path);

  std::vector<LabeledStream> streams;
  std::size_t total = 0;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    if (!in) throw IoError("load_cooling_fan: cannot open " + entry.path().string());
    const CoolingFanKey key = detail::key_from_name(entry.path().filename().string());

    LabeledStream stream;
    stream.task_name = std::to_string(key.rpm) + "rpm/" + key.condition;
    stream.environment = key.environment;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<double> row;
      try {
        row = detail::parse_csv_row(line);
      } catch (const std::exception&) {
        throw IoError("load_cooling_fan: unparsable row at " + entry.path().string() + ":" +
                      std::to_string(line_no));
      }
      if (row.size() != expected_len)
        throw IoError("load_cooling_fan: row of length " + std::to_string(row.size()) +
                      " (expected " + std::to_string(expected_len) + ") at " +
                      entry.path().string() + ":" + std::to_string(line_no));
      Spectrum s;
      s.freq_start_hz = 1.0;
      s.freq_step_hz = 1.0;
      s.bins = std::move(row);
      stream.samples.push_back({std::move(s), key.condition == "normal" ? "normal" : "anomalous",
                                Segment::predict});
    }
    if (!stream.samples.empty()) {
      total += stream.samples.size();
      streams.push_back(std::move(stream));
    }
  }
  if (streams.empty())
    throw IoError("load_cooling_fan: no CSV waveforms found under " + path);
  (void)total;
  return streams;
}

}  // namespace odl
