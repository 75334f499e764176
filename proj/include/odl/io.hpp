// File formats: JSONL windows/spectra/streams/detections, the JSON
// checkpoint container, the power-profile file, and the 20-byte binary
// detection record mirroring the LoRa payload.
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odl/common.hpp"
#include "odl/datasets.hpp"
#include "odl/energymodel.hpp"
#include "odl/ensemble.hpp"
#include "odl/preprocess.hpp"

namespace odl {

using json = nlohmann::json;

// --- windows ---------------------------------------------------------------

// CSV: one sample value per line, chunked into windows of window_len.
// JSONL: {"t": index, "values": [...]} per line.
inline std::vector<SampleWindow> read_windows(const std::string& path, std::size_t window_len,
                                              double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<SampleWindow> windows;
  const bool jsonl = path.size() >= 6 && path.rfind(".jsonl") == path.size() - 6;
  std::string line;
  std::size_t line_no = 0;
  SampleWindow current;
  current.sample_rate_hz = sample_rate_hz;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      if (jsonl) {
        json rec = json::parse(line);
        SampleWindow w;
        w.sample_rate_hz = sample_rate_hz;
        w.values = rec.at("values").get<std::vector<double>>();
        windows.push_back(std::move(w));
      } else {
        current.values.push_back(std::stod(line));
        if (current.values.size() == window_len) {
          windows.push_back(std::move(current));
          current = SampleWindow{{}, sample_rate_hz};
        }
      }
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError("parse error at " + path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!jsonl && !current.values.empty())
    throw IoError(path + ": trailing partial window of " +
                  std::to_string(current.values.size()) + " samples");
  return windows;
}

// --- spectra / streams -----------------------------------------------------

inline json spectrum_to_json(const Spectrum& s) {
  return json{{"bins", s.bins}, {"f0", s.freq_start_hz}, {"df", s.freq_step_hz}};
}

inline Spectrum spectrum_from_json(const json& j) {
  Spectrum s;
  s.bins = j.at("bins").get<std::vector<double>>();
  s.freq_start_hz = j.at("f0").get<double>();
  s.freq_step_hz = j.at("df").get<double>();
  return s;
}

inline void write_spectra(const std::string& path, const std::vector<Spectrum>& spectra) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& s : spectra) out << spectrum_to_json(s).dump() << '\n';
}

inline std::vector<Spectrum> read_spectra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Spectrum> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(spectrum_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError("parse error at " + path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline const char* segment_name(Segment s) {
  switch (s) {
    case Segment::init: return "init";
    case Segment::train: return "train";
    default: return "predict";
  }
}

inline Segment segment_from_name(const std::string& s) {
  if (s == "init") return Segment::init;
  if (s == "train") return Segment::train;
  if (s == "predict") return Segment::predict;
  throw IoError("unknown segment '" + s + "'");
}

inline void write_stream(const std::string& path, const LabeledStream& stream) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& sample : stream.samples) {
    json rec{{"spectrum", sample.spectrum.bins},
             {"label", sample.label},
             {"segment", segment_name(sample.segment)}};
    out << rec.dump() << '\n';
  }
}

inline LabeledStream read_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  LabeledStream stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json rec = json::parse(line);
      StreamSample sample;
      sample.spectrum.bins = rec.at("spectrum").get<std::vector<double>>();
      sample.label = rec.value("label", "normal");
      sample.segment = segment_from_name(rec.value("segment", "predict"));
      stream.samples.push_back(std::move(sample));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError("parse error at " + path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (stream.samples.empty()) throw IoError(path + ": empty stream");
  return stream;
}

// --- detection records -----------------------------------------------------

// Wire layout (little-endian), 20 bytes total:
//   u32 device_id | u32 seq | u32 epoch_seconds | f32 score_l |
//   u8 class_k | u8 mode | u16 reserved
struct DetectionRecord {
  std::uint32_t device_id = 0;
  std::uint32_t seq = 0;
  std::uint32_t epoch_seconds = 0;
  float score_l = 0.0f;
  std::uint8_t class_k = 0;
  std::uint8_t mode = 0;
  std::uint16_t reserved = 0;

  static constexpr std::size_t wire_size = 20;

  std::array<std::uint8_t, wire_size> encode() const {
    std::array<std::uint8_t, wire_size> buf{};
    auto put32 = [&](std::size_t off, std::uint32_t v) {
      buf[off] = v & 0xff;
      buf[off + 1] = (v >> 8) & 0xff;
      buf[off + 2] = (v >> 16) & 0xff;
      buf[off + 3] = (v >> 24) & 0xff;
    };
    put32(0, device_id);
    put32(4, seq);
    put32(8, epoch_seconds);
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(score_l));
    std::memcpy(&bits, &score_l, 4);
    put32(12, bits);
    buf[16] = class_k;
    buf[17] = mode;
    buf[18] = reserved & 0xff;
    buf[19] = (reserved >> 8) & 0xff;
    return buf;
  }

  static DetectionRecord decode(const std::array<std::uint8_t, wire_size>& buf) {
    auto get32 = [&](std::size_t off) {
      return std::uint32_t(buf[off]) | std::uint32_t(buf[off + 1]) << 8 |
             std::uint32_t(buf[off + 2]) << 16 | std::uint32_t(buf[off + 3]) << 24;
    };
    DetectionRecord r;
    r.device_id = get32(0);
    r.seq = get32(4);
    r.epoch_seconds = get32(8);
    const std::uint32_t bits = get32(12);
    std::memcpy(&r.score_l, &bits, 4);
    r.class_k = buf[16];
    r.mode = buf[17];
    r.reserved = std::uint16_t(buf[18]) | std::uint16_t(buf[19]) << 8;
    return r;
  }
};

inline json detection_to_json(const DetectionRecord& r) {
  return json{{"device_id", r.device_id}, {"seq", r.seq},
              {"epoch_seconds", r.epoch_seconds}, {"score_l", r.score_l},
              {"class_k", r.class_k}, {"mode", r.mode == 1 ? "train" : "predict"}};
}

// --- checkpoints -----------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

template <typename Scalar>
json matrix_to_json(const Matrix<Scalar>& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

template <typename Scalar>
Matrix<Scalar> matrix_from_json(const json& j) {
  Matrix<Scalar> m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data() = j.at("data").get<std::vector<Scalar>>();
  if (m.data().size() != m.rows() * m.cols())
    throw IoError("checkpoint: matrix payload size mismatch");
  return m;
}

struct CheckpointMeta {
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::string model_kind = "odl-ensemble";
};

template <typename Scalar>
void save_checkpoint(const std::string& path, const OdlEnsemble<Scalar>& ens,
                     const CheckpointMeta& meta) {
  json j;
  j["format_version"] = kCheckpointVersion;
  j["model_kind"] = meta.model_kind;
  j["n"] = ens.input_dim();
  j["N"] = ens.projection().hidden_dim();
  j["m"] = ens.input_dim();
  j["K"] = ens.instance_count();
  j["seed"] = meta.seed;
  j["delta"] = meta.delta;
  j["mode"] = ens.mode() == Mode::train ? "train" : "predict";
  j["alpha"] = matrix_to_json(ens.projection().alpha);
  j["b"] = ens.projection().bias;
  json instances = json::array();
  for (const auto& inst : ens.instances()) {
    instances.push_back(json{{"beta", matrix_to_json(inst.beta)},
                             {"P", matrix_to_json(inst.P)},
                             {"trained_count", inst.trained_count}});
  }
  j["instances"] = std::move(instances);
  j["centroids"] = ens.centroids();
  j["centroid_counts"] = ens.centroid_counts();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump();
}

template <typename Scalar = double>
OdlEnsemble<Scalar> load_checkpoint(const std::string& path, CheckpointMeta* meta_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("checkpoint parse error in " + path + ": " + e.what());
  }
  if (j.value("format_version", -1) != kCheckpointVersion)
    throw IoError("checkpoint: unsupported format_version in " + path);

  HiddenProjection<Scalar> proj;
  proj.alpha = matrix_from_json<Scalar>(j.at("alpha"));
  proj.bias = j.at("b").get<std::vector<Scalar>>();
  const double delta = j.at("delta").get<double>();
  const std::size_t K = j.at("K").get<std::size_t>();

  OdlEnsemble<Scalar> ens(std::move(proj), K, delta);
  auto& instances = ens.instances();
  const json& ji = j.at("instances");
  if (ji.size() != K) throw IoError("checkpoint: instance count mismatch");
  for (std::size_t k = 0; k < K; ++k) {
    instances[k].beta = matrix_from_json<Scalar>(ji[k].at("beta"));
    instances[k].P = matrix_from_json<Scalar>(ji[k].at("P"));
    instances[k].trained_count = ji[k].at("trained_count").get<std::uint64_t>();
  }
  ens.centroids() = j.at("centroids").get<std::vector<std::vector<Scalar>>>();
  ens.centroid_counts() = j.at("centroid_counts").get<std::vector<std::uint64_t>>();
  ens.set_mode(j.value("mode", "predict") == std::string("train") ? Mode::train : Mode::predict);
  if (meta_out) {
    meta_out->seed = j.value("seed", std::uint64_t(0));
    meta_out->delta = delta;
    meta_out->model_kind = j.value("model_kind", "odl-ensemble");
  }
  return ens;
}

// --- power profile ---------------------------------------------------------

inline PowerProfile load_power_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("profile parse error in " + path + ": " + e.what());
  }
  PowerProfile p;
  try {
    p.mcu_active_mw = j.value("mcu_active_mw", p.mcu_active_mw);
    p.mcu_sleep_mw = j.value("mcu_sleep_mw", p.mcu_sleep_mw);
    p.lora_tx_mw = j.value("lora_tx_mw", p.lora_tx_mw);
    p.lora_bitrate_bps = j.value("lora_bitrate_bps", p.lora_bitrate_bps);
    p.detailed_airtime = j.value("detailed_airtime", p.detailed_airtime);
    p.strict_feasibility = j.value("strict_feasibility", p.strict_feasibility);
    if (j.contains("phase_durations_s")) {
      const json& ph = j.at("phase_durations_s");
      auto set = [&](const char* name, Phase phase) {
        if (ph.contains(name)) p.phase_durations_s[phase] = ph.at(name).get<double>();
      };
      set("sensing", Phase::sensing);
      set("preprocessing", Phase::preprocessing);
      set("prediction", Phase::prediction);
      set("training", Phase::training);
    }
  } catch (const std::exception& e) {
    throw IoError("profile field error in " + path + ": " + e.what());
  }
  p.validate();
  return p;
}

}  // namespace odl
