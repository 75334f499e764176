// Analytical time/energy model of the sensor node and the ensemble memory
// footprint. The energy model is affine in the operation rate until the
// hour is fully active; past that point the node saturates at the highest
// achievable rate instead of erroring, so the high-workload comparisons
// between cases stay well defined (a strict mode restores the error).
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "odl/common.hpp"

namespace odl {

enum class Phase { sensing, preprocessing, prediction, training };

struct PowerProfile {
  double mcu_active_mw = 110.9;   // midpoint of the measured 104.5-117.3 mW
  double mcu_sleep_mw = 6.9;
  double lora_tx_mw = 174.1;
  double lora_bitrate_bps = 5470.0;
  std::map<Phase, double> phase_durations_s = {
      {Phase::sensing, 0.50},
      {Phase::preprocessing, 0.010},
      {Phase::prediction, 0.016},   // four instances at 4 ms each
      {Phase::training, 0.008},
  };
  bool detailed_airtime = false;  // add LoRa preamble/header overhead
  bool strict_feasibility = false;

  void validate() const {
    if (mcu_active_mw <= 0 || mcu_sleep_mw <= 0 || lora_tx_mw <= 0 || lora_bitrate_bps <= 0)
      throw InvalidInput("PowerProfile: all power/bitrate constants must be positive");
    for (const auto& [p, d] : phase_durations_s)
      if (d <= 0) throw InvalidInput("PowerProfile: phase durations must be positive");
  }
};

struct CaseSpec {
  int case_id;
  std::vector<Phase> phases;
  std::size_t payload_bytes;
};

// Case 1: full ODL on the node, 20 B result.
// Case 2: prediction-only, result + spectrum (one 1044 B packet).
// Case 3: FFT on the node, 1024 B spectrum.
// Case 4: raw sensing, 2048 B window.
inline std::array<CaseSpec, 4> standard_cases() {
  return {{
      {1, {Phase::sensing, Phase::preprocessing, Phase::prediction, Phase::training}, 20},
      {2, {Phase::sensing, Phase::preprocessing, Phase::prediction}, 20 + 1024},
      {3, {Phase::sensing, Phase::preprocessing}, 1024},
      {4, {Phase::sensing}, 2048},
  }};
}

struct CaseReport {
  int case_id = 0;
  double ops_per_hour = 0.0;
  double active_seconds_per_hour = 0.0;
  double energy_mwh_per_hour = 0.0;
  bool saturated = false;  // requested rate exceeds what fits in an hour
};

inline double lora_airtime_s(double payload_bytes, const PowerProfile& profile) {
  if (payload_bytes < 0) throw InvalidInput("lora_airtime: negative payload");
  double t = 8.0 * payload_bytes / profile.lora_bitrate_bps;
  if (profile.detailed_airtime && payload_bytes > 0) {
    // SF7 / 125 kHz: 12.25-symbol preamble plus explicit header, Ts = 2^7/BW.
    const double ts = 128.0 / 125000.0;
    t += 12.25 * ts + 8.0 * ts;
  }
  return t;
}

inline CaseReport case_energy(const CaseSpec& spec, const PowerProfile& profile,
                              double ops_per_hour) {
  profile.validate();
  if (ops_per_hour < 0) throw InvalidInput("case_energy: negative ops_per_hour");

  double phase_s = 0.0;
  for (Phase p : spec.phases) phase_s += profile.phase_durations_s.at(p);
  const double air_s = lora_airtime_s(double(spec.payload_bytes), profile);
  const double per_op_s = phase_s + air_s;
  // per-op energy in mJ; radio power adds on top of the awake MCU
  const double per_op_mj =
      phase_s * profile.mcu_active_mw + air_s * (profile.lora_tx_mw + profile.mcu_active_mw);

  CaseReport r;
  r.case_id = spec.case_id;
  r.ops_per_hour = ops_per_hour;

  double ops = ops_per_hour;
  if (per_op_s > 0.0 && ops * per_op_s > 3600.0) {
    if (profile.strict_feasibility)
      throw InvalidInput("case_energy: workload infeasible, active time exceeds 3600 s/hour");
    ops = 3600.0 / per_op_s;
    r.saturated = true;
  }
  r.active_seconds_per_hour = ops * per_op_s;
  const double sleep_s = 3600.0 - r.active_seconds_per_hour;
  r.energy_mwh_per_hour = (ops * per_op_mj + sleep_s * profile.mcu_sleep_mw) / 3600.0;
  return r;
}

inline std::vector<CaseReport> workload_sweep(const std::vector<CaseSpec>& cases,
                                              const PowerProfile& profile,
                                              const std::vector<double>& ops_list) {
  if (ops_list.empty()) throw InvalidInput("workload_sweep: empty ops list");
  std::vector<CaseReport> out;
  out.reserve(cases.size() * ops_list.size());
  for (const auto& c : cases)
    for (double ops : ops_list) out.push_back(case_energy(c, profile, ops));
  return out;
}

// nN shared projection + K individual P (N x N) and beta (N x m).
inline std::uint64_t memory_usage_bytes(std::uint64_t n, std::uint64_t N, std::uint64_t m,
                                        std::uint64_t K, std::uint64_t bytes_per_value = 4) {
  if (n == 0 || N == 0 || m == 0 || K == 0)
    throw InvalidInput("memory_usage: dimensions must be positive");
  return bytes_per_value * (n * N + K * N * N + K * N * m);
}

// Training-time footprint of a dense MLP: parameters plus gradient and
// velocity buffers, float32. Approximates the paper-style "weights &
// features" accounting.
inline std::uint64_t mlp_memory_bytes(const std::vector<std::size_t>& layer_sizes,
                                      std::uint64_t bytes_per_value = 4) {
  if (layer_sizes.size() < 2) throw InvalidInput("mlp_memory_bytes: need >= 2 layers");
  std::uint64_t params = 0;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i)
    params += std::uint64_t(layer_sizes[i]) * layer_sizes[i + 1] + layer_sizes[i + 1];
  return 3 * params * bytes_per_value;
}

}  // namespace odl
