// Window -> spectrum pipeline: radix-2 FFT magnitude, bin averaging
// downsample, optional fixed scaling. All functions are pure.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "odl/common.hpp"

namespace odl {

struct SampleWindow {
  std::vector<double> values;   // acceleration, arbitrary units
  double sample_rate_hz = 1024.0;
};

struct Spectrum {
  std::vector<double> bins;     // non-negative magnitudes
  double freq_start_hz = 1.0;
  double freq_step_hz = 1.0;
};

enum class DownsampleKind { mean, max };

struct PreprocessConfig {
  std::size_t downsample_factor = 2;
  double scale_divisor = 1.0;   // 1.0 = no scaling
  DownsampleKind kind = DownsampleKind::mean;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / double(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

// One-sided magnitude spectrum over bins 1..len/2; DC is dropped.
// Magnitude convention: (2/len)*|DFT_j|, so a pure sine of amplitude A
// lands in its bin with magnitude A.
inline Spectrum fft_magnitude(const SampleWindow& window) {
  const std::size_t len = window.values.size();
  if (!detail::is_power_of_two(len))
    throw InvalidInput("fft_magnitude: window length must be a power of two, got " +
                       std::to_string(len));
  if (window.sample_rate_hz <= 0.0)
    throw InvalidInput("fft_magnitude: sample_rate_hz must be positive");

  std::vector<std::complex<double>> buf(len);
  for (std::size_t i = 0; i < len; ++i) buf[i] = {window.values[i], 0.0};
  detail::fft_inplace(buf);

  const double df = window.sample_rate_hz / double(len);
  Spectrum out;
  out.freq_start_hz = df;
  out.freq_step_hz = df;
  out.bins.resize(len / 2);
  for (std::size_t j = 1; j <= len / 2; ++j)
    out.bins[j - 1] = (2.0 / double(len)) * std::abs(buf[j]);
  return out;
}

inline Spectrum downsample(const Spectrum& spectrum, std::size_t factor,
                           DownsampleKind kind = DownsampleKind::mean) {
  if (factor == 0) throw InvalidInput("downsample: factor must be positive");
  const std::size_t n = spectrum.bins.size();
  if (n % factor != 0)
    throw InvalidInput("downsample: bin count " + std::to_string(n) +
                       " not divisible by factor " + std::to_string(factor));
  Spectrum out;
  out.freq_start_hz = spectrum.freq_start_hz;
  out.freq_step_hz = spectrum.freq_step_hz * double(factor);
  out.bins.resize(n / factor);
  for (std::size_t i = 0; i < n / factor; ++i) {
    if (kind == DownsampleKind::mean) {
      double acc = 0.0;
      for (std::size_t k = 0; k < factor; ++k) acc += spectrum.bins[i * factor + k];
      out.bins[i] = acc / double(factor);
    } else {
      double best = spectrum.bins[i * factor];
      for (std::size_t k = 1; k < factor; ++k)
        best = std::max(best, spectrum.bins[i * factor + k]);
      out.bins[i] = best;
    }
  }
  return out;
}

inline Spectrum preprocess_pipeline(const SampleWindow& window, const PreprocessConfig& config) {
  if (config.scale_divisor <= 0.0)
    throw InvalidInput("pipeline: scale divisor must be positive");
  Spectrum s = downsample(fft_magnitude(window), config.downsample_factor, config.kind);
  if (config.scale_divisor != 1.0)
    for (double& b : s.bins) b /= config.scale_divisor;
  return s;
}

}  // namespace odl
