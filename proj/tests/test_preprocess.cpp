#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "odl/common.hpp"
#include "odl/preprocess.hpp"

using namespace odl;

namespace {

// Independent O(n^2) DFT oracle, one-sided with the same 2/L convention.
std::vector<double> dft_magnitude_oracle(const std::vector<double>& x) {
  const std::size_t L = x.size();
  std::vector<double> mags(L / 2);
  for (std::size_t j = 1; j <= L / 2; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
      const double ang = -2.0 * M_PI * double(j) * double(i) / double(L);
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    mags[j - 1] = (2.0 / double(L)) * std::abs(acc);
  }
  return mags;
}

SampleWindow sine_window(double amplitude, double freq_hz, double fs, std::size_t len) {
  SampleWindow w;
  w.sample_rate_hz = fs;
  w.values.resize(len);
  for (std::size_t i = 0; i < len; ++i)
    w.values[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * double(i) / fs);
  return w;
}

}  // namespace

TEST_CASE("fft_magnitude rejects non-power-of-two windows") {
  SampleWindow w;
  w.values.assign(1000, 0.0);
  CHECK_THROWS_AS(fft_magnitude(w), InvalidInput);
  w.values.assign(1, 0.0);
  CHECK_THROWS_AS(fft_magnitude(w), InvalidInput);
}

TEST_CASE("all-zero 1024-sample window gives all-zero 512-bin spectrum") {
  SampleWindow w;
  w.values.assign(1024, 0.0);
  const Spectrum s = fft_magnitude(w);
  REQUIRE(s.bins.size() == 512);
  for (double b : s.bins) CHECK(b == 0.0);
}

TEST_CASE("pure sine lands in its bin with its amplitude") {
  const double A = 2.5;
  const Spectrum s = fft_magnitude(sine_window(A, 100.0, 1024.0, 1024));
  // bins[0] is 1 Hz, so 100 Hz is bins[99]
  CHECK(std::abs(s.bins[99] - A) < 1e-6 * A);
  for (std::size_t i = 0; i < s.bins.size(); ++i)
    if (i != 99) CHECK(s.bins[i] < 1e-9 * A);
}

TEST_CASE("sum of two sines matches the DFT oracle") {
  SampleWindow w = sine_window(1.0, 50.0, 1024.0, 1024);
  const SampleWindow w2 = sine_window(0.7, 200.0, 1024.0, 1024);
  for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] += w2.values[i];
  const Spectrum s = fft_magnitude(w);
  const auto oracle = dft_magnitude_oracle(w.values);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < s.bins.size(); ++i) {
    CHECK(std::abs(s.bins[i] - oracle[i]) <= 1e-9 * std::max(1.0, oracle[i]));
    if (s.bins[i] > 1e-9) ++nonzero;
  }
  CHECK(nonzero == 2);
}

TEST_CASE("fft_magnitude matches the DFT oracle on random windows") {
  Rng rng(42);
  for (std::size_t len : {4u, 16u, 64u, 256u}) {
    SampleWindow w;
    w.values.resize(len);
    for (double& v : w.values) v = rng.uniform(-1.0, 1.0);
    const Spectrum s = fft_magnitude(w);
    const auto oracle = dft_magnitude_oracle(w.values);
    for (std::size_t i = 0; i < s.bins.size(); ++i)
      CHECK(std::abs(s.bins[i] - oracle[i]) <= 1e-9 * std::max(1.0, std::abs(oracle[i])));
  }
}

TEST_CASE("Parseval energy balance on random windows") {
  Rng rng(7);
  for (std::size_t len : {64u, 256u, 1024u}) {
    SampleWindow w;
    w.values.resize(len);
    double time_energy = 0.0;
    double dc = 0.0;
    for (double& v : w.values) {
      v = rng.uniform(-1.0, 1.0);
      dc += v;
    }
    // remove DC so the one-sided spectrum (which drops bin 0) captures it all
    dc /= double(len);
    for (double& v : w.values) {
      v -= dc;
      time_energy += v * v;
    }
    const Spectrum s = fft_magnitude(w);
    // un-apply the 2/L convention: |X_j|^2 = (L/2 * mag)^2; one-sided sum
    // double-counts everything except Nyquist
    double freq_energy = 0.0;
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
      const double amp2 = std::pow(s.bins[i] * double(len) / 2.0, 2.0);
      freq_energy += (i + 1 == s.bins.size()) ? amp2 : 2.0 * amp2;
    }
    freq_energy /= double(len);
    CHECK(std::abs(freq_energy - time_energy) <= 1e-6 * time_energy);
  }
}

TEST_CASE("downsample averages adjacent bins") {
  Spectrum s;
  s.bins = {1, 3, 5, 7};
  s.freq_start_hz = 1.0;
  s.freq_step_hz = 1.0;
  const Spectrum d = downsample(s, 2);
  REQUIRE(d.bins.size() == 2);
  CHECK(d.bins[0] == 2.0);
  CHECK(d.bins[1] == 6.0);
  CHECK(d.freq_step_hz == 2.0);
}

TEST_CASE("downsample factor 1 is the identity") {
  Spectrum s;
  s.bins = {0.5, 1.5, 2.5};
  const Spectrum d = downsample(s, 1);
  CHECK(d.bins == s.bins);
  CHECK(d.freq_step_hz == s.freq_step_hz);
}

TEST_CASE("downsample rejects non-divisible lengths") {
  Spectrum s;
  s.bins = {1, 2, 3};
  CHECK_THROWS_AS(downsample(s, 2), InvalidInput);
  CHECK_THROWS_AS(downsample(s, 0), InvalidInput);
}

TEST_CASE("512 one-hertz bins downsample to 256 two-hertz bins") {
  Spectrum s;
  s.bins.assign(512, 1.0);
  s.freq_start_hz = 1.0;
  s.freq_step_hz = 1.0;
  const Spectrum d = downsample(s, 2);
  CHECK(d.bins.size() == 256);
  CHECK(d.freq_step_hz == 2.0);
}

TEST_CASE("downsample is linear") {
  Rng rng(3);
  Spectrum x, y;
  x.bins.resize(64);
  y.bins.resize(64);
  for (std::size_t i = 0; i < 64; ++i) {
    x.bins[i] = rng.uniform(0.0, 1.0);
    y.bins[i] = rng.uniform(0.0, 1.0);
  }
  const double a = 2.5, b = -0.75;
  Spectrum combo;
  combo.bins.resize(64);
  for (std::size_t i = 0; i < 64; ++i) combo.bins[i] = a * x.bins[i] + b * y.bins[i];
  const Spectrum dc = downsample(combo, 4);
  const Spectrum dx = downsample(x, 4);
  const Spectrum dy = downsample(y, 4);
  for (std::size_t i = 0; i < dc.bins.size(); ++i)
    CHECK(std::abs(dc.bins[i] - (a * dx.bins[i] + b * dy.bins[i])) < 1e-12);
}

TEST_CASE("pipeline produces the 256-point spectrum from a 1024-sample window") {
  const SampleWindow w = sine_window(1.0, 100.0, 1024.0, 1024);
  PreprocessConfig cfg;
  const Spectrum s = preprocess_pipeline(w, cfg);
  CHECK(s.bins.size() == 256);
  CHECK(s.freq_step_hz == 2.0);
}

TEST_CASE("pipeline scale divisor") {
  const SampleWindow w = sine_window(1.0, 100.0, 1024.0, 1024);
  PreprocessConfig unit, halved;
  halved.scale_divisor = 2.0;
  const Spectrum a = preprocess_pipeline(w, unit);
  const Spectrum b = preprocess_pipeline(w, halved);
  for (std::size_t i = 0; i < a.bins.size(); ++i)
    CHECK(std::abs(b.bins[i] - a.bins[i] / 2.0) < 1e-15);
}
