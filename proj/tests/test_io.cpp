#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <vector>

#include "odl/common.hpp"
#include "odl/io.hpp"

using namespace odl;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("detection record is exactly 20 bytes and round-trips") {
  DetectionRecord rec;
  rec.device_id = 0xdeadbeef;
  rec.seq = 12345;
  rec.epoch_seconds = 1700000000;
  rec.score_l = 0.03125f;
  rec.class_k = 3;
  rec.mode = 1;
  const auto bytes = rec.encode();
  static_assert(bytes.size() == 20);
  const DetectionRecord back = DetectionRecord::decode(bytes);
  CHECK(back.device_id == rec.device_id);
  CHECK(back.seq == rec.seq);
  CHECK(back.epoch_seconds == rec.epoch_seconds);
  CHECK(back.score_l == rec.score_l);
  CHECK(back.class_k == rec.class_k);
  CHECK(back.mode == rec.mode);
}

TEST_CASE("detection record layout is little-endian at fixed offsets") {
  DetectionRecord rec;
  rec.device_id = 0x04030201;
  rec.seq = 0x08070605;
  rec.epoch_seconds = 0x0c0b0a09;
  rec.score_l = 1.0f;  // 0x3f800000
  rec.class_k = 2;
  rec.mode = 1;
  const auto b = rec.encode();
  CHECK(b[0] == 0x01);
  CHECK(b[3] == 0x04);
  CHECK(b[4] == 0x05);
  CHECK(b[8] == 0x09);
  CHECK(b[12] == 0x00);
  CHECK(b[15] == 0x3f);
  CHECK(b[16] == 2);
  CHECK(b[17] == 1);
  CHECK(b[18] == 0);
  CHECK(b[19] == 0);
}

TEST_CASE("checkpoint save/load round-trip is value-exact") {
  Rng rng(3);
  OdlEnsemble<double> ens(init_projection<double>(9, 8, 4), 3, 0.01);
  // give the state non-trivial values
  std::vector<std::vector<double>> init_samples;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    init_samples.push_back(std::move(x));
  }
  ens.kmeans_init(init_samples);
  ens.set_mode(Mode::train);

  TempFile tmp("test_checkpoint.json");
  CheckpointMeta meta;
  meta.seed = 9;
  meta.delta = 0.01;
  save_checkpoint(tmp.path, ens, meta);

  CheckpointMeta loaded_meta;
  const auto back = load_checkpoint<double>(tmp.path, &loaded_meta);
  CHECK(loaded_meta.seed == 9);
  CHECK(loaded_meta.delta == 0.01);
  CHECK(back.mode() == Mode::train);
  CHECK(back.instance_count() == 3);
  CHECK(back.projection().alpha == ens.projection().alpha);
  CHECK(back.projection().bias == ens.projection().bias);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.instances()[k].beta == ens.instances()[k].beta);
    CHECK(back.instances()[k].P == ens.instances()[k].P);
    CHECK(back.instances()[k].trained_count == ens.instances()[k].trained_count);
  }
  CHECK(back.centroids() == ens.centroids());
  CHECK(back.centroid_counts() == ens.centroid_counts());
}

TEST_CASE("checkpoint rejects unknown versions and garbage") {
  TempFile tmp("test_bad_checkpoint.json");
  {
    std::ofstream f(tmp.path);
    f << "{\"format_version\": 999}";
  }
  CHECK_THROWS_AS(load_checkpoint<double>(tmp.path), IoError);
  {
    std::ofstream f(tmp.path);
    f << "not json";
  }
  CHECK_THROWS_AS(load_checkpoint<double>(tmp.path), IoError);
  CHECK_THROWS_AS(load_checkpoint<double>("does_not_exist.json"), IoError);
}

TEST_CASE("spectra JSONL round-trip") {
  std::vector<Spectrum> spectra(3);
  Rng rng(5);
  for (auto& s : spectra) {
    s.freq_start_hz = 1.0;
    s.freq_step_hz = 2.0;
    s.bins.resize(16);
    for (double& b : s.bins) b = rng.uniform(0.0, 3.0);
  }
  TempFile tmp("test_spectra.jsonl");
  write_spectra(tmp.path, spectra);
  const auto back = read_spectra(tmp.path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].bins == spectra[i].bins);
    CHECK(back[i].freq_step_hz == 2.0);
  }
}

TEST_CASE("window CSV reader chunks and rejects partial windows") {
  TempFile tmp("test_windows.csv");
  {
    std::ofstream f(tmp.path);
    for (int i = 0; i < 8; ++i) f << 0.1 * i << "\n";
  }
  const auto windows = read_windows(tmp.path, 4, 1024.0);
  REQUIRE(windows.size() == 2);
  CHECK(windows[1].values.size() == 4);
  {
    std::ofstream f(tmp.path);
    for (int i = 0; i < 6; ++i) f << 0.1 * i << "\n";
  }
  CHECK_THROWS_AS(read_windows(tmp.path, 4, 1024.0), IoError);
}

TEST_CASE("window reader reports the offending line") {
  TempFile tmp("test_bad_windows.csv");
  {
    std::ofstream f(tmp.path);
    f << "0.5\nnot-a-number\n";
  }
  try {
    read_windows(tmp.path, 2, 1024.0);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("power profile loads overrides and validates") {
  TempFile tmp("test_profile.json");
  {
    std::ofstream f(tmp.path);
    f << R"({"mcu_active_mw": 120.0, "phase_durations_s": {"sensing": 0.25}})";
  }
  const PowerProfile p = load_power_profile(tmp.path);
  CHECK(p.mcu_active_mw == 120.0);
  CHECK(p.phase_durations_s.at(Phase::sensing) == 0.25);
  CHECK(p.mcu_sleep_mw == 6.9);  // default preserved
  {
    std::ofstream f(tmp.path);
    f << R"({"mcu_active_mw": -5})";
  }
  CHECK_THROWS_AS(load_power_profile(tmp.path), InvalidInput);
  {
    std::ofstream f(tmp.path);
    f << "{broken";
  }
  CHECK_THROWS_AS(load_power_profile(tmp.path), IoError);
}
