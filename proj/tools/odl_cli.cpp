// odl command-line tool: preprocess raw windows, replay annotated streams
// through the ensemble, evaluate tasks, and run energy sweeps.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odl/datasets.hpp"
#include "odl/energymodel.hpp"
#include "odl/ensemble.hpp"
#include "odl/evaluate.hpp"
#include "odl/io.hpp"
#include "odl/metrics.hpp"
#include "odl/oselm.hpp"
#include "odl/preprocess.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::size_t hidden = 32;     // N
  std::size_t instances = 4;   // K
  double delta = 0.01;
};

int run_preprocess(const std::string& raw_path, const std::string& out_path,
                   std::size_t window_len, double sample_rate, std::size_t factor,
                   double scale_divisor, bool max_pool) {
  const auto windows = odl::read_windows(raw_path, window_len, sample_rate);
  if (windows.empty()) throw odl::IoError(raw_path + ": no windows read");
  odl::PreprocessConfig cfg;
  cfg.downsample_factor = factor;
  cfg.scale_divisor = scale_divisor;
  cfg.kind = max_pool ? odl::DownsampleKind::max : odl::DownsampleKind::mean;
  std::vector<odl::Spectrum> spectra;
  spectra.reserve(windows.size());
  for (const auto& w : windows) spectra.push_back(odl::preprocess_pipeline(w, cfg));
  odl::write_spectra(out_path, spectra);
  std::cout << "preprocessed " << windows.size() << " windows -> " << out_path << "\n";
  return 0;
}

int run_stream(const std::string& stream_path, const std::string& checkpoint_in,
               const std::string& checkpoint_out, const std::string& out_prefix,
               const GlobalOpts& opts, bool strict_init, std::uint32_t device_id) {
  const odl::LabeledStream stream = odl::read_stream(stream_path);
  const std::size_t n = stream.samples.front().spectrum.bins.size();
  for (const auto& s : stream.samples)
    if (s.spectrum.bins.size() != n)
      throw odl::IoError(stream_path + ": inconsistent spectrum lengths");

  std::vector<std::vector<double>> init_samples;
  for (const auto& s : stream.samples)
    if (s.segment == odl::Segment::init) init_samples.push_back(s.spectrum.bins);

  odl::CheckpointMeta meta;
  meta.seed = opts.seed;
  meta.delta = opts.delta;

  std::optional<odl::OdlEnsemble<double>> ens;
  if (!checkpoint_in.empty()) {
    ens.emplace(odl::load_checkpoint<double>(checkpoint_in, &meta));
    if (ens->input_dim() != n)
      throw odl::ConfigError("checkpoint shape n=" + std::to_string(ens->input_dim()) +
                             " does not match stream spectra of length " + std::to_string(n));
  } else {
    ens.emplace(odl::init_projection<double>(opts.seed, n, opts.hidden), opts.instances,
                opts.delta);
    if (!init_samples.empty()) {
      if (strict_init && init_samples.size() < opts.hidden)
        throw odl::InvalidInput("init segment has " + std::to_string(init_samples.size()) +
                                " samples but strict mode requires at least N = " +
                                std::to_string(opts.hidden) + " normal samples");
      ens->kmeans_init(init_samples);
    }
  }

  std::ofstream bin_out(out_prefix + ".bin", std::ios::binary);
  std::ofstream jsonl_out(out_prefix + ".jsonl");
  if (!bin_out || !jsonl_out) throw odl::IoError("cannot write outputs at " + out_prefix);

  std::uint32_t seq = 0;
  std::size_t trained = 0, predicted = 0;
  const bool fresh_init = checkpoint_in.empty();
  for (const auto& s : stream.samples) {
    if (fresh_init && s.segment == odl::Segment::init) continue;  // consumed by kmeans_init
    const bool train = s.segment != odl::Segment::predict;
    ens->set_mode(train ? odl::Mode::train : odl::Mode::predict);
    const odl::Detection d = ens->process(s.spectrum.bins);
    (train ? trained : predicted)++;

    odl::DetectionRecord rec;
    rec.device_id = device_id;
    rec.seq = seq;
    rec.epoch_seconds = seq;  // replay clock: one op per second
    rec.score_l = float(d.score_l);
    rec.class_k = std::uint8_t(d.class_k);
    rec.mode = std::uint8_t(d.mode_at_emit == odl::Mode::train ? 1 : 0);
    const auto bytes = rec.encode();
    bin_out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    jsonl_out << odl::detection_to_json(rec).dump() << '\n';
    ++seq;
  }
  odl::save_checkpoint(checkpoint_out, *ens, meta);

  std::cout << "processed " << stream.samples.size() << " samples (init "
            << (fresh_init ? init_samples.size() : 0) << ", train " << trained << ", predict "
            << predicted << "); checkpoint -> " << checkpoint_out << "\n";
  return 0;
}

int run_eval(const std::string& task, const std::string& method_name, const std::string& source,
             const GlobalOpts& opts, std::size_t trials, bool parallel,
             const std::string& out_path) {
  const odl::Method method = odl::method_from_name(method_name);
  odl::ModelShape shape{opts.hidden, opts.instances, opts.delta};

  std::vector<odl::LabeledStream> loaded;
  const bool synthetic = source == "synth";
  if (!synthetic) loaded = odl::load_cooling_fan(source);

  auto run_one = [&](std::uint64_t seed) {
    const odl::TaskData data =
        synthetic ? odl::build_task(task, seed) : odl::build_task_from_streams(task, loaded);
    return odl::evaluate_task(data, method, shape, seed);
  };

  std::vector<odl::EvalResult> results;
  if (parallel && trials > 1) {
    std::vector<std::future<odl::EvalResult>> futures;
    for (std::size_t t = 0; t < trials; ++t)
      futures.push_back(std::async(std::launch::async, run_one, opts.seed + t));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (std::size_t t = 0; t < trials; ++t) results.push_back(run_one(opts.seed + t));
  }

  odl::json out = odl::json::array();
  for (const auto& r : results) {
    odl::json rec{{"task", r.task}, {"method", r.method}, {r.metric, r.value},
                  {"n_train", r.n_train}, {"n_eval", r.n_eval}, {"seed", r.seed}};
    out.push_back(std::move(rec));
  }
  const std::string text = out.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw odl::IoError("cannot write " + out_path);
    f << text << "\n";
  }
  return 0;
}

int run_energy(const std::string& profile_path, const std::vector<double>& ops,
               const std::string& out_path) {
  odl::PowerProfile profile;
  if (!profile_path.empty()) profile = odl::load_power_profile(profile_path);
  const auto cases = odl::standard_cases();
  const auto reports = odl::workload_sweep({cases.begin(), cases.end()}, profile, ops);

  std::ostringstream csv;
  csv << "case,ops_per_hour,active_s,energy_mwh\n";
  for (const auto& r : reports)
    csv << r.case_id << "," << r.ops_per_hour << "," << r.active_seconds_per_hour << ","
        << r.energy_mwh_per_hour << "\n";
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw odl::IoError("cannot write " + out_path);
    f << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming anomaly detection with sequentially trained autoencoder ensembles"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--seed", opts.seed, "Seed for all randomness");
  app.add_option("--hidden", opts.hidden, "Hidden layer width N");
  app.add_option("--instances", opts.instances, "Ensemble size K");
  app.add_option("--delta", opts.delta, "Ridge regularizer for P0 = (1/delta) I");

  auto* pre = app.add_subcommand("preprocess", "FFT + downsample raw windows into spectra");
  std::string raw_path, out_path;
  std::size_t window_len = 1024, factor = 2;
  double sample_rate = 1024.0, scale_divisor = 1.0;
  bool max_pool = false;
  pre->add_option("input", raw_path, "Raw windows (.csv one value per line, or .jsonl)")
      ->required();
  pre->add_option("output", out_path, "Output spectra JSONL")->required();
  pre->add_option("--window-len", window_len, "Samples per window (power of two)");
  pre->add_option("--sample-rate", sample_rate, "Sampling rate in Hz");
  pre->add_option("--factor", factor, "Downsampling factor");
  pre->add_option("--scale", scale_divisor, "Fixed divisor applied to every bin");
  pre->add_flag("--max-pool", max_pool, "Downsample by max instead of mean");

  auto* run = app.add_subcommand("run", "Replay an annotated stream through the ensemble");
  std::string stream_path, ckpt_in, ckpt_out = "checkpoint.json", run_out = "detections";
  bool strict_init = false;
  std::uint32_t device_id = 1;
  run->add_option("stream", stream_path, "Annotated stream JSONL")->required();
  run->add_option("--checkpoint-in", ckpt_in, "Resume from checkpoint");
  run->add_option("--checkpoint-out", ckpt_out, "Checkpoint output path");
  run->add_option("--out", run_out, "Output prefix (.bin and .jsonl are appended)");
  run->add_option("--device-id", device_id, "Device id stamped into records");
  run->add_flag("--strict-init", strict_init, "Refuse init segments shorter than N");

  auto* eval = app.add_subcommand("eval", "Train and evaluate a method on a task");
  std::string task, method = "odl", source = "synth", eval_out;
  std::size_t trials = 1;
  bool parallel = false;
  eval->add_option("--task", task, "2500rpm|2000rpm|1500rpm|0rpm|damage1|damage2|4speeds")
      ->required();
  eval->add_option("--method", method, "odl|oselm-frozen|dnn-ae|dnn-classifier");
  eval->add_option("--source", source, "'synth' or a cooling-fan dataset directory");
  eval->add_option("--trials", trials, "Number of seeded scenarios");
  eval->add_flag("--parallel", parallel, "Evaluate scenarios in parallel");
  eval->add_option("--out", eval_out, "Write metrics JSON here instead of stdout");

  auto* energy = app.add_subcommand("energy", "Workload sweep over the four node cases");
  std::string profile_path, energy_out;
  std::vector<double> ops_list = {1, 6, 60, 600, 3600};
  energy->add_option("--profile", profile_path, "Power profile JSON");
  energy->add_option("--ops", ops_list, "Operations-per-hour sweep points");
  energy->add_option("--out", energy_out, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
    if (pre->parsed())
      return run_preprocess(raw_path, out_path, window_len, sample_rate, factor, scale_divisor,
                            max_pool);
    if (run->parsed())
      return run_stream(stream_path, ckpt_in, ckpt_out, run_out, opts, strict_init, device_id);
    if (eval->parsed()) return run_eval(task, method, source, opts, trials, parallel, eval_out);
    if (energy->parsed()) return run_energy(profile_path, ops_list, energy_out);
    std::cerr << app.help();
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const odl::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const odl::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
