#pragma once

#include "rift/deconv.hpp"
#include "rift/metrics.hpp"
#include "rift/signals.hpp"
#include "rift/tracking.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rift {

struct GridConfig {
  int num_freq = 256;
  int num_time = 512;
  double f_min = 0.0;
  double f_max = -1.0;  // negative: use Nyquist
};

struct ConstellationConfig {
  int num_sigma = 7;
  double sigma_l = 1.0;
  double theta_density = 8.0;  // M = max(8, round(density * max(sigma, 1/sigma)))
};

struct EntropyConfig {
  double alpha = 15.0;
  double window_std_px = 3.0;
  double window_trunc_stds = 4.0;
};

struct DeconvConfig {
  int iterations = 200;
  double lambda = 0.002;
  int blocks_l = 4;
  int blocks_h = 4;
};

struct PipelineConfig {
  std::string preset_name = "x1";
  std::string wav_path;  // when set, overrides the preset
  double snr_db = std::numeric_limits<double>::infinity();
  uint64_t seed = 0;
  std::string out_dir = "rift_out";
  GridConfig grid;
  ConstellationConfig constellation;
  EntropyConfig entropy;
  DeconvConfig deconv;
  TrackerParams tracker;
  double tube_sigma_px = 1.5;
  bool compute_metrics = true;

  void validate() const;
};

/// Parses a JSON config; unknown keys are rejected with their path.
PipelineConfig parse_config_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config_file(const std::string& path);

struct PipelineResult {
  TFR cwt, wvd_tfr, rift, spline;
  IPDField ipd;
  ReferenceITFR reference;
  std::vector<Track> tracks;
  std::vector<MetricsReport> reports;
  std::string out_dir;
};

/// Algorithm end to end: signal -> analytic -> constellation -> bank ->
/// entropic weights -> composites -> blockwise LR-TV -> IPD/IPC -> tracking
/// -> spline variant -> metrics, with deterministic artifact emission.
PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_artifacts = true);

struct SweepSpec {
  std::vector<double> snrs;           // empty: just cfg.snr_db
  std::vector<double> alphas;         // empty: just cfg.entropy.alpha
  std::vector<std::string> methods;   // subset of cwt, wvd, rift, spline_rift
};

struct SweepRow {
  double snr_db = 0.0;
  double alpha = 0.0;
  MetricsReport report;
};

/// Cross-product execution with per-cell seeds derived from the base seed;
/// writes summary.csv (and combined.csv when several cells share a method).
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const SweepSpec& sweep);

/// Grid construction used by the pipeline: V columns spanning the signal,
/// U bins over [f_min, f_max] (default Nyquist band).
TFGrid make_grid(const GridConfig& gc, double sample_rate, int num_samples);

}  // namespace rift
