#include "rift/pipeline.hpp"

#include "rift/core.hpp"
#include "rift/io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rift {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
  if (preset_name.empty() && wav_path.empty())
    throw InvalidConfig("config: either preset or wav must be set");
  if (grid.num_freq < 2 || grid.num_time < 2)
    throw InvalidConfig("config: grid.num_freq and grid.num_time must be >= 2");
  if (grid.f_max >= 0.0 && !(grid.f_max > grid.f_min))
    throw InvalidConfig("config: grid.f_max must exceed grid.f_min");
  if (constellation.num_sigma < 1 || constellation.num_sigma % 2 == 0)
    throw InvalidConfig("config: constellation.num_sigma must be odd");
  if (!(constellation.sigma_l > 0.0)) throw InvalidConfig("config: constellation.sigma_l must be positive");
  if (!(constellation.theta_density > 0.0))
    throw InvalidConfig("config: constellation.theta_density must be positive");
  if (!std::isfinite(entropy.alpha)) throw InvalidConfig("config: entropy.alpha must be finite");
  if (!(entropy.window_std_px > 0.0))
    throw InvalidConfig("config: entropy.window_std_px must be positive");
  if (deconv.iterations < 1) throw InvalidConfig("config: deconv.iterations must be >= 1");
  if (deconv.blocks_l < 1 || deconv.blocks_h < 1)
    throw InvalidConfig("config: deconv block counts must be >= 1");
  if (!(deconv.lambda >= 0.0)) throw InvalidConfig("config: deconv.lambda must be >= 0");
  if (!(tube_sigma_px >= 0.0)) throw InvalidConfig("config: tube_sigma_px must be >= 0");
  if (!(std::isfinite(snr_db) || (std::isinf(snr_db) && snr_db > 0)))
    throw InvalidConfig("config: snr_db must be finite or +inf");
}

namespace {

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw InvalidConfig("config: unknown key '" + path + item.key() + "'");
  }
}

double parse_snr(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw InvalidConfig("config: snr_db string must be 'inf'");
  }
  return v.get<double>();
}

json snr_to_json(double snr) {
  if (std::isinf(snr)) return json("inf");
  return json(snr);
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PipelineConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InvalidConfig(std::string("config: ") + err.what());
  }
  if (!root.is_object()) throw InvalidConfig("config: top level must be an object");
  check_keys(root, "", {"preset", "wav", "snr_db", "seed", "out_dir", "grid", "constellation",
                        "entropy", "deconv", "tracker", "tube_sigma_px", "metrics"});

  PipelineConfig cfg;
  if (root.contains("preset")) cfg.preset_name = root["preset"].get<std::string>();
  if (root.contains("wav")) cfg.wav_path = root["wav"].get<std::string>();
  if (root.contains("snr_db")) cfg.snr_db = parse_snr(root["snr_db"]);
  if (root.contains("seed")) cfg.seed = root["seed"].get<uint64_t>();
  if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();
  if (root.contains("tube_sigma_px")) cfg.tube_sigma_px = root["tube_sigma_px"].get<double>();
  if (root.contains("metrics")) cfg.compute_metrics = root["metrics"].get<bool>();

  if (root.contains("grid")) {
    const json& g = root["grid"];
    check_keys(g, "grid.", {"num_freq", "num_time", "f_min", "f_max"});
    if (g.contains("num_freq")) cfg.grid.num_freq = g["num_freq"].get<int>();
    if (g.contains("num_time")) cfg.grid.num_time = g["num_time"].get<int>();
    if (g.contains("f_min")) cfg.grid.f_min = g["f_min"].get<double>();
    if (g.contains("f_max")) cfg.grid.f_max = g["f_max"].get<double>();
  }
  if (root.contains("constellation")) {
    const json& c = root["constellation"];
    check_keys(c, "constellation.", {"num_sigma", "sigma_l", "theta_density"});
    if (c.contains("num_sigma")) cfg.constellation.num_sigma = c["num_sigma"].get<int>();
    if (c.contains("sigma_l")) cfg.constellation.sigma_l = c["sigma_l"].get<double>();
    if (c.contains("theta_density"))
      cfg.constellation.theta_density = c["theta_density"].get<double>();
  }
  if (root.contains("entropy")) {
    const json& e = root["entropy"];
    check_keys(e, "entropy.", {"alpha", "window_std_px", "window_trunc_stds"});
    if (e.contains("alpha")) cfg.entropy.alpha = e["alpha"].get<double>();
    if (e.contains("window_std_px")) cfg.entropy.window_std_px = e["window_std_px"].get<double>();
    if (e.contains("window_trunc_stds"))
      cfg.entropy.window_trunc_stds = e["window_trunc_stds"].get<double>();
  }
  if (root.contains("deconv")) {
    const json& d = root["deconv"];
    check_keys(d, "deconv.", {"iterations", "lambda", "blocks_l", "blocks_h"});
    if (d.contains("iterations")) cfg.deconv.iterations = d["iterations"].get<int>();
    if (d.contains("lambda")) cfg.deconv.lambda = d["lambda"].get<double>();
    if (d.contains("blocks_l")) cfg.deconv.blocks_l = d["blocks_l"].get<int>();
    if (d.contains("blocks_h")) cfg.deconv.blocks_h = d["blocks_h"].get<int>();
  }
  if (root.contains("tracker")) {
    const json& t = root["tracker"];
    check_keys(t, "tracker.",
               {"process_noise", "sigma_y", "sigma_ydot", "confirm_hits", "max_misses",
                "likelihood_floor", "peak_min_height_frac", "peak_min_separation"});
    if (t.contains("process_noise")) cfg.tracker.process_noise = t["process_noise"].get<double>();
    if (t.contains("sigma_y")) cfg.tracker.sigma_y = t["sigma_y"].get<double>();
    if (t.contains("sigma_ydot")) cfg.tracker.sigma_ydot = t["sigma_ydot"].get<double>();
    if (t.contains("confirm_hits")) cfg.tracker.confirm_hits = t["confirm_hits"].get<int>();
    if (t.contains("max_misses")) cfg.tracker.max_misses = t["max_misses"].get<int>();
    if (t.contains("likelihood_floor"))
      cfg.tracker.likelihood_floor = t["likelihood_floor"].get<double>();
    if (t.contains("peak_min_height_frac"))
      cfg.tracker.peak_min_height_frac = t["peak_min_height_frac"].get<double>();
    if (t.contains("peak_min_separation"))
      cfg.tracker.peak_min_separation = t["peak_min_separation"].get<int>();
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  json root;
  root["preset"] = cfg.preset_name;
  root["wav"] = cfg.wav_path;
  root["snr_db"] = snr_to_json(cfg.snr_db);
  root["seed"] = cfg.seed;
  root["out_dir"] = cfg.out_dir;
  root["tube_sigma_px"] = cfg.tube_sigma_px;
  root["metrics"] = cfg.compute_metrics;
  root["grid"] = {{"num_freq", cfg.grid.num_freq},
                  {"num_time", cfg.grid.num_time},
                  {"f_min", cfg.grid.f_min},
                  {"f_max", cfg.grid.f_max}};
  root["constellation"] = {{"num_sigma", cfg.constellation.num_sigma},
                           {"sigma_l", cfg.constellation.sigma_l},
                           {"theta_density", cfg.constellation.theta_density}};
  root["entropy"] = {{"alpha", cfg.entropy.alpha},
                     {"window_std_px", cfg.entropy.window_std_px},
                     {"window_trunc_stds", cfg.entropy.window_trunc_stds}};
  root["deconv"] = {{"iterations", cfg.deconv.iterations},
                    {"lambda", cfg.deconv.lambda},
                    {"blocks_l", cfg.deconv.blocks_l},
                    {"blocks_h", cfg.deconv.blocks_h}};
  root["tracker"] = {{"process_noise", cfg.tracker.process_noise},
                     {"sigma_y", cfg.tracker.sigma_y},
                     {"sigma_ydot", cfg.tracker.sigma_ydot},
                     {"confirm_hits", cfg.tracker.confirm_hits},
                     {"max_misses", cfg.tracker.max_misses},
                     {"likelihood_floor", cfg.tracker.likelihood_floor},
                     {"peak_min_height_frac", cfg.tracker.peak_min_height_frac},
                     {"peak_min_separation", cfg.tracker.peak_min_separation}};
  return root.dump(2) + "\n";
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

TFGrid make_grid(const GridConfig& gc, double sample_rate, int num_samples) {
  if (num_samples < gc.num_time)
    throw InvalidConfig("grid: signal shorter than the requested number of time steps");
  const int d = num_samples / gc.num_time;
  TFGrid grid;
  grid.num_freq = gc.num_freq;
  grid.num_time = gc.num_time;
  grid.delta_t = d / sample_rate;
  const double f_max = gc.f_max >= 0.0 ? gc.f_max : sample_rate / 2.0;
  grid.omega_min = kTwoPi * gc.f_min;
  grid.delta_omega = kTwoPi * (f_max - gc.f_min) / (gc.num_freq - 1);
  grid.sample_rate = sample_rate;
  grid.validate();
  return grid;
}

namespace {

std::string double_to_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

void write_tracks_csv(const std::string& path, const std::vector<Track>& tracks,
                      const TFGrid& grid) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("write_tracks_csv: cannot open " + path);
  out << "track_id,time_s,freq_hz,freq_velocity_hz_per_s,status\n";
  for (const auto& track : tracks) {
    for (const auto& pt : track.history) {
      const double freq_hz = (grid.omega_min + pt.y * grid.delta_omega) / kTwoPi;
      const double vel = pt.ydot * grid.delta_omega / (kTwoPi * grid.delta_t);
      const char* status = pt.status == TrackStatus::Confirmed
                               ? "confirmed"
                               : (pt.status == TrackStatus::Tentative ? "tentative" : "terminated");
      out << track.id << ',' << double_to_string(grid.time(pt.step)) << ','
          << double_to_string(freq_hz) << ',' << double_to_string(vel) << ',' << status << '\n';
    }
  }
}

void emit_tfr(const fs::path& dir, const std::string& stem, const TFR& tfr,
              const std::string& extension = ".tfr") {
  write_tfr((dir / (stem + extension)).string(), tfr);
  const double scale = write_pgm16((dir / (stem + ".pgm")).string(), tfr);
  json sidecar = {{"scale", scale}, {"signed", tfr.is_signed}, {"label", tfr.label}};
  std::ofstream side(dir / (stem + ".pgm.json"));
  side << sidecar.dump(2) << "\n";
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_artifacts) {
  cfg.validate();
  PipelineResult res;

  RealSignal x;
  Preset pre;
  bool have_reference = false;
  if (!cfg.wav_path.empty()) {
    x = load_wav(cfg.wav_path);
  } else {
    pre = preset(cfg.preset_name);
    x = synthesize(pre.components, pre.duration, pre.sample_rate);
    have_reference = true;
  }
  x = add_awgn(x, cfg.snr_db, cfg.seed);

  const TFGrid grid = make_grid(cfg.grid, x.sample_rate, static_cast<int>(x.samples.size()));
  const AnalyticSignal z = analytic_signal(x);

  const double density = cfg.constellation.theta_density;
  auto theta_count = [density](double sigma) {
    return std::max(8, static_cast<int>(std::lround(density * std::max(sigma, 1.0 / sigma))));
  };
  const Constellation constellation =
      build_constellation(cfg.constellation.sigma_l, cfg.constellation.num_sigma, theta_count, grid);

  CFWTBank bank = cfwt_bank(z, constellation, grid);

  res.cwt.grid = grid;
  res.cwt.values = bank.fields[constellation.isotropic_index()];
  res.cwt.label = "cwt";

  res.wvd_tfr = wvd(z, grid);

  const ArrayXXd window = gaussian_raster(cfg.entropy.window_std_px, cfg.entropy.window_std_px,
                                          cfg.entropy.window_trunc_stds);
  const WeightField weights = weight_field(bank, cfg.entropy.alpha, window);
  const CompositeFields cf =
      composites(bank, weights, constellation, cfg.deconv.blocks_l, cfg.deconv.blocks_h);
  bank.fields.clear();
  bank.fields.shrink_to_fit();

  const RiftEstimate estimate = lr_tv_blockwise(cf, cfg.deconv.iterations, cfg.deconv.lambda);
  res.rift.grid = grid;
  res.rift.values = estimate.values;
  res.rift.label = "rift";

  res.ipd = extract_ipd_ipc(weights, constellation);
  res.tracks = track(res.rift, res.ipd, cfg.tracker);
  res.spline = spline_rift(res.tracks, res.rift);

  if (have_reference) {
    res.reference =
        rasterize_itfr(reference_curves(pre.components, grid), grid, cfg.tube_sigma_px);
    if (cfg.compute_metrics) {
      res.reports.push_back(evaluate(res.cwt, res.reference, "cwt", cfg.snr_db));
      res.reports.push_back(evaluate(res.wvd_tfr, res.reference, "wvd", cfg.snr_db));
      res.reports.push_back(evaluate(res.rift, res.reference, "rift", cfg.snr_db));
      res.reports.push_back(evaluate(res.spline, res.reference, "spline_rift", cfg.snr_db));
    }
  }

  if (write_artifacts) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    res.out_dir = dir.string();

    emit_tfr(dir, "cwt", res.cwt);
    emit_tfr(dir, "wvd", res.wvd_tfr);
    emit_tfr(dir, "rift", res.rift);
    emit_tfr(dir, "spline_rift", res.spline);
    if (have_reference) emit_tfr(dir, "reference", res.reference.tfr);

    TFR ipd_field{grid, res.ipd.smoothed, "ipd", true};
    TFR ipc_field{grid, res.ipd.ipc_physical, "ipc", true};
    write_tfr((dir / "ipd.field").string(), ipd_field);
    write_tfr((dir / "ipc.field").string(), ipc_field);

    write_tracks_csv((dir / "tracks.csv").string(), res.tracks, grid);

    if (!res.reports.empty()) {
      json m;
      m["snr_db"] = snr_to_json(cfg.snr_db);
      for (const auto& rep : res.reports)
        m["reports"][rep.method] = {{"bc", rep.bc}, {"js", rep.js}, {"rer", rep.rer}};
      std::ofstream out(dir / "metrics.json");
      out << m.dump(2) << "\n";
    }

    std::ofstream resolved(dir / "resolved_config.json");
    resolved << config_to_json(cfg);
  }
  return res;
}

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const SweepSpec& sweep) {
  std::vector<double> snrs = sweep.snrs.empty() ? std::vector<double>{cfg.snr_db} : sweep.snrs;
  std::vector<double> alphas =
      sweep.alphas.empty() ? std::vector<double>{cfg.entropy.alpha} : sweep.alphas;
  std::vector<std::string> methods = sweep.methods;
  if (methods.empty()) methods = {"cwt", "wvd", "rift", "spline_rift"};

  const fs::path root(cfg.out_dir);
  fs::create_directories(root);

  std::vector<SweepRow> rows;
  int cell_index = 0;
  for (double snr : snrs) {
    for (double alpha : alphas) {
      PipelineConfig cell = cfg;
      cell.snr_db = snr;
      cell.entropy.alpha = alpha;
      cell.seed = cfg.seed ^ splitmix64(static_cast<uint64_t>(cell_index) + 1);
      std::ostringstream name;
      name << "cell_" << std::setfill('0') << std::setw(3) << cell_index << "_snr"
           << double_to_string(snr) << "_a" << double_to_string(alpha);
      cell.out_dir = (root / name.str()).string();
      const PipelineResult result = run_pipeline(cell, true);
      for (const auto& rep : result.reports) {
        if (std::find(methods.begin(), methods.end(), rep.method) == methods.end()) continue;
        rows.push_back(SweepRow{snr, alpha, rep});
      }
      ++cell_index;
    }
  }

  std::ofstream summary(root / "summary.csv");
  summary << "preset,snr_db,alpha,method,bc,js,rer\n";
  for (const auto& row : rows)
    summary << cfg.preset_name << ',' << double_to_string(row.snr_db) << ','
            << double_to_string(row.alpha) << ',' << row.report.method << ','
            << double_to_string(row.report.bc) << ',' << double_to_string(row.report.js) << ','
            << double_to_string(row.report.rer) << '\n';

  // Combined scores per method across cells, when there is a spread to rank.
  std::ofstream combined(root / "combined.csv");
  combined << "method,snr_db,alpha,combined\n";
  for (const auto& method : methods) {
    std::vector<const SweepRow*> mine;
    for (const auto& row : rows)
      if (row.report.method == method) mine.push_back(&row);
    if (mine.size() < 2) continue;
    std::vector<MetricsReport> reports;
    reports.reserve(mine.size());
    for (const auto* row : mine) reports.push_back(row->report);
    const std::vector<double> scores = combined_score(reports);
    for (size_t i = 0; i < mine.size(); ++i)
      combined << method << ',' << double_to_string(mine[i]->snr_db) << ','
               << double_to_string(mine[i]->alpha) << ',' << double_to_string(scores[i]) << '\n';
  }
  return rows;
}

}  // namespace rift
