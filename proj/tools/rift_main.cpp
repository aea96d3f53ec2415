#include "rift/io.hpp"
#include "rift/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using rift::PipelineConfig;

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string wav;
  std::string out_dir;
  std::string snr;
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::optional<int> iterations;
  std::optional<int> num_freq;
  std::optional<int> num_time;
  std::optional<double> f_min;
  std::optional<double> f_max;
  std::optional<int> num_sigma;
  std::optional<double> sigma_l;
  bool no_metrics = false;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_path, "JSON config file");
  app->add_option("-p,--preset", flags.preset, "signal preset: x1, x4, x5, x6, z3");
  app->add_option("--wav", flags.wav, "WAV input path (overrides preset)");
  app->add_option("-o,--out", flags.out_dir, "output directory");
  app->add_option("--snr", flags.snr, "SNR in dB, or 'inf'");
  app->add_option("--seed", flags.seed, "RNG seed");
  app->add_option("--alpha", flags.alpha, "entropic sharpness");
  app->add_option("--iterations", flags.iterations, "deconvolution iterations");
  app->add_option("--num-freq", flags.num_freq, "frequency bins");
  app->add_option("--num-time", flags.num_time, "time steps");
  app->add_option("--f-min", flags.f_min, "band lower edge, Hz");
  app->add_option("--f-max", flags.f_max, "band upper edge, Hz");
  app->add_option("--num-sigma", flags.num_sigma, "constellation sigma count (odd)");
  app->add_option("--sigma-l", flags.sigma_l, "log-domain sigma spread");
  app->add_flag("--no-metrics", flags.no_metrics, "skip metric evaluation");
}

double parse_snr_flag(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw rift::InvalidConfig("--snr expects a number or 'inf', got '" + s + "'");
  }
}

PipelineConfig build_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) cfg = rift::load_config_file(flags.config_path);
  if (!flags.preset.empty()) cfg.preset_name = flags.preset;
  if (!flags.wav.empty()) cfg.wav_path = flags.wav;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.snr.empty()) cfg.snr_db = parse_snr_flag(flags.snr);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.alpha) cfg.entropy.alpha = *flags.alpha;
  if (flags.iterations) cfg.deconv.iterations = *flags.iterations;
  if (flags.num_freq) cfg.grid.num_freq = *flags.num_freq;
  if (flags.num_time) cfg.grid.num_time = *flags.num_time;
  if (flags.f_min) cfg.grid.f_min = *flags.f_min;
  if (flags.f_max) cfg.grid.f_max = *flags.f_max;
  if (flags.num_sigma) cfg.constellation.num_sigma = *flags.num_sigma;
  if (flags.sigma_l) cfg.constellation.sigma_l = *flags.sigma_l;
  if (flags.no_metrics) cfg.compute_metrics = false;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_snr_flag(item));
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item == "spline") item = "spline_rift";
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIFT time-frequency analysis pipeline"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run the pipeline on one signal");
  add_common(run_cmd, run_flags);

  CommonFlags sweep_flags;
  std::string snr_list, alpha_list, method_list;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross-product experiment harness");
  add_common(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--snrs", snr_list, "comma-separated SNR list (dB or inf)");
  sweep_cmd->add_option("--alphas", alpha_list, "comma-separated alpha list");
  sweep_cmd->add_option("--methods", method_list, "subset of cwt,wvd,rift,spline_rift");

  std::string est_path, ref_path, metrics_out;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "evaluate a TFR file against a reference");
  metrics_cmd->add_option("--est", est_path, "estimate .tfr file")->required();
  metrics_cmd->add_option("--ref", ref_path, "reference .tfr file (tube-blurred)")->required();
  metrics_cmd->add_option("-o,--out", metrics_out, "optional JSON output path");

  std::string tfr_path, pgm_path;
  double gamma = 1.0;
  CLI::App* render_cmd = app.add_subcommand("render", "render a TFR file to 16-bit PGM");
  render_cmd->add_option("--tfr", tfr_path, "input .tfr file")->required();
  render_cmd->add_option("-o,--out", pgm_path, "output .pgm path")->required();
  render_cmd->add_option("--gamma", gamma, "display gamma (visualization only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      const PipelineConfig cfg = build_config(run_flags);
      const rift::PipelineResult result = rift::run_pipeline(cfg);
      std::cout << "artifacts written to " << result.out_dir << "\n";
      for (const auto& rep : result.reports)
        std::cout << rep.method << ": bc=" << rep.bc << " js=" << rep.js << " rer=" << rep.rer
                  << "\n";
    } else if (sweep_cmd->parsed()) {
      const PipelineConfig cfg = build_config(sweep_flags);
      rift::SweepSpec spec;
      if (!snr_list.empty()) spec.snrs = parse_list(snr_list);
      if (!alpha_list.empty()) spec.alphas = parse_list(alpha_list);
      if (!method_list.empty()) spec.methods = parse_names(method_list);
      const auto rows = rift::run_sweep(cfg, spec);
      std::cout << rows.size() << " rows written to " << cfg.out_dir << "/summary.csv\n";
    } else if (metrics_cmd->parsed()) {
      const rift::TFR est = rift::read_tfr(est_path);
      rift::TFR ref_tfr = rift::read_tfr(ref_path);
      rift::ReferenceITFR ref;
      ref.tfr = std::move(ref_tfr);
      const double bc = rift::bhattacharyya(est, ref);
      const double js = rift::jensen_shannon(est, ref);
      const double rer = rift::ridge_energy_ratio(est, ref);
      nlohmann::json out = {{"bc", bc}, {"js", js}, {"rer", rer}};
      std::cout << out.dump(2) << "\n";
      if (!metrics_out.empty()) {
        std::ofstream file(metrics_out);
        file << out.dump(2) << "\n";
      }
    } else if (render_cmd->parsed()) {
      const rift::TFR tfr = rift::read_tfr(tfr_path);
      rift::write_pgm16(pgm_path, tfr, gamma);
      std::cout << "wrote " << pgm_path << "\n";
    }
  } catch (const rift::InvalidConfig& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const rift::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
