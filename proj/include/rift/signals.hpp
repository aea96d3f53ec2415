#pragma once

#include "rift/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rift {

/// One component of a multi-component FM signal: time-varying amplitude and
/// instantaneous frequency (Hz), active on [onset, offset).
struct ComponentSpec {
  std::function<double(double)> amplitude;
  std::function<double(double)> inst_freq_hz;
  double onset = 0.0;
  double offset = 1e300;
  double initial_phase = 0.0;
};

/// sum_p 1_p(t) A_p(t) sin(phi_p1 + 2 pi int f_p dtau), phase integral by
/// cumulative trapezoid at the sample rate.
RealSignal synthesize(const std::vector<ComponentSpec>& components, double duration,
                      double sample_rate);

/// Additive white Gaussian noise at the requested SNR; +inf returns x as is.
RealSignal add_awgn(const RealSignal& x, double snr_db, uint64_t seed);

/// RIFF/WAVE reader: PCM16 or float32, mono or stereo (averaged), output
/// normalized to [-1, 1].
RealSignal load_wav(const std::string& path);

/// Per-component frequency trajectory sampled at grid columns.
/// Columns [first_col, first_col + freq_hz.size()) are active.
struct ComponentCurve {
  int first_col = 0;
  VectorXd freq_hz;
  VectorXd energy;  // A_p^2 per column
};

/// Reference rasterized ideal representation plus the blurred tolerance tube.
struct ReferenceITFR {
  TFR tfr;              // tube-blurred raster
  ArrayXXd pre_blur;    // anti-aliased raster before the tube blur
  double tube_sigma = 0.0;
  std::vector<ComponentCurve> component_curves;
  bool clipped = false;  // a trajectory left the band and was clipped
};

/// Draws each trajectory with anti-aliased per-column deposits (Wu-style
/// two-pixel split carrying weight A_p^2), then applies an isotropic
/// Gaussian tube blur of `tube_sigma_px` with reflective boundaries.
ReferenceITFR rasterize_itfr(const std::vector<ComponentCurve>& curves, const TFGrid& grid,
                             double tube_sigma_px);

/// Samples analytic component trajectories onto grid columns.
std::vector<ComponentCurve> reference_curves(const std::vector<ComponentSpec>& components,
                                             const TFGrid& grid);

/// Normalized 2-D Gaussian raster (sums to 1), truncated at trunc_stds.
ArrayXXd gaussian_raster(double std_row_px, double std_col_px, double trunc_stds);

/// Separable Gaussian blur with symmetric (edge-inclusive) reflection;
/// conserves total mass for the even kernel.
ArrayXXd gaussian_blur_reflect(const ArrayXXd& field, double sigma_px);

struct Preset {
  std::string name;
  double duration = 0.0;
  double sample_rate = 0.0;
  std::vector<ComponentSpec> components;
};

/// Built-in test signals: x1, x4, x5, x6, z3.
Preset preset(const std::string& name);

}  // namespace rift
