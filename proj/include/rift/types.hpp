#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace rift {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedFormat : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndefinedMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Regular time-frequency lattice: `num_freq` rows spaced `delta_omega`
/// starting at `omega_min`, `num_time` columns spaced `delta_t`.
/// Frequencies are stored in rad/s; Hz appears only at the interfaces.
struct TFGrid {
  int num_freq = 0;
  int num_time = 0;
  double delta_omega = 0.0;  // rad/s per bin
  double delta_t = 0.0;      // seconds per step
  double omega_min = 0.0;    // rad/s of bin 0
  double sample_rate = 0.0;  // Hz of the underlying signal

  void validate() const;

  double omega(int i) const { return omega_min + i * delta_omega; }
  double time(int j) const { return j * delta_t; }
  double freq_hz(int i) const { return omega(i) / kTwoPi; }

  /// sigma at which the discretized kernel is isotropic on this lattice.
  double sigma_iso() const { return std::sqrt(delta_t / delta_omega); }
  /// sqrt(delta_t * delta_omega): one normalized-plane unit in pixels is 1/cell_scale.
  double cell_scale() const { return std::sqrt(delta_t * delta_omega); }
};

struct RealSignal {
  VectorXd samples;
  double sample_rate = 0.0;
};

struct AnalyticSignal {
  VectorXcd samples;
  double sample_rate = 0.0;
};

/// Real-valued energy field over a TFGrid. `values` is num_freq x num_time.
/// Energy-type fields are nonnegative; the WVD sets `is_signed`.
struct TFR {
  TFGrid grid;
  ArrayXXd values;
  std::string label;
  bool is_signed = false;
};

}  // namespace rift
