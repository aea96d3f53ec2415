#pragma once

#include "rift/entropy.hpp"
#include "rift/kernels.hpp"
#include "rift/types.hpp"

#include <vector>

namespace rift {

/// Per-pixel best-aligned kernel parameters. Angles live in the grid
/// (pixel) plane; ipc_physical converts slopes to rad/s per second.
struct IPDField {
  ArrayXXd raw_theta;
  ArrayXXd raw_sigma;
  ArrayXXd smoothed;
  ArrayXXd ipc_grid;      // tan(theta(m~)), bins per step
  ArrayXXd ipc_physical;  // tan(theta_iso(m~))
};

/// Argmax of the weight field per pixel; ties resolve to the smallest
/// (n, m) in entry order.
IPDField extract_ipd_ipc(const WeightField& weights, const Constellation& c);

/// Angle-doubled spline smoothing: least-squares uniform cubic B-spline fits
/// of sin 2theta and cos 2theta on a coarse knot lattice, recombined by the
/// two-argument arctangent halved.
ArrayXXd smooth_ipd(const ArrayXXd& raw_theta, int knot_px = 8);

struct PeakDetection {
  int bin = 0;
  double height = 0.0;
};

/// Strict local maxima above min_height_frac of the column maximum, greedily
/// thinned to min_separation_bins, in descending height order.
std::vector<PeakDetection> detect_peaks(const VectorXd& column, double min_height_frac,
                                        int min_separation_bins);

/// Minimum-cost perfect assignment (row -> column) on a square matrix.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

struct TrackerParams {
  double process_noise = 1.0;      // epsilon, bins per step^2
  double sigma_y = 2.0;            // measurement std, bins
  double sigma_ydot = 1.0;         // measurement std, bins per step
  int confirm_hits = 3;            // consecutive detections to confirm
  int max_misses = 5;              // consecutive sub-threshold steps to kill
  double likelihood_floor = 1e-6;
  double peak_min_height_frac = 0.1;
  int peak_min_separation = 3;
};

enum class TrackStatus { Tentative, Confirmed, Terminated };

struct TrackPoint {
  int step = 0;
  double y = 0.0;     // frequency bin
  double ydot = 0.0;  // bins per step
  TrackStatus status = TrackStatus::Tentative;
};

struct Track {
  int id = 0;
  TrackStatus status = TrackStatus::Tentative;
  std::vector<TrackPoint> history;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

/// Column-by-column second-order Kalman tracking with global nearest
/// neighbour association. Velocity observations come from the smoothed IPD
/// field at the predicted bin. Returns tracks that reached confirmation.
std::vector<Track> track(const TFR& itfr, const IPDField& ipd, const TrackerParams& params);

/// Rasterizes track polylines with the anti-aliased two-pixel column split,
/// intensities sampled from the estimate along the curve.
TFR spline_rift(const std::vector<Track>& tracks, const TFR& itfr);

}  // namespace rift
