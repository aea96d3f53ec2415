#pragma once

#include "rift/kernels.hpp"
#include "rift/types.hpp"

#include <Eigen/Eigenvalues>

namespace rift::testutil {

/// Covariance of the realized kernel from its closed-form quadratic
/// coefficients a, b, c in terms of the implemented (sigma0, kappa).
inline Eigen::Matrix2d realized_covariance(double sigma0, double kappa) {
  const double t = std::tan(kappa);
  const double a = 1.0 / (sigma0 * sigma0) + sigma0 * sigma0 * t * t;
  const double b = -2.0 * sigma0 * sigma0 * t;
  const double c = sigma0 * sigma0;
  Eigen::Matrix2d inv;
  inv << 2.0 * a, b, b, 2.0 * c;
  return inv.inverse();
}

struct AxisFit {
  double angle = 0.0;  // radians, mapped into (-pi/2, pi/2]
  double std_dev = 0.0;
};

/// Picks the eigen-axis whose variance is closest to sigma^2/2 (the axis the
/// spec parametrizes) and reports its angle from the t-axis.
inline AxisFit fit_axis(const Eigen::Matrix2d& cov, double sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const double target = sigma * sigma / 2.0;
  const int pick =
      std::abs(es.eigenvalues()[0] - target) < std::abs(es.eigenvalues()[1] - target) ? 0 : 1;
  AxisFit fit;
  fit.angle = std::atan2(es.eigenvectors()(1, pick), es.eigenvectors()(0, pick));
  if (fit.angle > kPi / 2.0) fit.angle -= kPi;
  if (fit.angle <= -kPi / 2.0) fit.angle += kPi;
  fit.std_dev = std::sqrt(es.eigenvalues()[pick]);
  return fit;
}

inline double angle_distance_mod_pi(double a, double b) {
  double d = std::abs(a - b);
  while (d > kPi / 2.0) d = std::abs(d - kPi);
  return d;
}

/// Second-moment fit of a centered raster in normalized coordinates.
inline Eigen::Matrix2d raster_moments(const ArrayXXd& raster, const TFGrid& grid,
                                      double sigma_iso, int half_u, int half_v) {
  double m00 = 0, mt = 0, mw = 0, mtt = 0, mww = 0, mtw = 0;
  for (int i = -half_u; i <= half_u; ++i) {
    const double w_hat = i * grid.delta_omega * sigma_iso;
    for (int j = -half_v; j <= half_v; ++j) {
      const double t_hat = j * grid.delta_t / sigma_iso;
      const double v = raster(i + half_u, j + half_v);
      m00 += v;
      mt += v * t_hat;
      mw += v * w_hat;
      mtt += v * t_hat * t_hat;
      mww += v * w_hat * w_hat;
      mtw += v * t_hat * w_hat;
    }
  }
  mt /= m00;
  mw /= m00;
  Eigen::Matrix2d cov;
  cov << mtt / m00 - mt * mt, mtw / m00 - mt * mw, mtw / m00 - mt * mw, mww / m00 - mw * mw;
  return cov;
}

/// Numeric WVD of window taps integrated against an (omega, t) lattice and
/// moment-fitted in normalized coordinates.
inline Eigen::Matrix2d window_wvd_moments(const VectorXcd& taps, double dt, double sigma_iso) {
  const int h = static_cast<int>((taps.size() - 1) / 2);
  const int nw = 281;
  const double wmax = 8.0 / sigma_iso;
  const double dw = 2.0 * wmax / (nw - 1);
  double m00 = 0, mt = 0, mw = 0, mtt = 0, mww = 0, mtw = 0;
  for (int s = -h; s <= h; ++s) {
    const double t_hat = s * dt / sigma_iso;
    const int kmax = std::min(s + h, h - s);
    for (int iw = 0; iw < nw; ++iw) {
      const double w = -wmax + iw * dw;
      double re = std::norm(taps[s + h]);
      for (int k = 1; k <= kmax; ++k) {
        const Complex prod = taps[s + k + h] * std::conj(taps[s - k + h]);
        re += 2.0 * (prod * std::polar(1.0, -2.0 * w * k * dt)).real();
      }
      const double val = (dt / kPi) * re;
      const double w_hat = w * sigma_iso;
      m00 += val;
      mt += val * t_hat;
      mw += val * w_hat;
      mtt += val * t_hat * t_hat;
      mww += val * w_hat * w_hat;
      mtw += val * t_hat * w_hat;
    }
  }
  mt /= m00;
  mw /= m00;
  Eigen::Matrix2d cov;
  cov << mtt / m00 - mt * mt, mtw / m00 - mt * mw, mtw / m00 - mt * mw, mww / m00 - mw * mw;
  return cov;
}

/// sigma_iso = 1 lattice for kernel-level tests.
inline TFGrid unit_grid(double step = 0.15) {
  TFGrid grid;
  grid.num_freq = 64;
  grid.num_time = 64;
  grid.delta_omega = step;
  grid.delta_t = step;
  grid.omega_min = 0.0;
  grid.sample_rate = 64.0 * step;  // comfortably above the band
  return grid;
}

}  // namespace rift::testutil
