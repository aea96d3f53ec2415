#pragma once

#include "rift/types.hpp"

#include <functional>
#include <vector>

namespace rift {

/// Intended kernel geometry: std `sigma` along the axis at angle `theta`
/// (normalized plane, theta in (-pi/2, pi/2]).
struct KernelSpec {
  double sigma = 1.0;
  double theta = 0.0;
};

enum class KernelBranch { Direct, OrthogonalAxis, Isotropic };

/// Implemented wavelet parameters realizing a KernelSpec: Gaussian width
/// sigma0 and chirp angle kappa (normalized plane), plus the branch used.
struct ImplementedKernel {
  double sigma0 = 1.0;
  double kappa = 0.0;
  KernelBranch branch = KernelBranch::Isotropic;
  KernelSpec spec;
};

/// Largest chirp angle for which the (sigma, kappa) parametrization is real.
double kappa_limit(double sigma);

/// Implemented width for intended principal std sigma at chirp kappa;
/// the sgn(sigma - 1) root keeps sigma0 on the same side of 1 as sigma.
double sigma0_of(double sigma, double kappa);

/// Unwrapped principal-axis angle of the realized kernel, including the
/// axis-switch correction (nonzero only for sigma > 1).
double phi_of(double sigma, double kappa);

/// Inverse of phi_of with respect to theta, by bisection on the valid range.
double kappa_of(double sigma, double theta);

/// Largest attainable |theta| for this sigma: |phi(sigma, kappa_limit)|.
double theta_limit(double sigma);

/// Standard normal quantile (Acklam rational fit plus one Newton step).
double inverse_normal_cdf(double p);

/// Resolves the branch and implemented parameters for an intended spec.
ImplementedKernel implement_kernel(const KernelSpec& spec);

/// Discrete window taps at sample spacing sample_dt, indices -half_len..half_len,
/// L2-normalized so sum |taps|^2 sample_dt = 1. The physical window is the
/// normalized-plane window time-dilated by sigma_iso.
VectorXcd make_window(const ImplementedKernel& impl, double sigma_iso, double sample_dt,
                      int half_len);
VectorXcd make_window(const KernelSpec& spec, double sigma_iso, double sample_dt, int half_len);

/// Support needed for the 6-envelope-std truncation rule.
int window_half_len(const ImplementedKernel& impl, double sigma_iso, double sample_dt);

/// Closed-form Cohen kernel raster (2 half_u + 1) x (2 half_v + 1), centered,
/// with the grid cell area absorbed so the raster sums to ~1.
ArrayXXd cohen_kernel(const KernelSpec& spec, double sigma_iso, const TFGrid& grid, int half_u,
                      int half_v);

/// Raster half-supports covering n_std of the kernel along each grid axis.
void cohen_half_support(const KernelSpec& spec, const TFGrid& grid, double n_std, int& half_u,
                        int& half_v);

/// Kernel covariance in the normalized plane, axes (t, omega).
Eigen::Matrix2d kernel_covariance(const KernelSpec& spec);

struct ConstellationEntry {
  int n = 0;  // sigma ring, 1-based
  int m = 0;  // theta index within the ring, 1-based
  KernelSpec spec;
  ImplementedKernel impl;
  ArrayXXd kernel_raster;  // discrete Pi
  int half_u = 0;
  int half_v = 0;
};

struct Constellation {
  double sigma_l = 1.0;
  int num_sigma = 0;  // N (odd)
  double sigma_iso = 1.0;
  TFGrid grid;
  std::vector<ConstellationEntry> entries;
  std::vector<double> sigmas;  // sigma(n), 1-based at index n-1

  int size() const { return static_cast<int>(entries.size()); }
  int isotropic_index() const;
};

/// Default angular density rule: M = max(8, round(8 max(sigma, 1/sigma))).
int default_theta_count(double sigma);

/// Log-normal sigma grid (inverse CDF method), uniform theta rings of
/// 2 M(sigma) angles; the sigma = 1 ring collapses to the single isotropic
/// kernel. Rasters for mirrored rings reuse the pi/2-rotation identity.
Constellation build_constellation(double sigma_l, int num_sigma,
                                  const std::function<int(double)>& theta_count_fn,
                                  const TFGrid& grid);

}  // namespace rift
