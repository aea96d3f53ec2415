#include "rift/kernels.hpp"

#include "rift/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rift {

namespace {

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

double kappa_limit(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("kappa_limit: sigma must be positive");
  const double s2 = sigma * sigma;
  return std::acos(std::clamp(2.0 * s2 / (s2 * s2 + 1.0), -1.0, 1.0));
}

double sigma0_of(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError("sigma0_of: sigma must be positive");
  if (sigma == 1.0) throw DomainError("sigma0_of: sigma = 1 is the isotropic branch");
  const double sum = sigma * sigma + 1.0 / (sigma * sigma);
  const double c = std::cos(kappa);
  const double sec2 = 1.0 / (c * c);
  double disc = sum * sum - 4.0 * sec2;
  if (disc < -1e-9 * sum * sum) throw DomainError("sigma0_of: kappa outside the valid range");
  disc = std::max(disc, 0.0);
  const double s02 = (sum + sgn(sigma - 1.0) * std::sqrt(disc)) / (2.0 * sec2);
  return std::sqrt(s02);
}

double phi_of(double sigma, double kappa) {
  if (sigma == 1.0) {
    if (kappa != 0.0) throw DomainError("phi_of: sigma = 1 admits only kappa = 0");
    return 0.0;
  }
  const double s0 = sigma0_of(sigma, kappa);  // validates the range
  const double t = std::tan(kappa);
  const double denom = 1.0 / (s0 * s0 * s0 * s0) + t * t - 1.0;
  double raw;
  if (denom == 0.0)
    raw = -0.5 * sgn(t) * (kPi / 2.0);
  else
    raw = -0.5 * std::atan(2.0 * t / denom);

  // Axis-switch unwrap; active only for sigma > 1 where the arctan
  // denominator crosses zero inside the valid kappa range.
  const double s = 1.0 + sgn(sigma - 1.0);
  if (s > 0.0) {
    const double s4 = std::pow(sigma, 4.0);
    const double sum2 = std::pow(sigma * sigma + 1.0 / (sigma * sigma), 2.0);
    const double arg = std::sqrt(std::clamp(sum2 / (2.0 * (s4 + 1.0 / s4)), 0.0, 1.0));
    const double kappa_switch = std::acos(arg);
    const double correction =
        (kPi / 4.0) * s *
        (std::floor((kappa + kappa_switch) / kPi) + std::floor((kappa - kappa_switch) / kPi) + 1.0);
    raw += correction;
  }
  return raw;
}

double theta_limit(double sigma) {
  if (sigma == 1.0) throw DomainError("theta_limit: undefined for the isotropic kernel");
  return std::abs(phi_of(sigma, kappa_limit(sigma)));
}

double kappa_of(double sigma, double theta) {
  if (sigma == 1.0) {
    if (theta != 0.0) throw DomainError("kappa_of: sigma = 1 admits only theta = 0");
    return 0.0;
  }
  const double kmax = kappa_limit(sigma);
  const double limit = theta_limit(sigma);
  if (std::abs(theta) > limit * (1.0 + 1e-12) + 1e-15)
    throw DomainError("kappa_of: |theta| exceeds theta_limit(sigma)");

  double lo = -kmax, hi = kmax;
  double flo = phi_of(sigma, lo) - theta;
  double fhi = phi_of(sigma, hi) - theta;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    // theta pinned at the boundary within rounding.
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = phi_of(sigma, mid) - theta;
    if (fmid == 0.0 || (hi - lo) < 1e-15) return mid;
    if (flo * fmid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_normal_cdf: p must lie in (0, 1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton refinement against the exact CDF.
  const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
  if (pdf > 0.0) x -= (cdf - p) / pdf;
  return x;
}

ImplementedKernel implement_kernel(const KernelSpec& spec) {
  if (!(spec.sigma > 0.0)) throw DomainError("implement_kernel: sigma must be positive");
  ImplementedKernel impl;
  impl.spec = spec;
  if (spec.sigma == 1.0) {
    impl.branch = KernelBranch::Isotropic;
    impl.sigma0 = 1.0;
    impl.kappa = 0.0;
    return impl;
  }
  const double limit = theta_limit(spec.sigma);
  if (std::abs(spec.theta) <= limit * (1.0 + 1e-12)) {
    impl.branch = KernelBranch::Direct;
    impl.kappa = kappa_of(spec.sigma, std::clamp(spec.theta, -limit, limit));
    impl.sigma0 = sigma0_of(spec.sigma, impl.kappa);
  } else {
    // Realize the kernel through the orthogonal axis: same kernel as
    // (1/sigma, theta -+ pi/2).
    impl.branch = KernelBranch::OrthogonalAxis;
    const double sigma_m = 1.0 / spec.sigma;
    double theta_m = spec.theta - sgn(spec.theta) * (kPi / 2.0);
    const double limit_m = theta_limit(sigma_m);
    theta_m = std::clamp(theta_m, -limit_m, limit_m);
    impl.kappa = kappa_of(sigma_m, theta_m);
    impl.sigma0 = sigma0_of(sigma_m, impl.kappa);
  }
  return impl;
}

VectorXcd make_window(const ImplementedKernel& impl, double sigma_iso, double sample_dt,
                      int half_len) {
  if (half_len < 1) throw InvalidInput("make_window: half_len must be >= 1");
  const double width = impl.sigma0 * sigma_iso;       // envelope std, seconds
  const double chirp = std::tan(impl.kappa) / (sigma_iso * sigma_iso);
  VectorXcd taps(2 * half_len + 1);
  for (int s = -half_len; s <= half_len; ++s) {
    const double t = s * sample_dt;
    const double env = std::exp(-0.5 * t * t / (width * width));
    const double phase = 0.5 * chirp * t * t;
    taps[s + half_len] = env * Complex(std::cos(phase), std::sin(phase));
  }
  taps /= std::sqrt(taps.squaredNorm() * sample_dt);
  return taps;
}

VectorXcd make_window(const KernelSpec& spec, double sigma_iso, double sample_dt, int half_len) {
  return make_window(implement_kernel(spec), sigma_iso, sample_dt, half_len);
}

int window_half_len(const ImplementedKernel& impl, double sigma_iso, double sample_dt) {
  return std::max(2, static_cast<int>(std::ceil(6.0 * impl.sigma0 * sigma_iso / sample_dt)));
}

Eigen::Matrix2d kernel_covariance(const KernelSpec& spec) {
  const double ct = std::cos(spec.theta), st = std::sin(spec.theta);
  Eigen::Matrix2d rot;
  rot << ct, -st, st, ct;
  Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
  diag(0, 0) = spec.sigma * spec.sigma / 2.0;
  diag(1, 1) = 1.0 / (2.0 * spec.sigma * spec.sigma);
  return rot * diag * rot.transpose();
}

ArrayXXd cohen_kernel(const KernelSpec& spec, double sigma_iso, const TFGrid& grid, int half_u,
                      int half_v) {
  const Eigen::Matrix2d inv = kernel_covariance(spec).inverse();
  const double cell = grid.delta_omega * grid.delta_t;
  ArrayXXd out(2 * half_u + 1, 2 * half_v + 1);
  for (int i = -half_u; i <= half_u; ++i) {
    const double w_hat = i * grid.delta_omega * sigma_iso;
    for (int j = -half_v; j <= half_v; ++j) {
      const double t_hat = j * grid.delta_t / sigma_iso;
      const double q = inv(0, 0) * t_hat * t_hat + 2.0 * inv(0, 1) * t_hat * w_hat +
                       inv(1, 1) * w_hat * w_hat;
      out(i + half_u, j + half_v) = (cell / kPi) * std::exp(-0.5 * q);
    }
  }
  return out;
}

void cohen_half_support(const KernelSpec& spec, const TFGrid& grid, double n_std, int& half_u,
                        int& half_v) {
  const Eigen::Matrix2d cov = kernel_covariance(spec);
  const double c = grid.cell_scale();
  const double std_t_px = std::sqrt(cov(0, 0)) / c;  // columns (time)
  const double std_w_px = std::sqrt(cov(1, 1)) / c;  // rows (frequency)
  half_v = std::max(1, static_cast<int>(std::ceil(n_std * std_t_px)));
  half_u = std::max(1, static_cast<int>(std::ceil(n_std * std_w_px)));
}

int default_theta_count(double sigma) {
  const double ratio = std::max(sigma, 1.0 / sigma);
  return std::max(8, static_cast<int>(std::lround(8.0 * ratio)));
}

int Constellation::isotropic_index() const {
  for (int e = 0; e < size(); ++e)
    if (entries[e].impl.branch == KernelBranch::Isotropic) return e;
  throw InvalidInput("Constellation: no isotropic entry");
}

Constellation build_constellation(double sigma_l, int num_sigma,
                                  const std::function<int(double)>& theta_count_fn,
                                  const TFGrid& grid) {
  if (num_sigma < 1 || num_sigma % 2 == 0)
    throw InvalidInput("build_constellation: N must be odd and positive");
  if (!(sigma_l > 0.0)) throw InvalidInput("build_constellation: sigma_l must be positive");
  grid.validate();

  Constellation c;
  c.sigma_l = sigma_l;
  c.num_sigma = num_sigma;
  c.sigma_iso = grid.sigma_iso();
  c.grid = grid;

  // sigma(n) = exp(sigma_l F^-1(n / (N+1))); mirror the quantiles so that
  // sigma(n) sigma(N+1-n) = 1 holds exactly in floating point.
  const int mid = (num_sigma + 1) / 2;
  c.sigmas.assign(num_sigma, 1.0);
  for (int n = mid + 1; n <= num_sigma; ++n) {
    const double u = inverse_normal_cdf(static_cast<double>(n) / (num_sigma + 1));
    c.sigmas[n - 1] = std::exp(sigma_l * u);
    c.sigmas[num_sigma - n] = std::exp(-sigma_l * u);
  }

  struct RingLayout {
    int count = 0;     // entries in the ring
    int first = 0;     // index of the ring's first entry in `entries`
  };
  std::vector<RingLayout> rings(num_sigma);
  int total = 0;
  for (int n = 1; n <= num_sigma; ++n) {
    int cnt = 1;
    if (n != mid) {
      cnt = theta_count_fn(c.sigmas[n - 1]);
      if (cnt < 1) throw InvalidInput("build_constellation: theta count must be >= 1");
      cnt *= 2;
    }
    rings[n - 1] = {cnt, total};
    total += cnt;
  }

  c.entries.resize(total);
  for (int n = 1; n <= num_sigma; ++n) {
    const double sigma = c.sigmas[n - 1];
    const int cnt = rings[n - 1].count;
    for (int m = 1; m <= cnt; ++m) {
      ConstellationEntry& e = c.entries[rings[n - 1].first + (m - 1)];
      e.n = n;
      e.m = m;
      double theta = 0.0;
      if (n != mid) {
        theta = kPi * ((m - 1.0) / cnt - 0.5);
        if (theta <= -kPi / 2.0) theta += kPi;  // keep theta in (-pi/2, pi/2]
      }
      e.spec = KernelSpec{sigma, theta};
    }
  }

  parallel_for(total, [&](int idx) {
    ConstellationEntry& e = c.entries[idx];
    e.impl = implement_kernel(e.spec);
    cohen_half_support(e.spec, grid, 5.0, e.half_u, e.half_v);
  });

  // Rasters: evaluate rings n >= mid, reuse Pi_{sigma,theta} = Pi_{1/sigma,
  // theta +- pi/2} for the mirrored rings when the theta grids line up.
  std::vector<int> to_evaluate;
  for (int idx = 0; idx < total; ++idx) {
    const ConstellationEntry& e = c.entries[idx];
    const bool mirrored = e.n < mid && rings[e.n - 1].count == rings[num_sigma - e.n].count;
    if (!mirrored) to_evaluate.push_back(idx);
  }
  parallel_for(static_cast<int>(to_evaluate.size()), [&](int k) {
    ConstellationEntry& e = c.entries[to_evaluate[k]];
    e.kernel_raster = cohen_kernel(e.spec, c.sigma_iso, grid, e.half_u, e.half_v);
  });
  for (int idx = 0; idx < total; ++idx) {
    ConstellationEntry& e = c.entries[idx];
    if (e.kernel_raster.size() != 0) continue;
    const int partner_ring = num_sigma - e.n;  // 0-based ring of 1/sigma
    const int cnt = rings[partner_ring].count;
    const int m_star = ((e.m - 1 + cnt / 2) % cnt) + 1;
    const ConstellationEntry& src = c.entries[rings[partner_ring].first + (m_star - 1)];
    e.kernel_raster = src.kernel_raster;
    e.half_u = src.half_u;
    e.half_v = src.half_v;
  }
  return c;
}

}  // namespace rift
