#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rift/kernels.hpp"
#include "test_util.hpp"

#include <random>

using namespace rift;
using namespace rift::testutil;

TEST_CASE("sigma0 collapses to sigma at kappa = 0") {
  CHECK(sigma0_of(2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sigma0_of(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sigma0 inverts the principal-axis eigenvalue") {
  const double sigma = 3.0, kappa = 0.3;
  const double s0 = sigma0_of(sigma, kappa);
  const Eigen::Matrix2d cov = realized_covariance(s0, kappa);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const double fitted = std::sqrt(2.0 * es.eigenvalues().maxCoeff());
  CHECK(fitted == doctest::Approx(sigma).epsilon(1e-6));
}

TEST_CASE("sigma0 rejects kappa outside the validity range") {
  const double sigma = 1.7;
  const double kmax = kappa_limit(sigma);
  CHECK_NOTHROW(sigma0_of(sigma, 0.999 * kmax));
  CHECK_THROWS_AS(sigma0_of(sigma, 1.01 * kmax), DomainError);
  CHECK_THROWS_AS(sigma0_of(1.0, 0.1), DomainError);
}

TEST_CASE("phi is zero for symmetric kernels") {
  CHECK(phi_of(2.0, 0.0) == 0.0);
  CHECK(phi_of(0.5, 0.0) == 0.0);
}

TEST_CASE("phi approaches kappa for large sigma") {
  CHECK(phi_of(1e4, 0.4) == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("phi matches the diagonalizing angle of the realized kernel") {
  const double sigma = 2.0, kappa = 0.5;
  const Eigen::Matrix2d cov = realized_covariance(sigma0_of(sigma, kappa), kappa);
  const AxisFit fit = fit_axis(cov, sigma);
  CHECK(angle_distance_mod_pi(fit.angle, phi_of(sigma, kappa)) < 1e-8);
}

TEST_CASE("phi is finite and real exactly on the valid kappa range") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = std::exp((uni(rng) - 0.5) * 2.8);
    if (std::abs(sigma - 1.0) < 1e-3) continue;
    const double kmax = kappa_limit(sigma);
    const double inside = (2.0 * uni(rng) - 1.0) * 0.999 * kmax;
    CHECK(std::isfinite(phi_of(sigma, inside)));
    CHECK_THROWS_AS(phi_of(sigma, kmax * 1.02 + 1e-6), DomainError);
  }
}

TEST_CASE("kappa_of is the inverse of phi") {
  CHECK(kappa_of(2.0, 0.0) == 0.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double sigma = std::exp((uni(rng) - 0.5) * 3.0);
    if (std::abs(sigma - 1.0) < 1e-3) continue;
    const double theta = (2.0 * uni(rng) - 1.0) * theta_limit(sigma) * 0.999;
    const double kappa = kappa_of(sigma, theta);
    worst = std::max(worst, std::abs(phi_of(sigma, kappa) - theta));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("kappa_of lands the realized axis on the requested angle") {
  const double sigma = 2.0, theta = 0.3;
  const double kappa = kappa_of(sigma, theta);
  const AxisFit fit = fit_axis(realized_covariance(sigma0_of(sigma, kappa), kappa), sigma);
  CHECK(angle_distance_mod_pi(fit.angle, theta) < 1e-6);
  CHECK_THROWS_AS(kappa_of(sigma, theta_limit(sigma) + 0.01), DomainError);
}

TEST_CASE("theta_limit grows toward pi/2") {
  CHECK(theta_limit(100.0) > 1.55);
  CHECK(theta_limit(2.0) > theta_limit(1.2));
  CHECK_THROWS_AS(theta_limit(1.0), DomainError);
}

TEST_CASE("theta limits of sigma and 1/sigma tile the quadrant") {
  // Complementary unwrapped ranges: the direct and orthogonal-axis branches
  // together cover every theta in (-pi/2, pi/2].
  for (double sigma : {1.3, 2.0, 3.7, 9.0}) {
    CHECK(theta_limit(sigma) + theta_limit(1.0 / sigma) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("windows collapse to the Morlet envelope at sigma = 1") {
  const double sigma_iso = 0.7, dt = 0.01;
  const ImplementedKernel impl = implement_kernel(KernelSpec{1.0, 0.0});
  const int half = window_half_len(impl, sigma_iso, dt);
  const VectorXcd taps = make_window(impl, sigma_iso, dt, half);
  for (int s = -half; s <= half; ++s) {
    CHECK(std::abs(taps[s + half].imag()) < 1e-12);
    const double expected =
        taps[half].real() * std::exp(-0.5 * (s * dt) * (s * dt) / (sigma_iso * sigma_iso));
    CHECK(taps[s + half].real() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("windows are unit energy for any spec") {
  const double dt = 1.0 / 1024.0;
  for (double sigma : {0.4, 1.0, 2.7}) {
    for (double theta : {0.0, 0.9}) {
      if (sigma == 1.0 && theta != 0.0) continue;
      const ImplementedKernel impl = implement_kernel(KernelSpec{sigma, theta});
      const int half = window_half_len(impl, 0.02, dt);
      const VectorXcd taps = make_window(impl, 0.02, dt, half);
      CHECK(taps.squaredNorm() * dt == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("window WVD carries the intended geometry") {
  const double dt = 0.02, sigma_iso = 1.0;
  const KernelSpec spec{2.0, 0.4};
  const ImplementedKernel impl = implement_kernel(spec);
  const VectorXcd taps = make_window(impl, sigma_iso, dt, window_half_len(impl, sigma_iso, dt));
  const Eigen::Matrix2d cov = window_wvd_moments(taps, dt, sigma_iso);
  const AxisFit fit = fit_axis(cov, spec.sigma);
  CHECK(angle_distance_mod_pi(fit.angle, spec.theta) < 1e-3);
  CHECK(fit.std_dev == doctest::Approx(spec.sigma * sigma_iso / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("window taps vary continuously across the branch switch") {
  const double sigma = 2.0, dt = 0.02, sigma_iso = 1.0;
  const double limit = theta_limit(sigma);
  const double eps = 1e-4;
  const ImplementedKernel lo = implement_kernel(KernelSpec{sigma, limit - eps});
  const ImplementedKernel hi = implement_kernel(KernelSpec{sigma, limit + eps});
  CHECK(lo.branch == KernelBranch::Direct);
  CHECK(hi.branch == KernelBranch::OrthogonalAxis);
  const int half = std::max(window_half_len(lo, sigma_iso, dt), window_half_len(hi, sigma_iso, dt));
  const VectorXcd a = make_window(lo, sigma_iso, dt, half);
  const VectorXcd b = make_window(hi, sigma_iso, dt, half);
  CHECK(std::sqrt((a - b).squaredNorm() * dt) < 1e-2);
}

TEST_CASE("cohen kernel rasters are normalized and symmetric") {
  const TFGrid grid = unit_grid();
  for (double sigma : {0.4, 1.0, 2.0, 3.5}) {
    const KernelSpec spec{sigma, 0.0};
    int hu, hv;
    cohen_half_support(spec, grid, 5.0, hu, hv);
    const ArrayXXd raster = cohen_kernel(spec, grid.sigma_iso(), grid, hu, hv);
    CHECK(raster.sum() == doctest::Approx(1.0).epsilon(1e-3));
    // theta = 0: even in both axes and separable.
    for (int i = 0; i <= hu; ++i)
      for (int j = 0; j <= hv; ++j) {
        CHECK(raster(hu + i, hv + j) == doctest::Approx(raster(hu - i, hv - j)).epsilon(1e-12));
        CHECK(raster(hu + i, hv + j) == doctest::Approx(raster(hu - i, hv + j)).epsilon(1e-12));
      }
    const ArrayXXd outer = raster.col(hv).matrix() * raster.row(hu).matrix() / raster(hu, hv);
    CHECK((outer.array() - raster).abs().maxCoeff() < 1e-12 * raster.maxCoeff());
  }
}

TEST_CASE("cohen kernel obeys the pi/2 rotation identity") {
  const TFGrid grid = unit_grid();
  const KernelSpec a{2.0, 0.35};
  const KernelSpec b{0.5, 0.35 - kPi / 2.0};
  int hu, hv;
  cohen_half_support(a, grid, 5.0, hu, hv);
  const ArrayXXd ra = cohen_kernel(a, grid.sigma_iso(), grid, hu, hv);
  const ArrayXXd rb = cohen_kernel(b, grid.sigma_iso(), grid, hu, hv);
  CHECK((ra - rb).abs().maxCoeff() < 1e-12 * ra.maxCoeff());
}

TEST_CASE("raster moment fits recover the intended sigma and theta") {
  const TFGrid grid = unit_grid();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double sigma = std::exp(std::log(0.25) + uni(rng) * std::log(4.5 / 0.25));
    const double theta = (uni(rng) - 0.5) * kPi * 0.98;
    if (std::abs(sigma - 1.0) < 5e-2) continue;
    const KernelSpec spec{sigma, theta};
    int hu, hv;
    cohen_half_support(spec, grid, 5.0, hu, hv);
    const ArrayXXd raster = cohen_kernel(spec, grid.sigma_iso(), grid, hu, hv);
    const Eigen::Matrix2d cov = raster_moments(raster, grid, grid.sigma_iso(), hu, hv);
    const AxisFit fit = fit_axis(cov, sigma);
    CHECK(angle_distance_mod_pi(fit.angle, theta) < 1e-3);
    CHECK(std::abs(fit.std_dev * std::sqrt(2.0) - sigma) < 1e-3 * sigma);
  }
}

TEST_CASE("inverse normal CDF") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.95996).epsilon(1e-4));
  CHECK(inverse_normal_cdf(0.2) == doctest::Approx(-inverse_normal_cdf(0.8)).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
}

TEST_CASE("constellation layout") {
  const TFGrid grid = unit_grid();
  const Constellation c = build_constellation(1.0, 7, default_theta_count, grid);
  CHECK(c.sigmas[3] == 1.0);
  CHECK(c.sigmas[0] * c.sigmas[6] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.sigmas[1] * c.sigmas[5] == doctest::Approx(1.0).epsilon(1e-12));

  int iso_count = 0;
  for (const auto& e : c.entries)
    if (e.impl.branch == KernelBranch::Isotropic) ++iso_count;
  CHECK(iso_count == 1);
  CHECK(c.entries[c.isotropic_index()].spec.sigma == 1.0);

  for (const auto& e : c.entries) {
    CHECK(e.kernel_raster.sum() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(e.spec.theta > -kPi / 2.0);
    CHECK(e.spec.theta <= kPi / 2.0);
    if (e.impl.branch == KernelBranch::Direct)
      CHECK(std::abs(e.impl.kappa) <= kappa_limit(e.spec.sigma) * (1.0 + 1e-9));
  }
  CHECK_THROWS_AS(build_constellation(1.0, 6, default_theta_count, grid), InvalidInput);
}

TEST_CASE("mirrored rings share rotated rasters") {
  const TFGrid grid = unit_grid();
  const Constellation c = build_constellation(1.0, 3, [](double) { return 4; }, grid);
  std::vector<const ConstellationEntry*> low, high;
  for (const auto& e : c.entries) {
    if (e.n == 1) low.push_back(&e);
    if (e.n == 3) high.push_back(&e);
  }
  REQUIRE(low.size() == high.size());
  const int m_count = static_cast<int>(low.size());
  for (int m = 0; m < m_count; ++m) {
    const int partner = (m + m_count / 2) % m_count;
    CHECK((low[m]->kernel_raster - high[partner]->kernel_raster).abs().maxCoeff() == 0.0);
  }
}
