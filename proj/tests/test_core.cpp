#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rift/core.hpp"
#include "rift/fft.hpp"

#include <random>

using namespace rift;

namespace {

VectorXcd random_complex(int n, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(uni(rng), uni(rng));
  return v;
}

// O(n^2) reference convolution.
VectorXcd conv_direct(const VectorXcd& a, const VectorXcd& b) {
  VectorXcd out = VectorXcd::Zero(a.size() + b.size() - 1);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

ArrayXXd conv2_direct_full(const ArrayXXd& a, const ArrayXXd& k) {
  ArrayXXd out = ArrayXXd::Zero(a.rows() + k.rows() - 1, a.cols() + k.cols() - 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int p = 0; p < k.rows(); ++p)
        for (int q = 0; q < k.cols(); ++q) out(i + p, j + q) += a(i, j) * k(p, q);
  return out;
}

}  // namespace

TEST_CASE("next_fast_len produces 5-smooth sizes") {
  CHECK(next_fast_len(1) == 1);
  CHECK(next_fast_len(7) == 8);
  CHECK(next_fast_len(11) == 12);
  CHECK(next_fast_len(243) == 243);
  CHECK(next_fast_len(481) == 486);
}

TEST_CASE("conv1d delta identity") {
  VectorXcd a(3), b(3);
  a << 1.0, 0.0, 0.0;
  b << 1.0, 2.0, 3.0;
  const VectorXcd out = conv1d_linear(a, b);
  REQUIRE(out.size() == 5);
  const double expected[5] = {1.0, 2.0, 3.0, 0.0, 0.0};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(out[i] - expected[i]) < 1e-12);
}

TEST_CASE("conv1d box pair") {
  VectorXcd a(2), b(2);
  a << 1.0, 1.0;
  b << 1.0, 1.0;
  const VectorXcd out = conv1d_linear(a, b);
  CHECK(std::abs(out[0] - 1.0) < 1e-12);
  CHECK(std::abs(out[1] - 2.0) < 1e-12);
  CHECK(std::abs(out[2] - 1.0) < 1e-12);
}

TEST_CASE("conv1d matches the direct sum") {
  const VectorXcd a = random_complex(17, 11);
  const VectorXcd b = random_complex(23, 29);
  const VectorXcd fast = conv1d_linear(a, b);
  const VectorXcd slow = conv_direct(a, b);
  const double scale = slow.cwiseAbs().maxCoeff();
  for (int i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-10 * scale);
}

TEST_CASE("conv1d rejects empty input") {
  VectorXcd empty, one(1);
  one << 1.0;
  CHECK_THROWS_AS(conv1d_linear(empty, one), InvalidInput);
}

TEST_CASE("conv1d is linear") {
  const VectorXcd a = random_complex(13, 3);
  const VectorXcd b = random_complex(13, 5);
  const VectorXcd k = random_complex(7, 9);
  const Complex alpha(0.7, -0.3), beta(-1.1, 0.2);
  const VectorXcd lhs = conv1d_linear(alpha * a + beta * b, k);
  const VectorXcd rhs = alpha * conv1d_linear(a, k) + beta * conv1d_linear(b, k);
  for (int i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-10);
}

TEST_CASE("conv2d impulse identity in same mode") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ArrayXXd a(6, 8);
  for (int i = 0; i < a.size(); ++i) a(i) = uni(rng);
  ArrayXXd delta = ArrayXXd::Zero(3, 3);
  delta(1, 1) = 1.0;
  const ArrayXXd out = conv2d_same(a, delta);
  CHECK(((out - a).abs().maxCoeff()) < 1e-12);
}

TEST_CASE("conv2d ones block") {
  const ArrayXXd a = ArrayXXd::Ones(5, 5);
  const ArrayXXd k = ArrayXXd::Ones(3, 3);
  const ArrayXXd full = conv2d_full(a, k);
  REQUIRE(full.rows() == 7);
  REQUIRE(full.cols() == 7);
  CHECK(full(3, 3) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("conv2d matches the quadruple loop") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ArrayXXd a(12, 9), k(5, 5);
  for (int i = 0; i < a.size(); ++i) a(i) = uni(rng);
  for (int i = 0; i < k.size(); ++i) k(i) = uni(rng);
  const ArrayXXd fast = conv2d_full(a, k);
  const ArrayXXd slow = conv2_direct_full(a, k);
  CHECK((fast - slow).abs().maxCoeff() < 1e-10 * slow.abs().maxCoeff());
  const ArrayXXd same = conv2d_same(a, k);
  CHECK((same - slow.block(2, 2, 12, 9)).abs().maxCoeff() < 1e-10);
}

TEST_CASE("analytic signal of a cosine is the complex exponential") {
  const double fs = 1000.0, f0 = 50.0;
  const int n = 1000;
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::cos(kTwoPi * f0 * i / fs);
  const AnalyticSignal z = analytic_signal({x, fs});
  for (int i = 20; i < n - 20; ++i) {
    const Complex expected = std::polar(1.0, kTwoPi * f0 * i / fs);
    CHECK(std::abs(z.samples[i] - expected) < 1e-6);
  }
  // Real part equals the input exactly.
  for (int i = 0; i < n; ++i) CHECK(z.samples[i].real() == x[i]);
}

TEST_CASE("analytic signal of a constant has no quadrature") {
  VectorXd x = VectorXd::Constant(256, 1.0);
  const AnalyticSignal z = analytic_signal({x, 100.0});
  for (int i = 0; i < x.size(); ++i) CHECK(std::abs(z.samples[i].imag()) < 1e-9);
}

TEST_CASE("analytic signal reproduces the sine-cosine Hilbert pair") {
  const double fs = 1000.0, f0 = 80.0;
  const int n = 1000;
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(kTwoPi * f0 * i / fs);
  const AnalyticSignal z = analytic_signal({x, fs});
  for (int i = 20; i < n - 20; ++i) {
    const double expected = -std::cos(kTwoPi * f0 * i / fs);
    CHECK(std::abs(z.samples[i].imag() - expected) < 1e-6);
  }
}

TEST_CASE("analytic signal rejects a too-short input") {
  VectorXd x(1);
  x << 1.0;
  CHECK_THROWS_AS(analytic_signal({x, 10.0}), InvalidInput);
}

TEST_CASE("Parseval holds for the internal spectrum convention") {
  const int n = 512;
  const double dt = 1.0 / 250.0;
  const VectorXcd x = random_complex(n, 21);
  const Spectrum s = fourier_spectrum(x, dt);
  const double time_energy = x.squaredNorm() * dt;
  const double dw = kTwoPi / (n * dt);
  const double freq_energy = s.values.squaredNorm() * dw;
  CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-9));
}

TEST_CASE("analytic signal doubles the energy of zero-mean signals") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int n = 2048;
  VectorXd x(n);
  // Smooth band-limited zero-mean signal (keeps Nyquist content negligible).
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    x[i] = std::sin(kTwoPi * 37.0 * t) + 0.5 * std::cos(kTwoPi * 11.0 * t + 0.3);
  }
  x.array() -= x.mean();
  const AnalyticSignal z = analytic_signal({x, 1.0 * n});
  CHECK(z.samples.squaredNorm() == doctest::Approx(2.0 * x.squaredNorm()).epsilon(1e-6));
}

TEST_CASE("analytic signal has no negative-frequency content") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  VectorXd x(601);  // odd length: no ambiguous Nyquist bin
  for (int i = 0; i < x.size(); ++i) x[i] = uni(rng);
  const AnalyticSignal z = analytic_signal({x, 601.0});
  const Spectrum s = fourier_spectrum(z.samples, 1.0 / 601.0);
  const double peak = s.values.cwiseAbs().maxCoeff();
  for (int k = 0; k < s.omega.size(); ++k)
    if (s.omega[k] < 0.0) CHECK(std::abs(s.values[k]) < 1e-10 * peak);
}
