#include "rift/transforms.hpp"

#include "rift/fft.hpp"
#include "rift/parallel.hpp"

#include <cmath>

namespace rift {

int grid_decimation(const TFGrid& grid, const AnalyticSignal& z) {
  grid.validate();
  if (!(z.sample_rate > 0.0)) throw InvalidInput("transforms: signal sample rate must be positive");
  const double sample_dt = 1.0 / z.sample_rate;
  const double ratio = grid.delta_t / sample_dt;
  const int d = static_cast<int>(std::lround(ratio));
  if (d < 1 || std::abs(ratio - d) > 1e-6 * ratio)
    throw InvalidInput("transforms: grid time step is not an integer multiple of the sample period");
  const long needed = static_cast<long>(grid.num_time - 1) * d;
  if (needed >= z.samples.size())
    throw InvalidInput("transforms: signal too short for the requested grid");
  return d;
}

TFR cfwt(const AnalyticSignal& z, const ImplementedKernel& impl, const TFGrid& grid) {
  const int d = grid_decimation(grid, z);
  const int n = static_cast<int>(z.samples.size());
  const double dt = 1.0 / z.sample_rate;

  const int half = window_half_len(impl, grid.sigma_iso(), dt);
  const VectorXcd taps = make_window(impl, grid.sigma_iso(), dt, half);
  VectorXcd w_arr = taps.conjugate();  // convolution kernel Omega*

  const int len = next_fast_len(n + 2 * half);
  const VectorXcd w_fft = fft_forward(w_arr, len);

  TFR out;
  out.grid = grid;
  out.label = "cfwt";
  out.values.resize(grid.num_freq, grid.num_time);

  VectorXcd zmod(n);
  for (int i = 0; i < grid.num_freq; ++i) {
    const double omega = grid.omega(i);
    // z . e^{-j omega p dt} by incremental rotation, renormalized periodically.
    const Complex step = std::polar(1.0, -omega * dt);
    Complex rot(1.0, 0.0);
    for (int p = 0; p < n; ++p) {
      zmod[p] = z.samples[p] * rot;
      rot *= step;
      if ((p & 511) == 511) rot /= std::abs(rot);
    }
    VectorXcd spec = fft_forward(zmod, len);
    spec.array() *= w_fft.array();
    const VectorXcd conv = fft_inverse(spec, len);
    for (int j = 0; j < grid.num_time; ++j) {
      const Complex v = dt * conv[j * d + half];
      out.values(i, j) = std::norm(v);
    }
  }
  return out;
}

CFWTBank cfwt_bank(const AnalyticSignal& z, const Constellation& c, const TFGrid& grid) {
  CFWTBank bank;
  bank.grid = grid;
  bank.constellation = c;
  bank.fields.resize(c.size());
  parallel_for(c.size(), [&](int e) { bank.fields[e] = cfwt(z, c.entries[e].impl, grid).values; });
  return bank;
}

TFR wvd(const AnalyticSignal& z, const TFGrid& grid) {
  const int d = grid_decimation(grid, z);
  const int n = static_cast<int>(z.samples.size());
  const double dt = 1.0 / z.sample_rate;
  const int num_freq = grid.num_freq;
  const int num_time = grid.num_time;

  // Lag samples beyond tau = pi / delta_omega carry frequency detail finer
  // than the grid can represent (the length-U lag FFT view), so the maximal
  // symmetric window is additionally capped at that bound.
  const int k_grid = std::max(1, static_cast<int>(kPi / (2.0 * dt * grid.delta_omega)));
  int k_max = 0;
  for (int j = 0; j < num_time; ++j) {
    const int js = j * d;
    k_max = std::max(k_max, std::min({js, n - 1 - js, k_grid}));
  }

  // r_j[k] = z[js + k] conj(z[js - k]) over the symmetric window.
  Eigen::MatrixXcd lag = Eigen::MatrixXcd::Zero(k_max + 1, num_time);
  parallel_for(num_time, [&](int j) {
    const int js = j * d;
    const int kj = std::min({js, n - 1 - js, k_grid});
    for (int k = 0; k <= kj; ++k) lag(k, j) = z.samples[js + k] * std::conj(z.samples[js - k]);
  });

  Eigen::MatrixXcd phases(num_freq, k_max + 1);
  parallel_for(num_freq, [&](int i) {
    const double omega = grid.omega(i);
    for (int k = 0; k <= k_max; ++k)
      phases(i, k) = std::polar(1.0, -2.0 * omega * k * dt);
  });

  const Eigen::MatrixXcd prod = phases * lag;

  TFR out;
  out.grid = grid;
  out.label = "wvd";
  out.is_signed = true;
  out.values.resize(num_freq, num_time);
  const double scale = dt / kPi;
  for (int j = 0; j < num_time; ++j) {
    const double r0 = lag(0, j).real();
    for (int i = 0; i < num_freq; ++i)
      out.values(i, j) = scale * (2.0 * prod(i, j).real() - r0);
  }
  return out;
}

TFR cwt_baseline(const AnalyticSignal& z, const TFGrid& grid) {
  TFR out = cfwt(z, implement_kernel(KernelSpec{1.0, 0.0}), grid);
  out.label = "cwt";
  return out;
}

}  // namespace rift
