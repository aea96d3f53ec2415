#include "rift/core.hpp"

#include "rift/fft.hpp"

namespace rift {

void TFGrid::validate() const {
  if (num_freq < 2 || num_time < 2)
    throw InvalidInput("TFGrid: need at least 2 bins in each axis");
  if (!(delta_omega > 0.0) || !(delta_t > 0.0))
    throw InvalidInput("TFGrid: grid steps must be positive");
  if (!(sample_rate > 0.0)) throw InvalidInput("TFGrid: sample_rate must be positive");
  const double top = omega_min + (num_freq - 1) * delta_omega;
  if (top > kPi * sample_rate * (1.0 + 1e-9))
    throw InvalidInput("TFGrid: supported band exceeds Nyquist");
}

AnalyticSignal analytic_signal(const RealSignal& x) {
  const int n = static_cast<int>(x.samples.size());
  if (n < 2) throw InvalidInput("analytic_signal: signal length must be >= 2");
  if (!x.samples.allFinite())
    throw InvalidInput("analytic_signal: signal contains non-finite samples");

  VectorXcd spec = fft_forward(x.samples.cast<Complex>(), n);
  // One-sided doubling; DC (and Nyquist for even n) unscaled.
  const int half = n / 2;
  if (n % 2 == 0) {
    for (int k = 1; k < half; ++k) spec[k] *= 2.0;
    for (int k = half + 1; k < n; ++k) spec[k] = 0.0;
  } else {
    for (int k = 1; k <= half; ++k) spec[k] *= 2.0;
    for (int k = half + 1; k < n; ++k) spec[k] = 0.0;
  }
  VectorXcd z = fft_inverse(spec, n);
  // Pin the real part to the input; only the quadrature comes from the FFT.
  for (int i = 0; i < n; ++i) z[i] = Complex(x.samples[i], z[i].imag());
  return AnalyticSignal{std::move(z), x.sample_rate};
}

VectorXcd conv1d_linear(const VectorXcd& a, const VectorXcd& b) {
  if (a.size() == 0 || b.size() == 0)
    throw InvalidInput("conv1d_linear: empty input");
  const int n = static_cast<int>(a.size() + b.size()) - 1;
  const int m = next_fast_len(n);
  VectorXcd fa = fft_forward(a, m);
  VectorXcd fb = fft_forward(b, m);
  fa.array() *= fb.array();
  VectorXcd full = fft_inverse(fa, m);
  return full.head(n);
}

ArrayXXd conv2d_linear(const ArrayXXd& a, const ArrayXXd& k, ConvMode mode) {
  if (a.size() == 0 || k.size() == 0)
    throw InvalidInput("conv2d_linear: empty input");
  const int ar = static_cast<int>(a.rows()), ac = static_cast<int>(a.cols());
  const int kr = static_cast<int>(k.rows()), kc = static_cast<int>(k.cols());
  const int fr = next_fast_len(ar + kr - 1);
  const int fc = next_fast_len(ac + kc - 1);

  ArrayXXcd fa = ArrayXXcd::Zero(fr, fc);
  fa.topLeftCorner(ar, ac) = a.cast<Complex>();
  ArrayXXcd fk = ArrayXXcd::Zero(fr, fc);
  fk.topLeftCorner(kr, kc) = k.cast<Complex>();
  fft2_forward(fa);
  fft2_forward(fk);
  fa *= fk;
  fft2_inverse(fa);

  if (mode == ConvMode::Full) return fa.topLeftCorner(ar + kr - 1, ac + kc - 1).real();
  return fa.block(kr / 2, kc / 2, ar, ac).real();
}

Spectrum fourier_spectrum(const VectorXcd& x, double dt) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw InvalidInput("fourier_spectrum: signal length must be >= 2");
  Spectrum s;
  s.values = fft_forward(x, n) * (dt / std::sqrt(kTwoPi));
  s.omega.resize(n);
  const double dw = kTwoPi / (n * dt);
  for (int kk = 0; kk < n; ++kk) {
    const int signed_k = (kk <= (n - 1) / 2) ? kk : kk - n;
    s.omega[kk] = signed_k * dw;
  }
  return s;
}

}  // namespace rift
