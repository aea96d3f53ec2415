#pragma once

#include "rift/types.hpp"

namespace rift {

enum class ConvMode { Full, Same };

/// Analytic signal via frequency-domain one-sided doubling. The real part
/// equals the input exactly; DC and Nyquist bins are left unscaled.
AnalyticSignal analytic_signal(const RealSignal& x);

/// Full linear convolution of complex sequences, length |a|+|b|-1.
VectorXcd conv1d_linear(const VectorXcd& a, const VectorXcd& b);

/// Linear 2-D convolution. Same mode centers the output on A's support
/// (kernel center at rows/2, cols/2).
ArrayXXd conv2d_linear(const ArrayXXd& a, const ArrayXXd& k, ConvMode mode);

inline ArrayXXd conv2d_full(const ArrayXXd& a, const ArrayXXd& k) {
  return conv2d_linear(a, k, ConvMode::Full);
}
inline ArrayXXd conv2d_same(const ArrayXXd& a, const ArrayXXd& k) {
  return conv2d_linear(a, k, ConvMode::Same);
}

/// Unitary-in-energy spectrum for the internal e^{-j w t} convention:
/// Xbar_k = dt/sqrt(2 pi) * DFT(x)_k, with sum |x|^2 dt = sum |Xbar|^2 dw.
struct Spectrum {
  VectorXcd values;
  VectorXd omega;  // rad/s, DFT order (nonnegative bins first)
};
Spectrum fourier_spectrum(const VectorXcd& x, double dt);

}  // namespace rift
