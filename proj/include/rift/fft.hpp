#pragma once

#include "rift/types.hpp"

#include <Eigen/Dense>

namespace rift {

using Eigen::ArrayXXcd;

/// Smallest 5-smooth integer >= n (FFT-friendly size).
int next_fast_len(int n);

/// Forward/inverse complex FFT, zero-padded or truncated to length n.
VectorXcd fft_forward(const VectorXcd& x, int n);
VectorXcd fft_inverse(const VectorXcd& x, int n);

/// In-place 2-D complex FFT over all columns then all rows.
void fft2_forward(ArrayXXcd& a);
void fft2_inverse(ArrayXXcd& a);

/// Cached-spectrum circular convolver for repeated 2-D convolutions with a
/// fixed kernel on a fixed field size. The kernel is embedded centered at
/// the origin with wraparound, so apply() realizes "same" alignment; callers
/// choose work sizes large enough that wraparound lands where they discard.
class Conv2dPlan {
 public:
  Conv2dPlan(const ArrayXXd& kernel, int work_rows, int work_cols);

  /// Circular same-convolution of `field` (padded with zeros up to the work
  /// size). Output has field's dimensions.
  ArrayXXd apply(const ArrayXXd& field) const;
  /// Same, with the kernel flipped in both axes (the adjoint correlation).
  ArrayXXd apply_flipped(const ArrayXXd& field) const;

  int work_rows() const { return rows_; }
  int work_cols() const { return cols_; }

 private:
  ArrayXXd run(const ArrayXXd& field, bool flipped) const;
  int rows_ = 0;
  int cols_ = 0;
  ArrayXXcd kernel_spectrum_;
};

}  // namespace rift
