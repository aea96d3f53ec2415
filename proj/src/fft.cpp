#include "rift/fft.hpp"

#ifdef RIFT_USE_FFTW
#define EIGEN_FFTW_DEFAULT
#include <fftw3.h>
#endif
#include <unsupported/Eigen/FFT>

#include <mutex>

namespace rift {

int next_fast_len(int n) {
  if (n <= 1) return 1;
  for (int candidate = n;; ++candidate) {
    int r = candidate;
    while (r % 2 == 0) r /= 2;
    while (r % 3 == 0) r /= 3;
    while (r % 5 == 0) r /= 5;
    if (r == 1) return candidate;
  }
}

namespace {

Eigen::FFT<double>& engine() {
#ifdef RIFT_USE_FFTW
  static std::once_flag planner_flag;
  std::call_once(planner_flag, [] { fftw_make_planner_thread_safe(); });
#endif
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

VectorXcd fft_forward(const VectorXcd& x, int n) {
  VectorXcd in = VectorXcd::Zero(n);
  const int m = std::min<int>(n, static_cast<int>(x.size()));
  in.head(m) = x.head(m);
  VectorXcd out(n);
  engine().fwd(out, in);
  return out;
}

VectorXcd fft_inverse(const VectorXcd& x, int n) {
  VectorXcd in = VectorXcd::Zero(n);
  const int m = std::min<int>(n, static_cast<int>(x.size()));
  in.head(m) = x.head(m);
  VectorXcd out(n);
  engine().inv(out, in);
  return out;
}

namespace {

void fft2_run(ArrayXXcd& a, bool inverse) {
  auto& fft = engine();
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  VectorXcd buf_in(rows), buf_out(rows);
  for (int c = 0; c < cols; ++c) {
    buf_in = a.col(c).matrix();
    if (inverse)
      fft.inv(buf_out, buf_in);
    else
      fft.fwd(buf_out, buf_in);
    a.col(c) = buf_out.array();
  }
  VectorXcd row_in(cols), row_out(cols);
  for (int r = 0; r < rows; ++r) {
    row_in = a.row(r).matrix().transpose();
    if (inverse)
      fft.inv(row_out, row_in);
    else
      fft.fwd(row_out, row_in);
    a.row(r) = row_out.array().transpose();
  }
}

}  // namespace

void fft2_forward(ArrayXXcd& a) { fft2_run(a, false); }
void fft2_inverse(ArrayXXcd& a) { fft2_run(a, true); }

Conv2dPlan::Conv2dPlan(const ArrayXXd& kernel, int work_rows, int work_cols)
    : rows_(next_fast_len(work_rows)), cols_(next_fast_len(work_cols)) {
  const int kr = static_cast<int>(kernel.rows());
  const int kc = static_cast<int>(kernel.cols());
  if (kr > rows_ || kc > cols_)
    throw InvalidInput("Conv2dPlan: kernel larger than work size");
  // Embed with the kernel center wrapped to (0, 0).
  const int cu = kr / 2;
  const int cv = kc / 2;
  ArrayXXcd k = ArrayXXcd::Zero(rows_, cols_);
  for (int i = 0; i < kr; ++i) {
    int di = i - cu;
    int r = (di % rows_ + rows_) % rows_;
    for (int j = 0; j < kc; ++j) {
      int dj = j - cv;
      int c = (dj % cols_ + cols_) % cols_;
      k(r, c) = kernel(i, j);
    }
  }
  fft2_forward(k);
  kernel_spectrum_ = std::move(k);
}

ArrayXXd Conv2dPlan::run(const ArrayXXd& field, bool flipped) const {
  const int fr = static_cast<int>(field.rows());
  const int fc = static_cast<int>(field.cols());
  if (fr > rows_ || fc > cols_)
    throw InvalidInput("Conv2dPlan: field larger than work size");
  ArrayXXcd work = ArrayXXcd::Zero(rows_, cols_);
  work.topLeftCorner(fr, fc) = field.cast<Complex>();
  fft2_forward(work);
  // A real kernel flipped about the origin has the conjugate spectrum.
  if (flipped)
    work *= kernel_spectrum_.conjugate();
  else
    work *= kernel_spectrum_;
  fft2_inverse(work);
  return work.topLeftCorner(fr, fc).real();
}

ArrayXXd Conv2dPlan::apply(const ArrayXXd& field) const { return run(field, false); }
ArrayXXd Conv2dPlan::apply_flipped(const ArrayXXd& field) const { return run(field, true); }

}  // namespace rift
