#include "rift/entropy.hpp"

#include "rift/core.hpp"
#include "rift/fft.hpp"
#include "rift/parallel.hpp"

#include <cmath>

namespace rift {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;  // 1 / ln 2

ArrayXXd xlog2x(const ArrayXXd& a) {
  // 0 log 0 = 0 throughout.
  return (a > 0.0).select(a * a.log() * kInvLn2, ArrayXXd::Zero(a.rows(), a.cols()));
}

ArrayXXd entropy_from_convs(const ArrayXXd& z, const ArrayXXd& a_plus_b, double eps_z,
                            double h_max) {
  // FFT convolution noise (~1e-15 of the peak) swamps the quotient in
  // near-silent regions, so the silence guard is relative to the peak mass;
  // those pixels take the maximal entropy and hence negligible weight.
  const double guard = std::max(eps_z, 1e-12 * z.maxCoeff());
  ArrayXXd h(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zz = z(i);
    if (!(zz > guard)) {
      h(i) = h_max;
    } else {
      h(i) = std::clamp(std::log2(zz) - a_plus_b(i) / zz, 0.0, h_max);
    }
  }
  return h;
}

}  // namespace

ArrayXXd local_entropy(const ArrayXXd& phi, const ArrayXXd& w, double eps_z) {
  if (phi.size() == 0 || w.size() == 0) throw InvalidInput("local_entropy: empty input");
  if ((w <= 0.0).any()) throw InvalidInput("local_entropy: window must be strictly positive");
  const ArrayXXd w_log = xlog2x(w);
  const ArrayXXd z = conv2d_same(phi, w);
  const ArrayXXd a = conv2d_same(phi, w_log);
  const ArrayXXd b = conv2d_same(xlog2x(phi), w);
  const double h_max = std::log2(static_cast<double>(w.size()));
  return entropy_from_convs(z, a + b, eps_z, h_max);
}

WeightField weight_field(const CFWTBank& bank, double alpha, const ArrayXXd& w) {
  if (bank.size() == 0) throw InvalidInput("weight_field: empty bank");
  if ((w <= 0.0).any()) throw InvalidInput("weight_field: window must be strictly positive");

  const int rows = static_cast<int>(bank.fields[0].rows());
  const int cols = static_cast<int>(bank.fields[0].cols());
  const int work_r = rows + static_cast<int>(w.rows());
  const int work_c = cols + static_cast<int>(w.cols());
  const ArrayXXd w_log = xlog2x(w);
  const Conv2dPlan plan_w(w, work_r, work_c);
  const Conv2dPlan plan_wlog(w_log, work_r, work_c);
  const double h_max = std::log2(static_cast<double>(w.size()));

  WeightField field;
  field.alpha = alpha;
  field.window = w;
  field.weights.resize(bank.size());

  parallel_for(bank.size(), [&](int e) {
    const ArrayXXd& phi = bank.fields[e];
    const ArrayXXd z = plan_w.apply(phi);
    const ArrayXXd ab = plan_wlog.apply(phi) + plan_w.apply(xlog2x(phi));
    const ArrayXXd h = entropy_from_convs(z, ab, 1e-300, h_max);
    field.weights[e] = (-alpha * h).unaryExpr([](double v) { return std::exp2(v); });
  });

  // Normalize per pixel; accumulation runs in entry order for determinism.
  ArrayXXd denom = ArrayXXd::Zero(rows, cols);
  for (int e = 0; e < bank.size(); ++e) denom += field.weights[e];
  const double uniform = 1.0 / bank.size();
  for (int e = 0; e < bank.size(); ++e) {
    ArrayXXd& p = field.weights[e];
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p(i) = denom(i) > 0.0 ? p(i) / denom(i) : uniform;
  }
  return field;
}

}  // namespace rift
