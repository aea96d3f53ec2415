#include "rift/deconv.hpp"

#include "rift/core.hpp"
#include "rift/fft.hpp"
#include "rift/parallel.hpp"

#include <cmath>

namespace rift {

namespace {

std::vector<int> partition(int total, int parts) {
  std::vector<int> bounds(parts + 1, 0);
  const int base = total / parts;
  const int rem = total % parts;
  for (int i = 0; i < parts; ++i) bounds[i + 1] = bounds[i] + base + (i < rem ? 1 : 0);
  return bounds;
}

/// Isotropic-TV divergence div(grad e / |grad e|): forward differences for
/// the gradient (reflective at the far edge), backward for the divergence.
ArrayXXd tv_divergence(const ArrayXXd& e) {
  const int rows = static_cast<int>(e.rows());
  const int cols = static_cast<int>(e.cols());
  ArrayXXd px = ArrayXXd::Zero(rows, cols), py = ArrayXXd::Zero(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double gx = (r + 1 < rows) ? e(r + 1, c) - e(r, c) : 0.0;
      const double gy = (c + 1 < cols) ? e(r, c + 1) - e(r, c) : 0.0;
      const double norm = std::sqrt(gx * gx + gy * gy + 1e-12);
      px(r, c) = gx / norm;
      py(r, c) = gy / norm;
    }
  ArrayXXd div(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double dx = px(r, c) - (r > 0 ? px(r - 1, c) : 0.0);
      const double dy = py(r, c) - (c > 0 ? py(r, c - 1) : 0.0);
      div(r, c) = dx + dy;
    }
  return div;
}

struct Block {
  int r0, r1, c0, c1;  // interior, in grid coordinates
  int pad_u, pad_v;    // gather halo: twice the PSF half-support
  ArrayXXd data;       // Phi_T over the window, zeros beyond the grid
  Conv2dPlan plan;

  Block(const ArrayXXd& phi_t, const ArrayXXd& psi, int r0_, int r1_, int c0_, int c1_)
      : r0(r0_),
        r1(r1_),
        c0(c0_),
        c1(c1_),
        pad_u(static_cast<int>(psi.rows()) - 1),
        pad_v(static_cast<int>(psi.cols()) - 1),
        plan(psi, r1_ - r0_ + 2 * (static_cast<int>(psi.rows()) - 1),
             c1_ - c0_ + 2 * (static_cast<int>(psi.cols()) - 1)) {
    data = gather(phi_t);
  }

  ArrayXXd gather(const ArrayXXd& field) const {
    const int rows = static_cast<int>(field.rows());
    const int cols = static_cast<int>(field.cols());
    ArrayXXd w = ArrayXXd::Zero(r1 - r0 + 2 * pad_u, c1 - c0 + 2 * pad_v);
    const int gr0 = std::max(0, r0 - pad_u), gr1 = std::min(rows, r1 + pad_u);
    const int gc0 = std::max(0, c0 - pad_v), gc1 = std::min(cols, c1 + pad_v);
    if (gr1 > gr0 && gc1 > gc0)
      w.block(gr0 - (r0 - pad_u), gc0 - (c0 - pad_v), gr1 - gr0, gc1 - gc0) =
          field.block(gr0, gc0, gr1 - gr0, gc1 - gc0);
    return w;
  }

  // One LR step on the window. Valid on the interior because the window
  // carries a double halo: denom is exact one halo in, so the correlation
  // integrates exact ratios everywhere inside the interior.
  double step(const ArrayXXd& est, const ArrayXXd& div, double lambda, double eps_div,
              ArrayXXd& out) const {
    const ArrayXXd window = gather(est);
    const ArrayXXd denom = plan.apply(window);
    ArrayXXd ratio(denom.rows(), denom.cols());
    for (Eigen::Index i = 0; i < denom.size(); ++i)
      ratio(i) = data(i) / std::max(denom(i), eps_div);
    const ArrayXXd corr = plan.apply_flipped(ratio);

    double fidelity = 0.0;
    for (int c = c0; c < c1; ++c)
      for (int r = r0; r < r1; ++r) {
        const int wr = r - r0 + pad_u, wc = c - c0 + pad_v;
        const double resid = denom(wr, wc) - data(wr, wc);
        fidelity += resid * resid;
        const double divisor = std::max(1.0 - lambda * div(r, c), eps_div);
        out(r, c) = std::max(0.0, est(r, c) * corr(wr, wc) / divisor);
      }
    return fidelity;
  }
};

RiftEstimate run_lr(const ArrayXXd& phi_t, std::vector<Block>& blocks, int k_max, double lambda,
                    const ArrayXXd& init) {
  RiftEstimate result;
  result.residual_history.reserve(k_max);
  const double peak = phi_t.maxCoeff();
  if (!(peak > 0.0)) {
    result.values = ArrayXXd::Zero(phi_t.rows(), phi_t.cols());
    result.min_iterate = 0.0;
    return result;
  }
  const double eps_div = 1e-12 * peak;

  ArrayXXd est = init;
  ArrayXXd next(est.rows(), est.cols());
  result.min_iterate = est.minCoeff();
  const int nb = static_cast<int>(blocks.size());
  std::vector<double> fid(nb, 0.0);
  for (int k = 0; k < k_max; ++k) {
    const ArrayXXd div = tv_divergence(est);
    parallel_for(nb, [&](int b) { fid[b] = blocks[b].step(est, div, lambda, eps_div, next); });
    double fidelity = 0.0;
    for (int b = 0; b < nb; ++b) fidelity += fid[b];
    result.residual_history.push_back(fidelity);
    est.swap(next);
    result.min_iterate = std::min(result.min_iterate, est.minCoeff());
    ++result.iterations_run;
  }
  result.values = std::move(est);
  return result;
}

}  // namespace

CompositeFields composites(const CFWTBank& bank, const WeightField& weights,
                           const Constellation& c, int blocks_l, int blocks_h,
                           double psi_trunc_stds) {
  if (bank.size() != weights.size() || bank.size() != c.size())
    throw InvalidInput("composites: bank, weights, and constellation sizes differ");
  if (blocks_l < 1 || blocks_h < 1) throw InvalidConfig("composites: block counts must be >= 1");

  const int rows = static_cast<int>(bank.fields[0].rows());
  const int cols = static_cast<int>(bank.fields[0].cols());
  CompositeFields cf;
  cf.blocks_l = blocks_l;
  cf.blocks_h = blocks_h;
  cf.row_start = partition(rows, blocks_l);
  cf.col_start = partition(cols, blocks_h);

  // Common PSF raster support: 4 stds of the widest Pi * Pi along each axis.
  double max_std_u = 0.0, max_std_v = 0.0;
  const double cell = c.grid.cell_scale();
  for (const auto& e : c.entries) {
    const Eigen::Matrix2d cov = kernel_covariance(e.spec);
    max_std_v = std::max(max_std_v, std::sqrt(2.0 * cov(0, 0)) / cell);
    max_std_u = std::max(max_std_u, std::sqrt(2.0 * cov(1, 1)) / cell);
  }
  cf.half_u = std::max(1, static_cast<int>(std::ceil(psi_trunc_stds * max_std_u)));
  cf.half_v = std::max(1, static_cast<int>(std::ceil(psi_trunc_stds * max_std_v)));

  // Per-entry Pi * Pi, center-cropped (or zero-embedded) into the common support.
  const int nk = bank.size();
  std::vector<ArrayXXd> psi_self(nk);
  parallel_for(nk, [&](int e) {
    const ArrayXXd& pi = c.entries[e].kernel_raster;
    const ArrayXXd full = conv2d_full(pi, pi);
    const int cu = static_cast<int>(full.rows()) / 2;
    const int cv = static_cast<int>(full.cols()) / 2;
    ArrayXXd crop = ArrayXXd::Zero(2 * cf.half_u + 1, 2 * cf.half_v + 1);
    const int du = std::min(cf.half_u, cu), dv = std::min(cf.half_v, cv);
    crop.block(cf.half_u - du, cf.half_v - dv, 2 * du + 1, 2 * dv + 1) =
        full.block(cu - du, cv - dv, 2 * du + 1, 2 * dv + 1);
    psi_self[e] = std::move(crop);
  });

  // Blockwise means of the weights; accumulate PSFs in entry order.
  cf.psi_blocks.assign(blocks_l * blocks_h,
                       ArrayXXd::Zero(2 * cf.half_u + 1, 2 * cf.half_v + 1));
  for (int e = 0; e < nk; ++e) {
    const ArrayXXd& p = weights.weights[e];
    for (int l = 0; l < blocks_l; ++l)
      for (int h = 0; h < blocks_h; ++h) {
        const int r0 = cf.row_start[l], r1 = cf.row_start[l + 1];
        const int c0 = cf.col_start[h], c1 = cf.col_start[h + 1];
        const double mean = p.block(r0, c0, r1 - r0, c1 - c0).mean();
        cf.psi_blocks[l * blocks_h + h] += mean * psi_self[e];
      }
  }

  // Phi_T with full per-pixel weights; batched so the reduction stays ordered.
  cf.phi_t = ArrayXXd::Zero(rows, cols);
  const int stride = std::max(1, thread_count());
  std::vector<ArrayXXd> slot(stride);
  for (int base = 0; base < nk; base += stride) {
    const int cnt = std::min(stride, nk - base);
    parallel_for(cnt, [&](int t) {
      slot[t] = conv2d_same(bank.fields[base + t], c.entries[base + t].kernel_raster);
    });
    for (int t = 0; t < cnt; ++t) cf.phi_t += weights.weights[base + t] * slot[t];
  }
  return cf;
}

RiftEstimate lr_tv(const ArrayXXd& phi_t, const ArrayXXd& psi, int k_max, double lambda,
                   const ArrayXXd& init) {
  if (phi_t.size() == 0 || psi.size() == 0) throw InvalidInput("lr_tv: empty input");
  if ((psi < 0.0).any() || !(psi.maxCoeff() > 0.0))
    throw InvalidInput("lr_tv: PSF must be nonnegative and nonzero");
  if (init.rows() != phi_t.rows() || init.cols() != phi_t.cols())
    throw InvalidInput("lr_tv: init dimensions differ from phi_t");
  std::vector<Block> blocks;
  blocks.emplace_back(phi_t, psi, 0, static_cast<int>(phi_t.rows()), 0,
                      static_cast<int>(phi_t.cols()));
  return run_lr(phi_t, blocks, k_max, lambda, init);
}

RiftEstimate lr_tv_blockwise(const CompositeFields& cf, int k_max, double lambda) {
  const int rows = cf.row_start.back();
  const int cols = cf.col_start.back();
  for (int l = 0; l < cf.blocks_l; ++l)
    for (int h = 0; h < cf.blocks_h; ++h) {
      const int br = cf.row_start[l + 1] - cf.row_start[l];
      const int bc = cf.col_start[h + 1] - cf.col_start[h];
      if (br < cf.half_u || bc < cf.half_v)
        throw InvalidConfig("lr_tv_blockwise: block smaller than the PSF support");
    }

  std::vector<Block> blocks;
  blocks.reserve(cf.blocks_l * cf.blocks_h);
  for (int l = 0; l < cf.blocks_l; ++l)
    for (int h = 0; h < cf.blocks_h; ++h)
      blocks.emplace_back(cf.phi_t, cf.psi_blocks[l * cf.blocks_h + h], cf.row_start[l],
                          cf.row_start[l + 1], cf.col_start[h], cf.col_start[h + 1]);

  ArrayXXd init = cf.phi_t.max(0.0);
  (void)rows;
  (void)cols;
  return run_lr(cf.phi_t, blocks, k_max, lambda, init);
}

}  // namespace rift
