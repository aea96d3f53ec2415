#pragma once

#include "rift/entropy.hpp"
#include "rift/transforms.hpp"
#include "rift/types.hpp"

#include <vector>

namespace rift {

/// Weighted data field Phi_T and per-block locally invariant PSFs.
struct CompositeFields {
  ArrayXXd phi_t;
  std::vector<ArrayXXd> psi_blocks;  // L x H rasters of (2 half_u + 1) x (2 half_v + 1)
  int blocks_l = 1;
  int blocks_h = 1;
  int half_u = 0;
  int half_v = 0;
  std::vector<int> row_start;  // blocks_l + 1 boundaries
  std::vector<int> col_start;  // blocks_h + 1 boundaries
};

/// Phi_T = sum P-bar (Phi * Pi) with full per-pixel weights; per-block PSFs
/// Psi-hat = sum <P-bar> (Pi * Pi) with block-averaged weights, cropped at
/// psi_trunc_stds of the widest composite kernel per axis.
CompositeFields composites(const CFWTBank& bank, const WeightField& weights,
                           const Constellation& c, int blocks_l, int blocks_h,
                           double psi_trunc_stds = 4.0);

struct RiftEstimate {
  ArrayXXd values;
  int iterations_run = 0;
  std::vector<double> residual_history;  // sum (est * Psi - Phi_T)^2 per iteration
  double min_iterate = 0.0;              // smallest value seen across iterations
};

/// Multiplicative Lucy-Richardson update with isotropic total-variation
/// divisor; fixed iteration count, positivity clamped after each step.
RiftEstimate lr_tv(const ArrayXXd& phi_t, const ArrayXXd& psi, int k_max, double lambda,
                   const ArrayXXd& init);

/// Per-iteration blockwise update: every block gathers its doubly padded
/// window from the current global iterate, applies one LR-TV step with its
/// block PSF, and writes back its interior. Schedule independent.
RiftEstimate lr_tv_blockwise(const CompositeFields& cf, int k_max, double lambda);

}  // namespace rift
