#pragma once

#include "rift/kernels.hpp"
#include "rift/types.hpp"

#include <vector>

namespace rift {

/// Integer ratio between the grid time step and the signal sample period.
/// Throws InvalidInput when the rates are incompatible or the signal is too
/// short to cover the grid.
int grid_decimation(const TFGrid& grid, const AnalyticSignal& z);

/// Magnitude-squared fractional wavelet transform of z for one kernel,
/// sampled on the grid (rows realized by modulating the window).
TFR cfwt(const AnalyticSignal& z, const ImplementedKernel& impl, const TFGrid& grid);

/// Per-kernel transforms for a whole constellation; entries align with
/// constellation order and the result is schedule-independent.
struct CFWTBank {
  TFGrid grid;
  Constellation constellation;
  std::vector<ArrayXXd> fields;

  int size() const { return static_cast<int>(fields.size()); }
};
CFWTBank cfwt_bank(const AnalyticSignal& z, const Constellation& c, const TFGrid& grid);

/// Discrete pseudo Wigner-Ville distribution: per time step the maximal
/// symmetric lag window, transformed over lag. Signed output.
TFR wvd(const AnalyticSignal& z, const TFGrid& grid);

/// Reference transform: the isotropic kernel alone.
TFR cwt_baseline(const AnalyticSignal& z, const TFGrid& grid);

}  // namespace rift
