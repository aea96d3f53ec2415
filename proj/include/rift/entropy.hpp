#pragma once

#include "rift/transforms.hpp"
#include "rift/types.hpp"

#include <vector>

namespace rift {

/// Local Shannon entropy (bits) of the window-normalized distribution
/// p = w Phi / [Phi * w], written in convolution form. Pixels with window
/// mass below eps_z return the maximal entropy log2(w.size()).
ArrayXXd local_entropy(const ArrayXXd& phi, const ArrayXXd& w, double eps_z = 1e-300);

/// Per-pixel normalized inverse-perplexity weights over a bank.
struct WeightField {
  std::vector<ArrayXXd> weights;  // P-bar per entry, aligned with the bank
  double alpha = 0.0;
  ArrayXXd window;

  int size() const { return static_cast<int>(weights.size()); }
};

WeightField weight_field(const CFWTBank& bank, double alpha, const ArrayXXd& w);

}  // namespace rift
