#pragma once

#include "rift/signals.hpp"
#include "rift/types.hpp"

#include <string>
#include <vector>

namespace rift {

struct MetricsReport {
  std::string method;
  double snr_db = 0.0;
  double bc = 0.0;
  double js = 0.0;
  double rer = 0.0;
};

/// Bhattacharyya overlap sum sqrt(P Q) of the self-normalized fields.
double bhattacharyya(const ArrayXXd& r, const ArrayXXd& c);
/// Jensen-Shannon divergence, log base 2, in [0, 1].
double jensen_shannon(const ArrayXXd& r, const ArrayXXd& c);
/// Fraction of normalized energy inside the tube weights W = C / max C.
double ridge_energy_ratio(const ArrayXXd& r, const ArrayXXd& c);

/// TFR-level wrappers use |R| (signed distributions enter by magnitude)
/// against the blurred reference raster.
double bhattacharyya(const TFR& r, const ReferenceITFR& ref);
double jensen_shannon(const TFR& r, const ReferenceITFR& ref);
double ridge_energy_ratio(const TFR& r, const ReferenceITFR& ref);

MetricsReport evaluate(const TFR& r, const ReferenceITFR& ref, const std::string& method,
                       double snr_db);

/// Min-max normalization per metric across the reports (Jensen-Shannon
/// inverted), averaged over the three metrics. Zero-range columns score 0.5.
std::vector<double> combined_score(const std::vector<MetricsReport>& reports);

}  // namespace rift
