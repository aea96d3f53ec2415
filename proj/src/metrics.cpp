#include "rift/metrics.hpp"

#include <cmath>

namespace rift {

namespace {

ArrayXXd normalized(const ArrayXXd& a, const char* what) {
  if (a.size() == 0) throw UndefinedMetric(std::string(what) + ": empty field");
  if ((a < 0.0).any()) throw UndefinedMetric(std::string(what) + ": negative values");
  const double total = a.sum();
  if (!(total > 0.0)) throw UndefinedMetric(std::string(what) + ": all-zero field");
  return a / total;
}

void check_same_shape(const ArrayXXd& r, const ArrayXXd& c) {
  if (r.rows() != c.rows() || r.cols() != c.cols())
    throw UndefinedMetric("metrics: fields live on different grids");
}

}  // namespace

double bhattacharyya(const ArrayXXd& r, const ArrayXXd& c) {
  check_same_shape(r, c);
  const ArrayXXd p = normalized(r, "bhattacharyya");
  const ArrayXXd q = normalized(c, "bhattacharyya");
  return (p * q).sqrt().sum();
}

double jensen_shannon(const ArrayXXd& r, const ArrayXXd& c) {
  check_same_shape(r, c);
  const ArrayXXd p = normalized(r, "jensen_shannon");
  const ArrayXXd q = normalized(c, "jensen_shannon");
  constexpr double inv_ln2 = 1.4426950408889634;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p(i) + q(i));
    if (p(i) > 0.0) acc += 0.5 * p(i) * std::log(p(i) / m) * inv_ln2;
    if (q(i) > 0.0) acc += 0.5 * q(i) * std::log(q(i) / m) * inv_ln2;
  }
  return acc;
}

double ridge_energy_ratio(const ArrayXXd& r, const ArrayXXd& c) {
  check_same_shape(r, c);
  const ArrayXXd p = normalized(r, "ridge_energy_ratio");
  const double peak = c.maxCoeff();
  if (!(peak > 0.0)) throw UndefinedMetric("ridge_energy_ratio: all-zero reference");
  return (p * (c / peak)).sum();
}

double bhattacharyya(const TFR& r, const ReferenceITFR& ref) {
  return bhattacharyya(r.values.abs().eval(), ref.tfr.values);
}
double jensen_shannon(const TFR& r, const ReferenceITFR& ref) {
  return jensen_shannon(r.values.abs().eval(), ref.tfr.values);
}
double ridge_energy_ratio(const TFR& r, const ReferenceITFR& ref) {
  return ridge_energy_ratio(r.values.abs().eval(), ref.tfr.values);
}

MetricsReport evaluate(const TFR& r, const ReferenceITFR& ref, const std::string& method,
                       double snr_db) {
  MetricsReport rep;
  rep.method = method;
  rep.snr_db = snr_db;
  rep.bc = bhattacharyya(r, ref);
  rep.js = jensen_shannon(r, ref);
  rep.rer = ridge_energy_ratio(r, ref);
  return rep;
}

std::vector<double> combined_score(const std::vector<MetricsReport>& reports) {
  const int n = static_cast<int>(reports.size());
  if (n < 2) throw UndefinedMetric("combined_score: need at least 2 entries");

  auto column = [&](auto getter, bool invert) {
    std::vector<double> score(n, 0.5);
    double lo = getter(reports[0]), hi = lo;
    for (const auto& rep : reports) {
      lo = std::min(lo, getter(rep));
      hi = std::max(hi, getter(rep));
    }
    const double range = hi - lo;
    if (range > 0.0)
      for (int i = 0; i < n; ++i) {
        const double v = (getter(reports[i]) - lo) / range;
        score[i] = invert ? 1.0 - v : v;
      }
    return score;
  };

  const auto bc = column([](const MetricsReport& r) { return r.bc; }, false);
  const auto js = column([](const MetricsReport& r) { return r.js; }, true);
  const auto rer = column([](const MetricsReport& r) { return r.rer; }, false);
  std::vector<double> combined(n);
  for (int i = 0; i < n; ++i) combined[i] = (bc[i] + js[i] + rer[i]) / 3.0;
  return combined;
}

}  // namespace rift
