#include "rift/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rift {

IPDField extract_ipd_ipc(const WeightField& weights, const Constellation& c) {
  if (weights.size() != c.size())
    throw InvalidInput("extract_ipd_ipc: weights and constellation sizes differ");
  const int rows = static_cast<int>(weights.weights[0].rows());
  const int cols = static_cast<int>(weights.weights[0].cols());

  IPDField f;
  f.raw_theta.resize(rows, cols);
  f.raw_sigma.resize(rows, cols);
  f.ipc_grid.resize(rows, cols);
  f.ipc_physical.resize(rows, cols);

  const double iso2 = c.sigma_iso * c.sigma_iso;
  for (int col = 0; col < cols; ++col)
    for (int row = 0; row < rows; ++row) {
      int best = 0;
      double best_w = weights.weights[0](row, col);
      for (int e = 1; e < weights.size(); ++e) {
        const double w = weights.weights[e](row, col);
        if (w > best_w) {
          best_w = w;
          best = e;
        }
      }
      const KernelSpec& spec = c.entries[best].spec;
      f.raw_theta(row, col) = spec.theta;
      f.raw_sigma(row, col) = spec.sigma;
      const double slope = std::tan(spec.theta);
      f.ipc_grid(row, col) = slope;
      f.ipc_physical(row, col) = slope / iso2;
    }
  f.smoothed = smooth_ipd(f.raw_theta);
  return f;
}

namespace {

double bspline3(double t) {
  t = std::abs(t);
  if (t < 1.0) return (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 6.0;
  if (t < 2.0) {
    const double u = 2.0 - t;
    return u * u * u / 6.0;
  }
  return 0.0;
}

Eigen::MatrixXd basis_matrix(int n, int knot_px) {
  const int spans = std::max(1, (n - 1 + knot_px - 1) / knot_px);
  const int count = spans + 3;  // coefficients at knots -1 .. spans + 1
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, count);
  for (int u = 0; u < n; ++u) {
    const double t = static_cast<double>(u) / knot_px;
    for (int c = 0; c < count; ++c) b(u, c) = bspline3(t - (c - 1));
  }
  return b;
}

Eigen::MatrixXd lsq_spline(const Eigen::MatrixXd& x, int knot_px) {
  const Eigen::MatrixXd bu = basis_matrix(static_cast<int>(x.rows()), knot_px);
  const Eigen::MatrixXd bv = basis_matrix(static_cast<int>(x.cols()), knot_px);
  const Eigen::MatrixXd gu = bu.transpose() * bu;
  const Eigen::MatrixXd gv = bv.transpose() * bv;
  Eigen::MatrixXd coef = gu.ldlt().solve(bu.transpose() * x * bv);
  coef = gv.ldlt().solve(coef.transpose()).transpose();
  return bu * coef * bv.transpose();
}

}  // namespace

ArrayXXd smooth_ipd(const ArrayXXd& raw_theta, int knot_px) {
  if (raw_theta.size() == 0) throw InvalidInput("smooth_ipd: empty field");
  const Eigen::MatrixXd sin2 = (2.0 * raw_theta).sin().matrix();
  const Eigen::MatrixXd cos2 = (2.0 * raw_theta).cos().matrix();
  const Eigen::MatrixXd s_sin = lsq_spline(sin2, knot_px);
  const Eigen::MatrixXd s_cos = lsq_spline(cos2, knot_px);
  ArrayXXd out(raw_theta.rows(), raw_theta.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = 0.5 * std::atan2(s_sin(i), s_cos(i));
  return out;
}

std::vector<PeakDetection> detect_peaks(const VectorXd& column, double min_height_frac,
                                        int min_separation_bins) {
  const int n = static_cast<int>(column.size());
  std::vector<PeakDetection> found;
  if (n < 3) return found;
  const double peak = column.maxCoeff();
  if (!(peak > 0.0)) return found;
  const double floor = min_height_frac * peak;

  std::vector<PeakDetection> candidates;
  for (int i = 1; i + 1 < n; ++i) {
    if (column[i] > column[i - 1] && column[i] > column[i + 1] && column[i] >= floor)
      candidates.push_back({i, column[i]});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.bin < b.bin;
  });
  for (const auto& cand : candidates) {
    bool clear = true;
    for (const auto& kept : found)
      if (std::abs(cand.bin - kept.bin) < min_separation_bins) {
        clear = false;
        break;
      }
    if (clear) found.push_back(cand);
  }
  return found;
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidInput("hungarian: matrix must be square");
  if (!cost.allFinite()) throw InvalidInput("hungarian: costs must be finite");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Shortest augmenting paths with potentials (1-based helpers).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] != 0) assignment[match[j] - 1] = j - 1;
  return assignment;
}

namespace {

struct LiveTrack {
  int id = 0;
  Eigen::Vector2d state = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  int consecutive_hits = 0;
  int consecutive_misses = 0;
  bool confirmed = false;
  std::vector<TrackPoint> history;
};

double gaussian2_likelihood(const Eigen::Vector2d& d, const Eigen::Matrix2d& s) {
  const double det = s.determinant();
  if (!(det > 0.0)) return 0.0;
  const double quad = d.dot(s.inverse() * d);
  return std::exp(-0.5 * quad) / (kTwoPi * std::sqrt(det));
}

}  // namespace

std::vector<Track> track(const TFR& itfr, const IPDField& ipd, const TrackerParams& params) {
  const int rows = static_cast<int>(itfr.values.rows());
  const int cols = static_cast<int>(itfr.values.cols());
  if ((itfr.values < 0.0).any()) throw InvalidInput("track: estimate must be nonnegative");

  Eigen::Matrix2d motion;
  motion << 1.0, 1.0, 0.0, 1.0;  // unit grid step
  Eigen::Matrix2d q;
  q << 0.25, 0.5, 0.5, 1.0;
  q *= params.process_noise * params.process_noise;
  Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
  r(0, 0) = params.sigma_y * params.sigma_y;
  r(1, 1) = params.sigma_ydot * params.sigma_ydot;

  auto velocity_at = [&](double bin, int col) {
    const int row = std::clamp(static_cast<int>(std::lround(bin)), 0, rows - 1);
    const double theta = ipd.smoothed(row, col);
    return std::clamp(std::tan(theta), -48.0, 48.0);
  };

  std::vector<LiveTrack> live;
  std::vector<Track> done;
  int next_id = 1;

  auto retire = [&](LiveTrack& t) {
    if (!t.confirmed) return;
    Track out;
    out.id = t.id;
    out.status = TrackStatus::Terminated;
    out.history = std::move(t.history);
    out.covariance = t.cov;
    done.push_back(std::move(out));
  };

  for (int col = 0; col < cols; ++col) {
    // Predict.
    for (auto& t : live) {
      t.state = motion * t.state;
      t.cov = motion * t.cov * motion.transpose() + q;
    }

    const VectorXd column = itfr.values.col(col);
    const auto peaks =
        detect_peaks(column, params.peak_min_height_frac, params.peak_min_separation);

    const int nt = static_cast<int>(live.size());
    const int nd = static_cast<int>(peaks.size());
    const int n = std::max(nt, nd);

    std::vector<char> track_hit(nt, 0);
    std::vector<char> det_used(nd, 0);

    if (n > 0 && nt > 0 && nd > 0) {
      // Observations carry the peak bin and the IPD slope at that peak.
      // Likelihood matrix padded with zeros; cost is -log of the floored value.
      Eigen::MatrixXd likelihood = Eigen::MatrixXd::Zero(n, n);
      for (int j = 0; j < nd; ++j) {
        const Eigen::Vector2d z(static_cast<double>(peaks[j].bin),
                                velocity_at(static_cast<double>(peaks[j].bin), col));
        for (int i = 0; i < nt; ++i) {
          const Eigen::Vector2d innovation = z - live[i].state;
          likelihood(j, i) = gaussian2_likelihood(innovation, live[i].cov + r);
        }
      }
      Eigen::MatrixXd cost(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          cost(j, i) = -std::log(std::max(likelihood(j, i), params.likelihood_floor));
      const std::vector<int> assign = hungarian(cost);

      for (int j = 0; j < nd; ++j) {
        const int i = assign[j];
        if (i >= nt) continue;
        if (likelihood(j, i) < params.likelihood_floor) continue;
        LiveTrack& t = live[i];
        const Eigen::Vector2d z(static_cast<double>(peaks[j].bin),
                                velocity_at(static_cast<double>(peaks[j].bin), col));
        const Eigen::Matrix2d s = t.cov + r;
        const Eigen::Matrix2d gain = t.cov * s.inverse();
        t.state += gain * (z - t.state);
        const Eigen::Matrix2d ident = Eigen::Matrix2d::Identity();
        t.cov = (ident - gain) * t.cov * (ident - gain).transpose() +
                gain * r * gain.transpose();
        track_hit[i] = 1;
        det_used[j] = 1;
      }
    }

    // Lifecycle bookkeeping.
    std::vector<LiveTrack> survivors;
    survivors.reserve(live.size() + peaks.size());
    for (int i = 0; i < nt; ++i) {
      LiveTrack& t = live[i];
      if (track_hit[i]) {
        t.consecutive_misses = 0;
        ++t.consecutive_hits;
        if (!t.confirmed && t.consecutive_hits >= params.confirm_hits) t.confirmed = true;
      } else {
        ++t.consecutive_misses;
        t.consecutive_hits = 0;
        if (!t.confirmed || t.consecutive_misses >= params.max_misses) {
          retire(t);
          continue;
        }
      }
      t.history.push_back({col, t.state[0], t.state[1],
                           t.confirmed ? TrackStatus::Confirmed : TrackStatus::Tentative});
      survivors.push_back(std::move(t));
    }
    // Births from unassigned detections.
    for (int j = 0; j < nd; ++j) {
      if (det_used[j]) continue;
      LiveTrack t;
      t.id = next_id++;
      t.state = Eigen::Vector2d(static_cast<double>(peaks[j].bin),
                                velocity_at(static_cast<double>(peaks[j].bin), col));
      t.cov = r;
      t.consecutive_hits = 1;
      t.history.push_back({col, t.state[0], t.state[1], TrackStatus::Tentative});
      survivors.push_back(std::move(t));
    }
    live.swap(survivors);
  }

  for (auto& t : live) {
    if (!t.confirmed) continue;
    Track out;
    out.id = t.id;
    out.status = TrackStatus::Confirmed;
    out.history = std::move(t.history);
    out.covariance = t.cov;
    done.push_back(std::move(out));
  }
  std::sort(done.begin(), done.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  return done;
}

TFR spline_rift(const std::vector<Track>& tracks, const TFR& itfr) {
  TFR out;
  out.grid = itfr.grid;
  out.label = "spline_rift";
  out.values = ArrayXXd::Zero(itfr.values.rows(), itfr.values.cols());
  const int rows = static_cast<int>(itfr.values.rows());

  for (const auto& tr : tracks) {
    for (const auto& pt : tr.history) {
      const int col = pt.step;
      if (col < 0 || col >= itfr.values.cols()) continue;
      const double y = std::clamp(pt.y, 0.0, static_cast<double>(rows - 1));
      const int nearest = static_cast<int>(std::lround(y));
      const double intensity = itfr.values(nearest, col);
      const int r0 = static_cast<int>(std::floor(y));
      const double frac = y - r0;
      out.values(r0, col) += (1.0 - frac) * intensity;
      if (frac > 0.0 && r0 + 1 < rows) out.values(r0 + 1, col) += frac * intensity;
    }
  }
  return out;
}

}  // namespace rift
