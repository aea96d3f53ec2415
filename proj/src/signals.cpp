#include "rift/signals.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

namespace rift {

RealSignal synthesize(const std::vector<ComponentSpec>& components, double duration,
                      double sample_rate) {
  if (!(duration > 0.0) || !(sample_rate > 0.0))
    throw InvalidInput("synthesize: duration and sample_rate must be positive");
  const int n = static_cast<int>(std::llround(duration * sample_rate));
  if (n < 2) throw InvalidInput("synthesize: fewer than 2 samples requested");
  const double dt = 1.0 / sample_rate;

  VectorXd out = VectorXd::Zero(n);
  const double nyquist = sample_rate / 2.0;
  // Cumulative trapezoid on a 64x oversampled lattice; the raw-rate step
  // leaves O(f'' dt^2) phase error above the 1e-6 contracts.
  constexpr int kSubsteps = 64;
  for (const auto& comp : components) {
    if (!(comp.onset < comp.offset)) throw InvalidInput("synthesize: onset must precede offset");
    double phase = comp.initial_phase;
    double prev_t = comp.onset;
    double prev_f = comp.inst_freq_hz(prev_t);
    for (int i = 0; i < n; ++i) {
      const double t = i * dt;
      if (t < comp.onset || t >= comp.offset) continue;
      const double f = comp.inst_freq_hz(t);
      if (std::abs(f) > nyquist)
        throw InvalidInput("synthesize: component instantaneous frequency exceeds Nyquist");
      const double span = t - prev_t;
      if (span > 0.0) {
        double f_lo = prev_f;
        for (int s = 1; s <= kSubsteps; ++s) {
          const double ts = prev_t + span * s / kSubsteps;
          const double f_hi = (s == kSubsteps) ? f : comp.inst_freq_hz(ts);
          phase += kPi * (f_lo + f_hi) * (span / kSubsteps);
          f_lo = f_hi;
        }
      }
      prev_t = t;
      prev_f = f;
      out[i] += comp.amplitude(t) * std::sin(phase);
    }
  }
  return RealSignal{std::move(out), sample_rate};
}

namespace {

// Box-Muller over mt19937_64 draws; kept local so noise realizations do not
// depend on library distribution internals.
class GaussianDraw {
 public:
  explicit GaussianDraw(uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

 private:
  double uniform() {
    // (0, 1]: avoids log(0).
    return (static_cast<double>(rng_() >> 11) + 1.0) * (1.0 / 9007199254740993.0);
  }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

RealSignal add_awgn(const RealSignal& x, double snr_db, uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return x;
  if (!std::isfinite(snr_db)) throw InvalidInput("add_awgn: SNR must be finite or +inf");
  const int n = static_cast<int>(x.samples.size());
  const double signal_power = x.samples.squaredNorm() / n;
  const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_power);
  GaussianDraw draw(seed);
  RealSignal out = x;
  for (int i = 0; i < n; ++i) out.samples[i] += sigma * draw();
  return out;
}

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ParseError("load_wav: truncated file");
  return b[0] | (b[1] << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw ParseError("load_wav: truncated file");
  return b[0] | (b[1] << 8);
}

}  // namespace

RealSignal load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("load_wav: cannot open " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw ParseError("load_wav: missing RIFF header");
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw ParseError("load_wav: not a WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (in.read(tag, 4)) {
    uint32_t size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) throw ParseError("load_wav: fmt chunk too small");
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      in.ignore(size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      if (!in) throw ParseError("load_wav: truncated data chunk");
    } else {
      in.ignore(size + (size & 1));
    }
    if (!in) break;
  }
  if (!have_fmt) throw ParseError("load_wav: missing fmt chunk");
  if (data.empty()) throw ParseError("load_wav: missing data chunk");
  if (channels < 1 || channels > 2)
    throw UnsupportedFormat("load_wav: only mono and stereo are supported");

  const bool pcm16 = (format == 1 && bits == 16);
  const bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32)
    throw UnsupportedFormat("load_wav: only 16-bit PCM and 32-bit float are supported");

  const size_t bytes_per = bits / 8;
  const size_t frames = data.size() / (bytes_per * channels);
  if (frames < 2) throw ParseError("load_wav: fewer than 2 frames");

  VectorXd samples(frames);
  const char* p = data.data();
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      if (pcm16) {
        int16_t v;
        std::memcpy(&v, p, 2);
        acc += v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        acc += v;
      }
      p += bytes_per;
    }
    samples[i] = acc / channels;
  }
  return RealSignal{std::move(samples), static_cast<double>(rate)};
}

std::vector<ComponentCurve> reference_curves(const std::vector<ComponentSpec>& components,
                                             const TFGrid& grid) {
  std::vector<ComponentCurve> curves;
  curves.reserve(components.size());
  for (const auto& comp : components) {
    ComponentCurve curve;
    int first = -1;
    std::vector<double> freq, energy;
    for (int j = 0; j < grid.num_time; ++j) {
      const double t = grid.time(j);
      if (t < comp.onset || t >= comp.offset) {
        if (first >= 0) break;
        continue;
      }
      if (first < 0) first = j;
      freq.push_back(comp.inst_freq_hz(t));
      const double a = comp.amplitude(t);
      energy.push_back(a * a);
    }
    if (first < 0) continue;
    curve.first_col = first;
    curve.freq_hz = Eigen::Map<VectorXd>(freq.data(), freq.size());
    curve.energy = Eigen::Map<VectorXd>(energy.data(), energy.size());
    curves.push_back(std::move(curve));
  }
  return curves;
}

ArrayXXd gaussian_raster(double std_row_px, double std_col_px, double trunc_stds) {
  const int hr = std::max(1, static_cast<int>(std::ceil(trunc_stds * std_row_px)));
  const int hc = std::max(1, static_cast<int>(std::ceil(trunc_stds * std_col_px)));
  ArrayXXd k(2 * hr + 1, 2 * hc + 1);
  for (int r = -hr; r <= hr; ++r)
    for (int c = -hc; c <= hc; ++c)
      k(r + hr, c + hc) = std::exp(-0.5 * (r * r / (std_row_px * std_row_px) +
                                           c * c / (std_col_px * std_col_px)));
  k /= k.sum();
  return k;
}

namespace {

inline int reflect_index(int idx, int n) {
  // Edge-inclusive reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
  while (idx < 0 || idx >= n) {
    if (idx < 0) idx = -1 - idx;
    if (idx >= n) idx = 2 * n - 1 - idx;
  }
  return idx;
}

}  // namespace

ArrayXXd gaussian_blur_reflect(const ArrayXXd& field, double sigma_px) {
  if (sigma_px <= 0.0) return field;
  const int h = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
  VectorXd k(2 * h + 1);
  for (int i = -h; i <= h; ++i) k[i + h] = std::exp(-0.5 * i * i / (sigma_px * sigma_px));
  k /= k.sum();

  const int rows = static_cast<int>(field.rows());
  const int cols = static_cast<int>(field.cols());
  ArrayXXd tmp(rows, cols), out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int i = -h; i <= h; ++i) acc += k[i + h] * field(reflect_index(r + i, rows), c);
      tmp(r, c) = acc;
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -h; i <= h; ++i) acc += k[i + h] * tmp(r, reflect_index(c + i, cols));
      out(r, c) = acc;
    }
  return out;
}

ReferenceITFR rasterize_itfr(const std::vector<ComponentCurve>& curves, const TFGrid& grid,
                             double tube_sigma_px) {
  grid.validate();
  ReferenceITFR ref;
  ref.tube_sigma = tube_sigma_px;
  ref.component_curves = curves;
  ref.pre_blur = ArrayXXd::Zero(grid.num_freq, grid.num_time);

  const int rows = grid.num_freq;
  for (const auto& curve : curves) {
    for (int s = 0; s < curve.freq_hz.size(); ++s) {
      const int col = curve.first_col + s;
      if (col < 0 || col >= grid.num_time) continue;
      double y = (kTwoPi * curve.freq_hz[s] - grid.omega_min) / grid.delta_omega;
      if (y < 0.0 || y > rows - 1) {
        ref.clipped = true;
        y = std::clamp(y, 0.0, static_cast<double>(rows - 1));
      }
      const int r0 = static_cast<int>(std::floor(y));
      const double frac = y - r0;
      const double w = curve.energy[s];
      ref.pre_blur(r0, col) += (1.0 - frac) * w;
      if (frac > 0.0 && r0 + 1 < rows) ref.pre_blur(r0 + 1, col) += frac * w;
    }
  }

  ref.tfr.grid = grid;
  ref.tfr.values = gaussian_blur_reflect(ref.pre_blur, tube_sigma_px);
  ref.tfr.label = "reference_itfr";
  return ref;
}

Preset preset(const std::string& name) {
  auto fm = [](double center, double depth, double rate_hz) {
    return [=](double t) { return center + depth * std::sin(kTwoPi * rate_hz * t); };
  };
  auto unit = [](double) { return 1.0; };

  Preset p;
  p.name = name;
  if (name == "x1") {
    p.duration = 2.0;
    p.sample_rate = 1024.0;
    p.components = {{unit, fm(100.0, 50.0, 1.0), 0.0, p.duration, 0.0},
                    {unit, fm(80.0, 50.0, 1.0), 0.0, p.duration, 0.0}};
  } else if (name == "x4") {
    p.duration = 3.0;
    p.sample_rate = 2048.0 / 3.0;
    auto fm_chirp = [](double base) {
      return [=](double t) { return base + 30.0 * std::sin(kTwoPi * t) + 50.0 * t / 3.0; };
    };
    p.components = {{unit, fm_chirp(85.0), 0.0, p.duration, 0.0},
                    {unit, fm_chirp(65.0), 0.0, p.duration, 0.0},
                    {unit, [](double t) { return 150.0 + 50.0 * t / 3.0; }, 0.0, p.duration, 0.0},
                    {unit, [](double t) { return 10.0 + 40.0 * t / 3.0; }, 0.0, p.duration, 0.0}};
  } else if (name == "x5") {
    p.duration = 2.0;
    p.sample_rate = 1024.0;
    p.components = {{unit, fm(100.0, 50.0, 1.0), 0.0, p.duration, 0.0}};
  } else if (name == "x6") {
    p.duration = 4.0;
    p.sample_rate = 512.0;
    p.components = {
        {unit, [](double t) { return 60.0 + 30.0 * std::sin(kPi * t / 2.0); }, 0.0, p.duration, 0.0},
        {unit, [](double t) { return 30.0 + 15.0 * t; }, 0.0, p.duration, 0.0}};
  } else if (name == "z3") {
    p.duration = 2.0;
    p.sample_rate = 1024.0;
    p.components = {
        {unit, [](double t) { return 50.0 + 100.0 * t / 3.0; }, 0.0, p.duration, kPi / 2.0},
        {unit, [](double t) { return 60.0 + 100.0 * t / 3.0; }, 0.0, p.duration, kPi / 2.0}};
  } else {
    throw InvalidInput("preset: unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace rift
