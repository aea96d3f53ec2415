#include "rift/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace rift {

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<char*>(b), 8);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ParseError("read_tfr: truncated header");
  return b[0] | (b[1] << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw ParseError("read_tfr: truncated header");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr uint32_t kVersion = 1;

}  // namespace

void write_tfr(const std::string& path, const TFR& tfr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("write_tfr: cannot open " + path);
  out.write("RIFT", 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(tfr.grid.num_freq));
  put_u32(out, static_cast<uint32_t>(tfr.grid.num_time));
  put_f64(out, tfr.grid.freq_hz(0));
  put_f64(out, tfr.grid.freq_hz(tfr.grid.num_freq - 1));
  put_f64(out, tfr.grid.delta_t);
  for (int i = 0; i < tfr.grid.num_freq; ++i)
    for (int j = 0; j < tfr.grid.num_time; ++j) put_f64(out, tfr.values(i, j));
  if (!out) throw InvalidInput("write_tfr: write failed for " + path);
}

TFR read_tfr(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("read_tfr: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RIFT", 4) != 0) throw ParseError("read_tfr: bad magic");
  const uint32_t version = get_u32(in);
  if (version != kVersion) throw UnsupportedFormat("read_tfr: unsupported version");
  const int num_freq = static_cast<int>(get_u32(in));
  const int num_time = static_cast<int>(get_u32(in));
  const double f_min = get_f64(in);
  const double f_max = get_f64(in);
  const double dt = get_f64(in);
  if (num_freq < 2 || num_time < 2 || num_freq > (1 << 20) || num_time > (1 << 20))
    throw ParseError("read_tfr: implausible dimensions");

  TFR tfr;
  tfr.grid.num_freq = num_freq;
  tfr.grid.num_time = num_time;
  tfr.grid.delta_t = dt;
  tfr.grid.omega_min = kTwoPi * f_min;
  tfr.grid.delta_omega = kTwoPi * (f_max - f_min) / (num_freq - 1);
  tfr.grid.sample_rate = 2.0 * f_max;
  tfr.values.resize(num_freq, num_time);
  for (int i = 0; i < num_freq; ++i)
    for (int j = 0; j < num_time; ++j) tfr.values(i, j) = get_f64(in);
  return tfr;
}

double write_pgm16(const std::string& path, const TFR& tfr, double gamma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("write_pgm16: cannot open " + path);
  const int rows = tfr.grid.num_freq;
  const int cols = tfr.grid.num_time;
  const double scale = tfr.is_signed ? tfr.values.abs().maxCoeff() : tfr.values.maxCoeff();

  out << "P5\n" << cols << " " << rows << "\n65535\n";
  for (int i = rows - 1; i >= 0; --i) {  // low frequencies at the bottom
    for (int j = 0; j < cols; ++j) {
      double v;
      if (scale <= 0.0) {
        v = tfr.is_signed ? 0.5 : 0.0;
      } else if (tfr.is_signed) {
        v = 0.5 * (tfr.values(i, j) / scale + 1.0);
      } else {
        v = tfr.values(i, j) / scale;
      }
      v = std::clamp(v, 0.0, 1.0);
      if (gamma != 1.0) v = std::pow(v, 1.0 / gamma);
      const auto pix = static_cast<uint16_t>(std::lround(v * 65535.0));
      const unsigned char b[2] = {static_cast<unsigned char>(pix >> 8),
                                  static_cast<unsigned char>(pix & 0xff)};
      out.write(reinterpret_cast<const char*>(b), 2);
    }
  }
  if (!out) throw InvalidInput("write_pgm16: write failed for " + path);
  return scale;
}

}  // namespace rift
