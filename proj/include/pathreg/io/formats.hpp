#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathreg/funcspaces/besov.hpp"
#include "pathreg/gauss/sample.hpp"
#include "pathreg/occupation/local_time.hpp"
#include "pathreg/occupation/spectrum.hpp"
#include "pathreg/sewing/sew.hpp"
#include "pathreg/yode/solve.hpp"

namespace pathreg::io {

// ---------- CSV (RFC 4180 quoting) ----------

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_quote(cells[i]);
    }
    out_ << "\r\n";
  }
  void numeric_row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(cells[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

/// SamplePath CSV: header `t, w_1, ..., w_d`.
inline void write_path_csv(const gauss::SamplePath& path, const std::string& file) {
  CsvWriter w(file);
  std::vector<std::string> header{"t"};
  for (int c = 1; c <= path.dimension; ++c) header.push_back("w_" + std::to_string(c));
  w.row(header);
  for (std::size_t i = 0; i <= path.grid.steps; ++i) {
    std::vector<double> row{path.grid.time(i)};
    for (int c = 0; c < path.dimension; ++c) row.push_back(path.values(static_cast<Eigen::Index>(i), c));
    w.numeric_row(row);
  }
}

/// Spectrum CSV: `z_1..z_d, re, im`.
inline void write_spectrum_csv(const occupation::OccupationSpectrum& spec, const std::string& file) {
  CsvWriter w(file);
  std::vector<std::string> header;
  for (int a = 1; a <= spec.grid.dim; ++a) header.push_back("z_" + std::to_string(a));
  header.push_back("re");
  header.push_back("im");
  w.row(header);
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    std::vector<double> row = spec.grid.frequency(k);
    row.push_back(spec.values[k].real());
    row.push_back(spec.values[k].imag());
    w.numeric_row(row);
  }
}

/// Local-time CSV: `x_1..x_d, L`.
inline void write_local_time_csv(const occupation::LocalTimeField& field, const std::string& file) {
  CsvWriter w(file);
  std::vector<std::string> header;
  for (int a = 1; a <= field.box.dim; ++a) header.push_back("x_" + std::to_string(a));
  header.push_back("L");
  w.row(header);
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    std::vector<double> row = field.box.point(k);
    row.push_back(field.values[k]);
    w.numeric_row(row);
  }
}

/// Sewn path CSV: `t, I_1..I_d`.
inline void write_sewn_path_csv(const sewing::SewnPath& sewn, const std::string& file) {
  CsvWriter w(file);
  std::vector<std::string> header{"t"};
  for (Eigen::Index c = 1; c <= sewn.values.front().size(); ++c) header.push_back("I_" + std::to_string(c));
  w.row(header);
  for (std::size_t i = 0; i < sewn.values.size(); ++i) {
    std::vector<double> row{sewn.time(i)};
    for (Eigen::Index c = 0; c < sewn.values[i].size(); ++c) row.push_back(sewn.values[i](c));
    w.numeric_row(row);
  }
}

/// Partition audit CSV: sampled bump values per level, `z_1..z_d, chi, rho_0, ...`.
inline void write_partition_csv(const funcspaces::DyadicPartition& part, const std::string& file) {
  CsvWriter w(file);
  std::vector<std::string> header;
  for (int a = 1; a <= part.grid.dim; ++a) header.push_back("z_" + std::to_string(a));
  header.push_back("chi");
  for (int j = 0; j <= part.j_max; ++j) header.push_back("rho_" + std::to_string(j));
  w.row(header);
  for (std::size_t k = 0; k < part.grid.total_points(); ++k) {
    std::vector<double> row = part.grid.frequency(k);
    for (int j = -1; j <= part.j_max; ++j) row.push_back(part.block(j)[k]);
    w.numeric_row(row);
  }
}

inline nlohmann::json besov_report_json(const funcspaces::BesovReport& rep) {
  nlohmann::json j;
  j["alpha"] = rep.alpha;
  j["p"] = std::isinf(rep.p) ? nlohmann::json("inf") : nlohmann::json(rep.p);
  j["q"] = std::isinf(rep.q) ? nlohmann::json("inf") : nlohmann::json(rep.q);
  j["kappa"] = rep.kappa;
  j["block_norms"] = rep.block_norms;
  j["total"] = rep.total;
  j["dropped_tail"] = rep.dropped_tail;
  return j;
}

// ---------- binary column format ----------
// 8-byte magic, version byte, u32 d, u64 n, then little-endian float64
// columns: the time column (n+1 values) followed by d value columns.

inline constexpr char kPathMagic[8] = {'P', 'A', 'T', 'H', 'C', 'O', 'L', '\0'};
inline constexpr char kJetMagic[8] = {'P', 'A', 'T', 'H', 'J', 'E', 'T', '\0'};

namespace detail {

inline void put_u32(std::ostream& o, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
  o.write(b, 4);
}
inline void put_u64(std::ostream& o, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  o.write(b, 8);
}
inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline void put_f64(std::ostream& o, double v) {
  static_assert(sizeof(double) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(o, bits);
}
inline double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

inline void write_path_binary(const gauss::SamplePath& path, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_path_binary: cannot open " + file);
  out.write(kPathMagic, 8);
  out.put(1);  // version
  detail::put_u32(out, static_cast<std::uint32_t>(path.dimension));
  detail::put_u64(out, path.grid.steps);
  for (std::size_t i = 0; i <= path.grid.steps; ++i) detail::put_f64(out, path.grid.time(i));
  for (int c = 0; c < path.dimension; ++c)
    for (std::size_t i = 0; i <= path.grid.steps; ++i)
      detail::put_f64(out, path.values(static_cast<Eigen::Index>(i), c));
}

inline gauss::SamplePath read_path_binary(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("read_path_binary: cannot open " + file);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kPathMagic, 8) != 0) throw std::runtime_error("read_path_binary: bad magic");
  const int version = in.get();
  if (version != 1) throw std::runtime_error("read_path_binary: unsupported version");
  const std::uint32_t d = detail::get_u32(in);
  const std::uint64_t n = detail::get_u64(in);
  std::vector<double> times(n + 1);
  for (auto& t : times) t = detail::get_f64(in);
  gauss::SamplePath path;
  path.grid = core::TimeGrid(times.back(), n);
  path.dimension = static_cast<int>(d);
  path.values = Eigen::MatrixXd(static_cast<Eigen::Index>(n) + 1, static_cast<Eigen::Index>(d));
  for (std::uint32_t c = 0; c < d; ++c)
    for (std::uint64_t i = 0; i <= n; ++i)
      path.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = detail::get_f64(in);
  if (!in) throw std::runtime_error("read_path_binary: truncated file");
  return path;
}

/// FlowJet binary: jet magic, version, u32 d, u32 k, u64 n, time column, then
/// for each level l = 0..k its d^{l+1} columns.
inline void write_jet_binary(const yode::FlowJet& jet, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_jet_binary: cannot open " + file);
  out.write(kJetMagic, 8);
  out.put(1);
  detail::put_u32(out, static_cast<std::uint32_t>(jet.dim));
  detail::put_u32(out, static_cast<std::uint32_t>(jet.order));
  detail::put_u64(out, jet.grid.steps);
  for (std::size_t i = 0; i <= jet.grid.steps; ++i) detail::put_f64(out, jet.grid.time(i));
  for (const auto& level : jet.levels)
    for (Eigen::Index c = 0; c < level.cols(); ++c)
      for (Eigen::Index i = 0; i < level.rows(); ++i) detail::put_f64(out, level(i, c));
}

}  // namespace pathreg::io
