#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "heatlab/core/field.hpp"

namespace heatlab {

// ---------------------------------------------------------------------------
// Self-describing binary container for fields.
// Layout (little-endian):
//   magic "HLF1" | u32 version | u32 d | u32 n | f64 L | u32 r |
//   u64 n_times | f64 times[n_times] | f64 values[n_times*r*n^d]
// ---------------------------------------------------------------------------

namespace io_detail {
constexpr char kMagic[4] = {'H', 'L', 'F', '1'};

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("field container: truncated input");
  return v;
}
}  // namespace io_detail

inline void write_field(std::ostream& os, const Field& f) {
  using namespace io_detail;
  os.write(kMagic, 4);
  write_pod<std::uint32_t>(os, 1);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().dim()));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().points_per_axis()));
  write_pod<double>(os, f.grid().half_width());
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.components()));
  write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(f.time_count()));
  for (double t : f.times()) write_pod<double>(os, t);
  auto raw = f.raw();
  os.write(reinterpret_cast<const char*>(raw.data()),
           static_cast<std::streamsize>(raw.size() * sizeof(double)));
}

inline void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_field(os, f);
}

inline Field read_field(std::istream& is) {
  using namespace io_detail;
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("field container: bad magic");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != 1) throw std::runtime_error("field container: unsupported version");
  const int d = static_cast<int>(read_pod<std::uint32_t>(is));
  const int n = static_cast<int>(read_pod<std::uint32_t>(is));
  const double L = read_pod<double>(is);
  const int r = static_cast<int>(read_pod<std::uint32_t>(is));
  const auto nt = read_pod<std::uint64_t>(is);
  std::vector<double> times(nt);
  for (auto& t : times) t = read_pod<double>(is);
  Field f(SpaceGrid(d, n, L), r, times);
  auto raw = f.raw();
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(double)));
  if (!is) throw std::runtime_error("field container: truncated values");
  return f;
}

inline Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_field(is);
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting rules: fields containing comma, quote or newline are
// quoted, embedded quotes doubled).
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << escape(cells[i]);
    }
    os_ << "\r\n";
  }

  static std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += "\"\"";
      else out += ch;
    }
    out += '"';
    return out;
  }

 private:
  std::ostream& os_;
};

/// One row per node: t, coordinates, one column per component.
inline void write_field_csv(std::ostream& os, const Field& f) {
  CsvWriter csv(os);
  std::vector<std::string> header{"t"};
  for (int axis = 0; axis < f.grid().dim(); ++axis) header.push_back("x" + std::to_string(axis + 1));
  for (int c = 0; c < f.components(); ++c) header.push_back("u" + std::to_string(c + 1));
  csv.row(header);
  for (int it = 0; it < f.time_count(); ++it) {
    for (std::int64_t i = 0; i < f.grid().node_count(); ++i) {
      std::vector<std::string> cells{CsvWriter::number(f.time(it))};
      auto x = f.grid().position(i);
      for (int axis = 0; axis < f.grid().dim(); ++axis) cells.push_back(CsvWriter::number(x[axis]));
      for (int c = 0; c < f.components(); ++c) cells.push_back(CsvWriter::number(f.at(it, c, i)));
      csv.row(cells);
    }
  }
}

/// One row per node at a single instant.
inline void write_slice_csv(std::ostream& os, const FieldSlice& s, double t = 0.0) {
  CsvWriter csv(os);
  std::vector<std::string> header{"t"};
  for (int axis = 0; axis < s.grid().dim(); ++axis) header.push_back("x" + std::to_string(axis + 1));
  for (int c = 0; c < s.components(); ++c) header.push_back("u" + std::to_string(c + 1));
  csv.row(header);
  for (std::int64_t i = 0; i < s.grid().node_count(); ++i) {
    std::vector<std::string> cells{CsvWriter::number(t)};
    auto x = s.grid().position(i);
    for (int axis = 0; axis < s.grid().dim(); ++axis) cells.push_back(CsvWriter::number(x[axis]));
    for (int c = 0; c < s.components(); ++c) cells.push_back(CsvWriter::number(s.at(c, i)));
    csv.row(cells);
  }
}

/// FNV-1a 64-bit digest, used for output checksums in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t file_checksum(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot checksum: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string s = buf.str();
  return fnv1a64(s.data(), s.size());
}

}  // namespace heatlab
