#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oscal/dataio.hpp"
#include "oscal/error.hpp"

// NPY v1.0 only: magic "\x93NUMPY", version (1,0), little-endian header length,
// a Python-dict header with descr/fortran_order/shape, then a C-order payload.
// Supported dtypes: <f4 <f8 for real arrays, <i4 <i8 for labels.

namespace oscal {
namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kHeaderStart = 10;  // magic + version + header length

struct NpyHeader {
  std::string descr;
  std::vector<std::size_t> shape;  // 1 or 2 dims
  std::size_t data_offset = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

std::size_t skip_spaces(const std::string& s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

// Returns the position just after "'key'" and its ':' in the header dict.
std::size_t find_key(const std::string& header, const std::string& key) {
  const std::string quoted = "'" + key + "'";
  const std::size_t pos = header.find(quoted);
  if (pos == std::string::npos)
    throw DataError("NPY header missing key '" + key + "' (header at byte " +
                    std::to_string(kHeaderStart) + ")");
  std::size_t i = skip_spaces(header, pos + quoted.size());
  if (i >= header.size() || header[i] != ':')
    throw DataError("NPY header: expected ':' after '" + key + "'");
  return skip_spaces(header, i + 1);
}

NpyHeader parse_header(const std::string& raw, const std::string& path) {
  if (raw.size() < kHeaderStart)
    throw DataError(path + ": truncated NPY file (" + std::to_string(raw.size()) +
                    " bytes)");
  if (std::memcmp(raw.data(), kMagic, sizeof kMagic) != 0)
    throw DataError(path + ": bad NPY magic at byte 0");
  const unsigned major = static_cast<unsigned char>(raw[6]);
  const unsigned minor = static_cast<unsigned char>(raw[7]);
  if (major != 1 || minor != 0)
    throw DataError(path + ": unsupported NPY version " + std::to_string(major) +
                    "." + std::to_string(minor) + " at byte 6 (only 1.0)");
  const std::size_t hlen = static_cast<unsigned char>(raw[8]) |
                           (static_cast<std::size_t>(static_cast<unsigned char>(raw[9])) << 8);
  if (raw.size() < kHeaderStart + hlen)
    throw DataError(path + ": header length " + std::to_string(hlen) +
                    " exceeds file size (byte 8)");
  const std::string header = raw.substr(kHeaderStart, hlen);

  NpyHeader out;
  out.data_offset = kHeaderStart + hlen;

  std::size_t i = find_key(header, "descr");
  if (i >= header.size() || (header[i] != '\'' && header[i] != '"'))
    throw DataError(path + ": NPY descr is not a string");
  const char quote = header[i];
  const std::size_t close = header.find(quote, i + 1);
  if (close == std::string::npos)
    throw DataError(path + ": unterminated NPY descr string");
  out.descr = header.substr(i + 1, close - i - 1);

  i = find_key(header, "fortran_order");
  if (header.compare(i, 4, "True") == 0)
    throw DataError(path + ": Fortran-order arrays are not supported");
  if (header.compare(i, 5, "False") != 0)
    throw DataError(path + ": NPY fortran_order must be True or False");

  i = find_key(header, "shape");
  if (i >= header.size() || header[i] != '(')
    throw DataError(path + ": NPY shape is not a tuple");
  ++i;
  for (;;) {
    i = skip_spaces(header, i);
    if (i < header.size() && header[i] == ')') break;
    std::size_t digits = i;
    while (digits < header.size() && header[digits] >= '0' && header[digits] <= '9')
      ++digits;
    if (digits == i)
      throw DataError(path + ": malformed NPY shape tuple");
    out.shape.push_back(std::stoull(header.substr(i, digits - i)));
    i = skip_spaces(header, digits);
    if (i < header.size() && header[i] == ',') ++i;
  }
  if (out.shape.empty() || out.shape.size() > 2)
    throw DataError(path + ": NPY arrays must be 1-D or 2-D, got " +
                    std::to_string(out.shape.size()) + "-D");
  return out;
}

std::size_t descr_item_size(const std::string& descr) {
  if (descr == "<f4" || descr == "<i4") return 4;
  if (descr == "<f8" || descr == "<i8") return 8;
  return 0;
}

void check_payload(const NpyHeader& h, const std::string& raw,
                   const std::string& path, std::size_t count, std::size_t item) {
  const std::size_t want = h.data_offset + count * item;
  if (raw.size() != want)
    throw DataError(path + ": NPY payload is " +
                    std::to_string(raw.size() - h.data_offset) + " bytes at byte " +
                    std::to_string(h.data_offset) + ", expected " +
                    std::to_string(count * item));
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;  // little-endian host
}

std::string header_bytes(const std::string& dict) {
  std::string header = dict;
  // pad to a 64-byte multiple, '\n'-terminated
  const std::size_t unpadded = kHeaderStart + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::string out(kMagic, sizeof kMagic);
  out += '\x01';
  out += '\x00';
  const std::size_t hlen = header.size();
  if (hlen > 0xFFFF) throw DataError("NPY header too large");
  out += static_cast<char>(hlen & 0xFF);
  out += static_cast<char>((hlen >> 8) & 0xFF);
  out += header;
  return out;
}

}  // namespace

Matrix load_npy(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  const NpyHeader h = parse_header(raw, path.string());

  if (h.descr != "<f4" && h.descr != "<f8")
    throw DataError(path.string() + ": unsupported dtype '" + h.descr +
                    "' for a real array (need <f4 or <f8)");
  const std::size_t item = descr_item_size(h.descr);
  const std::size_t rows = h.shape[0];
  const std::size_t cols = h.shape.size() == 2 ? h.shape[1] : 1;
  check_payload(h, raw, path.string(), rows * cols, item);

  Matrix m(rows, cols);
  const char* p = raw.data() + h.data_offset;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const double v = item == 4 ? static_cast<double>(load_le<float>(p + 4 * i))
                               : load_le<double>(p + 8 * i);
    if (!std::isfinite(v))
      throw DataError(path.string() + ": non-finite value at byte " +
                      std::to_string(h.data_offset + item * i));
    m.data()[i] = v;
  }
  return m;
}

void save_npy(const Matrix& m, const std::filesystem::path& path) {
  if (m.rows() == 0 || m.cols() == 0) throw DataError("empty array");
  if (!m.all_finite()) throw DataError("refusing to save non-finite values");
  std::string out = header_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                                 std::to_string(m.rows()) + ", " +
                                 std::to_string(m.cols()) + "), }");
  const std::size_t bytes = m.size() * sizeof(double);
  const std::size_t base = out.size();
  out.resize(base + bytes);
  std::memcpy(out.data() + base, m.data(), bytes);
  write_file(path, out);
}

std::vector<std::int64_t> load_npy_labels(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  const NpyHeader h = parse_header(raw, path.string());

  if (h.descr != "<i4" && h.descr != "<i8")
    throw DataError(path.string() + ": unsupported dtype '" + h.descr +
                    "' for labels (need <i4 or <i8)");
  if (h.shape.size() != 1)
    throw DataError(path.string() + ": labels must be a 1-D array");
  const std::size_t item = descr_item_size(h.descr);
  check_payload(h, raw, path.string(), h.shape[0], item);

  std::vector<std::int64_t> labels(h.shape[0]);
  const char* p = raw.data() + h.data_offset;
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] = item == 4 ? static_cast<std::int64_t>(load_le<std::int32_t>(p + 4 * i))
                          : load_le<std::int64_t>(p + 8 * i);
  return labels;
}

void save_npy_labels(std::span<const std::int64_t> v,
                     const std::filesystem::path& path) {
  if (v.empty()) throw DataError("empty array");
  std::string out = header_bytes("{'descr': '<i8', 'fortran_order': False, 'shape': (" +
                                 std::to_string(v.size()) + ",), }");
  const std::size_t bytes = v.size() * sizeof(std::int64_t);
  const std::size_t base = out.size();
  out.resize(base + bytes);
  std::memcpy(out.data() + base, v.data(), bytes);
  write_file(path, out);
}

Matrix load_array(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[6] = {};
  in.read(magic, sizeof magic);
  const bool is_npy =
      in.gcount() == sizeof magic && std::memcmp(magic, kMagic, sizeof magic) == 0;
  in.close();
  return is_npy ? load_npy(path) : load_csv(path);
}

void save_array(const Matrix& m, const std::filesystem::path& path, ArrayFormat fmt) {
  fmt == ArrayFormat::Npy ? save_npy(m, path) : save_csv(m, path);
}

std::vector<std::int64_t> load_label_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[6] = {};
  in.read(magic, sizeof magic);
  const bool is_npy =
      in.gcount() == sizeof magic && std::memcmp(magic, kMagic, sizeof magic) == 0;
  in.close();
  return is_npy ? load_npy_labels(path) : load_csv_labels(path);
}

LabelVector load_labels(const std::filesystem::path& path, std::int64_t num_known,
                        bool allow_unknown) {
  return LabelVector(load_label_values(path), num_known, allow_unknown);
}

void save_labels(std::span<const std::int64_t> labels,
                 const std::filesystem::path& path, ArrayFormat fmt) {
  fmt == ArrayFormat::Npy ? save_npy_labels(labels, path) : save_csv_labels(labels, path);
}

}  // namespace oscal
