#include "hot/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hot/error.hpp"

namespace hot {
namespace {

constexpr char kMagic[4] = {'H', 'O', 'T', '1'};
constexpr std::size_t kHeaderBytes = 12;

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename U>
U get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(bytes[offset + i]) << (8 * i);
  }
  return value;
}

std::uint64_t checked_product(std::span<const std::uint64_t> dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > UINT64_MAX / d) {
      throw Error(ErrorCode::invalid_argument, "tensor dimensions overflow");
    }
    n *= d;
  }
  return n;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

}  // namespace

std::size_t Tensor::element_count() const {
  return static_cast<std::size_t>(checked_product(dims));
}

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint64_t> dims,
                                        std::span<const float> data) {
  if (dims.empty() || dims.size() > kMaxTensorRank) {
    throw Error(ErrorCode::invalid_argument,
                "tensor rank must be in [1, 5], got " + std::to_string(dims.size()));
  }
  if (checked_product(dims) != data.size()) {
    throw Error(ErrorCode::shape_mismatch, "data length " + std::to_string(data.size()) +
                                               " does not match product of dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * dims.size() + 4 * data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kTensorVersion);
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(dims.size()));
  out.push_back(0);
  out.push_back(0);
  for (auto d : dims) put_le<std::uint64_t>(out, d);
  for (float v : data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::truncated_payload, "file shorter than the fixed header");
  }
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw Error(ErrorCode::bad_magic, "expected \"HOT1\"");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kTensorVersion) {
    throw Error(ErrorCode::bad_version, "unsupported version " + std::to_string(version));
  }
  if (bytes[8] != kDtypeFloat32) {
    throw Error(ErrorCode::unsupported_dtype, "dtype code " + std::to_string(bytes[8]));
  }
  const std::size_t ndim = bytes[9];
  if (ndim == 0 || ndim > kMaxTensorRank) {
    throw Error(ErrorCode::invalid_argument, "rank " + std::to_string(ndim) + " outside [1, 5]");
  }
  if (bytes[10] != 0 || bytes[11] != 0) {
    throw Error(ErrorCode::parse, "reserved header bytes are not zero");
  }
  if (bytes.size() < kHeaderBytes + 8 * ndim) {
    throw Error(ErrorCode::truncated_payload, "file ends inside the dimension list");
  }
  Tensor t;
  for (std::size_t i = 0; i < ndim; ++i) {
    t.dims.push_back(get_le<std::uint64_t>(bytes, kHeaderBytes + 8 * i));
  }
  const std::uint64_t count = checked_product(t.dims);
  const std::size_t offset = kHeaderBytes + 8 * ndim;
  const std::size_t available = bytes.size() - offset;
  if (count > available / 4) {
    throw Error(ErrorCode::truncated_payload, "expected " + std::to_string(count) +
                                                  " scalars, file holds " +
                                                  std::to_string(available / 4));
  }
  if (available != count * 4) {
    throw Error(ErrorCode::parse, "trailing bytes after payload");
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset + 4 * i));
  }
  return t;
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const float> data) {
  const auto bytes = encode_tensor(dims, data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const double> data) {
  std::vector<float> narrowed(data.begin(), data.end());
  write_tensor(path, dims, std::span<const float>(narrowed));
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

const std::vector<double>& SignalTable::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::invalid_argument, "no column named " + name);
  return columns[static_cast<std::size_t>(it - names.begin())];
}

void SignalTable::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(ErrorCode::out_of_range, "sample_rate_hz must be positive");
  }
  if (columns.empty() || names.size() != columns.size()) {
    throw Error(ErrorCode::invalid_argument, "signal table needs named columns");
  }
  for (const auto& c : columns) {
    if (c.size() != columns.front().size()) {
      throw Error(ErrorCode::shape_mismatch, "columns differ in length");
    }
  }
  if (rows() < 2) throw Error(ErrorCode::invalid_argument, "columns need at least 2 samples");
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(std::begin(buf), std::end(buf), value);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  const std::string s = trim(text);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (s.empty() || res.ec != std::errc() || res.ptr != last) {
    throw Error(ErrorCode::parse, "not a number: \"" + s + "\"");
  }
  return value;
}

std::string format_signal_csv(const SignalTable& table) {
  table.validate();
  std::string out = "# sample_rate_hz=" + format_real(table.sample_rate_hz) + "\n";
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    if (c) out += ',';
    out += table.names[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += format_real(table.columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

SignalTable parse_signal_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SignalTable table;

  const std::string prefix = "sample_rate_hz=";
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, "empty signal file");
  std::string first = trim(line);
  if (!first.empty() && first.front() == '#') first = trim(first.substr(1));
  if (first.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::parse, "first line must be \"# sample_rate_hz=<value>\"");
  }
  table.sample_rate_hz = parse_real(first.substr(prefix.size()));

  if (!std::getline(in, line) || trim(line).empty()) {
    throw Error(ErrorCode::parse, "missing column header");
  }
  table.names = split(trim(line), ',');
  for (const auto& n : table.names) {
    if (n.empty()) throw Error(ErrorCode::parse, "empty column name");
  }
  table.columns.resize(table.names.size());

  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != table.names.size()) {
      throw Error(ErrorCode::parse, "ragged row at line " + std::to_string(lineno));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      table.columns[c].push_back(parse_real(cells[c]));
    }
  }
  table.validate();
  return table;
}

SignalTable read_signal_csv(const std::filesystem::path& path) {
  return parse_signal_csv(read_text_file(path));
}

void write_signal_csv(const SignalTable& table, const std::filesystem::path& path) {
  write_text_file(path, format_signal_csv(table));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace hot
