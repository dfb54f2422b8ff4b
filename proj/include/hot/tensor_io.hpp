#pragma once

// Binary tensor container ("HOT1") and the signal CSV format.
//
// TensorFile layout, all integers little-endian:
//   offset 0   magic     4 bytes  "HOT1"
//   offset 4   version   u32      1
//   offset 8   dtype     u8       1 = binary32
//   offset 9   ndim      u8       1..5
//   offset 10  reserved  2 bytes  zero
//   offset 12  dims      ndim x u64
//   then       payload   product(dims) x binary32, row-major

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hot {

inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;
inline constexpr std::size_t kMaxTensorRank = 5;

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
  std::vector<double> as_double() const { return {data.begin(), data.end()}; }
};

std::vector<std::uint8_t> encode_tensor(std::span<const std::uint64_t> dims,
                                        std::span<const float> data);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const float> data);
// Narrows to binary32 on the way out.
void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const double> data);
Tensor read_tensor(const std::filesystem::path& path);

// Named, equal-length real columns sampled at a common rate.
struct SignalTable {
  double sample_rate_hz = 0.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
  void validate() const;
};

// First line "# sample_rate_hz=<value>", then a header of column names, then
// one comma-separated row per sample.
std::string format_signal_csv(const SignalTable& table);
SignalTable parse_signal_csv(const std::string& text);

SignalTable read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const SignalTable& table, const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_real(double value);
double parse_real(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hot
