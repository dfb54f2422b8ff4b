#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hot {

// One "key=value" line from a config-style text file.
struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// Splits UTF-8 text into key=value entries. Blank lines and '#' comments are
// skipped; duplicate keys are rejected.
std::vector<KeyValue> parse_key_values(const std::string& text);

std::vector<double> parse_real_list(const std::string& text);

// Pipeline hyperparameters. Defaults follow the reference training setup
// (beta 0.05, lambda_h 0.3, 40 Sinkhorn iterations, gamma 0.1, 0.7-4.0 Hz).
struct RunConfig {
  double beta = 0.05;
  double lambda_h = 0.3;
  double gamma = 0.1;
  std::size_t sinkhorn_iters = 40;
  double sinkhorn_epsilon = 0.05;
  std::size_t window_len = 64;
  double band_min_hz = 0.7;
  double band_max_hz = 4.0;
  double eps_h = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);
// Writes every field; parse_config_text(format_config(c)) == c.
std::string format_config(const RunConfig& config);

}  // namespace hot
