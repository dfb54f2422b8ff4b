#include "hot/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "hot/error.hpp"
#include "hot/tensor_io.hpp"

namespace hot {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_unsigned(const KeyValue& kv) {
  std::uint64_t value = 0;
  const auto& s = kv.value;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::parse, kv.key + " expects a non-negative integer, got \"" + s + "\"");
  }
  return value;
}

double parse_value(const KeyValue& kv) {
  try {
    return parse_real(kv.value);
  } catch (const Error&) {
    throw Error(ErrorCode::parse,
                kv.key + " expects a number, got \"" + kv.value + "\" (line " +
                    std::to_string(kv.line) + ")");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::out_of_range, what);
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected key=value");
    }
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (kv.key.empty()) {
      throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": empty key");
    }
    if (!seen.insert(kv.key).second) {
      throw Error(ErrorCode::parse, "duplicate key " + kv.key);
    }
    entries.push_back(std::move(kv));
  }
  return entries;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) values.push_back(parse_real(trim(cell)));
  if (values.empty()) throw Error(ErrorCode::parse, "empty list");
  return values;
}

void RunConfig::validate() const {
  require(std::isfinite(beta) && beta >= 0.0 && beta < 1.0, "beta must lie in [0, 1)");
  require(std::isfinite(lambda_h) && lambda_h >= 0.0, "lambda_h must be >= 0");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
  require(sinkhorn_iters >= 1, "sinkhorn_iters must be >= 1");
  require(std::isfinite(sinkhorn_epsilon) && sinkhorn_epsilon > 0.0,
          "sinkhorn_epsilon must be > 0");
  require(window_len >= 4, "window_len must be >= 4");
  require(std::isfinite(band_min_hz) && band_min_hz > 0.0, "band_min_hz must be > 0");
  require(std::isfinite(band_max_hz) && band_max_hz > band_min_hz,
          "band_max_hz must exceed band_min_hz");
  require(std::isfinite(eps_h) && eps_h > 0.0, "eps_h must be > 0");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  for (const auto& kv : parse_key_values(text)) {
    if (kv.key == "beta") {
      c.beta = parse_value(kv);
    } else if (kv.key == "lambda_h") {
      c.lambda_h = parse_value(kv);
    } else if (kv.key == "gamma") {
      c.gamma = parse_value(kv);
    } else if (kv.key == "sinkhorn_iters") {
      c.sinkhorn_iters = parse_unsigned(kv);
    } else if (kv.key == "sinkhorn_epsilon") {
      c.sinkhorn_epsilon = parse_value(kv);
    } else if (kv.key == "window_len") {
      c.window_len = parse_unsigned(kv);
    } else if (kv.key == "band_min_hz") {
      c.band_min_hz = parse_value(kv);
    } else if (kv.key == "band_max_hz") {
      c.band_max_hz = parse_value(kv);
    } else if (kv.key == "eps_h") {
      c.eps_h = parse_value(kv);
    } else if (kv.key == "seed") {
      c.seed = parse_unsigned(kv);
    } else {
      throw Error(ErrorCode::unknown_key,
                  "\"" + kv.key + "\" on line " + std::to_string(kv.line));
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path));
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  out << "beta=" << format_real(c.beta) << '\n'
      << "lambda_h=" << format_real(c.lambda_h) << '\n'
      << "gamma=" << format_real(c.gamma) << '\n'
      << "sinkhorn_iters=" << c.sinkhorn_iters << '\n'
      << "sinkhorn_epsilon=" << format_real(c.sinkhorn_epsilon) << '\n'
      << "window_len=" << c.window_len << '\n'
      << "band_min_hz=" << format_real(c.band_min_hz) << '\n'
      << "band_max_hz=" << format_real(c.band_max_hz) << '\n'
      << "eps_h=" << format_real(c.eps_h) << '\n'
      << "seed=" << c.seed << '\n';
  return out.str();
}

}  // namespace hot
