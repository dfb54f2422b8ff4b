#pragma once

// Temporal tokens and the cyclic local harmonic descriptor.
//
// Time indices are 0-based throughout: token t's window is
// [t, t+1, ..., t+W-1] taken modulo T'.

#include <cstddef>
#include <span>
#include <vector>

namespace hot {

// D x T' x H' x W' feature volume sampled at token_rate_hz along T'.
struct FeatureMap {
  std::size_t dim = 0;
  std::size_t length = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  double token_rate_hz = 0.0;
  std::vector<double> data;

  double at(std::size_t d, std::size_t t, std::size_t h, std::size_t w) const {
    return data[((d * length + t) * height + h) * width + w];
  }
  void validate() const;
};

// T' tokens of dimension D, token-major (T' x D).
struct TokenSequence {
  std::size_t dim = 0;
  double token_rate_hz = 0.0;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> token(std::size_t t) const {
    return std::span<const double>(values).subspan(t * dim, dim);
  }
};

struct HarmonicSequence {
  std::vector<double> ratios;
};

struct HarmonicConfig {
  std::size_t window_len = 64;
  double f_min = 0.7;
  double f_max = 4.0;
  double eps_h = 1e-6;
};

TokenSequence pool_tokens(const FeatureMap& features);

std::vector<std::size_t> cyclic_indices(std::size_t t, std::size_t window, std::size_t length);

// Symmetric Hann window, w(m) = 0.5 - 0.5 cos(2 pi m / (W - 1)).
std::vector<double> hann(std::size_t window);

// Channel-averaged squared DFT magnitude of the Hann-windowed cyclic window
// starting at token t; K = floor(W/2) + 1 bins.
std::vector<double> local_energy(const TokenSequence& tokens, std::size_t t,
                                 const HarmonicConfig& config);

// Bins k in [0, K) with f_min <= k * rate / W <= f_max. Throws
// band_unresolvable when none qualify.
std::vector<std::size_t> band_bins(double token_rate_hz, std::size_t window, double f_min,
                                   double f_max);

struct HarmonicPeak {
  std::size_t fundamental = 0;
  std::size_t second = 0;
  double ratio = 0.0;
};

// Dominant in-band bin k1 (smallest index on ties), k2 = min(2 k1, K-1), and
// E(k2) / (E(k1) + eps_h).
HarmonicPeak harmonic_peak(std::span<const double> energy, std::span<const std::size_t> band,
                           double eps_h);
double harmonic_ratio(std::span<const double> energy, std::span<const std::size_t> band,
                      double eps_h);

// Ratio for every token position. Positions are independent; `threads` > 1
// evaluates them concurrently with identical results.
HarmonicSequence descriptor(const TokenSequence& tokens, const HarmonicConfig& config,
                            unsigned threads = 1);

}  // namespace hot
