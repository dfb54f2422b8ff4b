#include "hot/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hot/error.hpp"
#include "hot/parallel.hpp"

namespace hot {
namespace {

// Hann weights plus the cos/sin tables of a length-W DFT restricted to the
// K non-negative bins. Built once and shared by every window position.
class WindowedDft {
 public:
  explicit WindowedDft(std::size_t window)
      : window_(window), bins_(window / 2 + 1), weights_(hann(window)),
        cos_(window), sin_(window) {
    for (std::size_t j = 0; j < window; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(window);
      cos_[j] = std::cos(angle);
      sin_[j] = std::sin(angle);
    }
  }

  std::vector<double> energy(const TokenSequence& tokens, std::size_t t) const {
    const std::size_t length = tokens.size();
    const std::size_t dim = tokens.dim;
    std::vector<double> re(bins_ * dim, 0.0), im(bins_ * dim, 0.0);
    for (std::size_t m = 0; m < window_; ++m) {
      const auto z = tokens.token((t + m) % length);
      const double w = weights_[m];
      for (std::size_t k = 0; k < bins_; ++k) {
        const std::size_t j = (k * m) % window_;
        const double c = w * cos_[j];
        const double s = -w * sin_[j];
        for (std::size_t d = 0; d < dim; ++d) {
          re[k * dim + d] += c * z[d];
          im[k * dim + d] += s * z[d];
        }
      }
    }
    std::vector<double> e(bins_, 0.0);
    for (std::size_t k = 0; k < bins_; ++k) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        acc += re[k * dim + d] * re[k * dim + d] + im[k * dim + d] * im[k * dim + d];
      }
      e[k] = acc / static_cast<double>(dim);
    }
    return e;
  }

 private:
  std::size_t window_;
  std::size_t bins_;
  std::vector<double> weights_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

void check_tokens(const TokenSequence& tokens) {
  if (tokens.dim == 0 || tokens.values.empty() || tokens.values.size() % tokens.dim != 0) {
    throw Error(ErrorCode::shape_mismatch, "token sequence is empty or ragged");
  }
  for (double v : tokens.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "tokens contain non-finite values");
  }
}

void check_window(std::size_t window) {
  if (window < 4) throw Error(ErrorCode::out_of_range, "window length must be >= 4");
}

}  // namespace

void FeatureMap::validate() const {
  if (dim == 0 || height == 0 || width == 0) {
    throw Error(ErrorCode::invalid_argument, "feature map has an empty axis");
  }
  if (length < 2) throw Error(ErrorCode::invalid_argument, "feature map needs T' >= 2");
  if (!(token_rate_hz > 0.0)) throw Error(ErrorCode::out_of_range, "token rate must be positive");
  if (data.size() != dim * length * height * width) {
    throw Error(ErrorCode::shape_mismatch, "feature data does not match its shape");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "features contain non-finite values");
  }
}

TokenSequence pool_tokens(const FeatureMap& features) {
  features.validate();
  TokenSequence tokens{features.dim, features.token_rate_hz,
                       std::vector<double>(features.length * features.dim, 0.0)};
  const std::size_t cells = features.height * features.width;
  for (std::size_t d = 0; d < features.dim; ++d) {
    for (std::size_t t = 0; t < features.length; ++t) {
      const auto* cell = &features.data[(d * features.length + t) * cells];
      double sum = 0.0;
      for (std::size_t i = 0; i < cells; ++i) sum += cell[i];
      tokens.values[t * features.dim + d] = sum / static_cast<double>(cells);
    }
  }
  return tokens;
}

std::vector<std::size_t> cyclic_indices(std::size_t t, std::size_t window, std::size_t length) {
  if (length == 0 || t >= length) {
    throw Error(ErrorCode::out_of_range, "token index " + std::to_string(t) +
                                             " outside sequence of length " +
                                             std::to_string(length));
  }
  std::vector<std::size_t> idx(window);
  for (std::size_t m = 0; m < window; ++m) idx[m] = (t + m) % length;
  return idx;
}

std::vector<double> hann(std::size_t window) {
  if (window < 2) throw Error(ErrorCode::out_of_range, "Hann window needs W >= 2");
  std::vector<double> w(window);
  const double denom = static_cast<double>(window - 1);
  for (std::size_t m = 0; m < window; ++m) {
    w[m] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / denom);
  }
  // cos(2 pi) is not exactly 1 in floating point.
  w.front() = 0.0;
  w.back() = 0.0;
  return w;
}

std::vector<double> local_energy(const TokenSequence& tokens, std::size_t t,
                                 const HarmonicConfig& config) {
  check_tokens(tokens);
  check_window(config.window_len);
  if (t >= tokens.size()) throw Error(ErrorCode::out_of_range, "token index out of range");
  return WindowedDft(config.window_len).energy(tokens, t);
}

std::vector<std::size_t> band_bins(double token_rate_hz, std::size_t window, double f_min,
                                   double f_max) {
  if (!(token_rate_hz > 0.0)) throw Error(ErrorCode::out_of_range, "token rate must be positive");
  if (window < 2) throw Error(ErrorCode::out_of_range, "window length must be >= 2");
  const double df = token_rate_hz / static_cast<double>(window);
  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k <= window / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= f_min && f <= f_max) bins.push_back(k);
  }
  if (bins.empty()) {
    throw Error(ErrorCode::band_unresolvable,
                "no DFT bin of a " + std::to_string(window) + "-sample window at " +
                    std::to_string(token_rate_hz) + " Hz falls inside the band");
  }
  return bins;
}

HarmonicPeak harmonic_peak(std::span<const double> energy, std::span<const std::size_t> band,
                           double eps_h) {
  if (band.empty()) throw Error(ErrorCode::band_unresolvable, "empty band bin set");
  if (energy.empty()) throw Error(ErrorCode::invalid_argument, "empty energy spectrum");
  HarmonicPeak peak;
  peak.fundamental = band.front();
  for (auto k : band) {
    if (k >= energy.size()) throw Error(ErrorCode::out_of_range, "band bin beyond spectrum");
    if (energy[k] > energy[peak.fundamental]) peak.fundamental = k;
  }
  // Band lists are ascending, so strict '>' keeps the smallest index on ties.
  peak.second = std::min(2 * peak.fundamental, energy.size() - 1);
  peak.ratio = energy[peak.second] / (energy[peak.fundamental] + eps_h);
  return peak;
}

double harmonic_ratio(std::span<const double> energy, std::span<const std::size_t> band,
                      double eps_h) {
  return harmonic_peak(energy, band, eps_h).ratio;
}

HarmonicSequence descriptor(const TokenSequence& tokens, const HarmonicConfig& config,
                            unsigned threads) {
  check_tokens(tokens);
  check_window(config.window_len);
  if (!(config.eps_h > 0.0)) throw Error(ErrorCode::out_of_range, "eps_h must be positive");
  const auto band = band_bins(tokens.token_rate_hz, config.window_len, config.f_min, config.f_max);
  const WindowedDft dft(config.window_len);
  const std::size_t length = tokens.size();
  HarmonicSequence out{std::vector<double>(length, 0.0)};

  parallel_for(length, threads, [&](std::size_t t) {
    out.ratios[t] = harmonic_ratio(dft.energy(tokens, t), band, config.eps_h);
  });
  return out;
}

}  // namespace hot
