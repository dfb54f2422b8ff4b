#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hot {

inline constexpr double kVarianceFloor = 1e-12;

// Pearson correlation; throws degenerate when either input's variance is at
// or below kVarianceFloor.
double pearson(std::span<const double> y, std::span<const double> y_hat);

// Supervised loss 1 - rho(y, y_hat), in [0, 2]. Needs at least 3 samples.
double neg_pearson(std::span<const double> y, std::span<const double> y_hat);

// l_sup + gamma * l_hot.
double combined_loss(double l_sup, double l_hot, double gamma);

struct Band {
  double f_min = 0.7;
  double f_max = 4.0;
};

// Heart rate in bpm from the spectral peak of a mean-removed, Hann-windowed,
// full-length DFT, searched over bins inside the band (lower bin on ties).
// Needs at least two cycles of f_min; throws no_pulse for a flat signal.
double hr_from_signal(std::span<const double> signal, double sample_rate_hz, const Band& band);

// Frequency spacing of hr_from_signal for a given length, in bpm.
double hr_bin_width_bpm(std::size_t length, double sample_rate_hz);

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent
  std::optional<double> pearson_r;
  std::size_t n = 0;

  std::string to_key_values() const;
  std::string to_json() const;
};

MetricsReport metrics(std::span<const double> gt_bpm, std::span<const double> pred_bpm);

struct BlandAltmanRow {
  double mean = 0.0;
  double difference = 0.0;  // pred - gt
};

std::vector<BlandAltmanRow> bland_altman(std::span<const double> gt_bpm,
                                         std::span<const double> pred_bpm);

}  // namespace hot
