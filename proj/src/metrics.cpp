#include "hot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hot/error.hpp"
#include "hot/harmonic.hpp"
#include "hot/tensor_io.hpp"

namespace hot {
namespace {

void check_pair(std::span<const double> y, std::span<const double> y_hat, std::size_t min_len) {
  if (y.size() != y_hat.size()) throw Error(ErrorCode::shape_mismatch, "sequences differ in length");
  if (y.size() < min_len) {
    throw Error(ErrorCode::invalid_argument,
                "need at least " + std::to_string(min_len) + " samples");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(y_hat[i])) {
      throw Error(ErrorCode::non_finite, "non-finite sample");
    }
  }
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

double pearson(std::span<const double> y, std::span<const double> y_hat) {
  check_pair(y, y_hat, 2);
  const double my = mean(y);
  const double mh = mean(y_hat);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = y[i] - my;
    const double b = y_hat[i] - mh;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  const double n = static_cast<double>(y.size());
  if (sxx / n <= kVarianceFloor || syy / n <= kVarianceFloor) {
    throw Error(ErrorCode::degenerate, "correlation undefined for a constant signal");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double neg_pearson(std::span<const double> y, std::span<const double> y_hat) {
  check_pair(y, y_hat, 3);
  return 1.0 - pearson(y, y_hat);
}

double combined_loss(double l_sup, double l_hot, double gamma) {
  return l_sup + gamma * l_hot;
}

double hr_bin_width_bpm(std::size_t length, double sample_rate_hz) {
  return 60.0 * sample_rate_hz / static_cast<double>(length);
}

double hr_from_signal(std::span<const double> signal, double sample_rate_hz, const Band& band) {
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::out_of_range, "sample rate must be positive");
  if (!(band.f_min > 0.0 && band.f_max > band.f_min)) {
    throw Error(ErrorCode::out_of_range, "band needs 0 < f_min < f_max");
  }
  const std::size_t n = signal.size();
  if (static_cast<double>(n) < 2.0 * sample_rate_hz / band.f_min) {
    throw Error(ErrorCode::band_unresolvable,
                std::to_string(n) + " samples cover fewer than two cycles of f_min");
  }
  for (double v : signal) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "signal has non-finite samples");
  }

  const double mu = mean(signal);
  double spread = 0.0, magnitude = 0.0;
  for (double v : signal) {
    spread = std::max(spread, std::abs(v - mu));
    magnitude = std::max(magnitude, std::abs(v));
  }
  if (spread <= 1e-12 * magnitude || spread == 0.0) {
    throw Error(ErrorCode::no_pulse, "signal is flat after mean removal");
  }

  const auto window = hann(n);
  const double df = sample_rate_hz / static_cast<double>(n);
  std::size_t best = 0;
  double best_power = -1.0;
  bool any = false;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < band.f_min || f > band.f_max) continue;
    any = true;
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * m) % n) /
                           static_cast<double>(n);
      acc += window[m] * (signal[m] - mu) * std::polar(1.0, angle);
    }
    const double power = std::norm(acc);
    if (power > best_power) {
      best_power = power;
      best = k;
    }
  }
  if (!any) throw Error(ErrorCode::band_unresolvable, "no DFT bin inside the band");
  if (!(best_power > 0.0)) throw Error(ErrorCode::no_pulse, "no in-band energy");
  return 60.0 * static_cast<double>(best) * df;
}

MetricsReport metrics(std::span<const double> gt_bpm, std::span<const double> pred_bpm) {
  check_pair(gt_bpm, pred_bpm, 1);
  MetricsReport r;
  r.n = gt_bpm.size();
  double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if (gt_bpm[i] == 0.0) {
      throw Error(ErrorCode::invalid_argument, "MAPE undefined for a zero ground-truth entry");
    }
    const double e = gt_bpm[i] - pred_bpm[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    pct_sum += std::abs(e / gt_bpm[i]);
  }
  const double n = static_cast<double>(r.n);
  r.mae = abs_sum / n;
  r.rmse = std::sqrt(sq_sum / n);
  r.mape = 100.0 * pct_sum / n;
  if (r.n >= 2) {
    try {
      r.pearson_r = pearson(gt_bpm, pred_bpm);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
    }
  }
  return r;
}

std::string MetricsReport::to_key_values() const {
  std::ostringstream out;
  out << "n=" << n << '\n'
      << "mae=" << format_real(mae) << '\n'
      << "rmse=" << format_real(rmse) << '\n'
      << "mape=" << format_real(mape) << '\n';
  if (pearson_r) out << "pearson_r=" << format_real(*pearson_r) << '\n';
  return out.str();
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["mae"] = mae;
  j["rmse"] = rmse;
  j["mape"] = mape;
  if (pearson_r) j["pearson_r"] = *pearson_r;
  return j.dump(2);
}

std::vector<BlandAltmanRow> bland_altman(std::span<const double> gt_bpm,
                                         std::span<const double> pred_bpm) {
  check_pair(gt_bpm, pred_bpm, 1);
  std::vector<BlandAltmanRow> rows(gt_bpm.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {0.5 * (gt_bpm[i] + pred_bpm[i]), pred_bpm[i] - gt_bpm[i]};
  }
  return rows;
}

}  // namespace hot
