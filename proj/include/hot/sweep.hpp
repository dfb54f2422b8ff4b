#pragma once

// Grid sweep over (beta, lambda_h, Sinkhorn iterations) on the synthetic
// pipeline: stylize, extract surrogate features, describe, align, score.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hot/config.hpp"
#include "hot/synth.hpp"

namespace hot {

struct SweepGrid {
  std::vector<double> betas;
  std::vector<double> lambdas;
  std::vector<std::size_t> iters;
  std::size_t feature_dim = 16;
  std::size_t feature_stride = 4;

  void validate() const;
  std::size_t cells() const { return betas.size() * lambdas.size() * iters.size(); }
};

// Keys: beta, lambda_h, iters (comma-separated lists), optional feature_dim
// and feature_stride.
SweepGrid parse_grid_text(const std::string& text);
SweepGrid parse_grid(const std::filesystem::path& path);

struct SweepRow {
  double beta = 0.0;
  double lambda_h = 0.0;
  std::size_t iters = 0;
  double hot_loss = 0.0;
  double marginal_error = 0.0;
  double sup_loss = 0.0;
  double total_loss = 0.0;
  double hr_gt_bpm = 0.0;
  double hr_est_bpm = 0.0;
  double hr_abs_err_bpm = 0.0;
  double out_of_band_deviation = 0.0;
  double low_band_amplitude_error = 0.0;
};

// Rows in grid order: beta outer, lambda_h middle, iters inner. Cells run on
// up to `threads` workers; output does not depend on the thread count.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const RunConfig& base,
                                const SynthScenario& scenario, std::uint64_t seed,
                                unsigned threads = 1);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace hot
