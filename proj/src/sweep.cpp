#include "hot/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hot/error.hpp"
#include "hot/harmonic.hpp"
#include "hot/metrics.hpp"
#include "hot/parallel.hpp"
#include "hot/spectral.hpp"
#include "hot/tensor_io.hpp"
#include "hot/transport.hpp"

namespace hot {
namespace {

// Everything in a cell that depends on beta only.
struct BetaStage {
  TokenSequence source_tokens;
  TokenSequence styled_tokens;
  HarmonicSequence source_ratios;
  HarmonicSequence styled_ratios;
  double sup_loss = 0.0;
  double hr_est_bpm = 0.0;
  double out_of_band = 0.0;
  double low_band = 0.0;
};

std::size_t to_count(double v, const std::string& key) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw Error(ErrorCode::parse, key + " expects non-negative integers");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void SweepGrid::validate() const {
  if (betas.empty() || lambdas.empty() || iters.empty()) {
    throw Error(ErrorCode::invalid_argument, "sweep grid axes must be non-empty");
  }
  for (double b : betas) {
    if (!(b >= 0.0 && b < 1.0)) throw Error(ErrorCode::out_of_range, "grid beta outside [0, 1)");
  }
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorCode::out_of_range, "grid lambda_h < 0");
  }
  for (auto it : iters) {
    if (it == 0) throw Error(ErrorCode::out_of_range, "grid iteration counts must be >= 1");
  }
  if (feature_dim == 0 || feature_stride == 0) {
    throw Error(ErrorCode::out_of_range, "feature_dim and feature_stride must be >= 1");
  }
}

SweepGrid parse_grid_text(const std::string& text) {
  SweepGrid g;
  for (const auto& kv : parse_key_values(text)) {
    if (kv.key == "beta") {
      g.betas = parse_real_list(kv.value);
    } else if (kv.key == "lambda_h") {
      g.lambdas = parse_real_list(kv.value);
    } else if (kv.key == "iters") {
      for (double v : parse_real_list(kv.value)) g.iters.push_back(to_count(v, kv.key));
    } else if (kv.key == "feature_dim") {
      g.feature_dim = to_count(parse_real(kv.value), kv.key);
    } else if (kv.key == "feature_stride") {
      g.feature_stride = to_count(parse_real(kv.value), kv.key);
    } else {
      throw Error(ErrorCode::unknown_key, "\"" + kv.key + "\" on line " + std::to_string(kv.line));
    }
  }
  g.validate();
  return g;
}

SweepGrid parse_grid(const std::filesystem::path& path) {
  return parse_grid_text(read_text_file(path));
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const RunConfig& base,
                                const SynthScenario& scenario, std::uint64_t seed,
                                unsigned threads) {
  grid.validate();
  base.validate();
  const auto& spec = scenario.source;
  const SynthClip synth = gen_clip(spec, seed);
  const Frame reference =
      gen_reference(scenario.ref_tint, scenario.ref_illum, spec.height, spec.width, seed + 1);
  const SurrogateOptions features{grid.feature_dim, grid.feature_stride, seed, false};
  const HarmonicConfig harmonic{base.window_len, base.band_min_hz, base.band_max_hz, base.eps_h};
  const Band band{base.band_min_hz, base.band_max_hz};
  const TokenSequence source_tokens = pool_tokens(surrogate_features(synth.clip, features));
  const HarmonicSequence source_ratios = descriptor(source_tokens, harmonic);

  std::vector<BetaStage> stages(grid.betas.size());
  parallel_for(stages.size(), threads, [&](std::size_t b) {
    const double beta = grid.betas[b];
    BetaStage& st = stages[b];
    const Clip styled = fda_clip(synth.clip, reference, beta);
    const auto mask = build_mask(spec.height, spec.width, beta);
    for (std::size_t t = 0; t < styled.frames; ++t) {
      const Frame out = styled.frame(t);
      st.out_of_band = std::max(st.out_of_band, max_out_of_band_deviation(synth.clip.frame(t), out, mask));
      st.low_band = std::max(st.low_band, max_low_band_amplitude_error(out, reference, mask));
    }
    st.source_tokens = source_tokens;
    st.source_ratios = source_ratios;
    st.styled_tokens = pool_tokens(surrogate_features(styled, features));
    st.styled_ratios = descriptor(st.styled_tokens, harmonic);

    const PulseMode pm = dominant_pulse_mode(spec, beta);
    auto signal = extract_mode_signal(styled, pm.mode, 1, beta);
    for (auto& v : signal) v *= pm.sign;
    st.sup_loss = neg_pearson(synth.truth.bvp, signal);
    st.hr_est_bpm = hr_from_signal(signal, spec.fps, band);
  });

  const std::size_t nl = grid.lambdas.size(), ni = grid.iters.size();
  std::vector<SweepRow> rows(grid.cells());
  parallel_for(rows.size(), threads, [&](std::size_t cell) {
    const std::size_t b = cell / (nl * ni);
    const std::size_t l = (cell / ni) % nl;
    const std::size_t i = cell % ni;
    const BetaStage& st = stages[b];
    const auto cost = cost_matrix(st.source_tokens, st.styled_tokens, st.source_ratios,
                                  st.styled_ratios, grid.lambdas[l]);
    const auto plan = sinkhorn_log(cost.values, SinkhornConfig{base.sinkhorn_epsilon, grid.iters[i], 0.0});
    SweepRow& row = rows[cell];
    row.beta = grid.betas[b];
    row.lambda_h = grid.lambdas[l];
    row.iters = grid.iters[i];
    row.hot_loss = hot_loss(plan, cost.values);
    row.marginal_error = plan.marginal_error();
    row.sup_loss = st.sup_loss;
    row.total_loss = combined_loss(st.sup_loss, row.hot_loss, base.gamma);
    row.hr_gt_bpm = spec.hr_bpm;
    row.hr_est_bpm = st.hr_est_bpm;
    row.hr_abs_err_bpm = std::abs(st.hr_est_bpm - spec.hr_bpm);
    row.out_of_band_deviation = st.out_of_band;
    row.low_band_amplitude_error = st.low_band;
  });
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "beta,lambda_h,iters,hot_loss,marginal_error,sup_loss,total_loss,hr_gt_bpm,"
         "hr_est_bpm,hr_abs_err_bpm,out_of_band_deviation,low_band_amplitude_error\n";
  for (const auto& r : rows) {
    out << format_real(r.beta) << ',' << format_real(r.lambda_h) << ',' << r.iters << ','
        << format_real(r.hot_loss) << ',' << format_real(r.marginal_error) << ','
        << format_real(r.sup_loss) << ',' << format_real(r.total_loss) << ','
        << format_real(r.hr_gt_bpm) << ',' << format_real(r.hr_est_bpm) << ','
        << format_real(r.hr_abs_err_bpm) << ',' << format_real(r.out_of_band_deviation) << ','
        << format_real(r.low_band_amplitude_error) << '\n';
  }
  return out.str();
}

}  // namespace hot
