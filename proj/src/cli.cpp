#include "hot/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <thread>

#include "hot/config.hpp"
#include "hot/error.hpp"
#include "hot/harmonic.hpp"
#include "hot/metrics.hpp"
#include "hot/spectral.hpp"
#include "hot/sweep.hpp"
#include "hot/synth.hpp"
#include "hot/tensor_io.hpp"
#include "hot/transport.hpp"

namespace hot {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

RunConfig load_config(const GlobalOptions& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : parse_config(g.config);
  if (g.seed_set) c.seed = g.seed;
  return c;
}

void require_out(const GlobalOptions& g, const char* what) {
  if (g.out.empty()) throw Error(ErrorCode::invalid_argument, std::string("--out ") + what + " is required");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<std::uint64_t> dims_of(std::initializer_list<std::size_t> d) {
  return {d.begin(), d.end()};
}

void require_rank(const Tensor& t, std::size_t rank, const std::string& what) {
  if (t.dims.size() != rank) {
    throw Error(ErrorCode::shape_mismatch, what + " must be a rank-" + std::to_string(rank) +
                                               " tensor, got rank " + std::to_string(t.dims.size()));
  }
}

Clip clip_from_tensor(const Tensor& t, double fps) {
  require_rank(t, 4, "clip");
  Clip clip(t.dims[0], t.dims[1], t.dims[2], t.dims[3], fps);
  clip.data = t.as_double();
  return clip;
}

Frame frame_from_tensor(const Tensor& t) {
  require_rank(t, 3, "reference frame");
  Frame f(t.dims[0], t.dims[1], t.dims[2]);
  f.data = t.as_double();
  return f;
}

FeatureMap features_from_tensor(const Tensor& t, double token_rate) {
  require_rank(t, 4, "feature map");
  FeatureMap fm{t.dims[0], t.dims[1], t.dims[2], t.dims[3], token_rate, t.as_double()};
  fm.validate();
  return fm;
}

HarmonicConfig harmonic_config(const RunConfig& c) {
  return {c.window_len, c.band_min_hz, c.band_max_hz, c.eps_h};
}

unsigned thread_budget() {
  if (const char* env = std::getenv("HOT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    throw Error(ErrorCode::invalid_argument, "HOT_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_tokens(const fs::path& path, const TokenSequence& tokens) {
  write_tensor(path, dims_of({tokens.size(), tokens.dim}), std::span<const double>(tokens.values));
}

void write_ratios(const fs::path& path, const HarmonicSequence& r) {
  write_tensor(path, dims_of({r.ratios.size()}), std::span<const double>(r.ratios));
}

// ---- subcommands ----

int cmd_synth(const GlobalOptions& g, const std::string& spec_path, std::ostream& out) {
  require_out(g, "<dir>");
  const SynthScenario sc = parse_scenario(spec_path);
  const std::uint64_t seed = load_config(g).seed;
  const auto& s = sc.source;
  const SynthClip synth = gen_clip(s, seed);
  const Frame ref = gen_reference(sc.ref_tint, sc.ref_illum, s.height, s.width, seed + 1);

  const fs::path dir(g.out);
  ensure_dir(dir);
  write_tensor(dir / "clip.tensor", dims_of({s.channels, s.num_frames, s.height, s.width}),
               std::span<const double>(synth.clip.data));
  write_tensor(dir / "ref.tensor", dims_of({ref.channels, ref.height, ref.width}),
               std::span<const double>(ref.data));
  write_signal_csv(SignalTable{s.fps, {"gt_bvp"}, {synth.truth.bvp}}, dir / "gt.csv");
  out << "frames=" << s.num_frames << "\nfps=" << format_real(s.fps)
      << "\nhr_bpm=" << format_real(s.hr_bpm) << "\nseed=" << seed << '\n';
  return kExitOk;
}

int cmd_fda(const GlobalOptions& g, const std::string& clip_path, const std::string& ref_path,
            std::optional<double> beta_flag, std::ostream& out) {
  require_out(g, "<file>");
  RunConfig cfg = load_config(g);
  if (beta_flag) cfg.beta = *beta_flag;
  cfg.validate();
  const Clip clip = clip_from_tensor(read_tensor(clip_path), 0.0);
  const Frame ref = frame_from_tensor(read_tensor(ref_path));
  const Clip styled = fda_clip(clip, ref, cfg.beta);

  const auto mask = build_mask(clip.height, clip.width, cfg.beta);
  double deviation = 0.0, low_band = 0.0;
  for (std::size_t t = 0; t < clip.frames; ++t) {
    deviation = std::max(deviation, max_out_of_band_deviation(clip.frame(t), styled.frame(t), mask));
    low_band = std::max(low_band, max_low_band_amplitude_error(styled.frame(t), ref, mask));
  }
  write_tensor(g.out, dims_of({clip.channels, clip.frames, clip.height, clip.width}),
               std::span<const double>(styled.data));
  out << "beta=" << format_real(cfg.beta) << "\nframes=" << clip.frames
      << "\nmasked_bins=" << mask.count() << "\nmax_out_of_band_deviation=" << format_real(deviation)
      << "\nmax_low_band_amplitude_error=" << format_real(low_band) << '\n';
  return kExitOk;
}

int cmd_features(const GlobalOptions& g, const std::string& clip_path, double fps,
                 std::size_t dim, std::size_t stride, bool identity, bool raw,
                 std::ostream& out) {
  require_out(g, "<file>");
  const std::uint64_t seed = load_config(g).seed;
  const Clip clip = clip_from_tensor(read_tensor(clip_path), fps);
  const FeatureMap fm = surrogate_features(clip, SurrogateOptions{dim, stride, seed, identity, !raw});
  write_tensor(g.out, dims_of({fm.dim, fm.length, fm.height, fm.width}),
               std::span<const double>(fm.data));
  out << "dim=" << fm.dim << "\ntokens=" << fm.length
      << "\ntoken_rate_hz=" << format_real(fm.token_rate_hz) << '\n';
  return kExitOk;
}

int cmd_descriptor(const GlobalOptions& g, const std::string& feat_path, double token_rate,
                   std::ostream& out) {
  require_out(g, "<dir>");
  const RunConfig cfg = load_config(g);
  const TokenSequence tokens = pool_tokens(features_from_tensor(read_tensor(feat_path), token_rate));
  const HarmonicSequence r = descriptor(tokens, harmonic_config(cfg));
  const fs::path dir(g.out);
  ensure_dir(dir);
  write_tokens(dir / "tokens.tensor", tokens);
  write_ratios(dir / "ratios.tensor", r);
  double mean = 0.0;
  for (double v : r.ratios) mean += v;
  mean /= static_cast<double>(r.ratios.size());
  out << "tokens=" << tokens.size() << "\ndim=" << tokens.dim
      << "\nmean_ratio=" << format_real(mean) << '\n';
  return kExitOk;
}

int cmd_align(const GlobalOptions& g, const std::string& a_path, const std::string& b_path,
              double token_rate, std::ostream& out) {
  require_out(g, "<dir>");
  const RunConfig cfg = load_config(g);
  const TokenSequence za = pool_tokens(features_from_tensor(read_tensor(a_path), token_rate));
  const TokenSequence zb = pool_tokens(features_from_tensor(read_tensor(b_path), token_rate));
  if (za.dim != zb.dim) {
    throw Error(ErrorCode::shape_mismatch, "feature dimensions differ: " + std::to_string(za.dim) +
                                               " vs " + std::to_string(zb.dim));
  }
  const auto hc = harmonic_config(cfg);
  const HarmonicSequence ra = descriptor(za, hc);
  const HarmonicSequence rb = descriptor(zb, hc);
  const CostMatrix cost = cost_matrix(za, zb, ra, rb, cfg.lambda_h);
  const TransportPlan plan =
      sinkhorn_log(cost.values, SinkhornConfig{cfg.sinkhorn_epsilon, cfg.sinkhorn_iters, 0.0});
  const double loss = hot_loss(plan, cost.values);

  const fs::path dir(g.out);
  ensure_dir(dir);
  write_tensor(dir / "plan.tensor", dims_of({plan.values.rows, plan.values.cols}),
               std::span<const double>(plan.values.values));
  write_tensor(dir / "cost.tensor", dims_of({cost.values.rows, cost.values.cols}),
               std::span<const double>(cost.values.values));
  write_ratios(dir / "ratios_a.tensor", ra);
  write_ratios(dir / "ratios_b.tensor", rb);
  out << "hot_loss=" << format_real(loss) << "\nmarginal_error=" << format_real(plan.marginal_error())
      << "\nrow_error=" << format_real(plan.row_error) << "\ncol_error=" << format_real(plan.col_error)
      << "\niterations=" << plan.iterations << "\nlambda_h=" << format_real(cfg.lambda_h)
      << "\nepsilon=" << format_real(cfg.sinkhorn_epsilon) << '\n';
  return kExitOk;
}

int cmd_eval(const GlobalOptions& g, const std::string& gt_path, const std::string& pred_path,
             const std::string& json_path, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(g);
  const SignalTable gt = read_signal_csv(gt_path);
  const SignalTable pred = read_signal_csv(pred_path);
  if (gt.columns.size() != pred.columns.size()) {
    throw Error(ErrorCode::shape_mismatch, "ground truth has " + std::to_string(gt.columns.size()) +
                                               " clips, prediction has " +
                                               std::to_string(pred.columns.size()));
  }
  const Band band{cfg.band_min_hz, cfg.band_max_hz};
  std::vector<double> gt_bpm, pred_bpm;
  for (std::size_t i = 0; i < gt.columns.size(); ++i) {
    gt_bpm.push_back(hr_from_signal(gt.columns[i], gt.sample_rate_hz, band));
    pred_bpm.push_back(hr_from_signal(pred.columns[i], pred.sample_rate_hz, band));
    out << "clip=" << gt.names[i] << " gt_bpm=" << format_real(gt_bpm.back())
        << " pred_bpm=" << format_real(pred_bpm.back()) << '\n';
  }
  const MetricsReport report = metrics(gt_bpm, pred_bpm);
  if (!report.pearson_r) {
    err << "warning: pearson_r omitted (needs at least 2 clips with non-constant heart rates)\n";
  }
  out << report.to_key_values();

  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  ensure_dir(dir);
  std::string csv = "clip,mean_bpm,diff_bpm\n";
  const auto rows = bland_altman(gt_bpm, pred_bpm);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += gt.names[i] + ',' + format_real(rows[i].mean) + ',' + format_real(rows[i].difference) + '\n';
  }
  write_text_file(dir / "bland_altman.csv", csv);
  if (!json_path.empty()) write_text_file(json_path, report.to_json() + "\n");
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, const std::string& grid_path, const std::string& spec_path,
              std::ostream& out) {
  require_out(g, "<file.csv>");
  const RunConfig cfg = load_config(g);
  const SweepGrid grid = parse_grid(grid_path);
  const SynthScenario sc = spec_path.empty() ? SynthScenario{} : parse_scenario(spec_path);
  const unsigned threads = thread_budget();
  const auto rows = run_sweep(grid, cfg, sc, cfg.seed, threads);
  write_text_file(g.out, format_sweep_csv(rows));
  out << "cells=" << rows.size() << "\nthreads=" << threads << "\nout=" << g.out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-domain stylization, harmonic descriptors and harmonic-constrained OT"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration (key=value)");
  app.add_option("--seed", g.seed, "Seed for synthetic generators")->each([&](const std::string&) {
    g.seed_set = true;
  });
  app.add_option("--out", g.out, "Output file or directory");

  std::string path_a, path_b, json_path, spec_path;
  std::optional<double> beta;
  double rate = 30.0;
  std::size_t dim = 16, stride = 1;
  bool identity = false;
  bool raw = false;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic clip, reference frame and ground truth");
  synth->add_option("spec", path_a, "Scenario spec (key=value)")->required();

  auto* fda = app.add_subcommand("fda", "Stylize a clip with a reference frame's low-frequency amplitudes");
  fda->add_option("clip", path_a, "Clip tensor (C x T x H x W)")->required();
  fda->add_option("ref", path_b, "Reference tensor (C x H x W)")->required();
  fda->add_option("--beta", beta, "Low-frequency ratio (overrides config)");

  auto* features = app.add_subcommand("features", "Extract surrogate features from a clip");
  features->add_option("clip", path_a, "Clip tensor (C x T x H x W)")->required();
  features->add_option("--fps", rate, "Clip frame rate")->capture_default_str();
  features->add_option("--dim", dim, "Feature dimension D")->capture_default_str();
  features->add_option("--stride", stride, "Temporal pooling stride")->capture_default_str();
  features->add_flag("--identity", identity, "Identity lift (requires D == C)");
  features->add_flag("--raw", raw, "Keep the temporal mean of each feature");

  auto* desc = app.add_subcommand("descriptor", "Pool tokens and compute harmonic ratios");
  desc->add_option("features", path_a, "Feature tensor (D x T' x H' x W')")->required();
  desc->add_option("--token-rate", rate, "Token rate in Hz")->capture_default_str();

  auto* align = app.add_subcommand("align", "Harmonic-constrained OT between two feature maps");
  align->add_option("features_a", path_a, "Source feature tensor")->required();
  align->add_option("features_b", path_b, "Target feature tensor")->required();
  align->add_option("--token-rate", rate, "Token rate in Hz")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Heart-rate metrics between ground-truth and predicted signals");
  eval->add_option("gt", path_a, "Ground-truth signal CSV")->required();
  eval->add_option("pred", path_b, "Predicted signal CSV")->required();
  eval->add_option("--json", json_path, "Also write the report as JSON");

  auto* sweep = app.add_subcommand("sweep", "Grid sweep over beta x lambda_h x iterations");
  sweep->add_option("--grid", path_a, "Grid file")->required();
  sweep->add_option("--spec", spec_path, "Scenario spec (defaults when omitted)");

  for (auto* sub : {synth, fda, features, desc, align, eval, sweep}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*synth) return cmd_synth(g, path_a, out);
    if (*fda) return cmd_fda(g, path_a, path_b, beta, out);
    if (*features) return cmd_features(g, path_a, rate, dim, stride, identity, raw, out);
    if (*desc) return cmd_descriptor(g, path_a, rate, out);
    if (*align) return cmd_align(g, path_a, path_b, rate, out);
    if (*eval) return cmd_eval(g, path_a, path_b, json_path, out, err);
    if (*sweep) return cmd_sweep(g, path_a, spec_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace hot
