#include "hot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hot/config.hpp"
#include "hot/error.hpp"
#include "hot/tensor_io.hpp"

namespace hot {
namespace {

enum Stream : std::uint64_t {
  kNoiseStream = 1,
  kTextureStream = 2,
  kLiftStream = 3,
  kGainStream = 4,
};

constexpr std::array<double, 3> kChroma{1.0, 0.82, 0.7};
constexpr std::size_t kTextureWaves = 6;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(seed ^ splitmix(stream)) + index);
}

double illumination_at(const Illumination& il, std::size_t h, std::size_t w, std::size_t height,
                       std::size_t width) {
  const double x = static_cast<double>(w) / static_cast<double>(width - 1) - 0.5;
  const double y = static_cast<double>(h) / static_cast<double>(height - 1) - 0.5;
  return il.gain * (1.0 + il.grad_x * x + il.grad_y * y);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::out_of_range, what);
}

std::array<double, 3> parse_triple(const KeyValue& kv) {
  const auto v = parse_real_list(kv.value);
  if (v.size() != 3) throw Error(ErrorCode::parse, kv.key + " expects three comma-separated values");
  return {v[0], v[1], v[2]};
}

std::size_t parse_count(const KeyValue& kv) {
  const double v = parse_real(kv.value);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) {
    throw Error(ErrorCode::parse, kv.key + " expects a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(counter_bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  // Box-Muller over two independent counters; (bits + 0.5) keeps u1 away from 0.
  const double u1 =
      (static_cast<double>(counter_bits(seed, stream, 2 * index) >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = counter_uniform(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Ellipse centered_ellipse(std::size_t height, std::size_t width) {
  const auto h = static_cast<double>(height);
  const auto w = static_cast<double>(width);
  return {h / 2.0, w / 2.0, 0.3 * h, 0.22 * w};
}

void SynthSpec::validate() const {
  require(std::isfinite(hr_bpm) && hr_bpm > 42.0 && hr_bpm < 240.0,
          "hr_bpm must lie strictly inside the 42-240 bpm band");
  require(std::isfinite(fps) && fps > 0.0, "fps must be positive");
  require(num_frames >= 1, "num_frames must be >= 1");
  require(height >= 8 && width >= 8, "height and width must be >= 8");
  require(channels == 3, "channels must be 3");
  require(skin.radius_x > 0.0 && skin.radius_y > 0.0 && std::isfinite(skin.center_x) &&
              std::isfinite(skin.center_y),
          "skin ellipse needs positive radii");
  require(std::isfinite(pulse_amp), "pulse_amp must be finite");
  require(std::all_of(tint.begin(), tint.end(), [](double t) { return std::isfinite(t); }),
          "tint must be finite");
  require(std::isfinite(illum.gain) && illum.gain > 0.0 && std::isfinite(illum.grad_x) &&
              std::isfinite(illum.grad_y),
          "illumination gain must be positive");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(harmonic2_rel >= 0.0 && harmonic2_rel <= 1.0, "harmonic2_rel must lie in [0, 1]");
}

SynthScenario parse_scenario_text(const std::string& text) {
  SynthScenario sc;
  auto& s = sc.source;
  bool has_cy = false, has_cx = false, has_ry = false, has_rx = false;
  for (const auto& kv : parse_key_values(text)) {
    if (kv.key == "hr_bpm") s.hr_bpm = parse_real(kv.value);
    else if (kv.key == "fps") s.fps = parse_real(kv.value);
    else if (kv.key == "num_frames") s.num_frames = parse_count(kv);
    else if (kv.key == "height") s.height = parse_count(kv);
    else if (kv.key == "width") s.width = parse_count(kv);
    else if (kv.key == "channels") s.channels = parse_count(kv);
    else if (kv.key == "skin_center_y") { s.skin.center_y = parse_real(kv.value); has_cy = true; }
    else if (kv.key == "skin_center_x") { s.skin.center_x = parse_real(kv.value); has_cx = true; }
    else if (kv.key == "skin_radius_y") { s.skin.radius_y = parse_real(kv.value); has_ry = true; }
    else if (kv.key == "skin_radius_x") { s.skin.radius_x = parse_real(kv.value); has_rx = true; }
    else if (kv.key == "pulse_amp") s.pulse_amp = parse_real(kv.value);
    else if (kv.key == "tint") s.tint = parse_triple(kv);
    else if (kv.key == "illum_gain") s.illum.gain = parse_real(kv.value);
    else if (kv.key == "illum_grad_x") s.illum.grad_x = parse_real(kv.value);
    else if (kv.key == "illum_grad_y") s.illum.grad_y = parse_real(kv.value);
    else if (kv.key == "noise_sigma") s.noise_sigma = parse_real(kv.value);
    else if (kv.key == "harmonic2_rel") s.harmonic2_rel = parse_real(kv.value);
    else if (kv.key == "ref_tint") sc.ref_tint = parse_triple(kv);
    else if (kv.key == "ref_illum_gain") sc.ref_illum.gain = parse_real(kv.value);
    else if (kv.key == "ref_illum_grad_x") sc.ref_illum.grad_x = parse_real(kv.value);
    else if (kv.key == "ref_illum_grad_y") sc.ref_illum.grad_y = parse_real(kv.value);
    else throw Error(ErrorCode::unknown_key, "\"" + kv.key + "\" on line " + std::to_string(kv.line));
  }
  const auto fallback = centered_ellipse(s.height, s.width);
  if (!has_cy) s.skin.center_y = fallback.center_y;
  if (!has_cx) s.skin.center_x = fallback.center_x;
  if (!has_ry) s.skin.radius_y = fallback.radius_y;
  if (!has_rx) s.skin.radius_x = fallback.radius_x;
  s.validate();
  require(std::isfinite(sc.ref_illum.gain) && sc.ref_illum.gain > 0.0,
          "ref_illum_gain must be positive");
  return sc;
}

SynthScenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_text_file(path));
}

double pulse_waveform(const SynthSpec& spec, std::size_t t) {
  const double phase = 2.0 * std::numbers::pi * spec.hr_bpm / 60.0 * static_cast<double>(t) / spec.fps;
  return std::cos(phase) + spec.harmonic2_rel * std::cos(2.0 * phase);
}

Frame base_face(std::size_t channels, std::size_t height, std::size_t width, std::uint64_t seed) {
  if (channels > kChroma.size()) throw Error(ErrorCode::invalid_argument, "at most 3 channels");
  const auto face = centered_ellipse(height, width);
  struct Wave {
    double fy, fx, phase, amp;
  };
  std::array<Wave, kTextureWaves> waves{};
  for (std::size_t k = 0; k < kTextureWaves; ++k) {
    waves[k].fy = 1.0 + std::floor(5.0 * counter_uniform(seed, kTextureStream, 4 * k));
    waves[k].fx = 1.0 + std::floor(5.0 * counter_uniform(seed, kTextureStream, 4 * k + 1));
    waves[k].phase = 2.0 * std::numbers::pi * counter_uniform(seed, kTextureStream, 4 * k + 2);
    waves[k].amp = 0.005 + 0.015 * counter_uniform(seed, kTextureStream, 4 * k + 3);
  }
  Frame out(channels, height, width);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      const double dy = (static_cast<double>(h) - face.center_y) / (1.3 * face.radius_y);
      const double dx = (static_cast<double>(w) - face.center_x) / (1.6 * face.radius_x);
      const double r = std::clamp(std::sqrt(dy * dy + dx * dx), 0.0, 1.0);
      const double shade = 1.0 - r * r * (3.0 - 2.0 * r);  // smoothstep falloff
      double texture = 0.0;
      for (const auto& wv : waves) {
        texture += wv.amp * std::cos(2.0 * std::numbers::pi *
                                         (wv.fy * static_cast<double>(h) / static_cast<double>(height) +
                                          wv.fx * static_cast<double>(w) / static_cast<double>(width)) +
                                     wv.phase);
      }
      const double luma = 0.3 + 0.3 * shade + texture;
      for (std::size_t c = 0; c < channels; ++c) out.at(c, h, w) = kChroma[c] * luma;
    }
  }
  return out;
}

std::vector<double> skin_pattern(const SynthSpec& spec) {
  Frame indicator(1, spec.height, spec.width);
  for (std::size_t h = 0; h < spec.height; ++h) {
    for (std::size_t w = 0; w < spec.width; ++w) {
      const double dy = (static_cast<double>(h) - spec.skin.center_y) / spec.skin.radius_y;
      const double dx = (static_cast<double>(w) - spec.skin.center_x) / spec.skin.radius_x;
      indicator.at(0, h, w) = (dy * dy + dx * dx <= 1.0) ? 1.0 : 0.0;
    }
  }
  auto spectrum = dft2(indicator);
  const auto guard = build_mask(spec.height, spec.width, kPulseGuardBeta);
  for (std::size_t i = 0; i < guard.flags.size(); ++i) {
    if (guard.flags[i]) spectrum.coeffs[i] = 0.0;
  }
  return idft2(spectrum).data;
}

SynthClip gen_clip(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t H = spec.height, W = spec.width, C = spec.channels, T = spec.num_frames;
  const Frame base = base_face(C, H, W, seed);
  const auto skin = skin_pattern(spec);

  // Static part: tint + illumination * face.
  Frame still(C, H, W);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        still.at(c, h, w) = spec.tint[c] + illumination_at(spec.illum, h, w, H, W) * base.at(c, h, w);
      }
    }
  }

  SynthClip out{Clip(C, T, H, W, spec.fps), GroundTruth{std::vector<double>(T), spec.hr_bpm}};
  for (std::size_t t = 0; t < T; ++t) out.truth.bvp[t] = pulse_waveform(spec, t);

  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      const double pulse = spec.pulse_amp * out.truth.bvp[t];
      for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
          double v = still.at(c, h, w) + pulse * skin[h * W + w];
          if (spec.noise_sigma > 0.0) {
            const std::uint64_t index = ((c * T + t) * H + h) * W + w;
            v += spec.noise_sigma * counter_normal(seed, kNoiseStream, index);
          }
          out.clip.at(c, t, h, w) = std::clamp(v, 0.0, 1.0);
        }
      }
    }
  }
  return out;
}

Frame gen_reference(const std::array<double, 3>& tint, const Illumination& illum,
                    std::size_t height, std::size_t width, std::uint64_t seed) {
  if (height < 8 || width < 8) throw Error(ErrorCode::out_of_range, "reference needs H, W >= 8");
  Frame frame = base_face(3, height, width, seed);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t h = 0; h < height; ++h) {
      for (std::size_t w = 0; w < width; ++w) {
        const double v = tint[c] + illumination_at(illum, h, w, height, width) * frame.at(c, h, w);
        frame.at(c, h, w) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return frame;
}

PulseMode dominant_pulse_mode(const SynthSpec& spec, double beta) {
  const auto mask = build_mask(spec.height, spec.width, beta);
  Frame pattern(1, spec.height, spec.width);
  pattern.data = skin_pattern(spec);
  const auto spectrum = dft2(pattern);
  PulseMode best{{0, 0}, 1.0};
  double best_mag = -1.0;
  // Conjugate pairs share a real part, so scanning u <= H/2 covers every mode.
  for (std::size_t u = 0; u <= spec.height / 2; ++u) {
    for (std::size_t v = 0; v < spec.width; ++v) {
      if (mask.contains(u, v)) continue;
      const double re = spectrum.at(0, u, v).real();
      if (std::abs(re) > best_mag) {
        best_mag = std::abs(re);
        best = {{u, v}, re < 0.0 ? -1.0 : 1.0};
      }
    }
  }
  if (!(best_mag > 0.0)) throw Error(ErrorCode::degenerate, "skin pattern has no out-of-band energy");
  return best;
}

std::vector<double> extract_mode_signal(const Clip& clip, SpatialMode mode, std::size_t channel,
                                        double beta) {
  if (channel >= clip.channels) throw Error(ErrorCode::out_of_range, "channel index out of range");
  if (mode.u >= clip.height || mode.v >= clip.width) {
    throw Error(ErrorCode::out_of_range, "spatial mode outside the frame grid");
  }
  const auto mask = build_mask(clip.height, clip.width, beta);
  if (mask.contains(mode.u, mode.v)) {
    throw Error(ErrorCode::invalid_argument,
                "mode lies inside the replaced low-frequency band; the check would be vacuous");
  }
  const std::size_t H = clip.height, W = clip.width;
  // Re X[u,v] = sum x[h,w] cos(2 pi (u h / H + v w / W)); the phase index is
  // reduced exactly in integers before the table lookup.
  const std::size_t period = H * W;
  std::vector<double> table(period);
  for (std::size_t j = 0; j < period; ++j) {
    table[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(period));
  }
  std::vector<double> signal(clip.frames, 0.0);
  for (std::size_t t = 0; t < clip.frames; ++t) {
    double acc = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const std::size_t j = (mode.u * h * W + mode.v * w * H) % period;
        acc += clip.at(channel, t, h, w) * table[j];
      }
    }
    signal[t] = acc;
  }
  return signal;
}

FeatureMap surrogate_features(const Clip& clip, const SurrogateOptions& options) {
  if (options.stride == 0 || clip.frames % options.stride != 0) {
    throw Error(ErrorCode::invalid_argument, "stride must divide the frame count");
  }
  if (options.dim == 0) throw Error(ErrorCode::invalid_argument, "feature dimension must be >= 1");
  if (clip.height < kSurrogateGrid || clip.width < kSurrogateGrid) {
    throw Error(ErrorCode::invalid_argument, "clip smaller than the 8x8 pooling grid");
  }
  if (options.identity_lift && options.dim != clip.channels) {
    throw Error(ErrorCode::invalid_argument, "identity lift needs D == C");
  }
  const std::size_t C = clip.channels, D = options.dim, G = kSurrogateGrid;
  const std::size_t T = clip.frames / options.stride;

  // pooled[c][t][i][j]
  std::vector<double> pooled(C * T * G * G, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < G; ++i) {
        const std::size_t h0 = i * clip.height / G, h1 = (i + 1) * clip.height / G;
        for (std::size_t j = 0; j < G; ++j) {
          const std::size_t w0 = j * clip.width / G, w1 = (j + 1) * clip.width / G;
          double sum = 0.0;
          for (std::size_t s = 0; s < options.stride; ++s) {
            for (std::size_t h = h0; h < h1; ++h) {
              for (std::size_t w = w0; w < w1; ++w) sum += clip.at(c, t * options.stride + s, h, w);
            }
          }
          pooled[((c * T + t) * G + i) * G + j] =
              sum / static_cast<double>(options.stride * (h1 - h0) * (w1 - w0));
        }
      }
    }
  }

  std::vector<double> lift(D * C, 0.0);
  std::vector<double> gain(D * G * G, 1.0);
  if (options.identity_lift) {
    for (std::size_t d = 0; d < D; ++d) lift[d * C + d] = 1.0;
  } else {
    for (std::size_t d = 0; d < D; ++d) {
      double norm = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        lift[d * C + c] = counter_normal(options.seed, kLiftStream, d * C + c);
        norm += lift[d * C + c] * lift[d * C + c];
      }
      norm = std::sqrt(norm);
      for (std::size_t c = 0; c < C; ++c) lift[d * C + c] /= norm;
    }
    for (std::size_t k = 0; k < gain.size(); ++k) {
      gain[k] = 0.5 + counter_uniform(options.seed, kGainStream, k);
    }
  }

  FeatureMap fm{D, T, G, G, clip.fps / static_cast<double>(options.stride),
                std::vector<double>(D * T * G * G, 0.0)};
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t cell = 0; cell < G * G; ++cell) {
        double v = 0.0;
        for (std::size_t c = 0; c < C; ++c) v += lift[d * C + c] * pooled[(c * T + t) * G * G + cell];
        fm.data[(d * T + t) * G * G + cell] = gain[d * G * G + cell] * v;
      }
    }
    if (!options.center_time) continue;
    for (std::size_t cell = 0; cell < G * G; ++cell) {
      double mean = 0.0;
      for (std::size_t t = 0; t < T; ++t) mean += fm.data[(d * T + t) * G * G + cell];
      mean /= static_cast<double>(T);
      for (std::size_t t = 0; t < T; ++t) fm.data[(d * T + t) * G * G + cell] -= mean;
    }
  }
  return fm;
}

}  // namespace hot
