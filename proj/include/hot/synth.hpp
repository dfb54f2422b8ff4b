#pragma once

// Seeded synthetic clips with a known pulse and appearance domain, and a
// surrogate feature extractor standing in for a trained backbone.
//
// All randomness is counter-based: a value is a pure function of (seed,
// stream, element index), so generation is reproducible across platforms and
// independent of evaluation order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hot/harmonic.hpp"
#include "hot/spectral.hpp"

namespace hot {

// Default low-frequency ratio whose band the pulse pattern is kept out of.
inline constexpr double kPulseGuardBeta = 0.05;

struct Ellipse {
  double center_y = 36.0;
  double center_x = 36.0;
  double radius_y = 22.0;
  double radius_x = 16.0;
};

// Face-sized ellipse centered in an H x W frame.
Ellipse centered_ellipse(std::size_t height, std::size_t width);

// Multiplicative low-frequency lighting field:
// gain * (1 + grad_x * (x - 1/2) + grad_y * (y - 1/2)), x, y in [0, 1].
struct Illumination {
  double gain = 1.0;
  double grad_x = 0.0;
  double grad_y = 0.0;
};

struct SynthSpec {
  double hr_bpm = 72.0;
  double fps = 30.0;
  std::size_t num_frames = 512;
  std::size_t height = 72;
  std::size_t width = 72;
  std::size_t channels = 3;
  Ellipse skin;
  double pulse_amp = 0.02;
  std::array<double, 3> tint{0.0, 0.0, 0.0};
  Illumination illum;
  double noise_sigma = 0.0;
  double harmonic2_rel = 0.0;

  void validate() const;
};

// A source-domain clip spec plus the target-domain appearance used for the
// reference frame.
struct SynthScenario {
  SynthSpec source;
  std::array<double, 3> ref_tint{0.08, -0.04, -0.06};
  Illumination ref_illum{0.85, 0.2, -0.1};
};

SynthScenario parse_scenario_text(const std::string& text);
SynthScenario parse_scenario(const std::filesystem::path& path);

struct GroundTruth {
  std::vector<double> bvp;
  double hr_bpm = 0.0;
};

struct SynthClip {
  Clip clip;
  GroundTruth truth;
};

// Pulse waveform s(t) at frame t.
double pulse_waveform(const SynthSpec& spec, std::size_t t);

// Noise-free per-seed face texture, C x H x W.
Frame base_face(std::size_t channels, std::size_t height, std::size_t width, std::uint64_t seed);

// Skin ellipse indicator with every mode inside the kPulseGuardBeta band
// (DC included) projected out, so the pulse carries no energy FDA replaces.
std::vector<double> skin_pattern(const SynthSpec& spec);

SynthClip gen_clip(const SynthSpec& spec, std::uint64_t seed);

Frame gen_reference(const std::array<double, 3>& tint, const Illumination& illum,
                    std::size_t height, std::size_t width, std::uint64_t seed);

struct SpatialMode {
  std::size_t u = 0;
  std::size_t v = 0;
  bool operator==(const SpatialMode&) const = default;
};

// Out-of-band mode where the skin pattern's spectrum has the largest real
// part in magnitude; `sign` is that real part's sign.
struct PulseMode {
  SpatialMode mode;
  double sign = 1.0;
};
PulseMode dominant_pulse_mode(const SynthSpec& spec, double beta);

// Real part of the (u, v) spatial DFT coefficient of one channel, per frame.
// Throws invalid_argument when the mode lies inside the beta band.
std::vector<double> extract_mode_signal(const Clip& clip, SpatialMode mode, std::size_t channel,
                                        double beta);

inline constexpr std::size_t kSurrogateGrid = 8;

struct SurrogateOptions {
  std::size_t dim = 16;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
  // D == C, lift = identity, unit spatial gain.
  bool identity_lift = false;
  // Subtract each (feature, cell) mean over time. With identity_lift on and this
  // off, features are pooled pixels.
  bool center_time = true;
};

// Temporal mean pooling by `stride`, 8 x 8 spatial block means, then a seeded
// linear lift C -> D with unit-norm rows and a seeded positive gain per
// (feature, cell), then optional per-(feature, cell) temporal centering.
// Uncentered features carry the static scene as a large constant that Hann
// leakage spreads over the low band; centering leaves only the dynamics.
FeatureMap surrogate_features(const Clip& clip, const SurrogateOptions& options);

// Counter-based generators, exposed for tests and the CLI.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace hot
