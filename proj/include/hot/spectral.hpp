#pragma once

// Channel-wise 2-D DFT of frames and low-frequency amplitude transfer.
//
// Conventions: the forward transform is unnormalized,
//   X[u,v] = sum_{h,w} x[h,w] exp(-2 pi i (u h / H + v w / W)),
// so X[0,0] is the pixel sum; the inverse carries the 1/(H W) factor.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hot {

// C x H x W real image, row-major with the width axis contiguous.
struct Frame {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Frame() = default;
  Frame(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), data(c * h * w, fill) {}

  double& at(std::size_t c, std::size_t h, std::size_t w) {
    return data[(c * height + h) * width + w];
  }
  double at(std::size_t c, std::size_t h, std::size_t w) const {
    return data[(c * height + h) * width + w];
  }
  std::span<const double> plane(std::size_t c) const {
    return std::span<const double>(data).subspan(c * height * width, height * width);
  }
  bool same_shape(const Frame& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  // Throws unless C >= 1, H >= 2, W >= 2, data sized and finite.
  void validate() const;
};

struct Spectrum {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::complex<double>> coeffs;

  std::complex<double>& at(std::size_t c, std::size_t u, std::size_t v) {
    return coeffs[(c * height + u) * width + v];
  }
  const std::complex<double>& at(std::size_t c, std::size_t u, std::size_t v) const {
    return coeffs[(c * height + u) * width + v];
  }
};

// C x T x H x W video at a fixed frame rate (the TensorFile layout).
struct Clip {
  std::size_t channels = 0;
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  double fps = 0.0;
  std::vector<double> data;

  Clip() = default;
  Clip(std::size_t c, std::size_t t, std::size_t h, std::size_t w, double rate)
      : channels(c), frames(t), height(h), width(w), fps(rate), data(c * t * h * w, 0.0) {}

  double& at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) {
    return data[((c * frames + t) * height + h) * width + w];
  }
  double at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const {
    return data[((c * frames + t) * height + h) * width + w];
  }
  Frame frame(std::size_t t) const;
  void set_frame(std::size_t t, const Frame& f);
};

// Rectangular low-frequency region in cyclic-distance coordinates:
// (u, v) is flagged iff min(u, H-u) < beta*H/2 and min(v, W-v) < beta*W/2.
struct LowFreqMask {
  std::size_t height = 0;
  std::size_t width = 0;
  double beta = 0.0;
  std::vector<unsigned char> flags;

  bool contains(std::size_t u, std::size_t v) const { return flags[u * width + v] != 0; }
  std::size_t count() const;
};

inline constexpr double kImagResidualLimit = 1e-4;

Spectrum dft2(const Frame& frame);
// Throws corrupted_spectrum when the inverse leaves an imaginary part above
// kImagResidualLimit (max-abs), i.e. the input was not Hermitian.
Frame idft2(const Spectrum& spectrum);

LowFreqMask build_mask(std::size_t height, std::size_t width, double beta);

// Replaces the low-frequency amplitudes of `source` with those of `reference`
// and keeps the source phase everywhere.
Frame fda_frame(const Frame& source, const Frame& reference, double beta);

// Applies fda_frame to every frame against one shared reference. Frames are
// independent; `threads` > 1 spreads them over workers with identical output.
Clip fda_clip(const Clip& clip, const Frame& reference, double beta, unsigned threads = 1);

// Largest |S_out - S_in| / max(|S_in|, floor) over coefficients outside the
// mask, where floor is 1e-6 of the spectrum's peak magnitude. Used as the
// stylization self-check.
double max_out_of_band_deviation(const Frame& source, const Frame& stylized,
                                 const LowFreqMask& mask);

// Largest relative gap between the stylized and reference amplitudes over the
// masked coefficients (same floor rule); 0 for an empty mask.
double max_low_band_amplitude_error(const Frame& stylized, const Frame& reference,
                                    const LowFreqMask& mask);

}  // namespace hot
