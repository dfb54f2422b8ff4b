#include "hot/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>

#include "hot/error.hpp"
#include "hot/parallel.hpp"

namespace hot {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is. Plans
// are created once per (H, W, direction) under a lock and reused.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t h, std::size_t w, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(h, w, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(h * w), out(h * w);
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error(ErrorCode::invalid_argument, "FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

void execute(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) {
  // FFTW does not modify the input of an out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::out_of_range, "beta must lie in [0, 1)");
  }
}

// Amplitude splice on an already transformed source: in-mask coefficients take
// the reference magnitude with the source angle.
Frame splice_and_invert(Spectrum spec, const Spectrum& reference, const LowFreqMask& mask) {
  const std::size_t plane = spec.height * spec.width;
  for (std::size_t c = 0; c < spec.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      if (!mask.flags[i]) continue;
      auto& s = spec.coeffs[c * plane + i];
      s = std::polar(std::abs(reference.coeffs[c * plane + i]), std::arg(s));
    }
  }
  return idft2(spec);
}

}  // namespace

void Frame::validate() const {
  if (channels < 1 || height < 2 || width < 2) {
    throw Error(ErrorCode::invalid_argument, "frame must be at least 1x2x2");
  }
  if (data.size() != channels * height * width) {
    throw Error(ErrorCode::shape_mismatch, "frame data does not match its shape");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "frame contains non-finite values");
  }
}

Frame Clip::frame(std::size_t t) const {
  Frame f(channels, height, width);
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    const auto src = data.begin() + static_cast<std::ptrdiff_t>((c * frames + t) * plane);
    std::copy(src, src + static_cast<std::ptrdiff_t>(plane),
              f.data.begin() + static_cast<std::ptrdiff_t>(c * plane));
  }
  return f;
}

void Clip::set_frame(std::size_t t, const Frame& f) {
  if (f.channels != channels || f.height != height || f.width != width) {
    throw Error(ErrorCode::shape_mismatch, "frame does not match clip geometry");
  }
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    const auto src = f.data.begin() + static_cast<std::ptrdiff_t>(c * plane);
    std::copy(src, src + static_cast<std::ptrdiff_t>(plane),
              data.begin() + static_cast<std::ptrdiff_t>((c * frames + t) * plane));
  }
}

std::size_t LowFreqMask::count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

Spectrum dft2(const Frame& frame) {
  frame.validate();
  Spectrum spec{frame.channels, frame.height, frame.width, {}};
  const std::size_t plane = frame.height * frame.width;
  spec.coeffs.resize(frame.channels * plane);
  fftw_plan plan = PlanCache::instance().get(frame.height, frame.width, FFTW_FORWARD);
  std::vector<std::complex<double>> in(plane);
  for (std::size_t c = 0; c < frame.channels; ++c) {
    const auto src = frame.plane(c);
    std::copy(src.begin(), src.end(), in.begin());
    execute(plan, in.data(), spec.coeffs.data() + c * plane);
  }
  return spec;
}

Frame idft2(const Spectrum& spectrum) {
  if (spectrum.channels < 1 || spectrum.height < 2 || spectrum.width < 2 ||
      spectrum.coeffs.size() != spectrum.channels * spectrum.height * spectrum.width) {
    throw Error(ErrorCode::shape_mismatch, "spectrum shape is inconsistent");
  }
  for (const auto& z : spectrum.coeffs) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::non_finite, "spectrum contains non-finite values");
    }
  }
  Frame frame(spectrum.channels, spectrum.height, spectrum.width);
  const std::size_t plane = spectrum.height * spectrum.width;
  const double scale = 1.0 / static_cast<double>(plane);
  fftw_plan plan = PlanCache::instance().get(spectrum.height, spectrum.width, FFTW_BACKWARD);
  std::vector<std::complex<double>> out(plane);
  double worst_imag = 0.0;
  for (std::size_t c = 0; c < spectrum.channels; ++c) {
    execute(plan, spectrum.coeffs.data() + c * plane, out.data());
    for (std::size_t i = 0; i < plane; ++i) {
      frame.data[c * plane + i] = out[i].real() * scale;
      worst_imag = std::max(worst_imag, std::abs(out[i].imag() * scale));
    }
  }
  if (worst_imag > kImagResidualLimit) {
    throw Error(ErrorCode::corrupted_spectrum,
                "inverse has imaginary residual " + std::to_string(worst_imag));
  }
  return frame;
}

LowFreqMask build_mask(std::size_t height, std::size_t width, double beta) {
  if (height < 2 || width < 2) {
    throw Error(ErrorCode::invalid_argument, "mask needs H, W >= 2");
  }
  check_beta(beta);
  LowFreqMask mask{height, width, beta, std::vector<unsigned char>(height * width, 0)};
  const double limit_u = beta * static_cast<double>(height) / 2.0;
  const double limit_v = beta * static_cast<double>(width) / 2.0;
  for (std::size_t u = 0; u < height; ++u) {
    const auto du = static_cast<double>(std::min(u, height - u));
    if (!(du < limit_u)) continue;
    for (std::size_t v = 0; v < width; ++v) {
      const auto dv = static_cast<double>(std::min(v, width - v));
      if (dv < limit_v) mask.flags[u * width + v] = 1;
    }
  }
  return mask;
}

Frame fda_frame(const Frame& source, const Frame& reference, double beta) {
  check_beta(beta);
  if (!source.same_shape(reference)) {
    throw Error(ErrorCode::shape_mismatch, "source and reference frames differ in shape");
  }
  const auto mask = build_mask(source.height, source.width, beta);
  return splice_and_invert(dft2(source), dft2(reference), mask);
}

Clip fda_clip(const Clip& clip, const Frame& reference, double beta, unsigned threads) {
  check_beta(beta);
  if (clip.channels != reference.channels || clip.height != reference.height ||
      clip.width != reference.width) {
    throw Error(ErrorCode::shape_mismatch, "clip frames do not match the reference shape");
  }
  const auto mask = build_mask(clip.height, clip.width, beta);
  const Spectrum ref_spec = dft2(reference);
  Clip out = clip;

  parallel_for(clip.frames, threads, [&](std::size_t t) {
    // Frames are disjoint slices of `out`.
    out.set_frame(t, splice_and_invert(dft2(clip.frame(t)), ref_spec, mask));
  });
  return out;
}

double max_out_of_band_deviation(const Frame& source, const Frame& stylized,
                                 const LowFreqMask& mask) {
  if (!source.same_shape(stylized) || mask.height != source.height ||
      mask.width != source.width) {
    throw Error(ErrorCode::shape_mismatch, "deviation check needs matching shapes");
  }
  const auto a = dft2(source);
  const auto b = dft2(stylized);
  double peak = 0.0;
  for (const auto& z : a.coeffs) peak = std::max(peak, std::abs(z));
  const double floor = std::max(peak * 1e-6, 1e-300);
  const std::size_t plane = source.height * source.width;
  double worst = 0.0;
  for (std::size_t c = 0; c < a.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      if (mask.flags[i]) continue;
      const auto& x = a.coeffs[c * plane + i];
      const auto& y = b.coeffs[c * plane + i];
      worst = std::max(worst, std::abs(y - x) / std::max(std::abs(x), floor));
    }
  }
  return worst;
}

double max_low_band_amplitude_error(const Frame& stylized, const Frame& reference,
                                    const LowFreqMask& mask) {
  if (!stylized.same_shape(reference) || mask.height != reference.height ||
      mask.width != reference.width) {
    throw Error(ErrorCode::shape_mismatch, "amplitude check needs matching shapes");
  }
  const auto s = dft2(stylized);
  const auto r = dft2(reference);
  double peak = 0.0;
  for (const auto& z : r.coeffs) peak = std::max(peak, std::abs(z));
  const double floor = std::max(peak * 1e-6, 1e-300);
  const std::size_t plane = reference.height * reference.width;
  double worst = 0.0;
  for (std::size_t c = 0; c < r.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      if (!mask.flags[i]) continue;
      const double want = std::abs(r.coeffs[c * plane + i]);
      const double got = std::abs(s.coeffs[c * plane + i]);
      worst = std::max(worst, std::abs(got - want) / std::max(want, floor));
    }
  }
  return worst;
}

}  // namespace hot
