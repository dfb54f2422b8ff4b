#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hot/error.hpp"
#include "hot/harmonic.hpp"
#include "oracles.hpp"

namespace {

using Tokens = std::vector<std::vector<double>>;

hot::TokenSequence to_sequence(const Tokens& z, double rate) {
  hot::TokenSequence seq{z.front().size(), rate, {}};
  for (const auto& t : z) seq.values.insert(seq.values.end(), t.begin(), t.end());
  return seq;
}

Tokens random_tokens(std::size_t T, std::size_t D, std::uint64_t seed) {
  const auto v = oracle::random_values(T * D, seed, -1.0, 1.0);
  Tokens z(T, std::vector<double>(D));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t d = 0; d < D; ++d) z[t][d] = v[t * D + d];
  }
  return z;
}

// Fundamental at bin k0 of a W-sample window plus a relative second harmonic,
// with a per-channel gain and phase.
Tokens harmonic_tokens(std::size_t T, std::size_t D, std::size_t k0, std::size_t W, double a) {
  Tokens z(T, std::vector<double>(D));
  for (std::size_t t = 0; t < T; ++t) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k0 * t) / static_cast<double>(W);
    for (std::size_t d = 0; d < D; ++d) {
      const double phi = 0.7 * static_cast<double>(d);
      z[t][d] = (1.0 + 0.5 * static_cast<double>(d)) *
                (std::cos(theta + phi) + a * std::cos(2.0 * (theta + phi)));
    }
  }
  return z;
}

TEST(PoolTokens, ConstantFeaturesGiveConstantTokens) {
  hot::FeatureMap fm{3, 4, 2, 5, 30.0, std::vector<double>(3 * 4 * 2 * 5, 1.5)};
  const auto z = hot::pool_tokens(fm);
  ASSERT_EQ(z.size(), 4u);
  ASSERT_EQ(z.dim, 3u);
  EXPECT_EQ(z.token_rate_hz, 30.0);
  for (double v : z.values) EXPECT_DOUBLE_EQ(v, 1.5);
}

TEST(PoolTokens, SpatialMean) {
  // D = 1, T' = 2; the first slice holds {1, 2, 3, 4}.
  hot::FeatureMap fm{1, 2, 2, 2, 10.0, {1, 2, 3, 4, 0, 0, 0, 8}};
  const auto z = hot::pool_tokens(fm);
  EXPECT_DOUBLE_EQ(z.token(0)[0], 2.5);
  EXPECT_DOUBLE_EQ(z.token(1)[0], 2.0);
}

TEST(PoolTokens, InvariantToSpatialPermutation) {
  hot::FeatureMap fm{2, 3, 2, 2, 30.0, oracle::random_values(24, 3, 0, 1)};
  auto shuffled = fm;
  for (std::size_t s = 0; s < 6; ++s) {
    auto* cell = &shuffled.data[s * 4];
    std::swap(cell[0], cell[3]);
    std::swap(cell[1], cell[2]);
  }
  const auto a = hot::pool_tokens(fm), b = hot::pool_tokens(shuffled);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-15);
}

TEST(PoolTokens, RejectsShortSequences) {
  hot::FeatureMap fm{1, 1, 2, 2, 30.0, {1, 2, 3, 4}};
  EXPECT_THROW(hot::pool_tokens(fm), hot::Error);
}

TEST(CyclicIndices, WrapsAroundTheSequence) {
  // 0-based forms of the 1-based mapping ((t + m - 1) mod T') + 1.
  EXPECT_EQ(hot::cyclic_indices(0, 3, 8), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(hot::cyclic_indices(7, 3, 8), (std::vector<std::size_t>{7, 0, 1}));
  EXPECT_EQ(hot::cyclic_indices(2, 8, 4), (std::vector<std::size_t>{2, 3, 0, 1, 2, 3, 0, 1}));
  EXPECT_THROW(hot::cyclic_indices(8, 3, 8), hot::Error);
}

TEST(Hann, KnownValuesAndSymmetry) {
  const auto w4 = hot::hann(4);
  ASSERT_EQ(w4.size(), 4u);
  EXPECT_DOUBLE_EQ(w4[0], 0.0);
  EXPECT_NEAR(w4[1], 0.75, 1e-15);
  EXPECT_NEAR(w4[2], 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(w4[3], 0.0);
  EXPECT_EQ(hot::hann(2), (std::vector<double>{0.0, 0.0}));
  const auto w64 = hot::hann(64);
  for (std::size_t m = 0; m < 64; ++m) EXPECT_NEAR(w64[m], w64[63 - m], 1e-15);
  EXPECT_THROW(hot::hann(1), hot::Error);
}

TEST(LocalEnergy, ZeroTokensGiveZeroEnergy) {
  const auto seq = to_sequence(Tokens(10, std::vector<double>(3, 0.0)), 30.0);
  const auto e = hot::local_energy(seq, 4, hot::HarmonicConfig{8});
  ASSERT_EQ(e.size(), 5u);
  for (double v : e) EXPECT_EQ(v, 0.0);
}

TEST(LocalEnergy, OnBinCosineConcentratesAtItsBin) {
  const std::size_t W = 64, k0 = 6;
  const auto z = harmonic_tokens(W, 1, k0, W, 0.0);
  const auto e = hot::local_energy(to_sequence(z, 30.0), 0, hot::HarmonicConfig{W});
  const auto ref = oracle::windowed_energy(z, 0, W);
  const double peak = *std::max_element(e.begin(), e.end());
  EXPECT_EQ(e[k0], peak);
  for (std::size_t k = 0; k < e.size(); ++k) {
    EXPECT_NEAR(e[k], ref[k], 1e-9 * peak);
    // Symmetric Hann sidelobes beyond the neighbours sit near 3e-5 of peak.
    if (k + 1 < k0 || k > k0 + 1) EXPECT_LE(e[k], 1e-4 * peak) << k;
  }
}

TEST(LocalEnergy, QuadraticHomogeneity) {
  auto z = random_tokens(20, 3, 8);
  const auto e = hot::local_energy(to_sequence(z, 30.0), 5, hot::HarmonicConfig{16});
  for (auto& t : z) {
    for (auto& v : t) v *= 3.0;
  }
  const auto e3 = hot::local_energy(to_sequence(z, 30.0), 5, hot::HarmonicConfig{16});
  for (std::size_t k = 0; k < e.size(); ++k) EXPECT_NEAR(e3[k], 9.0 * e[k], 1e-12 * e3[k] + 1e-15);
}

TEST(LocalEnergy, MatchesDirectOracleOnRandomInputs) {
  std::uint64_t seed = 100;
  for (std::size_t W : {4u, 7u, 16u, 33u, 64u}) {
    for (std::size_t D : {1u, 3u, 8u}) {
      for (std::size_t T : {5u, 40u, 100u}) {  // includes W > T'
        const auto z = random_tokens(T, D, ++seed);
        const auto seq = to_sequence(z, 30.0);
        for (std::size_t t : {std::size_t{0}, T / 2, T - 1}) {
          const auto e = hot::local_energy(seq, t, hot::HarmonicConfig{W});
          const auto ref = oracle::windowed_energy(z, t, W);
          ASSERT_EQ(e.size(), W / 2 + 1);
          const double scale = *std::max_element(ref.begin(), ref.end());
          for (std::size_t k = 0; k < e.size(); ++k) {
            EXPECT_LE(std::abs(e[k] - ref[k]), 1e-6 * std::max(ref[k], 1e-6 * scale))
                << "W=" << W << " D=" << D << " T=" << T << " t=" << t << " k=" << k;
          }
        }
      }
    }
  }
}

TEST(LocalEnergy, RejectsNonFiniteTokens) {
  auto z = random_tokens(10, 2, 1);
  z[3][1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(hot::local_energy(to_sequence(z, 30.0), 0, hot::HarmonicConfig{8}), hot::Error);
}

TEST(BandBins, ThirtyHzSixtyFourWindow) {
  // df = 30/64 = 0.46875; bins 2..8 cover 0.9375..3.75 Hz.
  EXPECT_EQ(hot::band_bins(30.0, 64, 0.7, 4.0), (std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8}));
}

TEST(BandBins, UnresolvableBandIsAnError) {
  try {
    hot::band_bins(30.0, 4, 0.7, 4.0);
    FAIL();
  } catch (const hot::Error& e) {
    EXPECT_EQ(e.code(), hot::ErrorCode::band_unresolvable);
  }
}

TEST(BandBins, FullBandKeepsEveryBin) {
  for (std::size_t W : {8u, 9u, 64u}) {
    const auto bins = hot::band_bins(30.0, W, 0.0, 15.0);
    ASSERT_EQ(bins.size(), W / 2 + 1);
    for (std::size_t k = 0; k < bins.size(); ++k) EXPECT_EQ(bins[k], k);
  }
}

TEST(HarmonicRatio, HandEvaluated) {
  const std::vector<double> e{0, 0, 4, 0, 1, 0};
  const std::vector<std::size_t> band{1, 2, 3, 4, 5};
  const auto p = hot::harmonic_peak(e, band, 1e-6);
  EXPECT_EQ(p.fundamental, 2u);
  EXPECT_EQ(p.second, 4u);
  EXPECT_DOUBLE_EQ(p.ratio, 1.0 / (4.0 + 1e-6));
}

TEST(HarmonicRatio, ZeroEnergyTiesToSmallestBin) {
  const std::vector<double> e(6, 0.0);
  const std::vector<std::size_t> band{2, 3, 4};
  const auto p = hot::harmonic_peak(e, band, 1e-6);
  EXPECT_EQ(p.fundamental, 2u);
  EXPECT_EQ(p.ratio, 0.0);
}

TEST(HarmonicRatio, SecondHarmonicClampsToLastBin) {
  const std::vector<double> e{0, 0, 0, 0, 2, 1};
  const std::vector<std::size_t> band{3, 4};
  const auto p = hot::harmonic_peak(e, band, 0.0 + 1e-6);
  EXPECT_EQ(p.fundamental, 4u);
  EXPECT_EQ(p.second, 5u);
  EXPECT_NEAR(p.ratio, 0.5, 1e-6);
  EXPECT_THROW(hot::harmonic_ratio(e, std::vector<std::size_t>{}, 1e-6), hot::Error);
}

TEST(Descriptor, ZeroTokensGiveZeroRatios) {
  const auto seq = to_sequence(Tokens(64, std::vector<double>(4, 0.0)), 30.0);
  for (double v : hot::descriptor(seq, hot::HarmonicConfig{}).ratios) EXPECT_EQ(v, 0.0);
}

TEST(Descriptor, ConstantTokensSeeOnlyDcLeakage) {
  // The W-1 Hann window is not W-periodic, so DC leaks into the band with
  // E(2) ~ 3e-5 E(0) and E(4) ~ 1.2e-6 E(0).
  const Tokens z(64, std::vector<double>(4, 2.0));
  const auto r = hot::descriptor(to_sequence(z, 30.0), hot::HarmonicConfig{});
  const auto e = oracle::windowed_energy(z, 0, 64);
  EXPECT_LT(e[2], 1e-4 * e[0]);
  const double expected = e[4] / (e[2] + 1e-6);
  for (double v : r.ratios) EXPECT_NEAR(v, expected, 1e-9);
  EXPECT_LT(expected, 0.05);
}

TEST(Descriptor, RatioTracksSecondHarmonicPower) {
  const std::size_t W = 64;
  for (double a : {0.25, 0.5}) {
    const auto z = harmonic_tokens(128, 4, 4, W, a);
    const auto r = hot::descriptor(to_sequence(z, 30.0), hot::HarmonicConfig{W});
    ASSERT_EQ(r.ratios.size(), 128u);
    for (std::size_t t = 0; t < r.ratios.size(); ++t) {
      const auto ref = oracle::windowed_energy(z, t, W);
      EXPECT_NEAR(r.ratios[t], ref[8] / (ref[4] + 1e-6), 1e-9);
      EXPECT_LE(std::abs(r.ratios[t] - a * a), 0.05);
    }
  }
}

TEST(Descriptor, ScaleInvarianceAndCyclicShift) {
  // eps_h is absolute, so invariance holds to about eps_h / E(k1).
  auto z = harmonic_tokens(96, 3, 5, 64, 0.4);
  for (auto& t : z) {
    for (auto& v : t) v *= 100.0;
  }
  const auto seq = to_sequence(z, 30.0);
  const auto base = hot::descriptor(seq, hot::HarmonicConfig{});
  for (double c : {2.0, 10.0, 1000.0}) {
    auto scaled = seq;
    for (auto& v : scaled.values) v *= c;
    const auto r = hot::descriptor(scaled, hot::HarmonicConfig{});
    for (std::size_t t = 0; t < r.ratios.size(); ++t) EXPECT_NEAR(r.ratios[t], base.ratios[t], 1e-9);
  }
  for (std::size_t s : {1u, 17u, 95u}) {
    Tokens rotated(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) rotated[t] = z[(t + s) % z.size()];
    const auto r = hot::descriptor(to_sequence(rotated, 30.0), hot::HarmonicConfig{});
    for (std::size_t t = 0; t < r.ratios.size(); ++t) {
      EXPECT_EQ(r.ratios[t], base.ratios[(t + s) % z.size()]);
    }
  }
}

TEST(Descriptor, ParallelMatchesSequential) {
  const auto seq = to_sequence(random_tokens(70, 5, 77), 30.0);
  const auto a = hot::descriptor(seq, hot::HarmonicConfig{}, 1);
  const auto b = hot::descriptor(seq, hot::HarmonicConfig{}, 3);
  EXPECT_EQ(a.ratios, b.ratios);
  for (double v : a.ratios) {
    EXPECT_GE(v, 0.0);
    EXPECT_TRUE(std::isfinite(v));
  }
}

}  // namespace
