#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "hot/error.hpp"
#include "hot/metrics.hpp"
#include "oracles.hpp"

namespace {

std::vector<double> sine(double freq_hz, double rate_hz, std::size_t n, double amp = 1.0,
                         double offset = 0.0, double phase = 0.3) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = offset + amp * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate_hz + phase);
  }
  return s;
}

hot::ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const hot::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected hot::Error";
  return hot::ErrorCode::io;
}

TEST(NegPearson, Endpoints) {
  const auto y = oracle::random_values(50, 1, -1, 1);
  std::vector<double> neg(y.size()), affine(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    neg[i] = -y[i];
    affine[i] = 2.0 * y[i] + 5.0;
  }
  EXPECT_NEAR(hot::neg_pearson(y, y), 0.0, 1e-12);
  EXPECT_NEAR(hot::neg_pearson(y, neg), 2.0, 1e-12);
  EXPECT_NEAR(hot::neg_pearson(y, affine), 0.0, 1e-9);
}

TEST(NegPearson, SymmetricAndBounded) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto y = oracle::random_values(20, seed, -1, 1);
    const auto z = oracle::random_values(20, seed + 100, -1, 1);
    const double v = hot::neg_pearson(y, z);
    EXPECT_NEAR(v, hot::neg_pearson(z, y), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
}

TEST(NegPearson, Errors) {
  const std::vector<double> flat(10, 3.0), y = oracle::random_values(10, 2, 0, 1);
  EXPECT_EQ(code_of([&] { hot::neg_pearson(flat, y); }), hot::ErrorCode::degenerate);
  EXPECT_EQ(code_of([&] { hot::neg_pearson(std::vector<double>{1, 2}, std::vector<double>{2, 1}); }),
            hot::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { hot::neg_pearson(y, std::vector<double>{1, 2, 3}); }),
            hot::ErrorCode::shape_mismatch);
}

TEST(CombinedLoss, Linear) {
  EXPECT_EQ(hot::combined_loss(0.4, 7.0, 0.0), 0.4);
  EXPECT_NEAR(hot::combined_loss(0.3, 0.5, 0.1), 0.35, 1e-15);
  EXPECT_EQ(hot::combined_loss(0.4, 0.0, 0.1), 0.4);
}

TEST(HrFromSignal, OnePointTwoHertz) {
  const double hr = hot::hr_from_signal(sine(1.2, 30.0, 512), 30.0, hot::Band{});
  EXPECT_NEAR(hr, 72.0, 60.0 * 30.0 / 512.0);
  EXPECT_NEAR(hot::hr_bin_width_bpm(512, 30.0), 60.0 * 30.0 / 512.0, 1e-12);
}

TEST(HrFromSignal, TwoHertz) {
  const double hr = hot::hr_from_signal(sine(2.0, 30.0, 512), 30.0, hot::Band{});
  EXPECT_NEAR(hr, 120.0, hot::hr_bin_width_bpm(512, 30.0));
}

TEST(HrFromSignal, AmplitudeAndOffsetInvariance) {
  const double base = hot::hr_from_signal(sine(1.7, 25.0, 400), 25.0, hot::Band{});
  EXPECT_EQ(hot::hr_from_signal(sine(1.7, 25.0, 400, 40.0), 25.0, hot::Band{}), base);
  EXPECT_EQ(hot::hr_from_signal(sine(1.7, 25.0, 400, 1.0, 200.0), 25.0, hot::Band{}), base);
}

TEST(HrFromSignal, Errors) {
  EXPECT_EQ(code_of([] { hot::hr_from_signal(std::vector<double>(512, 0.7), 30.0, hot::Band{}); }),
            hot::ErrorCode::no_pulse);
  // Two cycles of 0.7 Hz at 30 Hz need 86 samples.
  EXPECT_EQ(code_of([] { hot::hr_from_signal(sine(1.2, 30.0, 80), 30.0, hot::Band{}); }),
            hot::ErrorCode::band_unresolvable);
}

TEST(Metrics, IdenticalLists) {
  const std::vector<double> v{60, 75, 90};
  const auto m = hot::metrics(v, v);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.mape, 0.0);
  ASSERT_TRUE(m.pearson_r);
  EXPECT_NEAR(*m.pearson_r, 1.0, 1e-12);
  EXPECT_EQ(m.n, 3u);
}

TEST(Metrics, HandComputedTriple) {
  const std::vector<double> gt{60, 62, 64}, pred{61, 61, 65};
  const auto m = hot::metrics(gt, pred);
  EXPECT_NEAR(m.mae, 1.0, 1e-12);
  EXPECT_NEAR(m.rmse, 1.0, 1e-12);
  // Ground-truth denominators: (1/60 + 1/62 + 1/64) / 3 * 100.
  EXPECT_NEAR(m.mape, (1.0 / 60 + 1.0 / 62 + 1.0 / 64) / 3.0 * 100.0, 1e-12);
  EXPECT_NEAR(m.mape, 1.6140233, 1e-6);
}

TEST(Metrics, AntiCorrelatedPair) {
  const auto m = hot::metrics(std::vector<double>{60, 70}, std::vector<double>{70, 60});
  ASSERT_TRUE(m.pearson_r);
  EXPECT_NEAR(*m.pearson_r, -1.0, 1e-12);
}

TEST(Metrics, RmseDominatesMae) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto gt = oracle::random_values(10, seed, 50, 150);
    const auto pred = oracle::random_values(10, seed + 7919, 50, 150);
    const auto m = hot::metrics(gt, pred);
    EXPECT_GE(m.rmse, m.mae);
  }
}

TEST(Metrics, PearsonAffineInvariance) {
  const auto y = oracle::random_values(30, 5, 60, 120);
  std::vector<double> up(y.size()), down(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    up[i] = 3.0 * y[i] + 11.0;
    down[i] = -0.5 * y[i] + 200.0;
  }
  EXPECT_NEAR(hot::pearson(y, up), 1.0, 1e-9);
  EXPECT_NEAR(hot::pearson(y, down), -1.0, 1e-9);
}

TEST(Metrics, PearsonOmittedWhenUndefined) {
  EXPECT_FALSE(hot::metrics(std::vector<double>{70}, std::vector<double>{72}).pearson_r);
  EXPECT_FALSE(hot::metrics(std::vector<double>{70, 70}, std::vector<double>{72, 75}).pearson_r);
}

TEST(Metrics, Errors) {
  EXPECT_EQ(code_of([] { hot::metrics(std::vector<double>{0, 60}, std::vector<double>{1, 60}); }),
            hot::ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { hot::metrics(std::vector<double>{60}, std::vector<double>{1, 60}); }),
            hot::ErrorCode::shape_mismatch);
  EXPECT_THROW(hot::metrics(std::vector<double>{}, std::vector<double>{}), hot::Error);
}

TEST(Metrics, Serialization) {
  const auto m = hot::metrics(std::vector<double>{60, 62, 64}, std::vector<double>{61, 61, 65});
  const auto j = nlohmann::json::parse(m.to_json());
  EXPECT_NEAR(j.at("mae").get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j.at("n").get<std::size_t>(), 3u);
  EXPECT_TRUE(j.contains("pearson_r"));
  const auto kv = m.to_key_values();
  EXPECT_NE(kv.find("mae=1\n"), std::string::npos) << kv;
  EXPECT_NE(kv.find("rmse="), std::string::npos);
  EXPECT_NE(kv.find("pearson_r="), std::string::npos);

  const auto single = hot::metrics(std::vector<double>{60}, std::vector<double>{61});
  EXPECT_FALSE(nlohmann::json::parse(single.to_json()).contains("pearson_r"));
  EXPECT_EQ(single.to_key_values().find("pearson_r"), std::string::npos);
}

TEST(BlandAltman, MeanAndDifference) {
  const auto rows = hot::bland_altman(std::vector<double>{60, 80}, std::vector<double>{64, 70});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mean, 62.0);
  EXPECT_EQ(rows[0].difference, 4.0);
  EXPECT_EQ(rows[1].mean, 75.0);
  EXPECT_EQ(rows[1].difference, -10.0);
}

}  // namespace
