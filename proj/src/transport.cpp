#include "hot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hot/error.hpp"

namespace hot {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_marginal(std::span<const double> m, std::size_t n, const char* name) {
  if (m.size() != n) {
    throw Error(ErrorCode::shape_mismatch, std::string("marginal ") + name + " has wrong length");
  }
  double sum = 0.0;
  for (double x : m) {
    if (!std::isfinite(x) || x <= 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("marginal ") + name + " must be strictly positive");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_argument, std::string("marginal ") + name + " must sum to 1");
  }
}

}  // namespace

CostMatrix cost_matrix(const TokenSequence& source, const TokenSequence& target,
                       const HarmonicSequence& source_ratios,
                       const HarmonicSequence& target_ratios, double lambda_h) {
  if (source.dim == 0 || source.dim != target.dim) {
    throw Error(ErrorCode::shape_mismatch, "token dimensions differ");
  }
  if (source_ratios.ratios.size() != source.size() ||
      target_ratios.ratios.size() != target.size()) {
    throw Error(ErrorCode::shape_mismatch, "harmonic ratios are not aligned with tokens");
  }
  if (!(lambda_h >= 0.0) || !std::isfinite(lambda_h)) {
    throw Error(ErrorCode::out_of_range, "lambda_h must be >= 0");
  }
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  std::vector<double> target_norm(m);
  for (std::size_t j = 0; j < m; ++j) {
    target_norm[j] = norm(target.token(j));
    if (!(target_norm[j] > 0.0)) {
      throw Error(ErrorCode::degenerate, "target token " + std::to_string(j) + " has zero norm");
    }
  }
  CostMatrix cost{Matrix(n, m), lambda_h};
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = source.token(i);
    const double ni = norm(zi);
    if (!(ni > 0.0)) {
      throw Error(ErrorCode::degenerate, "source token " + std::to_string(i) + " has zero norm");
    }
    for (std::size_t j = 0; j < m; ++j) {
      const auto zj = target.token(j);
      // cos(z, z) is exactly 1; the quotient below can round to 1 - 1ulp.
      double cosine = 1.0;
      if (!std::equal(zi.begin(), zi.end(), zj.begin())) {
        const double dot = std::inner_product(zi.begin(), zi.end(), zj.begin(), 0.0);
        cosine = std::clamp(dot / (ni * target_norm[j]), -1.0, 1.0);
      }
      cost.values(i, j) = (1.0 - cosine) +
                          lambda_h * std::abs(source_ratios.ratios[i] - target_ratios.ratios[j]);
    }
  }
  return cost;
}

std::vector<double> uniform_marginal(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty marginal");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

TransportPlan sinkhorn_log(const Matrix& cost, std::span<const double> a,
                           std::span<const double> b, const SinkhornConfig& config) {
  const std::size_t n = cost.rows;
  const std::size_t m = cost.cols;
  if (n == 0 || m == 0 || cost.values.size() != n * m) {
    throw Error(ErrorCode::shape_mismatch, "cost matrix is empty or inconsistent");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw Error(ErrorCode::out_of_range, "epsilon must be positive");
  }
  if (config.iters == 0) throw Error(ErrorCode::out_of_range, "sinkhorn needs iters >= 1");
  for (double c : cost.values) {
    if (!std::isfinite(c)) throw Error(ErrorCode::non_finite, "cost matrix has non-finite entries");
  }
  check_marginal(a, n, "a");
  check_marginal(b, m, "b");

  const double eps = config.epsilon;
  std::vector<double> log_a(n), log_b(m);
  std::transform(a.begin(), a.end(), log_a.begin(), [](double x) { return std::log(x); });
  std::transform(b.begin(), b.end(), log_b.begin(), [](double x) { return std::log(x); });

  // P_ij = a_i b_j exp((f_i + g_j - C_ij) / eps)
  std::vector<double> f(n, 0.0), g(m, 0.0), scratch(std::max(n, m));

  auto row_log_mass = [&](std::size_t i) {
    // log sum_j b_j exp((g_j - C_ij) / eps), max-stabilized
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      scratch[j] = log_b[j] + (g[j] - cost(i, j)) / eps;
      peak = std::max(peak, scratch[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::exp(scratch[j] - peak);
    return peak + std::log(s);
  };
  auto col_log_mass = [&](std::size_t j) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      scratch[i] = log_a[i] + (f[i] - cost(i, j)) / eps;
      peak = std::max(peak, scratch[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(scratch[i] - peak);
    return peak + std::log(s);
  };
  // With g freshly updated, row i of the plan sums to a_i exp(f_i/eps) * mass_i.
  auto row_error = [&]() {
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err += std::abs(a[i] * std::exp(f[i] / eps + row_log_mass(i)) - a[i]);
    }
    return err;
  };

  TransportPlan plan;
  for (std::size_t it = 0; it < config.iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) f[i] = -eps * row_log_mass(i);
    for (std::size_t j = 0; j < m; ++j) g[j] = -eps * col_log_mass(j);
    plan.iterations = it + 1;
    if (config.tol > 0.0 && row_error() <= config.tol) break;
  }
  for (double v : f) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "row potential diverged");
  }
  for (double v : g) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "column potential diverged");
  }

  plan.values = Matrix(n, m);
  plan.a.assign(a.begin(), a.end());
  plan.b.assign(b.begin(), b.end());
  std::vector<double> row_sum(n, 0.0), col_sum(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double p = std::exp(log_a[i] + log_b[j] + (f[i] + g[j] - cost(i, j)) / eps);
      plan.values(i, j) = p;
      row_sum[i] += p;
      col_sum[j] += p;
    }
  }
  for (std::size_t i = 0; i < n; ++i) plan.row_error += std::abs(row_sum[i] - a[i]);
  for (std::size_t j = 0; j < m; ++j) plan.col_error += std::abs(col_sum[j] - b[j]);
  return plan;
}

TransportPlan sinkhorn_log(const Matrix& cost, const SinkhornConfig& config) {
  const auto a = uniform_marginal(cost.rows);
  const auto b = uniform_marginal(cost.cols);
  return sinkhorn_log(cost, a, b, config);
}

double hot_loss(const TransportPlan& plan, const Matrix& cost) {
  if (plan.values.rows != cost.rows || plan.values.cols != cost.cols ||
      plan.values.values.size() != cost.values.size()) {
    throw Error(ErrorCode::shape_mismatch, "plan and cost shapes differ");
  }
  return std::inner_product(plan.values.values.begin(), plan.values.values.end(),
                            cost.values.begin(), 0.0);
}

ExactTransport exact_ot_uniform(const Matrix& cost) {
  const std::size_t n = cost.rows;
  if (n == 0 || cost.cols != n) throw Error(ErrorCode::shape_mismatch, "oracle needs a square cost");
  if (n > kExactOtMaxSize) {
    throw Error(ErrorCode::oracle_scope,
                "exhaustive oracle limited to n <= 8, got " + std::to_string(n));
  }
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  ExactTransport best{std::numeric_limits<double>::infinity(), sigma};
  // next_permutation walks in lexicographic order; strict '<' keeps the first.
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, sigma[i]);
    if (total < best.value) {
      best.value = total;
      best.permutation = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  best.value /= static_cast<double>(n);
  return best;
}

}  // namespace hot
