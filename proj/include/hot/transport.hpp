#pragma once

// Harmonic-augmented transport cost, log-domain Sinkhorn, and an exhaustive
// permutation oracle for small uniform-marginal problems.

#include <cstddef>
#include <span>
#include <vector>

#include "hot/harmonic.hpp"

namespace hot {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct CostMatrix {
  Matrix values;
  double lambda_h = 0.0;
};

struct SinkhornConfig {
  double epsilon = 0.05;
  std::size_t iters = 40;
  // Stop early once the row-marginal l1 error drops to this; 0 disables.
  double tol = 0.0;
};

struct TransportPlan {
  Matrix values;
  std::vector<double> a;
  std::vector<double> b;
  // l1 deviation of the plan's row / column sums from a / b.
  double row_error = 0.0;
  double col_error = 0.0;
  std::size_t iterations = 0;

  double marginal_error() const { return row_error + col_error; }
};

// C_ij = (1 - cos(z_i, z~_j)) + lambda_h |r_i - r~_j|.
CostMatrix cost_matrix(const TokenSequence& source, const TokenSequence& target,
                       const HarmonicSequence& source_ratios,
                       const HarmonicSequence& target_ratios, double lambda_h);

std::vector<double> uniform_marginal(std::size_t n);

// Entropic OT by alternating log-domain potential updates. Each iteration
// updates the row potential then the column potential, so column sums are
// matched to rounding after every iteration and row_error measures progress.
TransportPlan sinkhorn_log(const Matrix& cost, std::span<const double> a,
                           std::span<const double> b, const SinkhornConfig& config);
TransportPlan sinkhorn_log(const Matrix& cost, const SinkhornConfig& config);

// <P, C>, the linear transport objective without the entropy term.
double hot_loss(const TransportPlan& plan, const Matrix& cost);

struct ExactTransport {
  double value = 0.0;
  std::vector<std::size_t> permutation;
};

inline constexpr std::size_t kExactOtMaxSize = 8;

// Minimum of (1/n) sum_i C[i, sigma(i)] over all permutations; ties resolve
// to the lexicographically smallest sigma. Valid as the uniform-marginal OT
// optimum because the Birkhoff polytope's vertices are permutations.
ExactTransport exact_ot_uniform(const Matrix& cost);

}  // namespace hot
