#pragma once

#include <cstddef>
#include <vector>

#include "nnxml/matrix.hpp"
#include "nnxml/rng.hpp"

namespace nnxml {

struct NmfConfig {
  std::size_t k = 16;
  std::size_t max_iters = 5000;
  /// Stop once |f_prev - f| / f_prev drops below this.
  double rel_tol = 1e-6;
  /// Added to every update denominator.
  double epsilon = 1e-12;
  RngSeed seed{};
};

/// V ~= W H with W (n x k) and H (k x p) entrywise non-negative.
struct NmfFactors {
  DenseMatrix w;
  DenseMatrix h;
  std::size_t k = 0;
  /// trace[0] is the objective at the initial factors, then one value per
  /// multiplicative-update iteration.
  std::vector<double> objective_trace;
};

/// Throws ConfigError unless 1 <= k < min(n, p), epsilon > 0, rel_tol >= 0
/// and max_iters >= 1.
void validate_nmf_config(const NmfConfig& cfg, std::size_t n, std::size_t p);

/// Lee-Seung multiplicative updates for 1/2 ||V - WH||_F^2:
///
///   H <- H .* (W^T V) ./ (W^T W H + eps)
///   W <- W .* (V H^T) ./ (W H H^T + eps)
///
/// Factors start at uniform(0.1, 1.0) * sqrt(mean(V) / k) drawn from the seed,
/// W first, row-major. Each update is monotone in the objective, so the trace
/// is non-increasing up to rounding.
NmfFactors nmf_factorize(const LabelMatrix& v, const NmfConfig& cfg);

/// 1/2 ||V - W H||_F^2, accumulated row by row.
double nmf_objective(const LabelMatrix& v, const DenseMatrix& w, const DenseMatrix& h);
double nmf_objective(const LabelMatrix& v, const NmfFactors& f);

}  // namespace nnxml
