#include "nnxml/nmf.hpp"

#include <algorithm>
#include <cmath>

#include "nnxml/errors.hpp"
#include "nnxml/parallel.hpp"

namespace nnxml {
namespace {

DenseMatrix random_factor(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(0.1, 1.0) * scale;
  return m;
}

// target .*= numer ./ (denom + eps)
void multiplicative_update(DenseMatrix& target, const DenseMatrix& numer,
                           const DenseMatrix& denom, double eps) {
  auto t = target.values();
  auto n = numer.values();
  auto d = denom.values();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= n[i] / (d[i] + eps);
}

}  // namespace

void validate_nmf_config(const NmfConfig& cfg, std::size_t n, std::size_t p) {
  if (cfg.k < 1 || cfg.k >= std::min(n, p)) {
    throw ConfigError("nmf: rank k=" + std::to_string(cfg.k) +
                      " must satisfy 1 <= k < min(n, p) = " +
                      std::to_string(std::min(n, p)));
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("nmf: epsilon must be > 0");
  if (!(cfg.rel_tol >= 0.0)) throw ConfigError("nmf: rel_tol must be >= 0");
  if (cfg.max_iters < 1) throw ConfigError("nmf: max_iters must be >= 1");
}

double nmf_objective(const LabelMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  if (w.rows() != v.n_rows() || h.cols() != v.n_labels() || w.cols() != h.rows()) {
    throw ShapeError("nmf_objective: V is " + std::to_string(v.n_rows()) + "x" +
                     std::to_string(v.n_labels()) + ", W is " + w.shape_string() +
                     ", H is " + h.shape_string());
  }
  const std::size_t p = v.n_labels();
  const double sum = deterministic_row_sum(v.n_rows(), [&](std::size_t i) {
    std::vector<double> residual(p, 0.0);
    auto wi = w.row(i);
    for (std::size_t r = 0; r < wi.size(); ++r) {
      const double coef = wi[r];
      if (coef == 0.0) continue;
      auto hr = h.row(r);
      for (std::size_t j = 0; j < p; ++j) residual[j] -= coef * hr[j];
    }
    auto cols = v.row_cols(i);
    auto vals = v.row_values(i);
    for (std::size_t t = 0; t < cols.size(); ++t) residual[cols[t]] += vals[t];
    double s = 0.0;
    for (double x : residual) s += x * x;
    return s;
  });
  return 0.5 * sum;
}

double nmf_objective(const LabelMatrix& v, const NmfFactors& f) {
  return nmf_objective(v, f.w, f.h);
}

NmfFactors nmf_factorize(const LabelMatrix& v, const NmfConfig& cfg) {
  validate_nmf_config(cfg, v.n_rows(), v.n_labels());
  // LabelMatrix already rejects negatives; kept for callers that bypass it.
  for (const auto& e : v.entries())
    if (e.value < 0.0) throw ValueError("nmf: label matrix has a negative entry");

  Rng rng(cfg.seed);
  const double init_scale = std::sqrt(v.mean_value() / static_cast<double>(cfg.k));
  NmfFactors f;
  f.k = cfg.k;
  f.w = random_factor(rng, v.n_rows(), cfg.k, init_scale);
  f.h = random_factor(rng, cfg.k, v.n_labels(), init_scale);

  double prev = nmf_objective(v, f);
  f.objective_trace.push_back(prev);
  for (std::size_t it = 0; it < cfg.max_iters && prev > 0.0; ++it) {
    // H update.
    const DenseMatrix wtv = v.transpose_times(f.w).transpose();  // k x p
    const DenseMatrix wtw = matmul_tn(f.w, f.w);                  // k x k
    multiplicative_update(f.h, wtv, matmul(wtw, f.h), cfg.epsilon);
    // W update.
    const DenseMatrix ht = f.h.transpose();                // p x k
    const DenseMatrix vht = v.times(ht);                   // n x k
    const DenseMatrix hht = matmul_nt(f.h, f.h);           // k x k
    multiplicative_update(f.w, vht, matmul(f.w, hht), cfg.epsilon);

    const double cur = nmf_objective(v, f);
    f.objective_trace.push_back(cur);
    const double change = std::abs(prev - cur) / std::max(prev, 1e-300);
    prev = cur;
    if (change < cfg.rel_tol) break;
  }
  return f;
}

}  // namespace nnxml
