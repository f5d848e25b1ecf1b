#include "nnxml/lime.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

struct WeightedFit {
  Eigen::VectorXd coef;  // intercept first
  double wrss = 0.0;
};

// Weighted least squares of y on [1, Z_selected].
WeightedFit weighted_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& sqrt_w, const std::vector<std::size_t>& cols) {
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(cols.size()) + 1);
  design.col(0) = sqrt_w;
  for (std::size_t c = 0; c < cols.size(); ++c)
    design.col(static_cast<Eigen::Index>(c) + 1) =
        z.col(static_cast<Eigen::Index>(cols[c])).cwiseProduct(sqrt_w);
  const Eigen::VectorXd target = y.cwiseProduct(sqrt_w);
  WeightedFit fit;
  fit.coef = design.completeOrthogonalDecomposition().solve(target);
  fit.wrss = (target - design * fit.coef).squaredNorm();
  return fit;
}

}  // namespace

SurrogateExplanation lime_explain(std::span<const double> x_row, const ScalarFn& predict_fn,
                                  const LimeConfig& cfg) {
  const std::size_t d = x_row.size();
  if (d == 0) throw ShapeError("lime: empty feature vector");
  if (cfg.num_samples < cfg.k_features + 2) {
    throw ConfigError("lime: num_samples (" + std::to_string(cfg.num_samples) +
                      ") must be at least k_features + 2 (" +
                      std::to_string(cfg.k_features + 2) + ")");
  }
  if (!cfg.baseline.empty() && cfg.baseline.size() != 1 && cfg.baseline.size() != d) {
    throw ShapeError("lime: baseline must have 1 or " + std::to_string(d) + " values");
  }
  const double width = cfg.kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(d)));
  if (!(width > 0.0)) throw ConfigError("lime: kernel_width must be > 0");
  auto baseline_at = [&](std::size_t j) {
    if (cfg.baseline.empty()) return 0.0;
    return cfg.baseline.size() == 1 ? cfg.baseline[0] : cfg.baseline[j];
  };

  const auto n = static_cast<Eigen::Index>(cfg.num_samples);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(n);
  Eigen::VectorXd sqrt_w(n);
  Rng rng(cfg.seed);
  std::vector<double> masked(d);
  for (Eigen::Index s = 0; s < n; ++s) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const bool keep = rng.bernoulli(0.5);
      z(s, static_cast<Eigen::Index>(j)) = keep ? 1.0 : 0.0;
      masked[j] = keep ? x_row[j] : baseline_at(j);
      off += !keep;
    }
    const double out = predict_fn(masked);
    if (!std::isfinite(out)) {
      throw ValueError("lime: black-box output is non-finite at sample " + std::to_string(s));
    }
    y(s) = out;
    const double h = static_cast<double>(off);
    sqrt_w(s) = std::sqrt(std::exp(-(h * h) / (width * width)));
  }

  SurrogateExplanation ex;
  if (y.maxCoeff() == y.minCoeff()) {
    ex.intercept = y(0);
    ex.local_fit_r2 = 0.0;
    ex.degenerate = true;
    return ex;
  }

  const std::size_t k = std::min(cfg.k_features, d);
  std::vector<std::size_t> selected;
  std::vector<bool> used(d, false);
  while (selected.size() < k) {
    std::size_t best = d;
    double best_wrss = 0.0;
    std::vector<std::size_t> trial = selected;
    trial.push_back(0);
    for (std::size_t j = 0; j < d; ++j) {
      if (used[j]) continue;
      trial.back() = j;
      const double wrss = weighted_fit(z, y, sqrt_w, trial).wrss;
      if (best == d || wrss < best_wrss) {
        best = j;
        best_wrss = wrss;
      }
    }
    used[best] = true;
    selected.push_back(best);
  }

  const WeightedFit fit = weighted_fit(z, y, sqrt_w, selected);
  const Eigen::VectorXd w = sqrt_w.cwiseProduct(sqrt_w);
  const double y_mean = w.dot(y) / w.sum();
  const double wtss = (w.array() * (y.array() - y_mean).square()).sum();
  ex.intercept = fit.coef(0);
  ex.local_fit_r2 = wtss > 0.0 ? 1.0 - fit.wrss / wtss : 0.0;
  for (std::size_t c = 0; c < selected.size(); ++c)
    ex.feature_weights.push_back({selected[c], fit.coef(static_cast<Eigen::Index>(c) + 1)});
  std::sort(ex.feature_weights.begin(), ex.feature_weights.end(),
            [](const FeatureWeight& a, const FeatureWeight& b) {
              const double wa = std::abs(a.weight), wb = std::abs(b.weight);
              return wa != wb ? wa > wb : a.feature < b.feature;
            });
  return ex;
}

}  // namespace nnxml
