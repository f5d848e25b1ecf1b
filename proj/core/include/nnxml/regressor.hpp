#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/matrix.hpp"
#include "nnxml/rng.hpp"

namespace nnxml {

/// Pre-extracted feature vectors, one row per instance.
using FeatureMatrix = DenseMatrix;

enum class RegressorKind { ridge_linear, mlp_1hidden };

struct RegressorHyperparams {
  /// Ridge penalty. The intercept is never penalised.
  double lambda = 1e-3;
  /// Perceptron settings.
  std::size_t hidden = 64;
  std::size_t epochs = 2000;
  double learning_rate = 1e-2;
};

/// Feature-to-latent regressor with an identity output layer.
///
/// ridge_linear: y = x Theta + b, layers = {Theta (d x k)}, biases = {b}.
/// mlp_1hidden:  y = relu(x W1 + b1) W2 + b2, layers = {W1, W2}.
class RegressorModel {
 public:
  RegressorModel() = default;
  RegressorModel(RegressorKind kind, std::vector<DenseMatrix> layers,
                 std::vector<std::vector<double>> biases);

  RegressorKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return layers_.front().rows(); }
  std::size_t output_dim() const noexcept { return layers_.back().cols(); }
  const std::vector<DenseMatrix>& layers() const noexcept { return layers_; }
  const std::vector<std::vector<double>>& biases() const noexcept { return biases_; }

  /// Unclamped model output for one feature vector.
  std::vector<double> predict_raw(std::span<const double> x) const;
  DenseMatrix predict_raw(const FeatureMatrix& x) const;

  friend bool operator==(const RegressorModel&, const RegressorModel&) = default;

 private:
  RegressorKind kind_ = RegressorKind::ridge_linear;
  std::vector<DenseMatrix> layers_;
  std::vector<std::vector<double>> biases_;
};

/// Fits the regressor from features to latent targets.
///
/// Ridge solves min ||Xc Theta - Wc||^2 + lambda ||Theta||^2 on centred data
/// in closed form and sets b = mean(W) - mean(X) Theta. With lambda == 0 a
/// rank-deficient system raises SingularSystemError.
///
/// The perceptron minimises 1/(2n) ||Y - W||^2 by full-batch gradient descent
/// from a Glorot-uniform start drawn from the seed; a non-finite loss raises
/// DivergenceError.
RegressorModel fit_regressor(const FeatureMatrix& x, const LatentMatrix& w, RegressorKind kind,
                             const RegressorHyperparams& hp, RngSeed seed);

/// Model output with negative entries clamped to zero.
std::vector<double> predict_latent(std::span<const double> x_row, const RegressorModel& m);
LatentMatrix predict_latent(const FeatureMatrix& x, const RegressorModel& m);

}  // namespace nnxml
