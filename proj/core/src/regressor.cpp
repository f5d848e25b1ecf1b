#include "nnxml/regressor.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;

ConstMap as_eigen(const DenseMatrix& m) {
  return ConstMap(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

DenseMatrix from_eigen(const RowMajor& m) {
  return DenseMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                     std::vector<double>(m.data(), m.data() + m.size()));
}

RegressorModel fit_ridge(const FeatureMatrix& x, const LatentMatrix& w, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("ridge: lambda must be >= 0");
  const ConstMap X = as_eigen(x);
  const ConstMap W = as_eigen(w);
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd w_mean = W.colwise().mean();
  const RowMajor xc = X.rowwise() - x_mean;
  const RowMajor wc = W.rowwise() - w_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  const Eigen::MatrixXd rhs = xc.transpose() * wc;
  Eigen::MatrixXd theta;
  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < gram.rows()) {
      throw SingularSystemError("ridge: normal equations are singular (rank " +
                                std::to_string(qr.rank()) + " of " +
                                std::to_string(gram.rows()) + ") with lambda = 0");
    }
    theta = qr.solve(rhs);
  } else {
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw SingularSystemError("ridge: Cholesky failed");
    theta = llt.solve(rhs);
  }
  const Eigen::RowVectorXd bias = w_mean - x_mean * theta;
  return RegressorModel(RegressorKind::ridge_linear, {from_eigen(theta)},
                        {std::vector<double>(bias.data(), bias.data() + bias.size())});
}

RegressorModel fit_mlp(const FeatureMatrix& x, const LatentMatrix& w,
                       const RegressorHyperparams& hp, RngSeed seed) {
  if (hp.hidden == 0) throw ConfigError("mlp: hidden width must be >= 1");
  if (!(hp.learning_rate > 0.0)) throw ConfigError("mlp: learning_rate must be > 0");
  const Eigen::Index n = static_cast<Eigen::Index>(x.rows());
  const Eigen::Index d = static_cast<Eigen::Index>(x.cols());
  const Eigen::Index h = static_cast<Eigen::Index>(hp.hidden);
  const Eigen::Index k = static_cast<Eigen::Index>(w.cols());

  Rng rng(seed);
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    RowMajor m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-a, a);
    return m;
  };
  RowMajor w1 = glorot(d, h);
  Eigen::RowVectorXd b1 = Eigen::RowVectorXd::Zero(h);
  RowMajor w2 = glorot(h, k);
  Eigen::RowVectorXd b2 = Eigen::RowVectorXd::Zero(k);

  const ConstMap X = as_eigen(x);
  const ConstMap W = as_eigen(w);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    const RowMajor pre = (X * w1).rowwise() + b1;
    const RowMajor act = pre.cwiseMax(0.0);
    const RowMajor out = (act * w2).rowwise() + b2;
    const RowMajor err = out - W;
    const double loss = 0.5 * inv_n * err.squaredNorm();
    if (!std::isfinite(loss)) {
      throw DivergenceError("mlp: loss became non-finite at epoch " + std::to_string(epoch),
                            epoch);
    }
    const RowMajor g_out = err * inv_n;
    const RowMajor g_w2 = act.transpose() * g_out;
    const Eigen::RowVectorXd g_b2 = g_out.colwise().sum();
    const RowMajor g_act = g_out * w2.transpose();
    const RowMajor g_pre = g_act.array() * (pre.array() > 0.0).cast<double>();
    const RowMajor g_w1 = X.transpose() * g_pre;
    const Eigen::RowVectorXd g_b1 = g_pre.colwise().sum();
    w1 -= hp.learning_rate * g_w1;
    b1 -= hp.learning_rate * g_b1;
    w2 -= hp.learning_rate * g_w2;
    b2 -= hp.learning_rate * g_b2;
  }
  auto vec = [](const Eigen::RowVectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return RegressorModel(RegressorKind::mlp_1hidden, {from_eigen(w1), from_eigen(w2)},
                        {vec(b1), vec(b2)});
}

}  // namespace

RegressorModel::RegressorModel(RegressorKind kind, std::vector<DenseMatrix> layers,
                               std::vector<std::vector<double>> biases)
    : kind_(kind), layers_(std::move(layers)), biases_(std::move(biases)) {
  const std::size_t expected = kind_ == RegressorKind::ridge_linear ? 1 : 2;
  if (layers_.size() != expected || biases_.size() != expected) {
    throw ShapeError("RegressorModel: expected " + std::to_string(expected) +
                     " weight matrices and bias vectors");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (l > 0 && layers_[l].rows() != layers_[l - 1].cols()) {
      throw ShapeError("RegressorModel: layer shapes do not chain");
    }
    if (biases_[l].size() != layers_[l].cols()) {
      throw ShapeError("RegressorModel: bias length does not match layer width");
    }
    for (double b : biases_[l])
      if (!std::isfinite(b)) throw ValueError("RegressorModel: non-finite bias");
  }
}

std::vector<double> RegressorModel::predict_raw(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ShapeError("predict: feature vector has length " + std::to_string(x.size()) +
                     ", model expects " + std::to_string(input_dim()));
  }
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseMatrix& m = layers_[l];
    std::vector<double> next = biases_[l];
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double xi = cur[i];
      if (xi == 0.0) continue;
      auto row = m.row(i);
      for (std::size_t j = 0; j < next.size(); ++j) next[j] += xi * row[j];
    }
    const bool hidden = l + 1 < layers_.size();
    if (hidden)
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    cur = std::move(next);
  }
  return cur;
}

DenseMatrix RegressorModel::predict_raw(const FeatureMatrix& x) const {
  DenseMatrix out(x.rows(), output_dim());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto y = predict_raw(x.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

RegressorModel fit_regressor(const FeatureMatrix& x, const LatentMatrix& w, RegressorKind kind,
                             const RegressorHyperparams& hp, RngSeed seed) {
  if (x.rows() != w.rows()) {
    throw ShapeError("fit_regressor: " + std::to_string(x.rows()) + " feature rows vs " +
                     std::to_string(w.rows()) + " latent rows");
  }
  if (x.rows() == 0) throw ShapeError("fit_regressor: no training rows");
  if (w.min_value() < 0.0) throw ValueError("fit_regressor: latent targets must be >= 0");
  return kind == RegressorKind::ridge_linear ? fit_ridge(x, w, hp.lambda)
                                             : fit_mlp(x, w, hp, seed);
}

std::vector<double> predict_latent(std::span<const double> x_row, const RegressorModel& m) {
  auto y = m.predict_raw(x_row);
  for (double& v : y) v = v > 0.0 ? v : 0.0;
  return y;
}

LatentMatrix predict_latent(const FeatureMatrix& x, const RegressorModel& m) {
  DenseMatrix out = m.predict_raw(x);
  project_nonneg_inplace(out);
  return out;
}

}  // namespace nnxml
