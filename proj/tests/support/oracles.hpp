#pragma once

// Test-side reference computations. Everything here goes through Eigen or
// plain loops so it shares no code with the library under test.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const nnxml::DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline Eigen::MatrixXd to_eigen(const nnxml::LabelMatrix& v) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v.n_rows(), v.n_labels());
  for (const auto& e : v.entries()) m(e.row, e.col) = e.value;
  return m;
}

inline nnxml::DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  nnxml::DenseMatrix a(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  return a;
}

inline nnxml::LabelMatrix label_matrix(const Eigen::MatrixXd& m) {
  std::vector<nnxml::LabelEntry> entries;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) entries.push_back({std::size_t(i), std::size_t(j), m(i, j)});
  return nnxml::LabelMatrix(m.rows(), m.cols(), std::move(entries));
}

// Independent generator so test data does not depend on the library RNG.
struct TestRng {
  std::mt19937_64 gen;
  explicit TestRng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  bool coin(double p) { return uniform() < p; }
};

inline Eigen::MatrixXd random_dense(Eigen::Index r, Eigen::Index c, TestRng& rng,
                                    double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Eigen::MatrixXd random_binary(Eigen::Index r, Eigen::Index c, double density,
                                     TestRng& rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (rng.coin(density)) m(i, j) = 1.0;
  return m;
}

// Squared error of the best rank-k approximation: the sum of the squared
// singular values beyond the k-th. Small inputs use a full SVD; wide inputs
// go through the eigenvalues of the Gram matrix V^T V.
inline double svd_floor(const Eigen::MatrixXd& v, Eigen::Index k) {
  if (v.cols() <= 256 && v.rows() <= 2048) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
    const auto& s = svd.singularValues();
    double floor = 0.0;
    for (Eigen::Index i = k; i < s.size(); ++i) floor += s(i) * s(i);
    return floor;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.transpose() * v,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  double floor = 0.0;
  for (Eigen::Index i = 0; i + k < ev.size(); ++i) floor += std::max(ev(i), 0.0);
  return floor;
}

inline Eigen::MatrixXd combined(const nnxml::EncoderStack& s) {
  Eigen::MatrixXd e = to_eigen(s.layer(1));
  for (std::size_t l = 2; l <= s.depth(); ++l) e = e * to_eigen(s.layer(l));
  return e;
}

// ||V - V E E^T||_F^2 evaluated densely.
inline double ae_loss(const Eigen::MatrixXd& v, const nnxml::EncoderStack& s) {
  const Eigen::MatrixXd e = combined(s);
  return (v - v * e * e.transpose()).squaredNorm();
}

inline double ae_loss(const Eigen::MatrixXd& v, const std::vector<Eigen::MatrixXd>& layers) {
  Eigen::MatrixXd e = layers[0];
  for (std::size_t l = 1; l < layers.size(); ++l) e = e * layers[l];
  return (v - v * e * e.transpose()).squaredNorm();
}

// Central differences of ae_loss with respect to every entry of one layer.
inline Eigen::MatrixXd fd_layer_gradient(const Eigen::MatrixXd& v,
                                         std::vector<Eigen::MatrixXd> layers, std::size_t l,
                                         double step) {
  Eigen::MatrixXd g(layers[l].rows(), layers[l].cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double orig = layers[l](i, j);
      layers[l](i, j) = orig + step;
      const double up = ae_loss(v, layers);
      layers[l](i, j) = orig - step;
      const double down = ae_loss(v, layers);
      layers[l](i, j) = orig;
      g(i, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

inline nnxml::EncoderStack random_stack(std::size_t p, const std::vector<std::size_t>& dims,
                                        TestRng& rng) {
  std::vector<nnxml::DenseMatrix> layers;
  std::size_t in = p;
  for (std::size_t k : dims) {
    layers.push_back(from_eigen(random_dense(in, k, rng, 0.0, 1.0)));
    in = k;
  }
  return nnxml::EncoderStack(p, std::move(layers));
}

// B * C with B a row-to-block indicator (row i in block i % blocks) and C
// giving each label to one block (label j owned by block j % blocks) with a
// uniform(0.5, 1.5) strength. Owned entries are then scaled by
// (1 + noise * (u - 1/2)) so zeros stay zero.
inline Eigen::MatrixXd planted_owned_blocks(Eigen::Index n, Eigen::Index p, Eigen::Index blocks,
                                            double noise, std::uint64_t seed) {
  TestRng rng(seed);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(blocks, p);
  for (Eigen::Index j = 0; j < p; ++j) c(j % blocks, j) = rng.uniform(0.5, 1.5);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, blocks);
  for (Eigen::Index i = 0; i < n; ++i) b(i, i % blocks) = 1.0;
  Eigen::MatrixXd v = b * c;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (v(i, j) != 0.0) v(i, j) *= 1.0 + noise * (rng.uniform() - 0.5);
  return v;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nnxml_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
