#include "nnxml/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nnxml/errors.hpp"
#include "nnxml/nmf.hpp"
#include "nnxml/parallel.hpp"

namespace nnxml {
namespace {

using Layers = std::vector<DenseMatrix>;

constexpr double kStepShrink = 0.5;
constexpr double kStepGrow = 1.25;
constexpr std::size_t kMaxHalvings = 60;

DenseMatrix chain_product(const Layers& layers) {
  DenseMatrix e = layers.front();
  for (std::size_t l = 1; l < layers.size(); ++l) e = matmul(e, layers[l]);
  return e;
}

// ||V - A E^T||_F^2 where A = V E; reconstruction of row i is a_i E^T.
double residual_loss(const LabelMatrix& v, const DenseMatrix& a, const DenseMatrix& e) {
  const std::size_t p = v.n_labels();
  return deterministic_row_sum(v.n_rows(), [&](std::size_t i) {
    auto ai = a.row(i);
    std::vector<double> residual(p);
    for (std::size_t j = 0; j < p; ++j) {
      auto ej = e.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < ai.size(); ++k) s += ai[k] * ej[k];
      residual[j] = -s;
    }
    auto cols = v.row_cols(i);
    auto vals = v.row_values(i);
    for (std::size_t t = 0; t < cols.size(); ++t) residual[cols[t]] += vals[t];
    double s = 0.0;
    for (double x : residual) s += x * x;
    return s;
  });
}

struct Evaluation {
  DenseMatrix e;  // p x k_L
  DenseMatrix a;  // n x k_L, V E
  double loss = 0.0;
};

Evaluation evaluate(const LabelMatrix& v, const Layers& layers) {
  Evaluation ev;
  ev.e = chain_product(layers);
  ev.a = v.times(ev.e);
  ev.loss = residual_loss(v, ev.a, ev.e);
  return ev;
}

Layers layer_gradients(const LabelMatrix& v, const Layers& layers, const Evaluation& ev) {
  const DenseMatrix vta = v.transpose_times(ev.a);  // p x k
  const DenseMatrix ete = matmul_tn(ev.e, ev.e);    // k x k
  const DenseMatrix ata = matmul_tn(ev.a, ev.a);    // k x k
  DenseMatrix g = scale(vta, 2.0);
  g = subtract(g, matmul(vta, ete));
  g = subtract(g, matmul(ev.e, ata));
  g = scale(g, -2.0);

  const std::size_t depth = layers.size();
  // suffix[l] = H_{l+2} ... H_L (0-based l), empty for the last layer.
  std::vector<std::optional<DenseMatrix>> suffix(depth);
  for (std::size_t l = depth - 1; l-- > 0;) {
    suffix[l] = suffix[l + 1] ? matmul(layers[l + 1], *suffix[l + 1]) : layers[l + 1];
  }
  Layers grads;
  grads.reserve(depth);
  std::optional<DenseMatrix> prefix;  // H_1 ... H_{l}, empty before the first
  for (std::size_t l = 0; l < depth; ++l) {
    DenseMatrix left = prefix ? matmul_tn(*prefix, g) : g;  // k_{l-1} x k_L
    grads.push_back(suffix[l] ? matmul_nt(left, *suffix[l]) : std::move(left));
    prefix = prefix ? matmul(*prefix, layers[l]) : layers[l];
  }
  return grads;
}

Layers projected_step(const Layers& layers, const Layers& grads, double step) {
  Layers out = layers;
  for (std::size_t l = 0; l < out.size(); ++l) {
    auto dst = out[l].values();
    auto g = grads[l].values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double x = dst[i] - step * g[i];
      dst[i] = x > 0.0 ? x : 0.0;
    }
  }
  return out;
}

bool all_finite(const Layers& layers) {
  return std::all_of(layers.begin(), layers.end(),
                     [](const DenseMatrix& m) { return m.all_finite(); });
}

// Scales the stack by the factor minimising ||V - t V E E^T||^2 over t > 0:
// t* = <V, A E^T> / ||A E^T||^2 = <V^T A, E> / <A^T A, E^T E>.
void rescale_along_ray(const LabelMatrix& v, Layers& layers) {
  const DenseMatrix e = chain_product(layers);
  const DenseMatrix a = v.times(e);
  const DenseMatrix vta = v.transpose_times(a);
  const DenseMatrix ata = matmul_tn(a, a);
  const DenseMatrix ete = matmul_tn(e, e);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < vta.size(); ++i) num += vta.values()[i] * e.values()[i];
  for (std::size_t i = 0; i < ata.size(); ++i) den += ata.values()[i] * ete.values()[i];
  const double t = num / den;
  if (!(t > 0.0) || !std::isfinite(t)) return;
  // E scales by sqrt(t); spread evenly over the layers.
  const double per_layer = std::pow(t, 0.5 / static_cast<double>(layers.size()));
  for (auto& h : layers)
    for (double& x : h.values()) x *= per_layer;
}

Layers init_random(const LabelMatrix& v, const AeTrainConfig& cfg, Rng& rng) {
  Layers layers;
  std::size_t rows = v.n_labels();
  for (std::size_t k : cfg.layer_dims) {
    const double hi = std::sqrt(1.0 / static_cast<double>(k));
    DenseMatrix h(rows, k);
    for (double& x : h.values()) x = rng.uniform(0.0, hi);
    layers.push_back(std::move(h));
    rows = k;
  }
  return layers;
}

Layers init_nmf_greedy(const LabelMatrix& v, const AeTrainConfig& cfg) {
  Layers layers;
  LabelMatrix input = v;
  for (std::size_t l = 0; l < cfg.layer_dims.size(); ++l) {
    NmfConfig nc;
    nc.k = cfg.layer_dims[l];
    nc.max_iters = 500;
    nc.rel_tol = 1e-5;
    nc.seed = RngSeed{cfg.seed.value + 0x9e3779b97f4a7c15ULL * (l + 1)};
    NmfFactors f = nmf_factorize(input, nc);
    DenseMatrix h = f.h.transpose();  // cols(input) x k_l
    for (std::size_t c = 0; c < h.cols(); ++c) {
      double norm = 0.0;
      for (std::size_t r = 0; r < h.rows(); ++r) norm += h(r, c) * h(r, c);
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      for (std::size_t r = 0; r < h.rows(); ++r) h(r, c) /= norm;
    }
    const DenseMatrix next = input.times(h);
    layers.push_back(std::move(h));
    input = dense_to_sparse(next, 0.0);
  }
  return layers;
}

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s;
}

double layers_loss(const LabelMatrix& v, const Layers& layers) {
  return evaluate(v, layers).loss;
}

}  // namespace

EncoderStack::EncoderStack(std::size_t p, std::vector<DenseMatrix> layers,
                           std::vector<double> training_trace)
    : p_(p), layers_(std::move(layers)), trace_(std::move(training_trace)) {
  if (layers_.empty()) throw ConfigError("EncoderStack: at least one layer is required");
  std::size_t rows = p_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseMatrix& h = layers_[l];
    const std::string name = "H_" + std::to_string(l + 1);
    if (h.rows() != rows) {
      throw ShapeError("EncoderStack: " + name + " is " + h.shape_string() + ", expected " +
                       std::to_string(rows) + " rows");
    }
    if (h.cols() == 0 || h.cols() >= rows) {
      throw ConfigError("EncoderStack: " + name + " width " + std::to_string(h.cols()) +
                        " must be in [1, " + std::to_string(rows) + ")");
    }
    if (!h.all_finite()) throw ValueError("EncoderStack: " + name + " has a non-finite entry");
    if (h.min_value() < 0.0) throw ValueError("EncoderStack: " + name + " has a negative entry");
    rows = h.cols();
  }
}

std::vector<std::size_t> EncoderStack::layer_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& h : layers_) dims.push_back(h.cols());
  return dims;
}

const DenseMatrix& EncoderStack::layer(std::size_t index) const {
  if (index < 1 || index > layers_.size()) {
    throw IndexError("EncoderStack: layer index " + std::to_string(index) +
                     " outside [1, " + std::to_string(layers_.size()) + "]");
  }
  return layers_[index - 1];
}

DenseMatrix EncoderStack::combined() const { return chain_product(layers_); }

double EncoderStack::min_entry() const {
  double m = layers_.front().min_value();
  for (const auto& h : layers_) m = std::min(m, h.min_value());
  return m;
}

void validate_ae_config(const AeTrainConfig& cfg, std::size_t p) {
  if (cfg.layer_dims.empty()) throw ConfigError("autoencoder: layer_dims must be non-empty");
  if (cfg.layer_dims.front() >= p) {
    throw ConfigError("autoencoder: first layer width " +
                      std::to_string(cfg.layer_dims.front()) +
                      " must be smaller than the label count " + std::to_string(p));
  }
  for (std::size_t l = 0; l < cfg.layer_dims.size(); ++l) {
    if (cfg.layer_dims[l] == 0 ||
        (l > 0 && cfg.layer_dims[l] >= cfg.layer_dims[l - 1])) {
      throw ConfigError("autoencoder: layer_dims " + dims_string(cfg.layer_dims) +
                        " must be positive and strictly decreasing");
    }
  }
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("autoencoder: learning_rate must be > 0");
  if (!(cfg.rel_tol >= 0.0)) throw ConfigError("autoencoder: rel_tol must be >= 0");
  if (cfg.max_epochs == 0) throw ConfigError("autoencoder: max_epochs must be >= 1");
}

EncoderStack train_autoencoder(const LabelMatrix& v, const AeTrainConfig& cfg) {
  validate_ae_config(cfg, v.n_labels());

  Rng rng(cfg.seed);
  Layers layers = cfg.init_scheme == InitScheme::nmf_greedy ? init_nmf_greedy(v, cfg)
                                                            : init_random(v, cfg, rng);
  rescale_along_ray(v, layers);

  std::optional<GradientAudit> audit;
  if (cfg.fd_check) {
    audit = audit_gradient(v, EncoderStack(v.n_labels(), layers), 1e-5, cfg.fd_max_entries,
                           RngSeed{cfg.seed.value ^ 0xfdc4ec4ULL});
  }

  Evaluation cur = evaluate(v, layers);
  if (!std::isfinite(cur.loss)) throw DivergenceError("autoencoder: non-finite initial loss", 0);
  std::vector<double> trace{cur.loss};
  double step = cfg.learning_rate;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs && cur.loss > 0.0; ++epoch) {
    const Layers grads = layer_gradients(v, layers, cur);
    if (!all_finite(grads)) {
      throw DivergenceError("autoencoder: non-finite gradient at epoch " +
                            std::to_string(epoch), epoch);
    }

    Layers next;
    Evaluation next_eval;
    if (cfg.step_control == StepControl::fixed) {
      next = projected_step(layers, grads, cfg.learning_rate);
      next_eval = evaluate(v, next);
      if (!std::isfinite(next_eval.loss) || !all_finite(next)) {
        char lr[32];
        std::snprintf(lr, sizeof(lr), "%g", cfg.learning_rate);
        throw DivergenceError("autoencoder: loss became non-finite at epoch " +
                                  std::to_string(epoch) + "; learning rate " + lr + " diverges",
                              epoch);
      }
    } else {
      bool accepted = false;
      for (std::size_t attempt = 0; attempt < kMaxHalvings; ++attempt) {
        next = projected_step(layers, grads, step);
        next_eval = evaluate(v, next);
        if (next_eval.loss <= cur.loss) {  // false for NaN
          accepted = true;
          break;
        }
        step *= kStepShrink;
      }
      if (!accepted) break;  // no descent left at working precision
      step *= kStepGrow;
    }

    const double change = std::abs(cur.loss - next_eval.loss) / cur.loss;
    layers = std::move(next);
    cur = std::move(next_eval);
    trace.push_back(cur.loss);
    if (change < cfg.rel_tol) break;
  }

  EncoderStack stack(v.n_labels(), std::move(layers), std::move(trace));
  if (audit) stack.set_gradient_audit(*audit);
  return stack;
}

std::vector<DenseMatrix> ae_gradients(const LabelMatrix& v, const EncoderStack& stack) {
  if (v.n_labels() != stack.n_labels()) {
    throw ShapeError("ae_gradient: V has " + std::to_string(v.n_labels()) +
                     " labels, stack expects " + std::to_string(stack.n_labels()));
  }
  return layer_gradients(v, stack.layers(), evaluate(v, stack.layers()));
}

DenseMatrix ae_gradient(const LabelMatrix& v, const EncoderStack& stack,
                        std::size_t layer_index) {
  if (layer_index < 1 || layer_index > stack.depth()) {
    throw IndexError("ae_gradient: layer index " + std::to_string(layer_index) +
                     " outside [1, " + std::to_string(stack.depth()) + "]");
  }
  return std::move(ae_gradients(v, stack)[layer_index - 1]);
}

LatentMatrix encode(const LabelMatrix& v, const EncoderStack& stack) {
  if (v.n_labels() != stack.n_labels()) {
    throw ShapeError("encode: input has " + std::to_string(v.n_labels()) +
                     " columns, stack expects " + std::to_string(stack.n_labels()));
  }
  DenseMatrix w = v.times(stack.layers().front());
  for (std::size_t l = 1; l < stack.depth(); ++l) w = matmul(w, stack.layers()[l]);
  return w;
}

LatentMatrix encode(const DenseMatrix& rows, const EncoderStack& stack) {
  if (rows.cols() != stack.n_labels()) {
    throw ShapeError("encode: input has " + std::to_string(rows.cols()) +
                     " columns, stack expects " + std::to_string(stack.n_labels()));
  }
  DenseMatrix w = rows;
  for (const auto& h : stack.layers()) w = matmul(w, h);
  return w;
}

DenseMatrix decode(const LatentMatrix& w, const EncoderStack& stack) {
  if (w.cols() != stack.latent_dim()) {
    throw ShapeError("decode: latent input has " + std::to_string(w.cols()) +
                     " columns, stack latent width is " +
                     std::to_string(stack.latent_dim()));
  }
  DenseMatrix out = w;
  for (std::size_t l = stack.depth(); l-- > 0;) out = matmul_nt(out, stack.layers()[l]);
  return out;
}

double reconstruction_loss(const LabelMatrix& v, const EncoderStack& stack) {
  if (v.n_labels() != stack.n_labels()) {
    throw ShapeError("reconstruction_loss: V has " + std::to_string(v.n_labels()) +
                     " labels, stack expects " + std::to_string(stack.n_labels()));
  }
  return layers_loss(v, stack.layers());
}

GradientAudit audit_gradient(const LabelMatrix& v, const EncoderStack& stack, double step,
                             std::size_t max_entries, RngSeed seed) {
  const auto grads = ae_gradients(v, stack);
  Rng rng(seed);
  GradientAudit audit;
  Layers probe = stack.layers();
  for (std::size_t l = 0; l < probe.size(); ++l) {
    std::vector<std::size_t> idx(probe[l].size());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.size() > max_entries) {
      rng.shuffle(std::span<std::size_t>(idx));
      idx.resize(max_entries);
      std::sort(idx.begin(), idx.end());
    }
    for (std::size_t i : idx) {
      const double orig = probe[l].values()[i];
      probe[l].values()[i] = orig + step;
      const double up = layers_loss(v, probe);
      probe[l].values()[i] = orig - step;
      const double down = layers_loss(v, probe);
      probe[l].values()[i] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = grads[l].values()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      audit.max_rel_error = std::max(audit.max_rel_error, std::abs(analytic - numeric) / denom);
      ++audit.entries_checked;
    }
  }
  return audit;
}

}  // namespace nnxml
