#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nnxml/matrix.hpp"
#include "nnxml/rng.hpp"

namespace nnxml {

/// Non-negative latent label codes, n x k_L.
using LatentMatrix = DenseMatrix;

enum class InitScheme { random_uniform, nmf_greedy };

/// How the projected gradient step length is controlled.
///  - backtracking: start at learning_rate; a step that does not lower the
///    loss is halved and retried, an accepted step lets the next one grow by
///    25%. Loss is monotone.
///  - fixed: every epoch steps by exactly learning_rate. A non-finite loss is
///    reported as DivergenceError.
enum class StepControl { backtracking, fixed };

struct AeTrainConfig {
  std::vector<std::size_t> layer_dims{64, 16};
  std::size_t max_epochs = 2000;
  double learning_rate = 1e-3;
  /// Stop once |loss_prev - loss| / loss_prev drops below this.
  double rel_tol = 1e-7;
  InitScheme init_scheme = InitScheme::random_uniform;
  StepControl step_control = StepControl::backtracking;
  RngSeed seed{};
  /// Audit the analytic gradient against central differences before the
  /// first step. Samples at most fd_max_entries entries per layer.
  bool fd_check = false;
  std::size_t fd_max_entries = 64;
};

struct GradientAudit {
  std::size_t entries_checked = 0;
  /// max |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
  double max_rel_error = 0.0;
};

/// Tied-weight encoder H_1 (p x k_1), ..., H_L (k_{L-1} x k_L).
///
/// Invariants (checked at construction): L >= 1, every entry finite and
/// >= 0, rows(H_1) == p, cols(H_l) == rows(H_{l+1}), and
/// p > k_1 > k_2 > ... > k_L >= 1.
class EncoderStack {
 public:
  EncoderStack() = default;
  EncoderStack(std::size_t p, std::vector<DenseMatrix> layers,
               std::vector<double> training_trace = {});

  std::size_t n_labels() const noexcept { return p_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t latent_dim() const { return layers_.back().cols(); }
  std::vector<std::size_t> layer_dims() const;

  /// 1-based, matching H_1 ... H_L.
  const DenseMatrix& layer(std::size_t index) const;
  const std::vector<DenseMatrix>& layers() const noexcept { return layers_; }

  const std::vector<double>& training_trace() const noexcept { return trace_; }
  const std::optional<GradientAudit>& gradient_audit() const noexcept { return audit_; }
  void set_gradient_audit(GradientAudit audit) { audit_ = audit; }

  /// E = H_1 H_2 ... H_L, shape p x k_L.
  DenseMatrix combined() const;

  double min_entry() const;

  friend bool operator==(const EncoderStack& a, const EncoderStack& b) {
    return a.p_ == b.p_ && a.layers_ == b.layers_ && a.trace_ == b.trace_;
  }

 private:
  std::size_t p_ = 0;
  std::vector<DenseMatrix> layers_;
  std::vector<double> trace_;
  std::optional<GradientAudit> audit_;
};

/// Throws ConfigError for an empty or non-decreasing layer_dims, a first
/// width >= p, learning_rate <= 0, rel_tol < 0 or max_epochs == 0.
void validate_ae_config(const AeTrainConfig& cfg, std::size_t p);

/// Projected gradient descent on ||V - V E E^T||_F^2 with E = H_1...H_L,
/// all layers stepped jointly from the gradient at the current iterate and
/// clamped at zero after each step.
///
/// Initial layers are either uniform(0, sqrt(1/k_l)) draws or a greedy chain
/// of NMFs (V ~= W H gives H_1 = H^T, then V H_1 ~= W' H' gives H_2, ...,
/// columns normalised to unit length). Either way the stack is then scaled
/// by the single positive factor that minimises the loss along E -> sE.
///
/// The trace records the loss before the first step and after every epoch.
/// Throws DivergenceError carrying the epoch index when the loss becomes
/// non-finite.
EncoderStack train_autoencoder(const LabelMatrix& v, const AeTrainConfig& cfg);

/// dLoss/dH_l for Loss = ||V - V E E^T||_F^2. layer_index is 1-based.
///
/// With A = V E the gradient with respect to E is
///   G = -2 (2 V^T A - V^T A (E^T E) - E (A^T A))
/// and dLoss/dH_l = (H_1...H_{l-1})^T G (H_{l+1}...H_L)^T.
DenseMatrix ae_gradient(const LabelMatrix& v, const EncoderStack& stack,
                        std::size_t layer_index);
/// Gradients for every layer at once, index 0 holding dLoss/dH_1.
std::vector<DenseMatrix> ae_gradients(const LabelMatrix& v, const EncoderStack& stack);

/// W_L = V H_1 ... H_L.
LatentMatrix encode(const LabelMatrix& v, const EncoderStack& stack);
LatentMatrix encode(const DenseMatrix& rows, const EncoderStack& stack);

/// w H_L^T ... H_1^T, shape n x p.
DenseMatrix decode(const LatentMatrix& w, const EncoderStack& stack);

/// ||V - V E E^T||_F^2, summed row by row.
double reconstruction_loss(const LabelMatrix& v, const EncoderStack& stack);

/// Central-difference audit of ae_gradient on at most max_entries entries per
/// layer, chosen from the seed.
GradientAudit audit_gradient(const LabelMatrix& v, const EncoderStack& stack,
                             double step, std::size_t max_entries, RngSeed seed);

}  // namespace nnxml
