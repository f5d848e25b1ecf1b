#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string_view>
#include <vector>

#include "nnxml/autoencoder.hpp"
#include "nnxml/dataset_io.hpp"
#include "nnxml/errors.hpp"
#include "nnxml/explain.hpp"
#include "nnxml/hierarchy.hpp"
#include "nnxml/model_io.hpp"
#include "nnxml/nmf.hpp"
#include "nnxml/ranking.hpp"
#include "nnxml/regressor.hpp"
#include "nnxml/report.hpp"
#include "nnxml/synth.hpp"

namespace nnxml::cli {
namespace fs = std::filesystem;
namespace {

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError(what + ": expected a comma-separated list of non-negative integers, got '" +
                        text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string join_sizes(std::span<const std::size_t> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is required");
  if (!fs::is_regular_file(path)) throw Error(what + ": no such file '" + path + "'");
}

Dataset read_data(const std::string& path) {
  require_file(path, "--data");
  return load_dataset(path);
}

ModelContainer read_model(const std::string& path) {
  require_file(path, "--model");
  ModelContainer m = load_model(path);
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
  return m;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + out + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + out + "' failed");
}

const std::string& config_value(const ModelContainer& m, const std::string& key) {
  const auto it = m.config.find(key);
  if (it == m.config.end()) throw ModelFormatError("model config lacks '" + key + "'");
  return it->second;
}

TrainTestSplit recorded_split(const ModelContainer& m, std::size_t n_rows,
                              const std::string& cmd) {
  const std::size_t rows = std::stoull(config_value(m, "split.rows"));
  if (rows != n_rows) {
    throw ShapeError(cmd + ": model split was recorded for " + std::to_string(rows) +
                     " rows but --data has " + std::to_string(n_rows) +
                     "; use the training data file or --split all");
  }
  return split_rows(n_rows, std::stod(config_value(m, "split.holdout")),
                    RngSeed{std::stoull(config_value(m, "split.seed"))});
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

std::vector<std::size_t> pick_rows(const std::string& which, const ModelContainer& m,
                                   std::size_t n, const std::string& cmd) {
  if (which == "all") return all_rows(n);
  if (which == "train") return recorded_split(m, n, cmd).train;
  if (which == "test") return recorded_split(m, n, cmd).test;
  throw ConfigError(cmd + ": row selection must be all, train or test, got '" + which + "'");
}

void check_pipeline(const ModelContainer& m, const Dataset& d, const std::string& cmd) {
  if (!m.encoder) throw ModelFormatError(cmd + ": model has no encoder stack; run train-ae");
  if (!m.regressor) throw ModelFormatError(cmd + ": model has no regressor; run fit-reg");
  if (d.features.cols() != m.regressor->input_dim()) {
    throw ShapeError(cmd + ": --data has " + std::to_string(d.features.cols()) +
                     " features but the regressor expects " +
                     std::to_string(m.regressor->input_dim()));
  }
  if (d.labels.n_labels() != m.encoder->n_labels()) {
    throw ShapeError(cmd + ": --data has " + std::to_string(d.labels.n_labels()) +
                     " labels but the encoder covers " + std::to_string(m.encoder->n_labels()));
  }
}

}  // namespace

int run_gen_synth(const GenSynthArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  SynthConfig cfg;
  cfg.blocks = a.blocks;
  cfg.rows = a.rows;
  cfg.labels_per_block = a.labels_per_block;
  cfg.noise = a.noise;
  cfg.seed = RngSeed{a.seed};
  const PlantedDataset planted = generate_planted(cfg);
  save_dataset(a.out, planted.data);
  std::cout << "gen-synth: wrote " << planted.data.labels.n_rows() << " rows, "
            << planted.data.features.cols() << " features, " << planted.data.labels.n_labels()
            << " labels to " << a.out << '\n';
  return 0;
}

int run_train_ae(const TrainAeArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  const Dataset d = read_data(a.data);
  AeTrainConfig cfg;
  cfg.layer_dims = parse_size_list(a.dims, "--dims");
  cfg.max_epochs = a.epochs;
  cfg.learning_rate = a.lr;
  cfg.rel_tol = a.rel_tol;
  cfg.seed = RngSeed{a.seed};
  cfg.fd_check = a.fd_check;
  if (a.init == "random") {
    cfg.init_scheme = InitScheme::random_uniform;
  } else if (a.init == "nmf") {
    cfg.init_scheme = InitScheme::nmf_greedy;
  } else {
    throw ConfigError("--init must be random or nmf, got '" + a.init + "'");
  }
  if (a.step == "backtracking") {
    cfg.step_control = StepControl::backtracking;
  } else if (a.step == "fixed") {
    cfg.step_control = StepControl::fixed;
  } else {
    throw ConfigError("--step must be backtracking or fixed, got '" + a.step + "'");
  }
  if (!(a.holdout >= 0.0 && a.holdout < 1.0)) throw ConfigError("--holdout must be in [0, 1)");

  const std::size_t n = d.labels.n_rows();
  const TrainTestSplit split = split_rows(n, a.holdout, RngSeed{a.split_seed});
  if (split.train.empty()) throw ConfigError("train-ae: the training split is empty");
  const LabelMatrix v = d.labels.select_rows(split.train);
  EncoderStack stack = train_autoencoder(v, cfg);

  ModelContainer m;
  m.label_names = d.labels.label_names();
  m.config["split.rows"] = std::to_string(n);
  m.config["split.holdout"] = exact(a.holdout);
  m.config["split.seed"] = std::to_string(a.split_seed);
  m.config["ae.dims"] = join_sizes(cfg.layer_dims);
  m.config["ae.epochs"] = std::to_string(a.epochs);
  m.config["ae.lr"] = exact(a.lr);
  m.config["ae.rel_tol"] = exact(a.rel_tol);
  m.config["ae.init"] = a.init;
  m.config["ae.step"] = a.step;
  m.config["ae.seed"] = std::to_string(a.seed);
  const auto& trace = stack.training_trace();
  std::cout << "train-ae: " << split.train.size() << " training rows, dims "
            << join_sizes(cfg.layer_dims) << ", " << trace.size() - 1 << " epochs, loss "
            << format_number(trace.front()) << " -> " << format_number(trace.back()) << '\n';
  if (const auto& audit = stack.gradient_audit()) {
    std::cout << "train-ae: gradient audit over " << audit->entries_checked
              << " entries, max relative error " << format_number(audit->max_rel_error) << '\n';
  }
  m.encoder = std::move(stack);
  save_model(a.out, m);
  return 0;
}

int run_nmf(const NmfArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  const Dataset d = read_data(a.data);
  NmfConfig cfg;
  cfg.k = a.k;
  cfg.max_iters = a.iters;
  cfg.rel_tol = a.rel_tol;
  cfg.seed = RngSeed{a.seed};
  NmfFactors f = nmf_factorize(d.labels, cfg);
  std::cout << "nmf: k " << f.k << ", " << f.objective_trace.size() - 1
            << " iterations, objective " << format_number(f.objective_trace.front()) << " -> "
            << format_number(f.objective_trace.back()) << '\n';
  ModelContainer m;
  m.label_names = d.labels.label_names();
  m.config["nmf.k"] = std::to_string(a.k);
  m.config["nmf.iters"] = std::to_string(a.iters);
  m.config["nmf.rel_tol"] = exact(a.rel_tol);
  m.config["nmf.seed"] = std::to_string(a.seed);
  m.nmf = std::move(f);
  save_model(a.out, m);
  return 0;
}

int run_fit_reg(const FitRegArgs& a) {
  ModelContainer m = read_model(a.model);
  if (!m.encoder) throw ModelFormatError("fit-reg: model has no encoder stack; run train-ae");
  const Dataset d = read_data(a.data);
  if (d.labels.n_labels() != m.encoder->n_labels()) {
    throw ShapeError("fit-reg: --data has " + std::to_string(d.labels.n_labels()) +
                     " labels but the encoder covers " + std::to_string(m.encoder->n_labels()));
  }
  RegressorKind kind;
  if (a.kind == "ridge") {
    kind = RegressorKind::ridge_linear;
  } else if (a.kind == "mlp") {
    kind = RegressorKind::mlp_1hidden;
  } else {
    throw ConfigError("--kind must be ridge or mlp, got '" + a.kind + "'");
  }
  RegressorHyperparams hp;
  hp.lambda = a.lambda;
  hp.hidden = a.hidden;
  hp.epochs = a.epochs;
  hp.learning_rate = a.lr;

  const TrainTestSplit split = recorded_split(m, d.labels.n_rows(), "fit-reg");
  const LatentMatrix w = encode(d.labels.select_rows(split.train), *m.encoder);
  const FeatureMatrix x = d.features.select_rows(split.train);
  m.regressor = fit_regressor(x, w, kind, hp, RngSeed{a.seed});

  const DenseMatrix fitted = predict_latent(x, *m.regressor);
  const double rel = frobenius_norm(subtract(fitted, w)) / std::max(frobenius_norm(w), 1e-300);
  std::cout << "fit-reg: " << a.kind << " on " << x.rows() << " rows, relative latent error "
            << format_number(rel) << '\n';

  m.config["reg.kind"] = a.kind;
  m.config["reg.lambda"] = exact(a.lambda);
  m.config["reg.hidden"] = std::to_string(a.hidden);
  m.config["reg.epochs"] = std::to_string(a.epochs);
  m.config["reg.lr"] = exact(a.lr);
  m.config["reg.seed"] = std::to_string(a.seed);
  m.warnings.clear();
  save_model(a.out.empty() ? a.model : a.out, m);
  return 0;
}

int run_predict(const PredictArgs& a) {
  const ModelContainer m = read_model(a.model);
  const Dataset d = read_data(a.data);
  check_pipeline(m, d, "predict");
  if (a.top_n == 0) throw ConfigError("--top-n must be >= 1");
  const auto rows = pick_rows(a.rows, m, d.features.rows(), "predict");
  std::vector<RankedPrediction> preds;
  preds.reserve(rows.size());
  for (std::size_t r : rows) {
    preds.push_back(predict_labels(d.features.row(r), *m.regressor, *m.encoder, a.top_n));
  }
  emit(a.out, render_predictions_tsv(rows, preds, m.label_names));
  return 0;
}

int run_explain(const ExplainArgs& a) {
  const ModelContainer m = read_model(a.model);
  const Dataset d = read_data(a.data);
  check_pipeline(m, d, "explain");
  if (a.row >= d.features.rows()) {
    throw IndexError("--row " + std::to_string(a.row) + " is out of range; --data has " +
                     std::to_string(d.features.rows()) + " rows");
  }
  if (a.format != "text" && a.format != "json") {
    throw ConfigError("--format must be text or json, got '" + a.format + "'");
  }
  ExplainConfig cfg;
  cfg.lime.num_samples = a.samples;
  cfg.lime.k_features = a.k_features;
  cfg.lime.kernel_width = a.kernel_width;
  cfg.lime.seed = RngSeed{a.seed};
  cfg.top_m = a.top_m;
  cfg.top_n = a.top_n;
  cfg.target_label = a.label;
  const ExplanationReport r =
      explain_prediction(d.features.row(a.row), *m.regressor, *m.encoder, cfg, m.label_names);
  emit(a.out, a.format == "json" ? render_explanation_json(r, m.label_names)
                                 : render_explanation_text(r, m.label_names));
  return 0;
}

int run_hierarchy(const HierarchyArgs& a) {
  const ModelContainer m = read_model(a.model);
  if (!m.encoder) throw ModelFormatError("hierarchy: model has no encoder stack; run train-ae");
  const std::size_t layer = a.layer == 0 ? m.encoder->depth() : a.layer;
  const HierarchyNode node = extract_hierarchy(*m.encoder, layer, a.unit, a.top_m, m.label_names);
  emit(a.out, render_hierarchy(node));
  return 0;
}

int run_eval(const EvalArgs& a) {
  const ModelContainer m = read_model(a.model);
  const Dataset d = read_data(a.data);
  check_pipeline(m, d, "eval");
  const auto ks = parse_size_list(a.ks, "--k");
  std::size_t max_k = 0;
  for (std::size_t k : ks) {
    if (k == 0) throw ConfigError("--k values must be >= 1");
    max_k = std::max(max_k, k);
  }
  const auto rows = pick_rows(a.split, m, d.features.rows(), "eval");
  if (rows.empty()) throw ConfigError("eval: the selected split has no rows");
  std::vector<RankedPrediction> preds;
  std::vector<std::vector<std::size_t>> truth;
  preds.reserve(rows.size());
  truth.reserve(rows.size());
  for (std::size_t r : rows) {
    preds.push_back(predict_labels(d.features.row(r), *m.regressor, *m.encoder, max_k));
    const auto cols = d.labels.row_cols(r);
    truth.emplace_back(cols.begin(), cols.end());
  }
  emit(a.out, render_metrics(evaluate_rankings(preds, truth, ks)));
  return 0;
}

}  // namespace nnxml::cli
