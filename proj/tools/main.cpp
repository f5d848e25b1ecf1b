// nnxml: command-line driver for the label-embedding pipeline.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "nnxml/errors.hpp"
#include "nnxml/parallel.hpp"

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key=value lines, '#' comments. Keys are long option names with or without
// the leading dashes. Returns them as "--key=value" arguments.
std::vector<std::string> read_config_args(const std::string& path, CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw nnxml::ConfigError("--config: cannot open '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw nnxml::ConfigError(where + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw nnxml::ConfigError(where + ": empty key");
    if (key == "config" || sub.get_option_no_throw("--" + key) == nullptr) {
      throw nnxml::ConfigError(where + ": unknown key '" + key + "' for " + sub.get_name());
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices the pairs of any --config file in front of the subcommand's own
// flags. Options keep their last value, so flags override the file and the
// file overrides defaults.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if ((sub = app.get_subcommand_no_throw(args[i])) != nullptr) {
      sub_pos = i;
      break;
    }
  }
  if (sub == nullptr) return args;
  std::vector<std::string> file_args;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    const auto more = read_config_args(path, *sub);
    file_args.insert(file_args.end(), more.begin(), more.end());
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
  out.insert(out.end(), file_args.begin(), file_args.end());
  out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nnxml::cli;
  CLI::App app{"Non-negative label embeddings for extreme multi-label learning", "nnxml"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", "nnxml 0.1.0");
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  auto config_opt = [](CLI::App* sub) {
    sub->add_option("--config", "File of key=value defaults; flags override it");
  };

  GenSynthArgs gs;
  auto* c_gs = app.add_subcommand("gen-synth", "Write a planted block dataset");
  c_gs->add_option("--blocks", gs.blocks, "Number of blocks")->capture_default_str();
  c_gs->add_option("--rows", gs.rows, "Number of instances")->capture_default_str();
  c_gs->add_option("--labels-per-block", gs.labels_per_block, "Labels owned by each block")
      ->capture_default_str();
  c_gs->add_option("--noise", gs.noise, "Label flip probability")->capture_default_str();
  c_gs->add_option("--seed", gs.seed, "Random seed")->capture_default_str();
  c_gs->add_option("--out", gs.out, "Output dataset path (names go to <out>.names)");
  config_opt(c_gs);

  TrainAeArgs ta;
  auto* c_ta = app.add_subcommand("train-ae", "Train the non-negative encoder stack");
  c_ta->add_option("--data", ta.data, "Dataset file");
  c_ta->add_option("--dims", ta.dims, "Layer widths, comma separated")->capture_default_str();
  c_ta->add_option("--epochs", ta.epochs, "Maximum epochs")->capture_default_str();
  c_ta->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
  c_ta->add_option("--rel-tol", ta.rel_tol, "Relative loss change stopping threshold")
      ->capture_default_str();
  c_ta->add_option("--init", ta.init, "random or nmf")->capture_default_str();
  c_ta->add_option("--step", ta.step, "backtracking or fixed")->capture_default_str();
  c_ta->add_flag("--fd-check", ta.fd_check, "Audit gradients by finite differences first");
  c_ta->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  c_ta->add_option("--holdout", ta.holdout, "Fraction of rows held out for eval")
      ->capture_default_str();
  c_ta->add_option("--split-seed", ta.split_seed, "Seed of the train/test split")
      ->capture_default_str();
  c_ta->add_option("--out", ta.out, "Output model path");
  config_opt(c_ta);

  NmfArgs nm;
  auto* c_nm = app.add_subcommand("nmf", "Baseline single-layer factorization");
  c_nm->add_option("--data", nm.data, "Dataset file");
  c_nm->add_option("--k", nm.k, "Rank")->capture_default_str();
  c_nm->add_option("--iters", nm.iters, "Maximum iterations")->capture_default_str();
  c_nm->add_option("--rel-tol", nm.rel_tol, "Relative objective change stopping threshold")
      ->capture_default_str();
  c_nm->add_option("--seed", nm.seed, "Random seed")->capture_default_str();
  c_nm->add_option("--out", nm.out, "Output model path");
  config_opt(c_nm);

  FitRegArgs fr;
  auto* c_fr = app.add_subcommand("fit-reg", "Fit the feature-to-latent regressor");
  c_fr->add_option("--data", fr.data, "Dataset file used for train-ae");
  c_fr->add_option("--model", fr.model, "Model container to extend");
  c_fr->add_option("--kind", fr.kind, "ridge or mlp")->capture_default_str();
  c_fr->add_option("--lambda", fr.lambda, "Ridge penalty")->capture_default_str();
  c_fr->add_option("--hidden", fr.hidden, "Hidden units (mlp)")->capture_default_str();
  c_fr->add_option("--epochs", fr.epochs, "Epochs (mlp)")->capture_default_str();
  c_fr->add_option("--lr", fr.lr, "Learning rate (mlp)")->capture_default_str();
  c_fr->add_option("--seed", fr.seed, "Random seed")->capture_default_str();
  c_fr->add_option("--out", fr.out, "Write here instead of overwriting --model");
  config_opt(c_fr);

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "Ranked label predictions as TSV");
  c_pr->add_option("--model", pr.model, "Model container");
  c_pr->add_option("--data", pr.data, "Dataset file");
  c_pr->add_option("--top-n", pr.top_n, "Labels per instance")->capture_default_str();
  c_pr->add_option("--rows", pr.rows, "all, train or test")->capture_default_str();
  c_pr->add_option("--out", pr.out, "Report path, - for stdout")->capture_default_str();
  config_opt(c_pr);

  ExplainArgs ex;
  auto* c_ex = app.add_subcommand("explain", "Explain one prediction");
  c_ex->add_option("--model", ex.model, "Model container");
  c_ex->add_option("--data", ex.data, "Dataset file holding the instance");
  c_ex->add_option("--row", ex.row, "Instance index")->capture_default_str();
  c_ex->add_option("--samples", ex.samples, "Perturbation samples")->capture_default_str();
  c_ex->add_option("--k-features", ex.k_features, "Features kept by the surrogate")
      ->capture_default_str();
  c_ex->add_option("--kernel-width", ex.kernel_width, "Proximity kernel width");
  c_ex->add_option("--top-m", ex.top_m, "Children per hierarchy node")->capture_default_str();
  c_ex->add_option("--top-n", ex.top_n, "Predicted labels listed")->capture_default_str();
  c_ex->add_option("--label", ex.label, "Explain this label's score instead of a latent unit");
  c_ex->add_option("--seed", ex.seed, "Random seed")->capture_default_str();
  c_ex->add_option("--format", ex.format, "text or json")->capture_default_str();
  c_ex->add_option("--out", ex.out, "Report path, - for stdout")->capture_default_str();
  config_opt(c_ex);

  HierarchyArgs hi;
  auto* c_hi = app.add_subcommand("hierarchy", "Print the label tree under one unit");
  c_hi->add_option("--model", hi.model, "Model container");
  c_hi->add_option("--layer", hi.layer, "Layer, 1-based (default: top)");
  c_hi->add_option("--unit", hi.unit, "Unit index")->capture_default_str();
  c_hi->add_option("--top-m", hi.top_m, "Children per node")->capture_default_str();
  c_hi->add_option("--out", hi.out, "Report path, - for stdout")->capture_default_str();
  config_opt(c_hi);

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Precision@k and nDCG@k");
  c_ev->add_option("--model", ev.model, "Model container");
  c_ev->add_option("--data", ev.data, "Dataset file");
  c_ev->add_option("--k", ev.ks, "Cutoffs, comma separated")->capture_default_str();
  c_ev->add_option("--split", ev.split, "test, train or all")->capture_default_str();
  c_ev->add_option("--out", ev.out, "Report path, - for stdout")->capture_default_str();
  config_opt(c_ev);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args, app);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "nnxml: error: " << e.what() << " (run with --help for usage)\n";
    return 2;
  } catch (const nnxml::Error& e) {
    std::cerr << "nnxml: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (threads > 0) nnxml::set_num_threads(threads);
    if (c_gs->parsed()) return run_gen_synth(gs);
    if (c_ta->parsed()) return run_train_ae(ta);
    if (c_nm->parsed()) return run_nmf(nm);
    if (c_fr->parsed()) return run_fit_reg(fr);
    if (c_pr->parsed()) return run_predict(pr);
    if (c_ex->parsed()) return run_explain(ex);
    if (c_hi->parsed()) return run_hierarchy(hi);
    if (c_ev->parsed()) return run_eval(ev);
  } catch (const nnxml::ConfigError& e) {
    std::cerr << "nnxml: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nnxml: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
