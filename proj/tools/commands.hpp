#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace nnxml::cli {

struct GenSynthArgs {
  std::size_t blocks = 4;
  std::size_t rows = 200;
  std::size_t labels_per_block = 10;
  double noise = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

struct TrainAeArgs {
  std::string data;
  std::string dims = "64,16";
  std::size_t epochs = 2000;
  double lr = 1e-3;
  double rel_tol = 1e-7;
  std::string init = "random";
  std::string step = "backtracking";
  bool fd_check = false;
  std::uint64_t seed = 0;
  double holdout = 0.2;
  std::uint64_t split_seed = 0;
  std::string out;
};

struct NmfArgs {
  std::string data;
  std::size_t k = 16;
  std::size_t iters = 5000;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
};

struct FitRegArgs {
  std::string data;
  std::string model;
  std::string kind = "ridge";
  double lambda = 1e-3;
  std::size_t hidden = 64;
  std::size_t epochs = 2000;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  std::string out;  // defaults to --model
};

struct PredictArgs {
  std::string model;
  std::string data;
  std::size_t top_n = 25;
  std::string rows = "all";
  std::string out = "-";
};

struct ExplainArgs {
  std::string model;
  std::string data;
  std::size_t row = 0;
  std::size_t samples = 1000;
  std::size_t k_features = 6;
  std::size_t top_m = 5;
  std::size_t top_n = 25;
  std::optional<std::size_t> label;
  std::optional<double> kernel_width;
  std::uint64_t seed = 0;
  std::string format = "text";
  std::string out = "-";
};

struct HierarchyArgs {
  std::string model;
  std::size_t layer = 0;  // 0 = top layer
  std::size_t unit = 0;
  std::size_t top_m = 5;
  std::string out = "-";
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::string ks = "1,3,5";
  std::string split = "test";
  std::string out = "-";
};

int run_gen_synth(const GenSynthArgs& a);
int run_train_ae(const TrainAeArgs& a);
int run_nmf(const NmfArgs& a);
int run_fit_reg(const FitRegArgs& a);
int run_predict(const PredictArgs& a);
int run_explain(const ExplainArgs& a);
int run_hierarchy(const HierarchyArgs& a);
int run_eval(const EvalArgs& a);

}  // namespace nnxml::cli
