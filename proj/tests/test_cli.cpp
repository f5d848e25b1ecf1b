#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nnxml/dataset_io.hpp"
#include "nnxml/model_io.hpp"
#include "nnxml/synth.hpp"
#include "oracles.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  oracle::TempDir dir{"cli"};

  std::string f(const std::string& name) const { return dir.file(name); }

  RunResult run(const std::string& args) const {
    const std::string cmd = std::string(NNXML_CLI_PATH) + " " + args + " >" + f("stdout") +
                            " 2>" + f("stderr");
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(f("stdout"));
    r.err = slurp(f("stderr"));
    return r;
  }

  void pipeline(const std::string& tag, const std::string& noise) {
    ASSERT_EQ(run("gen-synth --seed 3 --noise " + noise + " --out " + f(tag + ".txt")).code, 0);
    ASSERT_EQ(run("train-ae --data " + f(tag + ".txt") + " --dims 8,4 --init nmf --seed 1 --out " +
                  f(tag + ".xlc"))
                  .code,
              0);
    ASSERT_EQ(run("fit-reg --data " + f(tag + ".txt") + " --model " + f(tag + ".xlc")).code, 0);
  }
};

std::size_t line_count(const std::string& s) {
  return std::size_t(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_F(Cli, UnknownFlagFailsWithOneLine) {
  const auto r = run("eval --bogus 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(line_count(r.err), 1u) << r.err;
  EXPECT_NE(r.err.find("--bogus"), std::string::npos);
}

TEST_F(Cli, MissingFilesNamed) {
  const auto r = run("eval --model " + f("nope.xlc") + " --data " + f("nope.txt"));
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(line_count(r.err), 1u) << r.err;
  EXPECT_NE(r.err.find("nope.xlc"), std::string::npos);
}

TEST_F(Cli, GeneratedDataReparsesIdentically) {
  ASSERT_EQ(run("gen-synth --blocks 3 --rows 30 --labels-per-block 4 --seed 9 --out " + f("g.txt"))
                .code,
            0);
  nnxml::SynthConfig sc;
  sc.blocks = 3;
  sc.rows = 30;
  sc.labels_per_block = 4;
  sc.seed = nnxml::RngSeed{9};
  const auto expected = nnxml::generate_planted(sc);
  const auto back = nnxml::load_dataset(f("g.txt"));
  EXPECT_EQ(back.features, expected.data.features);
  EXPECT_EQ(back.labels, expected.data.labels);
}

TEST_F(Cli, ConfigFileSitsBetweenDefaultsAndFlags) {
  {
    std::ofstream cfg(f("gen.cfg"));
    cfg << "# planted data\nblocks = 2\nrows=10\n--labels-per-block=3\nseed = 5\n";
  }
  ASSERT_EQ(run("gen-synth --config " + f("gen.cfg") + " --rows 12 --out " + f("c.txt")).code, 0);
  const auto d = nnxml::load_dataset(f("c.txt"));
  EXPECT_EQ(d.features.rows(), 12u);  // flag wins
  EXPECT_EQ(d.features.cols(), 2u);   // file wins over default
  EXPECT_EQ(d.labels.n_labels(), 6u);

  {
    std::ofstream bad(f("bad.cfg"));
    bad << "rows = 3\nnot-an-option = 1\n";
  }
  const auto r = run("gen-synth --config " + f("bad.cfg") + " --out " + f("x.txt"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("bad.cfg:2"), std::string::npos) << r.err;
}

TEST_F(Cli, NoiseFreePlantingEvaluatesPerfectly) {
  pipeline("clean", "0");
  const auto r = run("eval --model " + f("clean.xlc") + " --data " + f("clean.txt") + " --k 1,3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("P@1 = 1.000000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("P@3 = 1.000000"), std::string::npos) << r.out;
}

TEST_F(Cli, ReportsAreByteIdenticalAcrossRuns) {
  pipeline("a", "0.05");
  pipeline("b", "0.05");
  EXPECT_EQ(slurp(f("a.xlc")), slurp(f("b.xlc")));
  for (const std::string cmd : {"predict --top-n 25", "explain --row 5", "eval"}) {
    ASSERT_EQ(run(cmd + " --model " + f("a.xlc") + " --data " + f("a.txt") + " --out " + f("ra"))
                  .code,
              0);
    ASSERT_EQ(run(cmd + " --model " + f("b.xlc") + " --data " + f("b.txt") + " --out " + f("rb"))
                  .code,
              0);
    EXPECT_EQ(slurp(f("ra")), slurp(f("rb"))) << cmd;
    EXPECT_FALSE(slurp(f("ra")).empty());
  }
}

TEST_F(Cli, HierarchyAndExplainOutput) {
  pipeline("h", "0");
  auto r = run("hierarchy --model " + f("h.xlc") + " --unit 0");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("H2, unit 0: H1 units ", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("\n  H1, unit "), std::string::npos);
  EXPECT_NE(r.out.find("block"), std::string::npos);

  r = run("hierarchy --model " + f("h.xlc") + " --layer 1 --unit 0 --top-m 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("H1, unit 0: ", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), ','), 3);  // "H1, " plus two separators

  r = run("hierarchy --model " + f("h.xlc") + " --layer 1 --unit 99");
  EXPECT_NE(r.code, 0);

  r = run("explain --model " + f("h.xlc") + " --data " + f("h.txt") + " --row 2 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("surrogate"));
  EXPECT_TRUE(j.contains("hierarchy"));
  EXPECT_EQ(j["top_labels"].size(), 25u);

  r = run("explain --model " + f("h.xlc") + " --data " + f("h.txt") + " --row 5000");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--row"), std::string::npos);
}

TEST_F(Cli, PredictWritesRankedTsv) {
  pipeline("p", "0.05");
  const auto r = run("predict --model " + f("p.xlc") + " --data " + f("p.txt") +
                     " --top-n 3 --rows test");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(r.out), 1u + 40u * 3u);
  EXPECT_EQ(r.out.rfind("row\trank\tlabel\tname\tscore\n", 0), 0u);
}

TEST_F(Cli, ShapeMismatchesAreActionable) {
  pipeline("s", "0.05");
  ASSERT_EQ(run("gen-synth --blocks 5 --seed 1 --out " + f("other.txt")).code, 0);
  auto r = run("eval --model " + f("s.xlc") + " --data " + f("other.txt"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("features"), std::string::npos) << r.err;

  ASSERT_EQ(run("nmf --data " + f("s.txt") + " --k 4 --out " + f("n.xlc")).code, 0);
  r = run("fit-reg --data " + f("s.txt") + " --model " + f("n.xlc"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("train-ae"), std::string::npos) << r.err;
  const auto nmf = nnxml::load_model(f("n.xlc"));
  ASSERT_TRUE(nmf.nmf.has_value());
  EXPECT_EQ(nmf.nmf->k, 4u);

  r = run("train-ae --data " + f("s.txt") + " --dims 40,4 --out " + f("t.xlc"));
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(line_count(r.err), 1u) << r.err;
}
