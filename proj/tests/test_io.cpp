#include <gtest/gtest.h>
#include <zlib.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nnxml/autoencoder.hpp"
#include "nnxml/dataset_io.hpp"
#include "nnxml/errors.hpp"
#include "nnxml/model_io.hpp"
#include "nnxml/report.hpp"
#include "nnxml/synth.hpp"
#include "oracles.hpp"

using namespace nnxml;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

ModelContainer sample_container() {
  oracle::TestRng rng(71);
  AeTrainConfig cfg;
  cfg.layer_dims = {64, 16};
  cfg.max_epochs = 5;
  const auto v = oracle::label_matrix(oracle::random_binary(40, 100, 0.05, rng));
  ModelContainer m;
  m.encoder = train_autoencoder(v, cfg);
  m.regressor = RegressorModel(RegressorKind::mlp_1hidden,
                               {oracle::from_eigen(oracle::random_dense(5, 7, rng)),
                                oracle::from_eigen(oracle::random_dense(7, 16, rng))},
                               {std::vector<double>(7, 0.25), std::vector<double>(16, -1e-300)});
  NmfFactors f;
  f.k = 2;
  f.w = oracle::from_eigen(oracle::random_dense(4, 2, rng, 0, 1));
  f.h = oracle::from_eigen(oracle::random_dense(2, 3, rng, 0, 1));
  f.objective_trace = {3.0, 2.0, 1.5};
  m.nmf = f;
  m.config = {{"ae.dims", "64,16"}, {"split.seed", "0"}};
  for (int j = 0; j < 100; ++j) m.label_names.push_back("label " + std::to_string(j));
  return m;
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(std::uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(std::uint8_t(v >> (8 * i)));
}
std::uint32_t crc(const std::uint8_t* p, std::size_t n) {
  return std::uint32_t(crc32(crc32(0L, Z_NULL, 0), p, uInt(n)));
}

}  // namespace

TEST(Dataset, ParsesHandExample) {
  const auto d = parse("2 3 4\n0,2 0:1.0 2:0.5\n 1:2.0\n");
  EXPECT_EQ(d.features, DenseMatrix::from_rows({{1.0, 0.0, 0.5}, {0.0, 2.0, 0.0}}));
  EXPECT_EQ(d.labels.n_labels(), 4u);
  const std::vector<LabelEntry> expected{{0, 0, 1.0}, {0, 2, 1.0}};
  EXPECT_EQ(d.labels.entries(), expected);
  EXPECT_TRUE(d.labels.row_cols(1).empty());
}

TEST(Dataset, AcceptsCorpusScaleHeader) {
  std::string text = "3379 512 708\n";
  for (int i = 0; i < 3379; ++i) text += std::to_string(i % 708) + " " + std::to_string(i % 512) + ":1\n";
  const auto d = parse(text);
  EXPECT_EQ(d.features.rows(), 3379u);
  EXPECT_EQ(d.features.cols(), 512u);
  EXPECT_EQ(d.labels.n_labels(), 708u);
}

TEST(Dataset, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("2 3\n"), 1u);
  EXPECT_EQ(parse_error_line("x 3 4\n"), 1u);
  EXPECT_EQ(parse_error_line("1 3 4\n0 3:1.0\n"), 2u);      // feature out of bounds
  EXPECT_EQ(parse_error_line("2 3 4\n0 0:1\n4 0:1\n"), 3u); // label out of bounds
  EXPECT_EQ(parse_error_line("1 3 4\n0 0:nan\n"), 2u);
  EXPECT_EQ(parse_error_line("1 3 4\n0 0:inf\n"), 2u);
  EXPECT_EQ(parse_error_line("1 3 4\n0 1:1 1:2\n"), 2u);    // duplicate feature
  EXPECT_EQ(parse_error_line("1 3 4\n2,1 0:1\n"), 2u);      // labels not increasing
  EXPECT_EQ(parse_error_line("1 3 4\n1,1 0:1\n"), 2u);
  EXPECT_EQ(parse_error_line("1 3 4\n0 0=1\n"), 2u);
  EXPECT_EQ(parse_error_line("2 3 4\n0 0:1\n"), 3u);        // missing row
  EXPECT_EQ(parse_error_line("1 3 4\n0 0:1\n1 0:1\n"), 3u); // extra row
}

TEST(Dataset, RoundTripThroughFiles) {
  oracle::TempDir dir("dataset");
  SynthConfig sc;
  sc.seed = RngSeed{12};
  const auto planted = generate_planted(sc);
  save_dataset(dir.file("d.txt"), planted.data);
  EXPECT_TRUE(std::filesystem::exists(dir.file("d.txt.names")));
  const auto back = load_dataset(dir.file("d.txt"));
  EXPECT_EQ(back.features, planted.data.features);
  EXPECT_EQ(back.labels, planted.data.labels);
  EXPECT_EQ(back.labels.label_names()[13], "block1_label3");
}

TEST(Dataset, ShortestDecimalRoundTripIsExact) {
  oracle::TestRng rng(72);
  Dataset d;
  d.features = oracle::from_eigen(oracle::random_dense(6, 5, rng, -1e3, 1e3));
  d.features(2, 3) = 0.0;
  d.features(4, 1) = 1e-300;
  d.labels = LabelMatrix(6, 3, {{0, 1, 1.0}, {5, 2, 1.0}});
  std::stringstream ss;
  write_dataset(ss, d);
  const auto back = parse_dataset(ss);
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Dataset, NonBinaryLabelsCannotBeWritten) {
  Dataset d;
  d.features = DenseMatrix(1, 1);
  d.labels = LabelMatrix(1, 2, {{0, 1, 0.5}});
  std::ostringstream out;
  EXPECT_THROW(write_dataset(out, d), ValueError);
}

TEST(Dataset, MissingFileReported) {
  EXPECT_THROW(load_dataset("/nonexistent/nnxml.txt"), Error);
}

TEST(Synth, BlocksAreOneHotAndOwnTheirLabels) {
  SynthConfig sc;
  sc.noise = 0.0;
  sc.seed = RngSeed{13};
  const auto p = generate_planted(sc);
  EXPECT_EQ(p.data.labels.n_labels(), 40u);
  std::vector<std::size_t> per_block(4, 0);
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t b = p.block_of_row[i];
    ++per_block[b];
    for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(p.data.features(i, f), f == b ? 1.0 : 0.0);
    const auto cols = p.data.labels.row_cols(i);
    ASSERT_EQ(cols.size(), 10u);
    for (std::size_t j : cols) EXPECT_EQ(j / 10, b);
  }
  EXPECT_EQ(per_block, (std::vector<std::size_t>{50, 50, 50, 50}));
}

TEST(Synth, NoiseRateRoughlyHonoured) {
  SynthConfig sc;
  sc.noise = 0.05;
  sc.rows = 1000;
  const auto p = generate_planted(sc);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < sc.rows; ++i) {
    std::vector<bool> on(40, false);
    for (std::size_t j : p.data.labels.row_cols(i)) on[j] = true;
    for (std::size_t j = 0; j < 40; ++j) flips += on[j] != (j / 10 == p.block_of_row[i]);
  }
  EXPECT_NEAR(double(flips) / (1000.0 * 40.0), 0.05, 0.005);
}

TEST(Model, RoundTripIsBitwise) {
  oracle::TempDir dir("model");
  const auto m = sample_container();
  save_model(dir.file("m.xlc"), m);
  const auto back = load_model(dir.file("m.xlc"));
  ASSERT_TRUE(back.encoder && back.regressor && back.nmf);
  EXPECT_EQ(*back.encoder, *m.encoder);
  EXPECT_EQ(*back.regressor, *m.regressor);
  EXPECT_EQ(back.nmf->w, m.nmf->w);
  EXPECT_EQ(back.nmf->h, m.nmf->h);
  EXPECT_EQ(back.nmf->objective_trace, m.nmf->objective_trace);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.label_names, m.label_names);
  EXPECT_TRUE(back.warnings.empty());
  EXPECT_EQ(serialize_model(back), serialize_model(m));
}

TEST(Model, EmptyContainerRoundTrips) {
  const ModelContainer empty;
  const auto back = deserialize_model(serialize_model(empty));
  EXPECT_FALSE(back.encoder || back.regressor || back.nmf);
}

TEST(Model, CorruptedByteNamesSection) {
  const auto bytes = serialize_model(sample_container());
  // Section table starts at 16; first entry's payload offset is at +8.
  std::uint64_t first_offset = 0;
  for (int i = 0; i < 8; ++i) first_offset |= std::uint64_t(bytes[16 + 8 + i]) << (8 * i);
  const std::string first_tag(bytes.begin() + 16, bytes.begin() + 20);
  auto bad = bytes;
  bad[first_offset + 17] ^= 0x40;
  try {
    deserialize_model(bad);
    FAIL() << "expected ChecksumError";
  } catch (const ChecksumError& e) {
    EXPECT_EQ(e.section(), first_tag);
    EXPECT_NE(std::string(e.what()).find(first_tag), std::string::npos);
  }
  bad = bytes;
  bad.back() ^= 0x01;  // last payload byte belongs to the last section
  EXPECT_THROW(deserialize_model(bad), ChecksumError);
}

TEST(Model, HeaderDamageAndTruncation) {
  const auto bytes = serialize_model(sample_container());
  auto bad = bytes;
  bad[0] = 'Y';
  EXPECT_THROW(deserialize_model(bad), ModelFormatError);
  bad = bytes;
  bad[20] ^= 0xff;  // section table
  EXPECT_THROW(deserialize_model(bad), ChecksumError);
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(15), bytes.size() / 2,
                          bytes.size() - 1}) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + long(cut));
    EXPECT_THROW(deserialize_model(part), ModelFormatError) << "cut at " << cut;
  }
}

TEST(Model, FutureVersionRejectedExplicitly) {
  auto bytes = serialize_model(sample_container());
  bytes[4] = std::uint8_t(kModelFormatVersion + 1);
  try {
    deserialize_model(bytes);
    FAIL() << "expected UnsupportedVersionError";
  } catch (const UnsupportedVersionError& e) {
    EXPECT_EQ(e.version(), kModelFormatVersion + 1);
  }
}

TEST(Model, UnknownSectionSkippedWithWarning) {
  // Hand-built container holding one unknown section and one name list.
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  std::vector<std::uint8_t> names;
  put_u64(names, 1);
  put_u64(names, 3);
  names.insert(names.end(), {'a', 'b', 'c'});
  const std::uint64_t base = 16 + 2 * 32;
  std::vector<std::uint8_t> table;
  table.insert(table.end(), {'Z', 'Z', 'Z', 'Z'});
  put_u32(table, crc(junk.data(), junk.size()));
  put_u64(table, base);
  put_u64(table, junk.size());
  put_u64(table, 0);
  table.insert(table.end(), {'N', 'A', 'M', 'E'});
  put_u32(table, crc(names.data(), names.size()));
  put_u64(table, base + junk.size());
  put_u64(table, names.size());
  put_u64(table, 0);
  std::vector<std::uint8_t> bytes{'X', 'L', 'C', '1'};
  put_u32(bytes, kModelFormatVersion);
  put_u32(bytes, 2);
  std::vector<std::uint8_t> covered = bytes;
  covered.insert(covered.end(), table.begin(), table.end());
  put_u32(bytes, crc(covered.data(), covered.size()));
  bytes.insert(bytes.end(), table.begin(), table.end());
  bytes.insert(bytes.end(), junk.begin(), junk.end());
  bytes.insert(bytes.end(), names.begin(), names.end());

  const auto m = deserialize_model(bytes);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_NE(m.warnings[0].find("ZZZZ"), std::string::npos);
  EXPECT_EQ(m.label_names, std::vector<std::string>{"abc"});
}

TEST(Model, MissingFileReported) {
  EXPECT_THROW(load_model("/nonexistent/model.xlc"), Error);
}

TEST(Report, NumbersUseSixSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_number(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_number(0.0), "0");
}

TEST(Report, MetricsTable) {
  const std::vector<MetricRow> rows{{1, 1.0, 1.0}, {3, 2.0 / 3.0, 0.5}};
  EXPECT_EQ(render_metrics(rows),
            "P@1 = 1.000000  nDCG@1 = 1.000000\nP@3 = 0.666667  nDCG@3 = 0.500000\n");
}

TEST(Report, PredictionTsv) {
  const std::vector<std::size_t> rows{7};
  const std::vector<RankedPrediction> preds{rank_scores({0.1, 0.75, 0.5}, 2)};
  const std::vector<std::string> names{"a", "b", "c"};
  EXPECT_EQ(render_predictions_tsv(rows, preds, names),
            "row\trank\tlabel\tname\tscore\n7\t1\t1\tb\t0.75\n7\t2\t2\tc\t0.5\n");
}

TEST(Report, ExplanationJsonIsStructured) {
  ExplanationReport r;
  r.latent = {0.5, 1.0 / 3.0};
  r.unit = 1;
  r.surrogate.feature_weights = {{2, 0.123456789}};
  r.surrogate.intercept = 0.1;
  r.surrogate.local_fit_r2 = 0.999;
  r.surrogate.target = "H1 unit 1";
  r.hierarchy.layer = 1;
  r.hierarchy.unit_index = 1;
  HierarchyNode leaf;
  leaf.unit_index = 4;
  leaf.weight = 0.7;
  leaf.label_name = "onion";
  r.hierarchy.children.push_back(leaf);
  r.top_labels = {{4, 2.5}};
  const auto j = nlohmann::json::parse(render_explanation_json(r, {}));
  EXPECT_EQ(j["unit"], 1);
  EXPECT_EQ(j["target"], "H1 unit 1");
  EXPECT_EQ(j["latent"][1].get<double>(), 0.333333);
  EXPECT_EQ(j["surrogate"]["feature_weights"][0]["feature"], 2);
  EXPECT_EQ(j["surrogate"]["feature_weights"][0]["weight"].get<double>(), 0.123457);
  EXPECT_EQ(j["hierarchy"]["children"][0]["label"], "onion");
  EXPECT_EQ(j["top_labels"][0]["name"], "4");
  const std::string text = render_explanation_text(r, {});
  EXPECT_NE(text.find("H1, unit 1: onion"), std::string::npos);
  EXPECT_NE(text.find("surrogate r2: 0.999"), std::string::npos);
}
