#include "nnxml/model_io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "nnxml/errors.hpp"

namespace nnxml {
namespace {

constexpr std::array<char, 4> kMagic{'X', 'L', 'C', '1'};
constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kTableEntryBytes = 32;

using Tag = std::array<char, 4>;
constexpr Tag kEncoderTag{'E', 'N', 'C', 'S'};
constexpr Tag kRegressorTag{'R', 'E', 'G', 'M'};
constexpr Tag kNmfTag{'N', 'M', 'F', 'F'};
constexpr Tag kConfigTag{'C', 'O', 'N', 'F'};
constexpr Tag kNamesTag{'N', 'A', 'M', 'E'};

std::string tag_string(const Tag& t) { return std::string(t.begin(), t.end()); }

std::string section_label(const Tag& t) {
  if (t == kEncoderTag) return "ENCS (encoder stack)";
  if (t == kRegressorTag) return "REGM (regressor)";
  if (t == kNmfTag) return "NMFF (nmf factors)";
  if (t == kConfigTag) return "CONF (config)";
  if (t == kNamesTag) return "NAME (label names)";
  return tag_string(t);
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void f64s(std::span<const double> vs) {
    u64(vs.size());
    for (double v : vs) f64(v);
  }
  void matrix(const DenseMatrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double v : m.values()) f64(v);
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::string section)
      : bytes_(bytes), section_(std::move(section)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s() {
    const std::uint64_t n = u64();
    need_items(n, 8);
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }
  DenseMatrix matrix() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols) {
      fail("matrix dimensions overflow");
    }
    need_items(rows * cols, 8);
    std::vector<double> values(rows * cols);
    for (auto& v : values) v = f64();
    try {
      return DenseMatrix(rows, cols, std::move(values));
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  void finish() const {
    if (pos_ != bytes_.size()) fail("trailing bytes after payload");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ModelFormatError("section " + section_ + ": " + what);
  }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) fail("declared length exceeds payload (truncated)");
  }
  void need_items(std::uint64_t count, std::uint64_t width) const {
    if (count > (bytes_.size() - pos_) / width) {
      fail("declared length exceeds payload (truncated)");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string section_;
};

std::vector<std::uint8_t> encode_encoder(const EncoderStack& s) {
  Writer w;
  w.u64(s.n_labels());
  w.u64(s.depth());
  for (const auto& h : s.layers()) w.matrix(h);
  w.f64s(s.training_trace());
  const auto& audit = s.gradient_audit();
  w.u32(audit ? 1u : 0u);
  if (audit) {
    w.u64(audit->entries_checked);
    w.f64(audit->max_rel_error);
  }
  return std::move(w.buffer());
}

EncoderStack decode_encoder(Reader& r) {
  const std::uint64_t p = r.u64();
  const std::uint64_t depth = r.u64();
  std::vector<DenseMatrix> layers;
  for (std::uint64_t l = 0; l < depth; ++l) layers.push_back(r.matrix());
  std::vector<double> trace = r.f64s();
  const std::uint32_t has_audit = r.u32();
  std::optional<GradientAudit> audit;
  if (has_audit) {
    GradientAudit a;
    a.entries_checked = r.u64();
    a.max_rel_error = r.f64();
    audit = a;
  }
  r.finish();
  try {
    EncoderStack s(p, std::move(layers), std::move(trace));
    if (audit) s.set_gradient_audit(*audit);
    return s;
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

std::vector<std::uint8_t> encode_regressor(const RegressorModel& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.kind()));
  w.u64(m.layers().size());
  for (std::size_t l = 0; l < m.layers().size(); ++l) {
    w.matrix(m.layers()[l]);
    w.f64s(m.biases()[l]);
  }
  return std::move(w.buffer());
}

RegressorModel decode_regressor(Reader& r) {
  const std::uint32_t kind = r.u32();
  if (kind > static_cast<std::uint32_t>(RegressorKind::mlp_1hidden)) {
    r.fail("unknown regressor kind " + std::to_string(kind));
  }
  const std::uint64_t n = r.u64();
  std::vector<DenseMatrix> layers;
  std::vector<std::vector<double>> biases;
  for (std::uint64_t l = 0; l < n; ++l) {
    layers.push_back(r.matrix());
    biases.push_back(r.f64s());
  }
  r.finish();
  try {
    return RegressorModel(static_cast<RegressorKind>(kind), std::move(layers), std::move(biases));
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

std::vector<std::uint8_t> encode_nmf(const NmfFactors& f) {
  Writer w;
  w.u64(f.k);
  w.matrix(f.w);
  w.matrix(f.h);
  w.f64s(f.objective_trace);
  return std::move(w.buffer());
}

NmfFactors decode_nmf(Reader& r) {
  NmfFactors f;
  f.k = r.u64();
  f.w = r.matrix();
  f.h = r.matrix();
  f.objective_trace = r.f64s();
  r.finish();
  if (f.w.cols() != f.k || f.h.rows() != f.k) r.fail("factor shapes disagree with rank");
  return f;
}

std::vector<std::uint8_t> encode_config(const std::map<std::string, std::string>& cfg) {
  Writer w;
  w.u64(cfg.size());
  for (const auto& [k, v] : cfg) {
    w.str(k);
    w.str(v);
  }
  return std::move(w.buffer());
}

std::map<std::string, std::string> decode_config(Reader& r) {
  std::map<std::string, std::string> cfg;
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string k = r.str();
    cfg[k] = r.str();
  }
  r.finish();
  return cfg;
}

std::vector<std::uint8_t> encode_names(const std::vector<std::string>& names) {
  Writer w;
  w.u64(names.size());
  for (const auto& n : names) w.str(n);
  return std::move(w.buffer());
}

std::vector<std::string> decode_names(Reader& r) {
  const std::uint64_t n = r.u64();
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < n; ++i) names.push_back(r.str());
  r.finish();
  return names;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ModelContainer& model) {
  if (model.encoder && model.regressor &&
      model.regressor->output_dim() != model.encoder->latent_dim()) {
    throw ShapeError("save_model: regressor output width " +
                     std::to_string(model.regressor->output_dim()) +
                     " does not match encoder latent width " +
                     std::to_string(model.encoder->latent_dim()));
  }
  if (model.encoder && !model.label_names.empty() &&
      model.label_names.size() != model.encoder->n_labels()) {
    throw ShapeError("save_model: " + std::to_string(model.label_names.size()) +
                     " label names for " + std::to_string(model.encoder->n_labels()) +
                     " labels");
  }

  std::vector<std::pair<Tag, std::vector<std::uint8_t>>> sections;
  if (model.encoder) sections.emplace_back(kEncoderTag, encode_encoder(*model.encoder));
  if (model.regressor) sections.emplace_back(kRegressorTag, encode_regressor(*model.regressor));
  if (model.nmf) sections.emplace_back(kNmfTag, encode_nmf(*model.nmf));
  sections.emplace_back(kConfigTag, encode_config(model.config));
  if (!model.label_names.empty()) sections.emplace_back(kNamesTag, encode_names(model.label_names));

  Writer out;
  out.bytes(kMagic.data(), kMagic.size());
  out.u32(kModelFormatVersion);
  out.u32(static_cast<std::uint32_t>(sections.size()));
  out.u32(0);  // header CRC, patched below
  std::uint64_t offset = kHeaderBytes + kTableEntryBytes * sections.size();
  for (const auto& [tag, payload] : sections) {
    out.bytes(tag.data(), tag.size());
    out.u32(crc32_of(payload));
    out.u64(offset);
    out.u64(payload.size());
    out.u64(0);
    offset += payload.size();
  }
  auto& buf = out.buffer();
  std::vector<std::uint8_t> covered(buf.begin(), buf.begin() + 12);
  covered.insert(covered.end(), buf.begin() + kHeaderBytes, buf.end());
  const std::uint32_t header_crc = crc32_of(covered);
  for (int i = 0; i < 4; ++i) buf[12 + i] = static_cast<std::uint8_t>(header_crc >> (8 * i));
  for (const auto& [tag, payload] : sections) out.bytes(payload.data(), payload.size());
  return std::move(out.buffer());
}

ModelContainer deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw ModelFormatError("model file truncated: no header");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ModelFormatError("bad magic: not an XLC1 model container");
  }
  Reader header(bytes.subspan(4, 12), "header");
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw UnsupportedVersionError("unsupported model format version " +
                                      std::to_string(version) + " (this build reads version " +
                                      std::to_string(kModelFormatVersion) + ")",
                                  version);
  }
  const std::uint32_t count = header.u32();
  const std::uint32_t stored_header_crc = header.u32();
  const std::uint64_t table_end = kHeaderBytes + std::uint64_t{kTableEntryBytes} * count;
  if (table_end > bytes.size()) throw ModelFormatError("model file truncated: section table");

  std::vector<std::uint8_t> covered(bytes.begin(), bytes.begin() + 12);
  covered.insert(covered.end(), bytes.begin() + kHeaderBytes,
                 bytes.begin() + static_cast<std::ptrdiff_t>(table_end));
  if (crc32_of(covered) != stored_header_crc) {
    throw ChecksumError("checksum mismatch in section header (section table)", "header");
  }

  ModelContainer model;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t base = kHeaderBytes + kTableEntryBytes * i;
    Tag tag;
    std::memcpy(tag.data(), bytes.data() + base, 4);
    Reader entry(bytes.subspan(base + 4, kTableEntryBytes - 4), "table");
    const std::uint32_t crc = entry.u32();
    const std::uint64_t offset = entry.u64();
    const std::uint64_t length = entry.u64();
    if (offset > bytes.size() || length > bytes.size() - offset) {
      throw ModelFormatError("model file truncated: section " + section_label(tag) +
                             " extends past end of file");
    }
    const auto payload = bytes.subspan(offset, length);
    if (crc32_of(payload) != crc) {
      throw ChecksumError("checksum mismatch in section " + section_label(tag),
                          tag_string(tag));
    }
    Reader r(payload, section_label(tag));
    if (tag == kEncoderTag) {
      model.encoder = decode_encoder(r);
    } else if (tag == kRegressorTag) {
      model.regressor = decode_regressor(r);
    } else if (tag == kNmfTag) {
      model.nmf = decode_nmf(r);
    } else if (tag == kConfigTag) {
      model.config = decode_config(r);
    } else if (tag == kNamesTag) {
      model.label_names = decode_names(r);
    } else {
      model.warnings.push_back("skipping unknown section '" + tag_string(tag) + "'");
    }
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ModelContainer& model) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model '" + path.string() + "'");
}

ModelContainer load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace nnxml
