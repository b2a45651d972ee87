// Copyright 2026 The mcnorm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "mcnorm/error.h"
#include "mcnorm/joint_model.h"
#include "mcnorm/rng.h"

namespace mcnorm {
namespace {

constexpr std::string_view kMagic = "MCNORM1";

class Writer {
 public:
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  void section(std::string_view name, const Writer &payload) {
    str(name);
    u64(payload.out_.size());
    out_.append(payload.out_);
  }
  const std::string &bytes() const { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::string str() { return std::string(raw(u32())); }
  // Counts are bounded by the bytes left so corrupt sizes fail fast.
  std::uint64_t count(std::size_t min_item_bytes) {
    const std::uint64_t n = u64();
    if (n > remaining() / std::max<std::size_t>(min_item_bytes, 1)) corrupt("implausible count");
    return n;
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

  [[noreturn]] static void corrupt(const std::string &what) {
    throw Error(ErrorCode::kCorruptContainer, what);
  }

 private:
  void need(std::size_t n) const {
    if (n > in_.size() - pos_) corrupt("truncated container");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_params(Writer &w, const ParamSet &params) {
  w.u64(params.num_blocks());
  for (std::size_t b = 0; b < params.num_blocks(); ++b) {
    const ParamBlock &block = params.block(b);
    w.str(block.name);
    w.i64(block.rows);
    w.i64(block.cols);
    for (double v : params.values(b)) w.f64(v);
  }
}

// Reads blocks into `params`, whose layout is already fixed by the config.
void read_params(Reader r, ParamSet &params, std::string_view section) {
  if (r.count(20) != params.num_blocks()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(section) + ": block count differs");
  }
  for (std::size_t b = 0; b < params.num_blocks(); ++b) {
    const ParamBlock &block = params.block(b);
    const std::string name = r.str();
    const std::int64_t rows = r.i64();
    const std::int64_t cols = r.i64();
    if (name != block.name || rows != block.rows || cols != block.cols) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(section) + ": block '" + name + "' " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " does not match '" + block.name + "' " +
                      std::to_string(block.rows) + "x" + std::to_string(block.cols));
    }
    for (double &v : params.values(b)) v = r.f64();
  }
  if (!r.done()) Reader::corrupt(std::string(section) + ": trailing bytes");
}

}  // namespace

std::string serialize_model(const JointModel &model) {
  Writer out;
  out.raw(kMagic);
  out.u32(kContainerVersion);

  Writer config;
  config.i64(model.config().cell_kind == CellKind::kGru ? 0 : 1);
  config.i64(model.config().hidden);
  config.i64(model.config().attention);
  config.i64(model.encoder().input_dim());
  config.i64(model.config().use_sim_features ? 1 : 0);
  config.i64(model.num_classes());
  out.section("config", config);

  Writer codes;
  codes.u64(model.code_order().size());
  for (const std::string &code : model.code_order()) codes.str(code);
  out.section("code_order", codes);

  Writer tfidf;
  tfidf.u64(model.tfidf().doc_count());
  tfidf.u64(model.tfidf().vocabulary_size());
  for (std::size_t i = 0; i < model.tfidf().vocabulary_size(); ++i) {
    tfidf.str(model.tfidf().tokens()[i]);
    tfidf.f64(model.tfidf().idf()[i]);
  }
  out.section("tfidf", tfidf);

  if (const SimilarityIndex *sim = model.similarity()) {
    Writer terms;
    terms.u64(sim->code_order().size());
    for (std::size_t c = 0; c < sim->code_order().size(); ++c) {
      terms.str(sim->code_order()[c]);
      terms.u64(sim->terms()[c].size());
      for (const std::string &t : sim->terms()[c]) terms.str(t);
    }
    out.section("similarity_terms", terms);
  }

  Writer dim;
  dim.i64(model.embeddings().dim());
  out.section("embedding_dim", dim);

  Writer enc;
  write_params(enc, model.encoder().params());
  out.section("encoder_params", enc);

  Writer outp;
  write_params(outp, model.output());
  out.section("output_params", outp);
  out.u64(fnv1a64(out.bytes()));
  return out.bytes();
}

void save_model(const JointModel &model, const std::filesystem::path &path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

JointModel deserialize_model(std::string_view bytes, std::shared_ptr<const EmbeddingTable> embeddings) {
  if (!embeddings) throw Error(ErrorCode::kBadSpec, "embeddings are required");
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    Reader::corrupt("bad magic bytes");
  }
  // Trailer: FNV-1a 64 of every preceding byte.
  if (bytes.size() < kMagic.size() + 4 + 8) Reader::corrupt("truncated container");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  if (Reader(bytes.substr(body.size())).u64() != fnv1a64(body)) Reader::corrupt("checksum mismatch");
  Reader r(body.substr(kMagic.size()));
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) Reader::corrupt("unsupported version " + std::to_string(version));

  std::map<std::string, std::string_view> sections;
  while (!r.done()) {
    std::string name = r.str();
    const std::uint64_t len = r.u64();
    if (len > r.remaining()) Reader::corrupt("truncated section '" + name + "'");
    sections[std::move(name)] = r.raw(len);
  }
  auto section = [&](const char *name) {
    const auto it = sections.find(name);
    if (it == sections.end()) Reader::corrupt(std::string("missing section '") + name + "'");
    return Reader(it->second);
  };

  Reader config = section("config");
  const std::int64_t cell = config.i64();
  if (cell != 0 && cell != 1) Reader::corrupt("bad cell kind");
  ModelConfig mc;
  mc.cell_kind = cell == 0 ? CellKind::kGru : CellKind::kLstm;
  mc.hidden = static_cast<int>(config.i64());
  mc.attention = static_cast<int>(config.i64());
  const std::int64_t input_dim = config.i64();
  mc.use_sim_features = config.i64() != 0;
  const std::int64_t num_classes = config.i64();

  Reader dim_reader = section("embedding_dim");
  const std::int64_t dim = dim_reader.i64();
  if (dim != input_dim || dim != embeddings->dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "container expects embedding dim " + std::to_string(dim) + ", table has " +
                    std::to_string(embeddings->dim()));
  }

  Reader codes = section("code_order");
  std::vector<std::string> code_order(codes.count(4));
  for (std::string &code : code_order) code = codes.str();
  if (static_cast<std::int64_t>(code_order.size()) != num_classes) {
    throw Error(ErrorCode::kShapeMismatch, "code_order size differs from class count");
  }

  Reader tf = section("tfidf");
  const std::uint64_t doc_count = tf.u64();
  const std::uint64_t vocab = tf.count(12);
  std::vector<std::string> tokens(vocab);
  std::vector<double> idf(vocab);
  for (std::uint64_t i = 0; i < vocab; ++i) {
    tokens[i] = tf.str();
    idf[i] = tf.f64();
  }
  std::shared_ptr<const TfIdfModel> tfidf;
  try {
    tfidf = std::make_shared<const TfIdfModel>(std::move(tokens), std::move(idf), doc_count);
  } catch (const Error &e) {
    Reader::corrupt(std::string("tf-idf section: ") + e.what());
  }

  std::shared_ptr<const SimilarityIndex> similarity;
  if (mc.use_sim_features) {
    Reader terms = section("similarity_terms");
    TerminologyDictionary dictionary("container");
    const std::uint64_t n_codes = terms.count(12);
    for (std::uint64_t c = 0; c < n_codes; ++c) {
      const std::string code = terms.str();
      const std::uint64_t n_terms = terms.count(4);
      for (std::uint64_t t = 0; t < n_terms; ++t) dictionary.add(code, terms.str());
    }
    try {
      similarity = std::make_shared<const SimilarityIndex>(dictionary, *tfidf, code_order);
    } catch (const Error &e) {
      throw Error(ErrorCode::kShapeMismatch, std::string("similarity terms: ") + e.what());
    }
  }

  if (mc.hidden < 1 || mc.attention < 1 || input_dim < 1 || mc.hidden > (1 << 20) ||
      mc.attention > (1 << 20)) {
    Reader::corrupt("bad encoder dimensions");
  }
  EncoderParams encoder(mc.cell_kind, static_cast<int>(input_dim), mc.hidden, mc.attention);
  read_params(section("encoder_params"), encoder.params(), "encoder_params");
  JointModel model(mc, std::move(encoder), std::move(code_order), std::move(tfidf),
                   std::move(similarity), std::move(embeddings));
  read_params(section("output_params"), model.output(), "output_params");
  return model;
}

JointModel load_model(const std::filesystem::path &path, std::shared_ptr<const EmbeddingTable> embeddings) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw Error(ErrorCode::kMissingFile, path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes, std::move(embeddings));
}

}  // namespace mcnorm
