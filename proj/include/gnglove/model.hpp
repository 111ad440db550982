#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gnglove/corpus.hpp"
#include "gnglove/util.hpp"

namespace gnglove {

struct ModelConfig {
  std::uint32_t dim = 300;
  std::uint32_t gender_dims = 1;  // k, reserved at the tail of each vector
  std::uint64_t seed = 1;

  void validate() const {
    if (gender_dims < 1 || gender_dims >= dim)
      throw std::invalid_argument("gender_dims must satisfy 1 <= k < dim");
  }
};

/// All trainable state: center vectors w, context vectors w~, biases, and one
/// AdaGrad accumulator per parameter tensor. The last k dimensions of each
/// word vector carry the gendered component w^(g); the rest is w^(a).
struct Model {
  ModelConfig config;
  std::uint32_t vocab_size = 0;
  std::vector<double> center, context;            // V x d, row-major
  std::vector<double> center_bias, context_bias;  // V
  std::vector<double> acc_center, acc_context;
  std::vector<double> acc_center_bias, acc_context_bias;

  std::uint32_t dim() const { return config.dim; }
  std::uint32_t neutral_dims() const { return config.dim - config.gender_dims; }

  void check_id(std::uint32_t id) const {
    if (id >= vocab_size)
      throw std::out_of_range("word id " + std::to_string(id) +
                              " out of range (V=" + std::to_string(vocab_size) + ")");
  }

  std::span<double> center_row(std::uint32_t id) {
    check_id(id);
    return {center.data() + std::size_t(id) * dim(), dim()};
  }
  std::span<const double> center_row(std::uint32_t id) const {
    check_id(id);
    return {center.data() + std::size_t(id) * dim(), dim()};
  }
  std::span<double> context_row(std::uint32_t id) {
    check_id(id);
    return {context.data() + std::size_t(id) * dim(), dim()};
  }
  std::span<const double> context_row(std::uint32_t id) const {
    check_id(id);
    return {context.data() + std::size_t(id) * dim(), dim()};
  }

  std::span<double> acc_center_row(std::uint32_t id) {
    check_id(id);
    return {acc_center.data() + std::size_t(id) * dim(), dim()};
  }
  std::span<double> acc_context_row(std::uint32_t id) {
    check_id(id);
    return {acc_context.data() + std::size_t(id) * dim(), dim()};
  }

  /// w^(a): dims 0..d-k-1 of the center row.
  std::span<const double> neutral_part(std::uint32_t id) const {
    return center_row(id).subspan(0, neutral_dims());
  }
  std::span<double> neutral_part(std::uint32_t id) {
    return center_row(id).subspan(0, neutral_dims());
  }
  /// w^(g): dims d-k..d-1 of the center row.
  std::span<const double> gender_part(std::uint32_t id) const {
    return center_row(id).subspan(neutral_dims(), config.gender_dims);
  }
  std::span<double> gender_part(std::uint32_t id) {
    return center_row(id).subspan(neutral_dims(), config.gender_dims);
  }

  /// Final word representation: center + context.
  std::vector<double> representation(std::uint32_t id) const {
    auto w = center_row(id);
    auto c = context_row(id);
    std::vector<double> r(dim());
    for (std::uint32_t t = 0; t < dim(); ++t) r[t] = w[t] + c[t];
    return r;
  }
};

/// Vector entries and biases drawn i.i.d. uniform on (-0.5/d, 0.5/d);
/// accumulators start at 1.0. Fully determined by config.seed.
inline Model init_model(const ModelConfig& config, std::uint32_t vocab_size) {
  config.validate();
  if (vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
  Model m;
  m.config = config;
  m.vocab_size = vocab_size;
  const std::size_t n = std::size_t(vocab_size) * config.dim;
  const double half = 0.5 / config.dim;
  Rng rng(config.seed);
  auto fill = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    for (auto& x : v) x = rng.uniform(-half, half);
  };
  fill(m.center, n);
  fill(m.context, n);
  fill(m.center_bias, vocab_size);
  fill(m.context_bias, vocab_size);
  m.acc_center.assign(n, 1.0);
  m.acc_context.assign(n, 1.0);
  m.acc_center_bias.assign(vocab_size, 1.0);
  m.acc_context_bias.assign(vocab_size, 1.0);
  return m;
}

enum class SaveMode { Center, Sum, Split };

namespace detail {

inline void write_embedding_line(std::FILE* f, const std::string& word,
                                 std::span<const double> v) {
  std::fputs(word.c_str(), f);
  for (double x : v) std::fprintf(f, " %.6f", x);
  std::fputc('\n', f);
}

}  // namespace detail

/// Text format "word v1 .. vd\n" with 6 decimal places, in id order. Split
/// mode slices the sum representation into its neutral and gendered parts and
/// writes them to path.neutral and path.gender.
inline void save_embeddings(const Model& model, const Vocab& vocab,
                            const std::string& path, SaveMode mode) {
  if (vocab.size() != model.vocab_size)
    throw std::invalid_argument("vocab size does not match model");
  for (const auto& [word, _] : vocab.entries)
    if (word.find(' ') != std::string::npos)
      throw std::invalid_argument("word contains a space, cannot save: " + word);

  auto open = [](const std::string& p) {
    std::FILE* f = std::fopen(p.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + p);
    return f;
  };
  const std::uint32_t dk = model.neutral_dims();
  if (mode == SaveMode::Split) {
    std::FILE* fn = open(path + ".neutral");
    std::FILE* fg = open(path + ".gender");
    for (std::uint32_t id = 0; id < model.vocab_size; ++id) {
      auto r = model.representation(id);
      detail::write_embedding_line(fn, vocab.word(id),
                                   std::span<const double>(r).subspan(0, dk));
      detail::write_embedding_line(fg, vocab.word(id),
                                   std::span<const double>(r).subspan(dk));
    }
    std::fclose(fn);
    std::fclose(fg);
    return;
  }
  std::FILE* f = open(path);
  for (std::uint32_t id = 0; id < model.vocab_size; ++id) {
    if (mode == SaveMode::Sum) {
      auto r = model.representation(id);
      detail::write_embedding_line(f, vocab.word(id), r);
    } else {
      detail::write_embedding_line(f, vocab.word(id), model.center_row(id));
    }
  }
  std::fclose(f);
}

/// Loaded embedding table, the read-only input of the evaluation and debias
/// stages.
struct Embeddings {
  std::vector<std::string> words;
  std::unordered_map<std::string, std::uint32_t, StringHash, StringEq> index;
  std::size_t dim = 0;
  std::vector<double> data;  // words x dim

  std::size_t size() const { return words.size(); }

  std::span<double> row(std::uint32_t id) {
    return {data.data() + std::size_t(id) * dim, dim};
  }
  std::span<const double> row(std::uint32_t id) const {
    return {data.data() + std::size_t(id) * dim, dim};
  }

  std::optional<std::uint32_t> find(std::string_view word) const {
    auto it = index.find(word);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  void save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    for (std::uint32_t id = 0; id < words.size(); ++id)
      detail::write_embedding_line(f, words[id], row(id));
    std::fclose(f);
  }
};

inline Embeddings load_embeddings(const std::string& path) {
  auto in = open_input(path);
  Embeddings emb;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected \"word v1 .. vd\"");
    values.clear();
    const char* p = line.c_str() + sp;
    char* end = nullptr;
    while (*p == ' ') {
      double x = std::strtod(p + 1, &end);
      if (end == p + 1) break;
      values.push_back(x);
      p = end;
    }
    if (values.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": no vector values");
    if (emb.dim == 0) emb.dim = values.size();
    if (values.size() != emb.dim)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": dimension mismatch, expected " +
                               std::to_string(emb.dim) + " got " +
                               std::to_string(values.size()));
    emb.index.emplace(line.substr(0, sp),
                      static_cast<std::uint32_t>(emb.words.size()));
    emb.words.push_back(line.substr(0, sp));
    emb.data.insert(emb.data.end(), values.begin(), values.end());
  }
  return emb;
}

// Binary checkpoint: magic "GNEM", u32 version, u32 V, u32 d, u32 k, then the
// eight f64 tensors in declaration order, little-endian.
inline void save_checkpoint(const Model& m, const std::string& path) {
  auto out = open_output(path, std::ios::binary);
  const char magic[4] = {'G', 'N', 'E', 'M'};
  out.write(magic, 4);
  std::uint32_t header[4] = {1u, m.vocab_size, m.config.dim, m.config.gender_dims};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  auto tensor = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  tensor(m.center);
  tensor(m.context);
  tensor(m.center_bias);
  tensor(m.context_bias);
  tensor(m.acc_center);
  tensor(m.acc_context);
  tensor(m.acc_center_bias);
  tensor(m.acc_context_bias);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

inline Model load_checkpoint(const std::string& path) {
  auto in = open_input(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GNEM", 4) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != 1)
    throw std::runtime_error("unsupported checkpoint version in " + path);
  Model m;
  m.vocab_size = header[1];
  m.config.dim = header[2];
  m.config.gender_dims = header[3];
  m.config.validate();
  const std::size_t n = std::size_t(m.vocab_size) * m.config.dim;
  auto tensor = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  };
  tensor(m.center, n);
  tensor(m.context, n);
  tensor(m.center_bias, m.vocab_size);
  tensor(m.context_bias, m.vocab_size);
  tensor(m.acc_center, n);
  tensor(m.acc_context, n);
  tensor(m.acc_center_bias, m.vocab_size);
  tensor(m.acc_context_bias, m.vocab_size);
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return m;
}

}  // namespace gnglove
