#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "gnglove/model.hpp"
#include "gnglove/util.hpp"

namespace gnglove {

inline double cosine(std::span<const double> u, std::span<const double> v) {
  const double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("cosine: zero vector");
  return dot(u, v) / (nu * nv);
}

namespace detail {

/// Fractional ranks (1-based), ties get the average rank.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// Spearman rank correlation with average-rank tie handling.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need >= 2 points");
  const auto rx = detail::fractional_ranks(xs);
  const auto ry = detail::fractional_ranks(ys);
  return detail::pearson(rx, ry);
}

struct EvalReport {
  std::string metric;
  double value = 0.0;
  double coverage = 0.0;  // fraction of instances with all words in-vocab
};

struct SimilarityDataset {
  std::string name;
  std::vector<std::tuple<std::string, std::string, double>> triples;
};

/// "word1 word2 score" per line, whitespace-separated.
inline SimilarityDataset load_similarity(const std::string& path,
                                         std::string name = "") {
  auto in = open_input(path);
  SimilarityDataset ds;
  ds.name = name.empty() ? path : std::move(name);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = tokenize(line, /*lowercase=*/false);
    if (fields.empty()) continue;
    if (fields.size() != 3)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected \"word1 word2 score\"");
    ds.triples.emplace_back(std::move(fields[0]), std::move(fields[1]),
                            std::stod(fields[2]));
  }
  if (ds.triples.empty())
    throw std::runtime_error("empty similarity dataset: " + path);
  return ds;
}

inline EvalReport eval_similarity(const Embeddings& emb,
                                  const SimilarityDataset& ds) {
  std::vector<double> human, predicted;
  for (const auto& [w1, w2, score] : ds.triples) {
    auto i1 = emb.find(w1);
    auto i2 = emb.find(w2);
    if (!i1 || !i2) continue;
    human.push_back(score);
    predicted.push_back(cosine(emb.row(*i1), emb.row(*i2)));
  }
  if (human.size() < 2)
    throw std::runtime_error("eval_similarity: fewer than 2 usable pairs in " +
                             ds.name);
  EvalReport rep;
  rep.metric = "similarity:" + ds.name;
  rep.value = spearman(human, predicted);
  rep.coverage = double(human.size()) / double(ds.triples.size());
  return rep;
}

struct AnalogyDataset {
  struct Quad {
    std::string a, b, c, d;
    int section = -1;
  };
  std::vector<Quad> quads;
  std::vector<std::string> sections;
};

/// Google analogy format: ": section" headers, then "A B C D" lines.
inline AnalogyDataset load_analogy(const std::string& path) {
  auto in = open_input(path);
  AnalogyDataset ds;
  std::string line;
  std::size_t lineno = 0;
  int section = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = tokenize(line, /*lowercase=*/false);
    if (fields.empty()) continue;
    if (fields[0] == ":") {
      ds.sections.push_back(fields.size() > 1 ? fields[1] : "unnamed");
      section = static_cast<int>(ds.sections.size()) - 1;
      continue;
    }
    if (fields.size() == 5 && fields[0].front() == ':') {
      ds.sections.push_back(fields[0].substr(1));
      section = static_cast<int>(ds.sections.size()) - 1;
      continue;
    }
    if (fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected \"A B C D\"");
    ds.quads.push_back({std::move(fields[0]), std::move(fields[1]),
                        std::move(fields[2]), std::move(fields[3]), section});
  }
  if (ds.quads.empty())
    throw std::runtime_error("empty analogy dataset: " + path);
  return ds;
}

/// Query construction for "A is to B as C is to ?".
enum class AnalogyForm { Paper, Conventional };  // wA - wB + wC vs wB - wA + wC

/// 3CosAdd over unit-normalized vectors; the predicted word is the cosine-
/// nearest vocabulary entry excluding A, B and C.
inline EvalReport eval_analogy(
    const Embeddings& emb, const AnalogyDataset& ds,
    AnalogyForm form = AnalogyForm::Paper,
    std::vector<std::pair<std::string, double>>* per_section = nullptr) {
  const std::size_t d = emb.dim;
  std::vector<double> unit(emb.data.size());
  std::vector<bool> usable(emb.size(), false);
  for (std::uint32_t id = 0; id < emb.size(); ++id) {
    auto row = emb.row(id);
    const double n = norm(row);
    if (n == 0.0) continue;
    usable[id] = true;
    for (std::size_t t = 0; t < d; ++t) unit[std::size_t(id) * d + t] = row[t] / n;
  }
  auto urow = [&](std::uint32_t id) {
    return std::span<const double>(unit.data() + std::size_t(id) * d, d);
  };

  std::uint64_t correct = 0, scored = 0;
  std::vector<std::uint64_t> sec_correct(ds.sections.size(), 0),
      sec_scored(ds.sections.size(), 0);
  std::vector<double> query(d);
  for (const auto& quad : ds.quads) {
    auto ia = emb.find(quad.a), ib = emb.find(quad.b), ic = emb.find(quad.c),
         id = emb.find(quad.d);
    if (!ia || !ib || !ic || !id || !usable[*ia] || !usable[*ib] ||
        !usable[*ic] || !usable[*id])
      continue;
    auto va = urow(*ia), vb = urow(*ib), vc = urow(*ic);
    for (std::size_t t = 0; t < d; ++t)
      query[t] = form == AnalogyForm::Paper ? va[t] - vb[t] + vc[t]
                                            : vb[t] - va[t] + vc[t];
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    for (std::uint32_t cand = 0; cand < emb.size(); ++cand) {
      if (!usable[cand] || cand == *ia || cand == *ib || cand == *ic) continue;
      const double score = dot(query, urow(cand));
      if (score > best) {
        best = score;
        best_id = cand;
      }
    }
    ++scored;
    const bool ok = best_id == *id;
    correct += ok;
    if (quad.section >= 0) {
      ++sec_scored[quad.section];
      sec_correct[quad.section] += ok;
    }
  }
  if (scored == 0)
    throw std::runtime_error("eval_analogy: no usable quads");
  if (per_section) {
    for (std::size_t s = 0; s < ds.sections.size(); ++s)
      if (sec_scored[s] > 0)
        per_section->emplace_back(ds.sections[s],
                                  double(sec_correct[s]) / double(sec_scored[s]));
  }
  EvalReport rep;
  rep.metric = "analogy";
  rep.value = double(correct) / double(scored);
  rep.coverage = double(scored) / double(ds.quads.size());
  return rep;
}

enum class SemBiasLabel : std::uint8_t { Definition, Stereotype, None };

/// Four labeled word pairs; exactly one Definition, one Stereotype, two None.
struct SemBiasInstance {
  std::array<std::pair<std::string, std::string>, 4> pairs;
  std::array<SemBiasLabel, 4> labels;
};

inline const char* sembias_label_name(SemBiasLabel l) {
  switch (l) {
    case SemBiasLabel::Definition: return "definition";
    case SemBiasLabel::Stereotype: return "stereotype";
    default: return "none";
  }
}

/// One instance per line: four tab-separated "a:b/label" fields.
inline std::vector<SemBiasInstance> load_sembias(const std::string& path) {
  auto in = open_input(path);
  std::vector<SemBiasInstance> instances;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    SemBiasInstance inst;
    std::size_t field = 0, pos = 0;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + why);
    };
    std::string text(t);
    while (field < 4) {
      std::size_t tab = text.find('\t', pos);
      std::string piece = text.substr(pos, tab == std::string::npos
                                               ? std::string::npos
                                               : tab - pos);
      auto colon = piece.find(':');
      auto slash = piece.rfind('/');
      if (colon == std::string::npos || slash == std::string::npos ||
          slash < colon)
        fail("expected \"a:b/label\", got \"" + piece + "\"");
      inst.pairs[field] = {piece.substr(0, colon),
                           piece.substr(colon + 1, slash - colon - 1)};
      std::string label = piece.substr(slash + 1);
      if (label == "definition")
        inst.labels[field] = SemBiasLabel::Definition;
      else if (label == "stereotype")
        inst.labels[field] = SemBiasLabel::Stereotype;
      else if (label == "none")
        inst.labels[field] = SemBiasLabel::None;
      else
        fail("unknown label: " + label);
      ++field;
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (field != 4) fail("expected 4 pairs per instance");
    int defs = 0, stereos = 0, nones = 0;
    for (auto l : inst.labels) {
      defs += l == SemBiasLabel::Definition;
      stereos += l == SemBiasLabel::Stereotype;
      nones += l == SemBiasLabel::None;
    }
    if (defs != 1 || stereos != 1 || nones != 2)
      fail("label multiset must be {definition, stereotype, none, none}");
    instances.push_back(std::move(inst));
  }
  if (instances.empty())
    throw std::runtime_error("empty SemBias dataset: " + path);
  return instances;
}

inline void save_sembias(const std::string& path,
                         std::span<const SemBiasInstance> instances) {
  auto out = open_output(path);
  for (const auto& inst : instances) {
    for (std::size_t f = 0; f < 4; ++f) {
      if (f) out << '\t';
      out << inst.pairs[f].first << ':' << inst.pairs[f].second << '/'
          << sembias_label_name(inst.labels[f]);
    }
    out << '\n';
  }
}

/// Cartesian product of definition and stereotype pairs; each instance draws
/// two distinct None pairs from the pool with the seeded generator.
inline std::vector<SemBiasInstance> build_sembias(
    std::span<const std::pair<std::string, std::string>> definition_pairs,
    std::span<const std::pair<std::string, std::string>> stereotype_pairs,
    std::span<const std::pair<std::string, std::string>> none_pairs,
    std::uint64_t seed) {
  if (definition_pairs.empty() || stereotype_pairs.empty())
    throw std::invalid_argument("build_sembias: empty pair list");
  if (none_pairs.size() < 2)
    throw std::invalid_argument("build_sembias: need at least 2 none pairs");
  Rng rng(seed);
  std::vector<SemBiasInstance> instances;
  instances.reserve(definition_pairs.size() * stereotype_pairs.size());
  for (const auto& def : definition_pairs) {
    for (const auto& stereo : stereotype_pairs) {
      SemBiasInstance inst;
      inst.pairs[0] = def;
      inst.labels[0] = SemBiasLabel::Definition;
      inst.pairs[1] = stereo;
      inst.labels[1] = SemBiasLabel::Stereotype;
      const auto n1 = rng.next_below(none_pairs.size());
      auto n2 = rng.next_below(none_pairs.size() - 1);
      if (n2 >= n1) ++n2;  // without replacement
      inst.pairs[2] = none_pairs[n1];
      inst.labels[2] = SemBiasLabel::None;
      inst.pairs[3] = none_pairs[n2];
      inst.labels[3] = SemBiasLabel::None;
      instances.push_back(std::move(inst));
    }
  }
  return instances;
}

struct SemBiasResult {
  double definition_pct = 0.0;
  double stereotype_pct = 0.0;
  double none_pct = 0.0;
  double coverage = 0.0;
  std::uint64_t scored = 0;
};

/// Scores each pair (a, b) by cosine(w_he - w_she, w_a - w_b); the best
/// pair's label takes the prediction, ties broken by pair order.
inline SemBiasResult eval_sembias(const Embeddings& emb,
                                  std::span<const SemBiasInstance> instances,
                                  const std::string& he,
                                  const std::string& she) {
  auto ihe = emb.find(he), ishe = emb.find(she);
  if (!ihe || !ishe)
    throw std::invalid_argument("eval_sembias: \"" + he + "\" and \"" + she +
                                "\" must be in the vocabulary");
  const std::size_t d = emb.dim;
  std::vector<double> gdir(d);
  for (std::size_t t = 0; t < d; ++t)
    gdir[t] = emb.row(*ihe)[t] - emb.row(*ishe)[t];

  std::uint64_t counts[3] = {0, 0, 0};
  std::uint64_t scored = 0;
  std::vector<double> diff(d);
  for (const auto& inst : instances) {
    std::array<std::uint32_t, 8> ids{};
    bool ok = true;
    for (std::size_t f = 0; f < 4 && ok; ++f) {
      auto ia = emb.find(inst.pairs[f].first);
      auto ib = emb.find(inst.pairs[f].second);
      if (!ia || !ib) {
        ok = false;
        break;
      }
      ids[2 * f] = *ia;
      ids[2 * f + 1] = *ib;
    }
    if (!ok) continue;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_f = 0;
    for (std::size_t f = 0; f < 4; ++f) {
      auto va = emb.row(ids[2 * f]);
      auto vb = emb.row(ids[2 * f + 1]);
      for (std::size_t t = 0; t < d; ++t) diff[t] = va[t] - vb[t];
      const double nd = norm(diff);
      const double score = nd == 0.0 ? -2.0 : dot(gdir, diff) / (norm(gdir) * nd);
      if (score > best) {
        best = score;
        best_f = f;
      }
    }
    ++counts[static_cast<std::size_t>(inst.labels[best_f])];
    ++scored;
  }
  SemBiasResult res;
  res.scored = scored;
  res.coverage = instances.empty() ? 0.0 : double(scored) / double(instances.size());
  if (scored > 0) {
    res.definition_pct = 100.0 * double(counts[0]) / double(scored);
    res.stereotype_pct = 100.0 * double(counts[1]) / double(scored);
    res.none_pct = 100.0 * double(counts[2]) / double(scored);
  }
  return res;
}

struct ProjectionResult {
  double mean_abs_cosine = 0.0;
  double coverage = 0.0;
  std::vector<std::pair<std::string, double>> per_word;  // signed cosines
};

/// Mean absolute cosine between each listed word and the he-she direction.
inline ProjectionResult gender_projection(const Embeddings& emb,
                                          std::span<const std::string> words,
                                          const std::string& he,
                                          const std::string& she) {
  auto ihe = emb.find(he), ishe = emb.find(she);
  if (!ihe || !ishe)
    throw std::invalid_argument("gender_projection: \"" + he + "\" and \"" +
                                she + "\" must be in the vocabulary");
  const std::size_t d = emb.dim;
  std::vector<double> gdir(d);
  for (std::size_t t = 0; t < d; ++t)
    gdir[t] = emb.row(*ihe)[t] - emb.row(*ishe)[t];
  ProjectionResult res;
  double sum = 0.0;
  for (const auto& w : words) {
    auto id = emb.find(w);
    if (!id) continue;
    const double c = cosine(emb.row(*id), gdir);
    res.per_word.emplace_back(w, c);
    sum += std::abs(c);
  }
  if (res.per_word.empty())
    throw std::runtime_error("gender_projection: no usable words");
  res.mean_abs_cosine = sum / double(res.per_word.size());
  res.coverage = double(res.per_word.size()) / double(words.size());
  return res;
}

}  // namespace gnglove
