#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gnglove/corpus.hpp"
#include "gnglove/util.hpp"

namespace gnglove {

enum class GenderClass : std::uint8_t { Neutral = 0, Male = 1, Female = 2 };

/// Resolved gender word sets. Male, female and neutral ids partition the
/// vocabulary; `pairs` is the seed pair list used to estimate the gender
/// direction; `skipped` records input words that were not in the vocabulary.
struct GenderLexicon {
  std::vector<std::uint32_t> male_ids;
  std::vector<std::uint32_t> female_ids;
  std::vector<std::uint32_t> neutral_ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<std::string> skipped;
  std::vector<GenderClass> classes;  // dense, indexed by word id

  GenderClass class_of(std::uint32_t id) const { return classes.at(id); }
};

/// One word per line; blanks and '#' comments ignored; duplicates dropped
/// keeping the first occurrence.
inline std::vector<std::string> load_word_list(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!valid_utf8(line))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed UTF-8");
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string word(t);
    if (seen.insert(word).second) words.push_back(std::move(word));
  }
  return words;
}

/// One "male female" pair per line, tab or space separated.
inline std::vector<std::pair<std::string, std::string>> load_pairs(
    const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!valid_utf8(line))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed UTF-8");
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = tokenize(t, /*lowercase=*/false);
    if (fields.size() != 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected exactly 2 fields, got " +
                               std::to_string(fields.size()));
    pairs.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  return pairs;
}

/// Resolves word lists against the vocabulary. Neutral words are the
/// complement of the male and female sets, so the three always partition
/// 0..V-1. Pairs with an out-of-vocabulary member are dropped into `skipped`.
inline GenderLexicon build_lexicon(
    const Vocab& vocab, std::span<const std::string> male_words,
    std::span<const std::string> female_words,
    std::span<const std::pair<std::string, std::string>> pair_words) {
  GenderLexicon lex;
  lex.classes.assign(vocab.size(), GenderClass::Neutral);

  std::unordered_set<std::string> male_set(male_words.begin(), male_words.end());
  std::vector<std::string> overlap;
  for (const auto& w : female_words)
    if (male_set.count(w)) overlap.push_back(w);
  if (!overlap.empty()) {
    std::string msg = "words in both male and female lists:";
    for (const auto& w : overlap) msg += " " + w;
    throw std::invalid_argument(msg);
  }

  auto resolve = [&](std::span<const std::string> words, GenderClass cls,
                     std::vector<std::uint32_t>& out) {
    for (const auto& w : words) {
      auto id = vocab.id_of(w);
      if (!id) {
        lex.skipped.push_back(w);
        continue;
      }
      if (lex.classes[*id] == cls) continue;  // duplicate entry
      lex.classes[*id] = cls;
      out.push_back(*id);
    }
  };
  resolve(male_words, GenderClass::Male, lex.male_ids);
  resolve(female_words, GenderClass::Female, lex.female_ids);

  // Seed pair members are definitional; classify any that the word lists
  // missed, erroring only on contradictions.
  for (const auto& [m, f] : pair_words) {
    auto mi = vocab.id_of(m);
    auto fi = vocab.id_of(f);
    if (!mi || !fi) {
      lex.skipped.push_back(m);
      lex.skipped.push_back(f);
      continue;
    }
    if (lex.classes[*mi] == GenderClass::Female)
      throw std::invalid_argument("pair male word is in the female list: " + m);
    if (lex.classes[*fi] == GenderClass::Male)
      throw std::invalid_argument("pair female word is in the male list: " + f);
    if (lex.classes[*mi] == GenderClass::Neutral) {
      lex.classes[*mi] = GenderClass::Male;
      lex.male_ids.push_back(*mi);
    }
    if (lex.classes[*fi] == GenderClass::Neutral) {
      lex.classes[*fi] = GenderClass::Female;
      lex.female_ids.push_back(*fi);
    }
    lex.pairs.emplace_back(*mi, *fi);
  }

  for (std::uint32_t id = 0; id < vocab.size(); ++id)
    if (lex.classes[id] == GenderClass::Neutral) lex.neutral_ids.push_back(id);
  return lex;
}

}  // namespace gnglove
