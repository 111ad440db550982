#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gnglove/eval.hpp"
#include "gnglove/util.hpp"

namespace gnglove::demo {

/// Gender-definition pairs planted in the demo corpus. The first half are
/// planted frequently and serve as the seed pairs; the second half appear
/// rarely and are held out of the seed file (but not the word lists) to
/// exercise generalization.
inline const std::vector<std::pair<std::string, std::string>>& definition_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"he", "she"},           {"him", "her"},
      {"his", "hers"},         {"man", "woman"},
      {"men", "women"},        {"boy", "girl"},
      {"boys", "girls"},       {"father", "mother"},
      {"son", "daughter"},     {"uncle", "aunt"},
      {"king", "queen"},       {"brother", "sister"},
      {"sir", "madam"},        {"gentleman", "lady"},
      {"grandfather", "grandmother"}, {"husband", "wife"},
      {"nephew", "niece"},     {"prince", "princess"},
      {"waiter", "waitress"},  {"actor", "actress"},
  };
  return pairs;
}

constexpr std::size_t kSeedPairs = 3;

/// Professions planted with male-leaning contexts.
inline const std::vector<std::string>& male_professions() {
  static const std::vector<std::string> p = {
      "engineer", "carpenter", "mechanic", "plumber",  "pilot",
      "surgeon",  "architect", "programmer", "captain", "sheriff"};
  return p;
}

/// Professions planted with female-leaning contexts.
inline const std::vector<std::string>& female_professions() {
  static const std::vector<std::string> p = {
      "nurse",  "librarian", "secretary",    "dancer",      "florist",
      "nanny",  "stylist",   "receptionist", "housekeeper", "therapist"};
  return p;
}

/// Stereotype pairs for the SemBias-style dataset.
inline const std::vector<std::pair<std::string, std::string>>& stereotype_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (std::size_t i = 0; i < male_professions().size(); ++i)
      v.emplace_back(male_professions()[i], female_professions()[i]);
    return v;
  }();
  return pairs;
}

/// Semantically coordinated pairs with no planted gender signal.
inline const std::vector<std::pair<std::string, std::string>>& none_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"dog", "cat"},    {"cup", "lid"},     {"bread", "butter"},
      {"tree", "leaf"},  {"road", "path"},   {"river", "lake"},
      {"chair", "table"}, {"shoe", "sock"},  {"rain", "snow"},
      {"pen", "paper"},  {"clock", "watch"}, {"door", "window"},
  };
  return pairs;
}

namespace detail {

inline std::vector<std::string> make_pool(const char* prefix, int n) {
  std::vector<std::string> pool;
  pool.reserve(n);
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
    pool.emplace_back(buf);
  }
  return pool;
}

}  // namespace detail

struct DemoPaths {
  std::string corpus;
  std::string male_words;
  std::string female_words;
  std::string gender_pairs;
  std::string professions;
  std::string sembias;
};

/// Writes the synthetic demo corpus and its companion word-list files.
///
/// The planted structure mirrors what makes the real task non-trivial: each
/// definition pair shares its own content nouns, so its members differ only
/// in gender; each profession owns content nouns of its own and additionally
/// co-occurs with one gender's pronouns (the stereotype); coordinate pairs
/// and fillers carry no gender signal. Fully determined by the seed.
inline DemoPaths write_demo_corpus(const std::string& dir, std::uint64_t seed,
                                   std::size_t sentences = 25000) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  DemoPaths paths;
  paths.corpus = (fs::path(dir) / "corpus.txt").string();
  paths.male_words = (fs::path(dir) / "male_words.txt").string();
  paths.female_words = (fs::path(dir) / "female_words.txt").string();
  paths.gender_pairs = (fs::path(dir) / "gender_pairs.txt").string();
  paths.professions = (fs::path(dir) / "professions.txt").string();
  paths.sembias = (fs::path(dir) / "sembias.txt").string();

  const auto nouns = detail::make_pool("noun", 180);
  const auto verbs = detail::make_pool("verb", 100);
  const auto adjs = detail::make_pool("adj", 80);
  const auto places = detail::make_pool("place", 80);
  // dedicated content nouns shared within a definition pair, owned by a
  // profession, or shared within a coordinate pair
  const auto fam_nouns = detail::make_pool("fam", 60);
  const auto work_nouns = detail::make_pool("work", 100);
  const auto thing_nouns = detail::make_pool("thing", 36);
  // gender-exclusive context nouns; they broaden the pronoun contrast but
  // never co-occur with professions or their content
  const auto male_ctx = detail::make_pool("mctx", 40);
  const auto female_ctx = detail::make_pool("fctx", 40);

  Rng rng(seed);
  auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
    return pool[rng.next_below(pool.size())];
  };
  auto fam_of = [&](std::size_t pair_idx) -> const std::string& {
    return fam_nouns[pair_idx * 3 + rng.next_below(3)];
  };
  auto work_of = [&](std::size_t prof_idx) -> const std::string& {
    return work_nouns[prof_idx * 5 + rng.next_below(5)];
  };

  std::vector<std::string> male_defs, female_defs;
  for (const auto& [m, f] : definition_pairs()) {
    male_defs.push_back(m);
    female_defs.push_back(f);
  }
  const std::size_t n_pairs = male_defs.size();
  const std::size_t n_profs = male_professions().size();
  // frequency-skewed pair sampling: the first half of the pair list is
  // common, the second half rare, so the rare pairs' gender signal is weak
  // in raw co-occurrence statistics
  auto pick_pair_idx = [&] {
    return rng.next_below(100) < 85 ? rng.next_below(n_pairs / 2)
                                    : n_pairs / 2 + rng.next_below(n_pairs - n_pairs / 2);
  };

  auto out = open_output(paths.corpus);
  std::vector<std::string> toks;
  for (std::size_t s = 0; s < sentences; ++s) {
    toks.clear();
    const auto roll = rng.next_below(100);
    auto add = [&](const std::string& w) { toks.push_back(w); };
    if (roll < 56) {
      // gendered block, male and female halves mirror each other; every
      // sentence carries the gender's pronoun next to the topical word
      const bool male = roll < 28;
      const auto& defs = male ? male_defs : female_defs;
      const auto& profs = male ? male_professions() : female_professions();
      const char* subj = male ? "he" : "she";
      const char* poss = male ? "his" : "her";
      const std::size_t dp = pick_pair_idx();
      const std::size_t pp = rng.next_below(n_profs);
      // profession content-noun index: female professions sit after male ones
      const std::size_t wp = male ? pp : n_profs + pp;
      const auto& ctx = male ? male_ctx : female_ctx;
      // the stereotype is a tendency, not a rule: two profession sentences
      // in five carry the opposite gender's pronoun and setting
      const bool against = rng.next_below(5) < 2;
      const char* psubj = against ? (male ? "she" : "he") : subj;
      const char* pposs = against ? (male ? "her" : "his") : poss;
      const auto& pctx = (male != against) ? male_ctx : female_ctx;
      switch (rng.next_below(10)) {
        case 0:
          add(defs[dp]), add("said"), add(subj), add(pick(verbs)),
              add(fam_of(dp));
          break;
        case 1:
          add(subj), add("and"), add(defs[dp]), add(pick(verbs)),
              add(fam_of(dp));
          break;
        case 2:
          add(defs[dp]), add(pick(verbs)), add(poss), add(fam_of(dp)),
              add("and"), add(subj), add(pick(verbs)), add(pick(nouns));
          break;
        case 3:
          add(subj), add(pick(verbs)), add(fam_of(dp)), add("and"),
              add(defs[dp]), add(pick(verbs)), add(poss), add(pick(nouns));
          break;
        case 4:
          add(defs[dp]), add("is"), add(profs[pp]), add("and"), add(subj),
              add(pick(verbs)), add(pick(pctx));
          break;
        case 5:
          add(profs[pp]), add("said"), add(psubj), add(pick(verbs)), add(pposs),
              add(pick(pctx));
          break;
        case 6:
        case 7:
          add(profs[pp]), add(pick(verbs)), add(pick(pctx)), add("and"),
              add(pick(pctx));
          break;
        case 8:
          add(subj), add(pick(verbs)), add(poss), add(pick(ctx)), add("and"),
              add(subj), add(pick(verbs)), add(pick(ctx));
          break;
        default:
          add(defs[dp]), add(pick(verbs)), add(poss), add(pick(ctx)), add("and"),
              add(pick(ctx));
          break;
      }
    } else if (roll < 68) {
      // mixed-gender sentences: cross-gender co-occurrence at longer range,
      // so in-group vs out-group count ratios carry the signal
      const auto mix = rng.next_below(8);
      if (mix < 3) {
        const auto dp = pick_pair_idx();
        add(male_defs[dp]), add("said"), add("he"), add(pick(verbs)),
            add("and"), add(female_defs[dp]), add("said"), add("she"),
            add(pick(verbs));
      } else if (mix == 3) {
        add("he"), add(pick(verbs)), add(pick(male_ctx)), add("and"),
            add("she"), add(pick(verbs)), add(pick(female_ctx));
      } else if (mix < 6) {
        const auto pm = rng.next_below(n_profs), pf = rng.next_below(n_profs);
        add(male_professions()[pm]), add("and"),
            add(female_professions()[pf]), add(pick(verbs)), add("at"),
            add(pick(places));
      } else {
        const auto dp = pick_pair_idx();
        add(male_defs[dp]), add("and"), add(female_defs[dp]),
            add(pick(verbs)), add("in"), add(pick(places));
      }
    } else if (roll < 80) {
      // plain filler
      if (rng.next_below(2) == 0) {
        add(pick(nouns)), add(pick(verbs)), add(pick(adjs)), add(pick(nouns));
      } else {
        add(pick(adjs)), add(pick(nouns)), add(pick(verbs)),
            add(pick(nouns)), add("in"), add(pick(places));
      }
    } else if (roll < 88) {
      // coordinate pair with shared content, no gender signal
      const std::size_t np = rng.next_below(none_pairs().size());
      add(none_pairs()[np].first), add("and"),
          add(none_pairs()[np].second), add(pick(verbs)),
          add(thing_nouns[np * 3 + rng.next_below(3)]);
    } else {
      // professions in a gender-free context, with their content nouns
      const std::size_t wp = rng.next_below(2 * n_profs);
      const auto& prof = wp < n_profs ? male_professions()[wp]
                                      : female_professions()[wp - n_profs];
      add(prof), add(pick(verbs)), add(work_of(wp)), add("at"),
          add(pick(places));
    }
    for (std::size_t t = 0; t < toks.size(); ++t) {
      if (t) out << ' ';
      out << toks[t];
    }
    out << '\n';
  }
  out.close();

  auto write_list = [](const std::string& path, const std::vector<std::string>& words) {
    auto f = open_output(path);
    for (const auto& w : words) f << w << '\n';
  };
  write_list(paths.male_words, male_defs);
  write_list(paths.female_words, female_defs);
  {
    auto f = open_output(paths.gender_pairs);
    for (std::size_t i = 0; i < kSeedPairs; ++i)
      f << definition_pairs()[i].first << ' ' << definition_pairs()[i].second
        << '\n';
  }
  {
    auto f = open_output(paths.professions);
    for (const auto& w : male_professions()) f << w << '\n';
    for (const auto& w : female_professions()) f << w << '\n';
  }
  save_sembias(paths.sembias,
               build_sembias(definition_pairs(), stereotype_pairs(),
                             none_pairs(), seed + 1));
  return paths;
}

}  // namespace gnglove::demo
