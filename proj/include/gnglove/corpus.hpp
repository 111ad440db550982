#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <unistd.h>

#include "gnglove/util.hpp"

namespace gnglove {

static_assert(std::endian::native == std::endian::little,
              "record files are little-endian; big-endian hosts unsupported");

inline bool is_unicode_space(char32_t c) {
  if (c == 0x20 || (c >= 0x09 && c <= 0x0D)) return true;
  if (c == 0x85 || c == 0xA0) return true;
  if (c == 0x1680) return true;
  if (c >= 0x2000 && c <= 0x200A) return true;
  return c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

/// Splits on Unicode whitespace. Lowercasing is ASCII-only; bytes that do not
/// form a valid UTF-8 sequence are passed through opaquely.
inline std::vector<std::string> tokenize(std::string_view line,
                                         bool lowercase = true) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  while (i < line.size()) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0x80) {
      if ((c >> 5) == 0x6 && i + 1 < line.size()) {
        cp = (c & 0x1F), len = 2;
      } else if ((c >> 4) == 0xE && i + 2 < line.size()) {
        cp = (c & 0x0F), len = 3;
      } else if ((c >> 3) == 0x1E && i + 3 < line.size()) {
        cp = (c & 0x07), len = 4;
      } else {
        len = 1, cp = 0xFFFD;  // stray byte, never whitespace
      }
      for (std::size_t k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(line[i + k]);
        if ((cc >> 6) != 0x2) {
          len = 1;
          cp = 0xFFFD;
          break;
        }
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    if (is_unicode_space(cp)) {
      flush();
    } else {
      for (std::size_t k = 0; k < len; ++k) {
        char ch = line[i + k];
        if (lowercase && ch >= 'A' && ch <= 'Z') ch = char(ch - 'A' + 'a');
        current.push_back(ch);
      }
    }
    i += len;
  }
  flush();
  return tokens;
}

/// Vocabulary with ids assigned in descending-count order, ties broken
/// lexicographically.
struct Vocab {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::unordered_map<std::string, std::uint32_t, StringHash, StringEq> index;

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries.size()); }

  std::optional<std::uint32_t> id_of(std::string_view w) const {
    auto it = index.find(w);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  const std::string& word(std::uint32_t id) const { return entries.at(id).first; }

  void save(const std::string& path) const {
    auto out = open_output(path);
    for (const auto& [word, count] : entries)
      out << word << ' ' << count << '\n';
    if (!out) throw std::runtime_error("failed writing vocab file: " + path);
  }

  static Vocab load(const std::string& path) {
    auto in = open_input(path);
    Vocab v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto sp = line.rfind(' ');
      if (sp == std::string::npos || sp == 0)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected \"word count\"");
      std::string word = line.substr(0, sp);
      std::uint64_t count = std::stoull(line.substr(sp + 1));
      v.index.emplace(word, static_cast<std::uint32_t>(v.entries.size()));
      v.entries.emplace_back(std::move(word), count);
    }
    return v;
  }

  void rebuild_index() {
    index.clear();
    for (std::uint32_t id = 0; id < entries.size(); ++id)
      index.emplace(entries[id].first, id);
  }
};

class VocabBuilder {
 public:
  void add(std::string_view token) {
    auto it = counts_.find(token);
    if (it == counts_.end())
      counts_.emplace(std::string(token), 1);
    else
      ++it->second;
  }

  Vocab finish(std::uint64_t min_count) const {
    Vocab v;
    for (const auto& [word, count] : counts_)
      if (count >= min_count) v.entries.emplace_back(word, count);
    std::sort(v.entries.begin(), v.entries.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    v.rebuild_index();
    return v;
  }

 private:
  std::unordered_map<std::string, std::uint64_t, StringHash, StringEq> counts_;
};

inline Vocab build_vocab(std::istream& text, std::uint64_t min_count,
                         bool lowercase = true) {
  VocabBuilder builder;
  std::string line;
  while (std::getline(text, line))
    for (const auto& tok : tokenize(line, lowercase)) builder.add(tok);
  return builder.finish(min_count);
}

/// One accumulated co-occurrence: context word j seen near center word i with
/// total distance-weighted count x.
struct CooccurrenceRecord {
  std::uint32_t i;
  std::uint32_t j;
  double x;
};
static_assert(sizeof(CooccurrenceRecord) == 16);

inline void write_records(const std::string& path,
                          std::span<const CooccurrenceRecord> records) {
  auto out = open_output(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(records.data()),
            static_cast<std::streamsize>(records.size() * sizeof(CooccurrenceRecord)));
  if (!out) throw std::runtime_error("failed writing record file: " + path);
}

inline std::vector<CooccurrenceRecord> read_records(const std::string& path) {
  auto in = open_input(path, std::ios::binary);
  in.seekg(0, std::ios::end);
  auto bytes = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  if (bytes % sizeof(CooccurrenceRecord) != 0)
    throw std::runtime_error("record file size is not a multiple of 16: " + path);
  std::vector<CooccurrenceRecord> records(bytes / sizeof(CooccurrenceRecord));
  in.read(reinterpret_cast<char*>(records.data()),
          static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("failed reading record file: " + path);
  return records;
}

/// Uniform permutation determined entirely by the seed.
inline void shuffle_records(std::vector<CooccurrenceRecord>& records,
                            std::uint64_t seed) {
  shuffle_vector(records, seed);
}

struct CountingOptions {
  int window = 15;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
  std::string tmp_dir;  // empty: std::filesystem::temp_directory_path()
  int threads = 1;
  bool lowercase = true;
};

namespace detail {

constexpr int kMaxWindow = 28;

/// lcm(1..window); fits u64 for window <= 28. All 1/delta weights are stored
/// as integer multiples of 1/lcm so that shard merges and parallel reductions
/// are exact and order-independent.
constexpr std::uint64_t window_lcm(int window) {
  std::uint64_t l = 1;
  for (int d = 2; d <= window; ++d) l = std::lcm(l, static_cast<std::uint64_t>(d));
  return l;
}

constexpr std::uint32_t kOov = std::numeric_limits<std::uint32_t>::max();

inline std::string shard_path(const std::string& tmp_dir, int worker, int n) {
  namespace fs = std::filesystem;
  fs::path dir = tmp_dir.empty() ? fs::temp_directory_path() : fs::path(tmp_dir);
  char name[96];
  std::snprintf(name, sizeof(name), "gncooc_%ld_w%d_s%d.shard",
                static_cast<long>(::getpid()), worker, n);
  return (dir / name).string();
}

}  // namespace detail

/// Accumulates distance-weighted pair counts for one input shard, spilling
/// sorted runs to disk whenever the hash map would exceed the memory budget.
class CooccurrenceAccumulator {
 public:
  CooccurrenceAccumulator(int window, std::size_t memory_budget_bytes,
                          std::string tmp_dir, int worker_id = 0)
      : window_(window),
        lcm_(0),
        tmp_dir_(std::move(tmp_dir)),
        worker_id_(worker_id) {
    if (window < 1 || window > detail::kMaxWindow)
      throw std::invalid_argument(
          "window must be in [1, " + std::to_string(detail::kMaxWindow) +
          "] (weights are kept in exact integer arithmetic)");
    lcm_ = detail::window_lcm(window);
    constexpr std::size_t kEntryCost = 64;  // rough node + bucket footprint
    max_entries_ = std::max<std::size_t>(memory_budget_bytes / kEntryCost, 4096);
  }

  int window() const { return window_; }
  std::uint64_t lcm() const { return lcm_; }

  /// Word ids for one line, with kOov marking out-of-vocabulary tokens. OOV
  /// tokens occupy positions (distance counts them) but contribute nothing.
  void add_line(std::span<const std::uint32_t> ids) {
    const int w = window_;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (ids[p] == detail::kOov) continue;
      const std::size_t lo = p >= static_cast<std::size_t>(w) ? p - w : 0;
      for (std::size_t q = lo; q < p; ++q) {
        if (ids[q] == detail::kOov) continue;
        const std::uint64_t add = lcm_ / static_cast<std::uint64_t>(p - q);
        bump(key(ids[q], ids[p]), add);
        bump(key(ids[p], ids[q]), add);
      }
    }
  }

  void add_tokens(std::span<const std::string> tokens, const Vocab& vocab) {
    scratch_ids_.clear();
    for (const auto& tok : tokens) {
      auto id = vocab.id_of(tok);
      scratch_ids_.push_back(id ? *id : detail::kOov);
    }
    add_line(scratch_ids_);
  }

  /// Records sorted by (i, j); merges spilled shards when present.
  std::vector<CooccurrenceRecord> finish() {
    if (!shards_.empty()) {
      std::vector<CooccurrenceRecord> records;
      merge_shards(take_shards(), lcm_,
                   [&](const CooccurrenceRecord& r) { records.push_back(r); });
      return records;
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> flat(acc_.begin(),
                                                              acc_.end());
    acc_.clear();
    std::sort(flat.begin(), flat.end());
    std::vector<CooccurrenceRecord> records;
    records.reserve(flat.size());
    for (const auto& [k, num] : flat)
      records.push_back({static_cast<std::uint32_t>(k >> 32),
                         static_cast<std::uint32_t>(k & 0xFFFFFFFFu),
                         static_cast<double>(num) / static_cast<double>(lcm_)});
    return records;
  }

  /// Spills any remaining contents and hands over the shard files.
  std::vector<std::string> take_shards() {
    if (!acc_.empty()) spill();
    return std::move(shards_);
  }

  /// K-way merge of sorted shard files, summing duplicate keys exactly.
  /// Emits records in (i, j) order and removes the shard files.
  template <typename Emit>
  static void merge_shards(const std::vector<std::string>& paths,
                           std::uint64_t lcm, Emit&& emit) {
    struct Head {
      std::uint64_t key;
      std::uint64_t num;
      std::size_t stream;
    };
    auto cmp = [](const Head& a, const Head& b) { return a.key > b.key; };
    std::priority_queue<Head, std::vector<Head>, decltype(cmp)> heap(cmp);
    std::vector<std::ifstream> streams;
    streams.reserve(paths.size());
    auto refill = [&](std::size_t s) {
      std::uint64_t buf[2];
      if (streams[s].read(reinterpret_cast<char*>(buf), 16))
        heap.push({buf[0], buf[1], s});
    };
    for (const auto& p : paths) {
      streams.push_back(open_input(p, std::ios::binary));
      refill(streams.size() - 1);
    }
    bool have = false;
    std::uint64_t cur_key = 0, cur_num = 0;
    auto flush = [&] {
      if (have)
        emit(CooccurrenceRecord{
            static_cast<std::uint32_t>(cur_key >> 32),
            static_cast<std::uint32_t>(cur_key & 0xFFFFFFFFu),
            static_cast<double>(cur_num) / static_cast<double>(lcm)});
    };
    while (!heap.empty()) {
      Head h = heap.top();
      heap.pop();
      if (have && h.key == cur_key) {
        if (cur_num > std::numeric_limits<std::uint64_t>::max() - h.num)
          throw std::overflow_error("co-occurrence count overflow");
        cur_num += h.num;
      } else {
        flush();
        cur_key = h.key;
        cur_num = h.num;
        have = true;
      }
      refill(h.stream);
    }
    flush();
    for (const auto& p : paths) std::filesystem::remove(p);
  }

 private:
  static std::uint64_t key(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
  }

  void bump(std::uint64_t k, std::uint64_t add) {
    auto& v = acc_[k];
    if (v > std::numeric_limits<std::uint64_t>::max() - add)
      throw std::overflow_error("co-occurrence count overflow");
    v += add;
    if (acc_.size() >= max_entries_) spill();
  }

  void spill() {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> flat(acc_.begin(),
                                                              acc_.end());
    acc_.clear();
    std::sort(flat.begin(), flat.end());
    auto path = detail::shard_path(tmp_dir_, worker_id_,
                                   static_cast<int>(shards_.size()));
    auto out = open_output(path, std::ios::binary);
    for (const auto& [k, num] : flat) {
      std::uint64_t buf[2] = {k, num};
      out.write(reinterpret_cast<const char*>(buf), 16);
    }
    if (!out) throw std::runtime_error("failed writing shard: " + path);
    shards_.push_back(path);
  }

  int window_;
  std::uint64_t lcm_;
  std::string tmp_dir_;
  int worker_id_;
  std::size_t max_entries_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> acc_;
  std::vector<std::string> shards_;
  std::vector<std::uint32_t> scratch_ids_;
};

/// Single-pass counting over a text stream.
inline std::vector<CooccurrenceRecord> count_cooccurrences(
    std::istream& text, const Vocab& vocab, const CountingOptions& opts) {
  CooccurrenceAccumulator acc(opts.window, opts.memory_budget_bytes,
                              opts.tmp_dir);
  std::string line;
  std::vector<std::uint32_t> ids;
  while (std::getline(text, line)) {
    ids.clear();
    for (const auto& tok : tokenize(line, opts.lowercase)) {
      auto id = vocab.id_of(tok);
      ids.push_back(id ? *id : detail::kOov);
    }
    acc.add_line(ids);
  }
  return acc.finish();
}

namespace detail {

/// Worker over a byte range of the corpus file. A line belongs to the range
/// containing its first byte.
inline void count_range(const std::string& path, const Vocab& vocab,
                        const CountingOptions& opts, std::uint64_t begin,
                        std::uint64_t end, CooccurrenceAccumulator& acc) {
  auto in = open_input(path, std::ios::binary);
  std::uint64_t pos = begin;
  if (begin > 0) {
    in.seekg(static_cast<std::streamoff>(begin - 1));
    char prev = 0;
    in.get(prev);
    if (prev != '\n') {
      std::string partial;
      std::getline(in, partial);
      pos = begin + partial.size() + 1;
    }
  }
  std::string line;
  std::vector<std::uint32_t> ids;
  while (pos < end && std::getline(in, line)) {
    pos += line.size() + 1;
    ids.clear();
    for (const auto& tok : tokenize(line, opts.lowercase)) {
      auto id = vocab.id_of(tok);
      ids.push_back(id ? *id : detail::kOov);
    }
    acc.add_line(ids);
  }
}

}  // namespace detail

/// Counts over a corpus file, optionally sharded across threads by line
/// ranges. Partial results merge by exact integer summation, so the output is
/// identical for every thread count and memory budget.
template <typename Emit>
void count_cooccurrences_file(const std::string& path, const Vocab& vocab,
                              const CountingOptions& opts, Emit&& emit) {
  const int threads = std::max(opts.threads, 1);
  const auto file_size =
      static_cast<std::uint64_t>(std::filesystem::file_size(path));
  std::vector<CooccurrenceAccumulator> accs;
  accs.reserve(threads);
  for (int t = 0; t < threads; ++t)
    accs.emplace_back(opts.window,
                      std::max<std::size_t>(opts.memory_budget_bytes /
                                                static_cast<std::size_t>(threads),
                                            std::size_t{1} << 20),
                      opts.tmp_dir, t);
  if (threads == 1) {
    detail::count_range(path, vocab, opts, 0, file_size, accs[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      std::uint64_t begin = file_size * t / threads;
      std::uint64_t end = file_size * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        try {
          detail::count_range(path, vocab, opts, begin, end, accs[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<std::string> shards;
  for (auto& acc : accs)
    for (auto& s : acc.take_shards()) shards.push_back(std::move(s));
  CooccurrenceAccumulator::merge_shards(shards, detail::window_lcm(opts.window),
                                        std::forward<Emit>(emit));
}

inline std::vector<CooccurrenceRecord> count_cooccurrences_file(
    const std::string& path, const Vocab& vocab, const CountingOptions& opts) {
  std::vector<CooccurrenceRecord> records;
  count_cooccurrences_file(path, vocab, opts,
                           [&](const CooccurrenceRecord& r) { records.push_back(r); });
  return records;
}

}  // namespace gnglove
