// gn-embed: train and evaluate GloVe-style embeddings whose gender signal is
// confined to k reserved dimensions, plus a post-processing debias baseline.
//
// Pipeline: vocab -> cooccur -> shuffle -> train -> eval-* / project / debias.
// Every subcommand that writes artifacts also writes a JSON manifest whose
// recorded argv reproduces the outputs exactly.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gnglove/corpus.hpp"
#include "gnglove/debias.hpp"
#include "gnglove/eval.hpp"
#include "gnglove/lexicon.hpp"
#include "gnglove/manifest.hpp"
#include "gnglove/model.hpp"
#include "gnglove/objective.hpp"
#include "gnglove/synthetic.hpp"
#include "gnglove/trainer.hpp"

namespace fs = std::filesystem;
using namespace gnglove;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_threads() {
  if (const char* env = std::getenv("GN_EMBED_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- vocab ----

struct VocabArgs {
  std::string input, output;
  std::uint64_t min_count = 5;
  bool lowercase = true;
};

void run_vocab(const VocabArgs& a, RunManifest manifest) {
  Stopwatch timer;
  auto in = open_input(a.input);
  Vocab vocab = build_vocab(in, a.min_count, a.lowercase);
  vocab.save(a.output);
  std::cerr << "vocab: " << vocab.size() << " words (min count "
            << a.min_count << ")\n";
  manifest.flags = {{"min-count", std::to_string(a.min_count)},
                    {"lowercase", a.lowercase ? "true" : "false"}};
  manifest.inputs = {a.input};
  manifest.outputs = {a.output};
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, a.output + ".manifest.json");
}

// -------------------------------------------------------------- cooccur ----

struct CooccurArgs {
  std::string input, vocab, output;
  int window = 15;
  double memory_gb = 2.0;
  int threads = 1;
  bool lowercase = true;
};

void run_cooccur(const CooccurArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Vocab vocab = Vocab::load(a.vocab);
  CountingOptions opts;
  opts.window = a.window;
  opts.memory_budget_bytes =
      static_cast<std::size_t>(a.memory_gb * double(std::size_t{1} << 30));
  opts.threads = a.threads;
  opts.lowercase = a.lowercase;
  opts.tmp_dir = fs::path(a.output).parent_path().string();

  auto out = open_output(a.output, std::ios::binary);
  std::uint64_t n = 0;
  count_cooccurrences_file(a.input, vocab, opts,
                           [&](const CooccurrenceRecord& r) {
                             out.write(reinterpret_cast<const char*>(&r), 16);
                             ++n;
                           });
  out.close();
  std::cerr << "cooccur: " << n << " records, window " << a.window << "\n";
  manifest.flags = {{"window", std::to_string(a.window)},
                    {"memory-gb", fmt(a.memory_gb)},
                    {"threads", std::to_string(a.threads)},
                    {"lowercase", a.lowercase ? "true" : "false"}};
  manifest.inputs = {a.input, a.vocab};
  manifest.outputs = {a.output};
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, a.output + ".manifest.json");
}

// -------------------------------------------------------------- shuffle ----

struct ShuffleArgs {
  std::string input, output;
  std::uint64_t seed = 1;
};

void run_shuffle(const ShuffleArgs& a, RunManifest manifest) {
  Stopwatch timer;
  auto records = read_records(a.input);
  shuffle_records(records, a.seed);
  write_records(a.output, records);
  std::cerr << "shuffle: " << records.size() << " records, seed " << a.seed
            << "\n";
  manifest.flags = {{"seed", std::to_string(a.seed)}};
  manifest.seed = a.seed;
  manifest.inputs = {a.input};
  manifest.outputs = {a.output};
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, a.output + ".manifest.json");
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
  std::string input, vocab, out_prefix;
  std::string male_words, female_words, gender_pairs;
  std::uint32_t dim = 300;
  std::uint32_t gender_dims = 1;
  TrainingConfig cfg;
  std::string jd = "l1";
  std::string schedule = "per-record";
  std::string clamp;
  std::string checkpoint;
  int threads = 1;
  std::uint64_t seed = 1;
};

GenderLexicon load_lexicon_files(const Vocab& vocab,
                                 const std::string& male_path,
                                 const std::string& female_path,
                                 const std::string& pairs_path) {
  std::vector<std::string> male, female;
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!male_path.empty()) male = load_word_list(male_path);
  if (!female_path.empty()) female = load_word_list(female_path);
  if (!pairs_path.empty()) pairs = load_pairs(pairs_path);
  return build_lexicon(vocab, male, female, pairs);
}

void validate_train_args(TrainArgs& a) {
  if (a.gender_dims < 1 || a.gender_dims >= a.dim)
    throw UsageError("--gender-dims must satisfy 1 <= k < --dim");
  if (!a.clamp.empty()) {
    auto comma = a.clamp.find(',');
    if (comma == std::string::npos)
      throw UsageError("--clamp expects \"lo,hi\"");
    a.cfg.clamp_lo = std::stod(a.clamp.substr(0, comma));
    a.cfg.clamp_hi = std::stod(a.clamp.substr(comma + 1));
  }
  a.cfg.jd_variant = a.jd == "l2" ? JdVariant::L2 : JdVariant::L1;
  a.cfg.constraint_schedule = a.schedule == "per-epoch"
                                  ? ConstraintSchedule::PerEpoch
                                  : ConstraintSchedule::PerRecord;
  if (a.cfg.lambda_d > 0 && (a.male_words.empty() || a.female_words.empty()))
    throw UsageError(
        "--lambda-d > 0 requires --male-words and --female-words");
  if (a.cfg.lambda_e > 0 && a.gender_pairs.empty())
    throw UsageError("--lambda-e > 0 requires --gender-pairs");
  if (a.cfg.lambda_e > 0 && (a.male_words.empty() || a.female_words.empty()))
    throw UsageError(
        "--lambda-e > 0 requires --male-words and --female-words");
  try {
    a.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void run_train(TrainArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Vocab vocab = Vocab::load(a.vocab);
  if (vocab.size() == 0) throw std::runtime_error("empty vocabulary");
  auto records = read_records(a.input);
  GenderLexicon lexicon =
      load_lexicon_files(vocab, a.male_words, a.female_words, a.gender_pairs);
  if (!lexicon.skipped.empty())
    std::cerr << "lexicon: skipped " << lexicon.skipped.size()
              << " out-of-vocabulary words\n";

  ModelConfig mc{a.dim, a.gender_dims, a.seed};
  Model model = init_model(mc, vocab.size());
  TrainOptions opts;
  opts.threads = a.threads;
  opts.seed = a.seed;

  const std::string stats_path = a.out_prefix + ".stats.csv";
  auto stats_out = open_output(stats_path);
  stats_out << "epoch,jg,jd,je,total,skipped,seconds\n";
  char row[256];
  train(model, records, lexicon, a.cfg, opts, [&](const EpochStats& st) {
    std::snprintf(row, sizeof(row), "%d,%.9g,%.9g,%.9g,%.9g,%llu,%.3f", st.epoch,
                  st.j_g, st.j_d, st.j_e, st.total,
                  static_cast<unsigned long long>(st.skipped_steps),
                  st.wallclock_s);
    stats_out << row << '\n';
    std::cerr << "epoch " << st.epoch << ": mean J_G sample loss "
              << st.mean_jg_sample_loss << ", held-out total " << st.total
              << "\n";
  });
  stats_out.close();

  const std::string center_path = a.out_prefix + ".center.txt";
  const std::string sum_path = a.out_prefix + ".sum.txt";
  const std::string split_path = a.out_prefix + ".split";
  save_embeddings(model, vocab, center_path, SaveMode::Center);
  save_embeddings(model, vocab, sum_path, SaveMode::Sum);
  save_embeddings(model, vocab, split_path, SaveMode::Split);
  manifest.outputs = {center_path, sum_path, split_path + ".neutral",
                      split_path + ".gender", stats_path};
  if (!a.checkpoint.empty()) {
    save_checkpoint(model, a.checkpoint);
    manifest.outputs.push_back(a.checkpoint);
  }

  manifest.flags = {
      {"dim", std::to_string(a.dim)},
      {"gender-dims", std::to_string(a.gender_dims)},
      {"lambda-d", fmt(a.cfg.lambda_d)},
      {"lambda-e", fmt(a.cfg.lambda_e)},
      {"jd", a.jd},
      {"beta1", fmt(a.cfg.beta1)},
      {"beta2", fmt(a.cfg.beta2)},
      {"x-max", fmt(a.cfg.x_max)},
      {"alpha", fmt(a.cfg.alpha)},
      {"lr", fmt(a.cfg.lr)},
      {"epochs", std::to_string(a.cfg.epochs)},
      {"clamp", fmt(a.cfg.clamp_lo) + "," + fmt(a.cfg.clamp_hi)},
      {"threads", std::to_string(a.threads)},
      {"seed", std::to_string(a.seed)},
      {"constraint-schedule", a.schedule},
  };
  manifest.seed = a.seed;
  manifest.inputs = {a.input, a.vocab};
  for (const auto& p : {a.male_words, a.female_words, a.gender_pairs})
    if (!p.empty()) manifest.inputs.push_back(p);
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, a.out_prefix + ".manifest.json");
}

// --------------------------------------------------------------- debias ----

struct DebiasArgs {
  std::string input, output, pairs;
  std::string male_words, female_words, neutral_words;
  bool neutral_from_lexicon = false;
  int k_b = 1;
};

void run_debias(const DebiasArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Embeddings emb = load_embeddings(a.input);
  auto word_pairs = load_pairs(a.pairs);
  std::vector<std::string> skipped;
  auto id_pairs = resolve_pairs(emb, word_pairs, &skipped);
  if (id_pairs.empty())
    throw std::runtime_error("no usable pairs in " + a.pairs);

  std::vector<std::uint32_t> neutral_ids;
  if (a.neutral_from_lexicon) {
    std::unordered_set<std::string> gendered;
    for (const auto& w : load_word_list(a.male_words)) gendered.insert(w);
    for (const auto& w : load_word_list(a.female_words)) gendered.insert(w);
    for (const auto& [m, f] : word_pairs) {
      gendered.insert(m);
      gendered.insert(f);
    }
    for (std::uint32_t id = 0; id < emb.size(); ++id)
      if (!gendered.count(emb.words[id])) neutral_ids.push_back(id);
  } else {
    for (const auto& w : load_word_list(a.neutral_words)) {
      if (auto id = emb.find(w)) neutral_ids.push_back(*id);
      else skipped.push_back(w);
    }
  }

  auto report = hard_debias(emb, neutral_ids, id_pairs, a.k_b);
  emb.save(a.output);
  std::cerr << "debias: neutralized " << report.neutralized << ", equalized "
            << report.equalized_pairs << " pairs, " << report.degenerate
            << " degenerate, " << skipped.size() << " skipped words\n";

  manifest.flags = {{"k-b", std::to_string(a.k_b)},
                    {"neutral-from-lexicon",
                     a.neutral_from_lexicon ? "true" : "false"}};
  manifest.inputs = {a.input, a.pairs};
  for (const auto& p : {a.male_words, a.female_words, a.neutral_words})
    if (!p.empty()) manifest.inputs.push_back(p);
  manifest.outputs = {a.output};
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, a.output + ".manifest.json");
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
  std::string embeddings, dataset, report, csv;
  std::string he = "he", she = "she";
  std::string analogy_form = "paper";
  std::string words;  // project only
};

void emit_report(const std::string& line, const std::string& report_path) {
  std::cout << line << '\n';
  if (!report_path.empty()) {
    auto out = open_output(report_path);
    out << line << '\n';
  }
}

void finish_eval_manifest(const EvalArgs& a, RunManifest manifest,
                          const Stopwatch& timer) {
  if (a.report.empty() && a.csv.empty()) return;  // nothing on disk
  manifest.inputs = {a.embeddings};
  if (!a.dataset.empty()) manifest.inputs.push_back(a.dataset);
  if (!a.words.empty()) manifest.inputs.push_back(a.words);
  if (!a.report.empty()) manifest.outputs.push_back(a.report);
  if (!a.csv.empty()) manifest.outputs.push_back(a.csv);
  manifest.wallclock_s = timer.seconds();
  const std::string anchor = a.report.empty() ? a.csv : a.report;
  write_manifest(manifest, anchor + ".manifest.json");
}

void run_eval_sim(const EvalArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Embeddings emb = load_embeddings(a.embeddings);
  auto ds = load_similarity(a.dataset);
  auto rep = eval_similarity(emb, ds);
  char line[256];
  std::snprintf(line, sizeof(line), "%s\tspearman\t%.6f\tcoverage\t%.4f",
                rep.metric.c_str(), rep.value, rep.coverage);
  emit_report(line, a.report);
  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "word1,word2,human,cosine\n";
    for (const auto& [w1, w2, score] : ds.triples) {
      auto i1 = emb.find(w1), i2 = emb.find(w2);
      if (!i1 || !i2) continue;
      char row[256];
      std::snprintf(row, sizeof(row), "%s,%s,%.6f,%.6f", w1.c_str(), w2.c_str(),
                    score, cosine(emb.row(*i1), emb.row(*i2)));
      out << row << '\n';
    }
  }
  manifest.flags = {};
  finish_eval_manifest(a, std::move(manifest), timer);
}

void run_eval_analogy(const EvalArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Embeddings emb = load_embeddings(a.embeddings);
  auto ds = load_analogy(a.dataset);
  const AnalogyForm form = a.analogy_form == "conventional"
                               ? AnalogyForm::Conventional
                               : AnalogyForm::Paper;
  std::vector<std::pair<std::string, double>> per_section;
  auto rep = eval_analogy(emb, ds, form, &per_section);
  char line[256];
  std::snprintf(line, sizeof(line), "analogy\taccuracy\t%.6f\tcoverage\t%.4f",
                rep.value, rep.coverage);
  emit_report(line, a.report);
  for (const auto& [name, acc] : per_section)
    std::cerr << "  section " << name << ": " << acc << "\n";
  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "section,accuracy\n";
    for (const auto& [name, acc] : per_section)
      out << name << ',' << acc << '\n';
  }
  manifest.flags = {{"analogy-form", a.analogy_form}};
  finish_eval_manifest(a, std::move(manifest), timer);
}

void run_eval_sembias(const EvalArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Embeddings emb = load_embeddings(a.embeddings);
  auto instances = load_sembias(a.dataset);
  auto res = eval_sembias(emb, instances, a.he, a.she);
  char line[256];
  std::snprintf(line, sizeof(line),
                "sembias\tdefinition\t%.4f\tstereotype\t%.4f\tnone\t%.4f"
                "\tcoverage\t%.4f",
                res.definition_pct, res.stereotype_pct, res.none_pct,
                res.coverage);
  emit_report(line, a.report);
  manifest.flags = {{"he", a.he}, {"she", a.she}};
  finish_eval_manifest(a, std::move(manifest), timer);
}

void run_project(const EvalArgs& a, RunManifest manifest) {
  Stopwatch timer;
  Embeddings emb = load_embeddings(a.embeddings);
  auto words = load_word_list(a.words);
  auto res = gender_projection(emb, words, a.he, a.she);
  char line[256];
  std::snprintf(line, sizeof(line),
                "projection\tmean-abs-cosine\t%.6f\tcoverage\t%.4f",
                res.mean_abs_cosine, res.coverage);
  emit_report(line, a.report);
  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "word,cosine\n";
    for (const auto& [w, c] : res.per_word) {
      char row[160];
      std::snprintf(row, sizeof(row), "%s,%.6f", w.c_str(), c);
      out << row << '\n';
    }
  }
  manifest.flags = {{"he", a.he}, {"she", a.she}};
  finish_eval_manifest(a, std::move(manifest), timer);
}

// ----------------------------------------------------------------- demo ----

struct DemoArgs {
  std::string out_dir;
  std::uint64_t seed = 1;
  int epochs = 15;
  std::uint32_t dim = 50;
  int threads = 1;
  std::size_t sentences = 25000;
};

struct DemoRow {
  std::string name;
  double projection = 0.0;
  double sembias_def = 0.0, sembias_stereo = 0.0, sembias_none = 0.0;
  double wg_separation = 0.0;
};

double gender_dim_separation(const Model& model, const GenderLexicon& lexicon) {
  double male = 0.0, female = 0.0;
  for (auto id : lexicon.male_ids) male += model.gender_part(id)[0];
  for (auto id : lexicon.female_ids) female += model.gender_part(id)[0];
  male /= double(lexicon.male_ids.size());
  female /= double(lexicon.female_ids.size());
  return male - female;
}

void run_demo(const DemoArgs& a, RunManifest manifest) {
  Stopwatch timer;
  fs::create_directories(a.out_dir);
  auto data = demo::write_demo_corpus(
      (fs::path(a.out_dir) / "data").string(), a.seed, a.sentences);

  // vocab + records
  Vocab vocab;
  {
    auto in = open_input(data.corpus);
    vocab = build_vocab(in, 5);
    vocab.save((fs::path(a.out_dir) / "vocab.txt").string());
  }
  CountingOptions copts;
  copts.window = 15;
  copts.threads = a.threads;
  copts.tmp_dir = a.out_dir;
  auto records = count_cooccurrences_file(data.corpus, vocab, copts);
  std::cerr << "demo: " << vocab.size() << " words, " << records.size()
            << " records\n";

  GenderLexicon lexicon = load_lexicon_files(vocab, data.male_words,
                                             data.female_words,
                                             data.gender_pairs);
  auto professions = load_word_list(data.professions);
  auto sembias = load_sembias(data.sembias);

  auto train_variant = [&](double lambda, JdVariant jd) {
    TrainingConfig cfg;
    cfg.lambda_d = lambda;
    cfg.lambda_e = lambda;
    cfg.jd_variant = jd;
    cfg.epochs = a.epochs;
    ModelConfig mc{a.dim, 1, a.seed};
    Model model = init_model(mc, vocab.size());
    TrainOptions opts;
    opts.threads = a.threads;
    opts.seed = a.seed;
    auto recs = records;
    train(model, recs, lexicon, cfg, opts);
    return model;
  };

  std::vector<DemoRow> rows;
  std::vector<std::string> outputs;
  auto evaluate = [&](const std::string& name, const std::string& emb_path,
                      const Model* model) {
    Embeddings emb = load_embeddings(emb_path);
    DemoRow row;
    row.name = name;
    auto proj = gender_projection(emb, professions, "he", "she");
    row.projection = proj.mean_abs_cosine;
    auto sb = eval_sembias(emb, sembias, "he", "she");
    row.sembias_def = sb.definition_pct;
    row.sembias_stereo = sb.stereotype_pct;
    row.sembias_none = sb.none_pct;
    row.wg_separation = model ? gender_dim_separation(*model, lexicon) : 0.0;
    rows.push_back(row);
    const std::string csv =
        (fs::path(a.out_dir) / ("projection_" + name + ".csv")).string();
    auto out = open_output(csv);
    out << "word,cosine\n";
    for (const auto& [w, c] : proj.per_word) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.6f", w.c_str(), c);
      out << buf << '\n';
    }
    outputs.push_back(csv);
  };

  struct Variant {
    const char* name;
    double lambda;
    JdVariant jd;
  };
  const Variant variants[] = {{"glove", 0.0, JdVariant::L1},
                              {"gn-l1", 0.8, JdVariant::L1},
                              {"gn-l2", 0.8, JdVariant::L2}};
  std::string glove_path;
  for (const auto& v : variants) {
    std::cerr << "demo: training " << v.name << "...\n";
    Model model = train_variant(v.lambda, v.jd);
    const std::string path =
        (fs::path(a.out_dir) / ("emb_" + std::string(v.name) + ".txt")).string();
    save_embeddings(model, vocab, path, SaveMode::Sum);
    outputs.push_back(path);
    if (std::string(v.name) == "glove") glove_path = path;
    evaluate(v.name, path, &model);
  }

  // Hard-debias baseline on top of the plain GloVe embedding
  {
    Embeddings emb = load_embeddings(glove_path);
    auto word_pairs = load_pairs(data.gender_pairs);
    auto id_pairs = resolve_pairs(emb, word_pairs);
    std::vector<std::uint32_t> neutral_ids;
    for (std::uint32_t id = 0; id < emb.size(); ++id)
      if (lexicon.classes[*vocab.id_of(emb.words[id])] == GenderClass::Neutral)
        neutral_ids.push_back(id);
    hard_debias(emb, neutral_ids, id_pairs, 1);
    const std::string path =
        (fs::path(a.out_dir) / "emb_hard.txt").string();
    emb.save(path);
    outputs.push_back(path);
    evaluate("hard", path, nullptr);
  }

  // comparison table
  const std::string report_path =
      (fs::path(a.out_dir) / "report.tsv").string();
  {
    auto out = open_output(report_path);
    std::string header =
        "model\tprojection\tsembias_def\tsembias_stereo\tsembias_none\t"
        "wg_separation";
    out << header << '\n';
    std::cout << header << '\n';
    for (const auto& r : rows) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.2f\t%.2f\t%.2f\t%.6f",
                    r.name.c_str(), r.projection, r.sembias_def,
                    r.sembias_stereo, r.sembias_none, r.wg_separation);
      out << buf << '\n';
      std::cout << buf << '\n';
    }
  }
  outputs.push_back(report_path);

  manifest.flags = {{"seed", std::to_string(a.seed)},
                    {"epochs", std::to_string(a.epochs)},
                    {"dim", std::to_string(a.dim)},
                    {"threads", std::to_string(a.threads)},
                    {"sentences", std::to_string(a.sentences)}};
  manifest.seed = a.seed;
  manifest.outputs = std::move(outputs);
  manifest.wallclock_s = timer.seconds();
  write_manifest(manifest, (fs::path(a.out_dir) / "manifest.json").string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gender-isolating GloVe embedding toolkit"};
  app.require_subcommand(1);

  VocabArgs vocab_args;
  auto* vocab_cmd = app.add_subcommand("vocab", "build a vocabulary file");
  vocab_cmd->add_option("--input", vocab_args.input, "corpus text file")
      ->required();
  vocab_cmd->add_option("--output", vocab_args.output, "vocab file")->required();
  vocab_cmd->add_option("--min-count", vocab_args.min_count,
                        "drop words seen fewer times");
  vocab_cmd->add_flag("--lowercase,!--no-lowercase", vocab_args.lowercase,
                      "lowercase tokens (default on)");

  CooccurArgs cooccur_args;
  cooccur_args.threads = default_threads();
  auto* cooccur_cmd =
      app.add_subcommand("cooccur", "count weighted co-occurrences");
  cooccur_cmd->add_option("--input", cooccur_args.input, "corpus text file")
      ->required();
  cooccur_cmd->add_option("--vocab", cooccur_args.vocab, "vocab file")
      ->required();
  cooccur_cmd->add_option("--output", cooccur_args.output, "record file")
      ->required();
  cooccur_cmd->add_option("--window", cooccur_args.window,
                          "symmetric window size");
  cooccur_cmd->add_option("--memory-gb", cooccur_args.memory_gb,
                          "accumulator budget before spilling");
  cooccur_cmd->add_option("--threads", cooccur_args.threads, "worker threads");
  cooccur_cmd->add_flag("--lowercase,!--no-lowercase", cooccur_args.lowercase,
                        "lowercase tokens (default on)");

  ShuffleArgs shuffle_args;
  auto* shuffle_cmd = app.add_subcommand("shuffle", "permute a record file");
  shuffle_cmd->add_option("--input", shuffle_args.input, "record file")
      ->required();
  shuffle_cmd->add_option("--output", shuffle_args.output, "record file")
      ->required();
  shuffle_cmd->add_option("--seed", shuffle_args.seed, "permutation seed");

  TrainArgs train_args;
  train_args.threads = default_threads();
  auto* train_cmd = app.add_subcommand("train", "train embeddings");
  train_cmd->add_option("--input", train_args.input, "record file")->required();
  train_cmd->add_option("--vocab", train_args.vocab, "vocab file")->required();
  train_cmd->add_option("--out-prefix", train_args.out_prefix,
                        "output path prefix")
      ->required();
  train_cmd->add_option("--dim", train_args.dim, "embedding dimension");
  train_cmd->add_option("--gender-dims", train_args.gender_dims,
                        "reserved gendered dimensions k");
  train_cmd->add_option("--lambda-d", train_args.cfg.lambda_d,
                        "separation loss weight");
  train_cmd->add_option("--lambda-e", train_args.cfg.lambda_e,
                        "neutralization loss weight");
  train_cmd->add_option("--jd", train_args.jd, "separation variant")
      ->check(CLI::IsMember({"l1", "l2"}));
  train_cmd->add_option("--beta1", train_args.cfg.beta1, "male extreme (L2)");
  train_cmd->add_option("--beta2", train_args.cfg.beta2, "female extreme (L2)");
  train_cmd->add_option("--x-max", train_args.cfg.x_max, "weighting cap");
  train_cmd->add_option("--alpha", train_args.cfg.alpha, "weighting exponent");
  train_cmd->add_option("--lr", train_args.cfg.lr, "learning rate");
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  train_cmd->add_option("--clamp", train_args.clamp, "clamp bounds \"lo,hi\"");
  train_cmd->add_option("--threads", train_args.threads, "hogwild workers");
  train_cmd->add_option("--seed", train_args.seed, "init + shuffle seed");
  train_cmd->add_option("--constraint-schedule", train_args.schedule,
                        "when constraint gradients fire")
      ->check(CLI::IsMember({"per-record", "per-epoch"}));
  train_cmd->add_option("--male-words", train_args.male_words,
                        "male-definition word list");
  train_cmd->add_option("--female-words", train_args.female_words,
                        "female-definition word list");
  train_cmd->add_option("--gender-pairs", train_args.gender_pairs,
                        "seed pair list");
  train_cmd->add_option("--save-checkpoint", train_args.checkpoint,
                        "binary checkpoint output");

  DebiasArgs debias_args;
  auto* debias_cmd =
      app.add_subcommand("debias", "hard-debias an embedding file");
  debias_cmd->add_option("--input", debias_args.input, "embedding file")
      ->required();
  debias_cmd->add_option("--output", debias_args.output, "embedding file")
      ->required();
  debias_cmd->add_option("--pairs", debias_args.pairs, "equalize pair list")
      ->required();
  debias_cmd->add_flag("--neutral-from-lexicon",
                       debias_args.neutral_from_lexicon,
                       "neutral = vocabulary minus the word lists");
  debias_cmd->add_option("--male-words", debias_args.male_words,
                         "male-definition word list");
  debias_cmd->add_option("--female-words", debias_args.female_words,
                         "female-definition word list");
  debias_cmd->add_option("--neutral-words", debias_args.neutral_words,
                         "explicit neutral word list");
  debias_cmd->add_option("--k-b", debias_args.k_b, "bias subspace size");

  EvalArgs sim_args, analogy_args, sembias_args, project_args;
  auto* sim_cmd = app.add_subcommand("eval-sim", "word similarity benchmark");
  sim_cmd->add_option("--embeddings", sim_args.embeddings, "embedding file")
      ->required();
  sim_cmd->add_option("--dataset", sim_args.dataset, "\"w1 w2 score\" file")
      ->required();
  sim_cmd->add_option("--report", sim_args.report, "TSV report output");
  sim_cmd->add_option("--csv", sim_args.csv, "per-pair CSV output");

  auto* analogy_cmd = app.add_subcommand("eval-analogy", "word analogy benchmark");
  analogy_cmd->add_option("--embeddings", analogy_args.embeddings,
                          "embedding file")
      ->required();
  analogy_cmd->add_option("--dataset", analogy_args.dataset,
                          "Google-format analogy file")
      ->required();
  analogy_cmd
      ->add_option("--analogy-form", analogy_args.analogy_form,
                   "query construction")
      ->check(CLI::IsMember({"paper", "conventional"}));
  analogy_cmd->add_option("--report", analogy_args.report, "TSV report output");
  analogy_cmd->add_option("--csv", analogy_args.csv, "per-section CSV output");

  auto* sembias_cmd =
      app.add_subcommand("eval-sembias", "gender relational analogy");
  sembias_cmd->add_option("--embeddings", sembias_args.embeddings,
                          "embedding file")
      ->required();
  sembias_cmd->add_option("--dataset", sembias_args.dataset, "SemBias file")
      ->required();
  sembias_cmd->add_option("--he", sembias_args.he, "male anchor word");
  sembias_cmd->add_option("--she", sembias_args.she, "female anchor word");
  sembias_cmd->add_option("--report", sembias_args.report, "TSV report output");

  auto* project_cmd =
      app.add_subcommand("project", "gender projection bias metric");
  project_cmd->add_option("--embeddings", project_args.embeddings,
                          "embedding file")
      ->required();
  project_cmd->add_option("--words", project_args.words, "word list to project")
      ->required();
  project_cmd->add_option("--he", project_args.he, "male anchor word");
  project_cmd->add_option("--she", project_args.she, "female anchor word");
  project_cmd->add_option("--report", project_args.report, "TSV report output");
  project_cmd->add_option("--csv", project_args.csv, "per-word cosine CSV");

  DemoArgs demo_args;
  demo_args.threads = default_threads();
  auto* demo_cmd = app.add_subcommand(
      "demo", "end-to-end comparison on the bundled synthetic corpus");
  demo_cmd->add_option("--out-dir", demo_args.out_dir, "output directory")
      ->required();
  demo_cmd->add_option("--seed", demo_args.seed, "corpus + training seed");
  demo_cmd->add_option("--epochs", demo_args.epochs, "training epochs");
  demo_cmd->add_option("--dim", demo_args.dim, "embedding dimension");
  demo_cmd->add_option("--threads", demo_args.threads, "worker threads");
  demo_cmd->add_option("--sentences", demo_args.sentences,
                       "synthetic corpus size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 1;
  }

  RunManifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);

  try {
    if (vocab_cmd->parsed()) {
      manifest.subcommand = "vocab";
      run_vocab(vocab_args, std::move(manifest));
    } else if (cooccur_cmd->parsed()) {
      manifest.subcommand = "cooccur";
      run_cooccur(cooccur_args, std::move(manifest));
    } else if (shuffle_cmd->parsed()) {
      manifest.subcommand = "shuffle";
      run_shuffle(shuffle_args, std::move(manifest));
    } else if (train_cmd->parsed()) {
      manifest.subcommand = "train";
      validate_train_args(train_args);
      run_train(train_args, std::move(manifest));
    } else if (debias_cmd->parsed()) {
      manifest.subcommand = "debias";
      if (debias_args.neutral_from_lexicon &&
          (debias_args.male_words.empty() || debias_args.female_words.empty()))
        throw UsageError(
            "--neutral-from-lexicon requires --male-words and --female-words");
      if (!debias_args.neutral_from_lexicon && debias_args.neutral_words.empty())
        throw UsageError(
            "provide --neutral-words or use --neutral-from-lexicon");
      run_debias(debias_args, std::move(manifest));
    } else if (sim_cmd->parsed()) {
      manifest.subcommand = "eval-sim";
      run_eval_sim(sim_args, std::move(manifest));
    } else if (analogy_cmd->parsed()) {
      manifest.subcommand = "eval-analogy";
      run_eval_analogy(analogy_args, std::move(manifest));
    } else if (sembias_cmd->parsed()) {
      manifest.subcommand = "eval-sembias";
      run_eval_sembias(sembias_args, std::move(manifest));
    } else if (project_cmd->parsed()) {
      manifest.subcommand = "project";
      run_project(project_args, std::move(manifest));
    } else if (demo_cmd->parsed()) {
      manifest.subcommand = "demo";
      run_demo(demo_args, std::move(manifest));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
