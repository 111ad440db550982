#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "gnglove/corpus.hpp"
#include "gnglove/lexicon.hpp"
#include "gnglove/model.hpp"
#include "gnglove/objective.hpp"

namespace gnglove {

struct TrainOptions {
  int threads = 1;
  std::uint64_t seed = 1;  // base seed for the per-epoch reshuffles
  /// When false the epoch loop is instantiated without any constraint code;
  /// used to check that lambda_d = lambda_e = 0 reduces to plain GloVe.
  bool constraints_enabled = true;
  std::uint64_t held_out_cap = 100000;
};

struct EpochStats {
  int epoch = 0;
  double mean_jg_sample_loss = 0.0;
  // Objective components on the fixed held-out sample, evaluated at epoch end
  // with the gender direction re-estimated from the current parameters.
  double j_g = 0.0, j_d = 0.0, j_e = 0.0, total = 0.0;
  std::uint64_t skipped_steps = 0;
  double wallclock_s = 0.0;
};

/// theta <- theta - lr * g / sqrt(H), then H <- H + g^2. Non-finite gradient
/// elements are skipped and counted.
inline void adagrad_step(std::span<double> param, std::span<const double> grad,
                         std::span<double> acc, double lr,
                         std::uint64_t& skipped) {
  for (std::size_t t = 0; t < param.size(); ++t) {
    const double g = grad[t];
    if (!std::isfinite(g)) {
      ++skipped;
      continue;
    }
    param[t] -= lr * g / std::sqrt(acc[t]);
    acc[t] += g * g;
  }
}

inline void adagrad_step_scalar(double& param, double grad, double& acc,
                                double lr, std::uint64_t& skipped) {
  adagrad_step({&param, 1}, {&grad, 1}, {&acc, 1}, lr, skipped);
}

inline void clamp_row(std::span<double> row, double lo, double hi) {
  for (auto& x : row) {
    if (x < lo)
      x = lo;
    else if (x > hi)
      x = hi;
  }
}

namespace detail {

/// Applies the lambda-scaled constraint gradient for one center word through
/// the word's own AdaGrad accumulators, per the word's gender class.
inline void apply_constraint(Model& model, std::uint32_t id,
                             const GenderLexicon& lexicon,
                             const TrainingConfig& cfg,
                             std::span<const double> v_g,
                             std::span<const double> d_sign,
                             std::vector<double>& scratch,
                             std::uint64_t& skipped) {
  const GenderClass cls = lexicon.classes[id];
  const std::uint32_t dk = model.neutral_dims();
  if (cls == GenderClass::Neutral) {
    if (cfg.lambda_e == 0) return;
    auto wa = model.neutral_part(id);
    je_word_grad(wa, v_g, {scratch.data(), dk});
    for (std::uint32_t t = 0; t < dk; ++t) scratch[t] *= cfg.lambda_e;
    adagrad_step(wa, {scratch.data(), dk},
                 model.acc_center_row(id).subspan(0, dk), cfg.lr, skipped);
  } else {
    if (cfg.lambda_d == 0) return;
    auto wg = model.gender_part(id);
    const std::uint32_t k = model.config.gender_dims;
    if (cfg.jd_variant == JdVariant::L1) {
      jd_l1_word_grad(d_sign, cls, {scratch.data(), k});
    } else {
      jd_l2_word_grad(wg, cls == GenderClass::Male ? cfg.beta1 : cfg.beta2,
                      {scratch.data(), k});
    }
    for (std::uint32_t t = 0; t < k; ++t) scratch[t] *= cfg.lambda_d;
    adagrad_step(wg, {scratch.data(), k}, model.acc_center_row(id).subspan(dk, k),
                 cfg.lr, skipped);
  }
}

struct ShardResult {
  double loss_sum = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t skipped = 0;
};

template <bool WithConstraints>
ShardResult run_shard(Model& model, std::span<const CooccurrenceRecord> shard,
                      const GenderLexicon& lexicon, const TrainingConfig& cfg,
                      std::span<const double> v_g,
                      std::span<const double> d_sign) {
  ShardResult res;
  SampleGrads grads;
  grads.resize(model.dim());
  std::vector<double> scratch(model.dim());
  const bool per_record =
      cfg.constraint_schedule == ConstraintSchedule::PerRecord;
  for (const auto& rec : shard) {
    auto sample = glove_sample(model, rec, cfg, grads);
    if (!sample.finite) {
      ++res.skipped;
      continue;
    }
    adagrad_step(model.center_row(rec.i), grads.center,
                 model.acc_center_row(rec.i), cfg.lr, res.skipped);
    adagrad_step(model.context_row(rec.j), grads.context,
                 model.acc_context_row(rec.j), cfg.lr, res.skipped);
    adagrad_step_scalar(model.center_bias[rec.i], grads.center_bias,
                        model.acc_center_bias[rec.i], cfg.lr, res.skipped);
    adagrad_step_scalar(model.context_bias[rec.j], grads.context_bias,
                        model.acc_context_bias[rec.j], cfg.lr, res.skipped);
    res.loss_sum += sample.loss;
    ++res.samples;
    if constexpr (WithConstraints) {
      if (per_record)
        apply_constraint(model, rec.i, lexicon, cfg, v_g, d_sign, scratch,
                         res.skipped);
    }
    clamp_row(model.center_row(rec.i), cfg.clamp_lo, cfg.clamp_hi);
    clamp_row(model.context_row(rec.j), cfg.clamp_lo, cfg.clamp_hi);
  }
  return res;
}

}  // namespace detail

/// One pass over an already shuffled record stream. v_g and d_sign must be
/// frozen from the model state at epoch start. With more than one thread the
/// workers update shared parameters lock-free (hogwild); single-threaded runs
/// are fully deterministic.
template <bool WithConstraints>
EpochStats train_epoch(Model& model, std::span<const CooccurrenceRecord> records,
                       const GenderLexicon& lexicon, const TrainingConfig& cfg,
                       std::span<const double> v_g,
                       std::span<const double> d_sign,
                       const TrainOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = std::max(opts.threads, 1);
  std::vector<detail::ShardResult> results(threads);
  if (threads == 1 || records.size() < 2 * static_cast<std::size_t>(threads)) {
    results[0] = detail::run_shard<WithConstraints>(model, records, lexicon,
                                                    cfg, v_g, d_sign);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = records.size() * t / threads;
      const std::size_t end = records.size() * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        results[t] = detail::run_shard<WithConstraints>(
            model, records.subspan(begin, end - begin), lexicon, cfg, v_g,
            d_sign);
      });
    }
    for (auto& th : pool) th.join();
  }

  EpochStats st;
  double loss_sum = 0.0;
  std::uint64_t samples = 0;
  for (const auto& r : results) {
    loss_sum += r.loss_sum;
    samples += r.samples;
    st.skipped_steps += r.skipped;
  }
  st.mean_jg_sample_loss = samples ? loss_sum / double(samples) : 0.0;

  if constexpr (WithConstraints) {
    if (cfg.constraint_schedule == ConstraintSchedule::PerEpoch) {
      std::vector<double> scratch(model.dim());
      for (std::uint32_t id = 0; id < model.vocab_size; ++id) {
        detail::apply_constraint(model, id, lexicon, cfg, v_g, d_sign, scratch,
                                 st.skipped_steps);
        clamp_row(model.center_row(id), cfg.clamp_lo, cfg.clamp_hi);
      }
    }
  }

  st.wallclock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return st;
}

/// Full optimization: per epoch, re-estimate the gender direction and the L1
/// aggregate sign from the current model, reshuffle with seed + epoch, and
/// stream once. Loss components are reported on a fixed sample (the first
/// held_out_cap records in input order).
inline std::vector<EpochStats> train(
    Model& model, std::vector<CooccurrenceRecord>& records,
    const GenderLexicon& lexicon, const TrainingConfig& cfg,
    const TrainOptions& opts,
    const std::function<void(const EpochStats&)>& on_epoch = {}) {
  cfg.validate();
  if (records.empty()) throw std::invalid_argument("no records to train on");
  const std::size_t held =
      std::min<std::size_t>(records.size(), opts.held_out_cap);
  const std::vector<CooccurrenceRecord> held_out(records.begin(),
                                                 records.begin() + held);
  std::vector<EpochStats> stats;
  stats.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<double> v_g(model.neutral_dims(), 0.0);
    std::vector<double> d_sign(model.config.gender_dims, 0.0);
    if (opts.constraints_enabled) {
      if (cfg.lambda_e > 0)
        v_g = estimate_gender_direction(model, lexicon, cfg.lambda_e).v;
      if (cfg.lambda_d > 0 && cfg.jd_variant == JdVariant::L1)
        d_sign = sign_vector(jd_l1(model, lexicon).aggregate);
    }
    shuffle_records(records, opts.seed + static_cast<std::uint64_t>(epoch));
    EpochStats st =
        opts.constraints_enabled
            ? train_epoch<true>(model, records, lexicon, cfg, v_g, d_sign, opts)
            : train_epoch<false>(model, records, lexicon, cfg, {}, {}, opts);
    st.epoch = epoch;

    GenderDirection rep_dir = estimate_gender_direction(model, lexicon, 0.0);
    LossReport rep = total_loss(model, held_out, lexicon, cfg, rep_dir.v);
    st.j_g = rep.j_g;
    st.j_d = rep.j_d;
    st.j_e = rep.j_e;
    st.total = rep.total;
    stats.push_back(st);
    if (on_epoch) on_epoch(st);
  }
  return stats;
}

}  // namespace gnglove
