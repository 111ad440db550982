#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnglove/corpus.hpp"
#include "gnglove/lexicon.hpp"
#include "gnglove/model.hpp"

namespace gnglove {

enum class JdVariant { L1, L2 };
enum class ConstraintSchedule { PerRecord, PerEpoch };

struct TrainingConfig {
  double lambda_d = 0.8;
  double lambda_e = 0.8;
  double beta1 = 1.0;
  double beta2 = -1.0;
  double x_max = 100.0;
  double alpha = 0.75;
  double lr = 0.05;
  int epochs = 15;
  double clamp_lo = -1.0;
  double clamp_hi = 1.0;
  JdVariant jd_variant = JdVariant::L1;
  ConstraintSchedule constraint_schedule = ConstraintSchedule::PerRecord;

  void validate() const {
    if (!(clamp_lo < clamp_hi))
      throw std::invalid_argument("clamp_lo must be < clamp_hi");
    if (beta1 < clamp_lo || beta1 > clamp_hi || beta2 < clamp_lo ||
        beta2 > clamp_hi)
      throw std::invalid_argument("beta1/beta2 must lie within clamp bounds");
    if (!(x_max > 0)) throw std::invalid_argument("x_max must be > 0");
    if (!(alpha > 0) || alpha > 1)
      throw std::invalid_argument("alpha must be in (0, 1]");
    if (!(lr > 0)) throw std::invalid_argument("lr must be > 0");
    if (lambda_d < 0 || lambda_e < 0)
      throw std::invalid_argument("lambda_d and lambda_e must be >= 0");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  }
};

/// Co-occurrence weighting: (x/x_max)^alpha below the cap, 1 above it.
inline double weight_fn(double x, double x_max, double alpha) {
  if (!(x > 0)) throw std::invalid_argument("weight_fn: x must be > 0");
  return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

/// Gradients of one weighted least-squares sample, written into caller-owned
/// buffers so the hot loop allocates nothing.
struct SampleGrads {
  std::vector<double> center, context;
  double center_bias = 0.0, context_bias = 0.0;

  void resize(std::uint32_t dim) {
    center.resize(dim);
    context.resize(dim);
  }
};

struct SampleResult {
  double loss = 0.0;
  bool finite = true;
};

/// One J_G sample: with e = w_i . w~_j + b_i + b~_j - ln x, the loss is
/// f(x) e^2; gradients follow by the chain rule.
inline SampleResult glove_sample(const Model& model,
                                 const CooccurrenceRecord& rec,
                                 const TrainingConfig& cfg, SampleGrads& out) {
  auto w = model.center_row(rec.i);
  auto c = model.context_row(rec.j);
  const double e = dot(w, c) + model.center_bias[rec.i] +
                   model.context_bias[rec.j] - std::log(rec.x);
  if (!std::isfinite(e)) return {0.0, false};
  const double f = weight_fn(rec.x, cfg.x_max, cfg.alpha);
  const double g = 2.0 * f * e;
  out.resize(model.dim());
  for (std::uint32_t t = 0; t < model.dim(); ++t) {
    out.center[t] = g * c[t];
    out.context[t] = g * w[t];
  }
  out.center_bias = g;
  out.context_bias = g;
  return {f * e * e, true};
}

struct GenderDirection {
  std::vector<double> v;  // length d-k
  int epoch_computed = 0;
  bool zero_fallback = false;  // set when no pairs were available
};

/// v_g = mean over seed pairs of (w_m^(a) - w_f^(a)), center vectors only.
inline GenderDirection estimate_gender_direction(const Model& model,
                                                 const GenderLexicon& lexicon,
                                                 double lambda_e = 0.0) {
  GenderDirection dir;
  dir.v.assign(model.neutral_dims(), 0.0);
  if (lexicon.pairs.empty()) {
    if (lambda_e > 0)
      throw std::invalid_argument(
          "gender pairs are required to estimate v_g when lambda_e > 0");
    dir.zero_fallback = true;
    return dir;
  }
  for (const auto& [m, f] : lexicon.pairs) {
    auto wm = model.neutral_part(m);
    auto wf = model.neutral_part(f);
    for (std::size_t t = 0; t < dir.v.size(); ++t) dir.v[t] += wm[t] - wf[t];
  }
  const double inv = 1.0 / static_cast<double>(lexicon.pairs.size());
  for (auto& x : dir.v) x *= inv;
  return dir;
}

/// L1 separation term. D = sum of male w^(g) minus sum of female w^(g);
/// the loss is -|D|_1, so gradient descent drives the two groups apart.
struct GroupSeparation {
  double loss = 0.0;
  std::vector<double> aggregate;  // D, length k
};

inline GroupSeparation jd_l1(const Model& model, const GenderLexicon& lexicon) {
  GroupSeparation r;
  r.aggregate.assign(model.config.gender_dims, 0.0);
  for (auto id : lexicon.male_ids) {
    auto wg = model.gender_part(id);
    for (std::size_t t = 0; t < r.aggregate.size(); ++t) r.aggregate[t] += wg[t];
  }
  for (auto id : lexicon.female_ids) {
    auto wg = model.gender_part(id);
    for (std::size_t t = 0; t < r.aggregate.size(); ++t) r.aggregate[t] -= wg[t];
  }
  for (double d : r.aggregate) r.loss -= std::abs(d);
  return r;
}

inline std::vector<double> sign_vector(std::span<const double> v) {
  std::vector<double> s(v.size());
  for (std::size_t t = 0; t < v.size(); ++t)
    s[t] = v[t] > 0 ? 1.0 : (v[t] < 0 ? -1.0 : 0.0);
  return s;
}

/// Per-word J_D^L1 gradient on w^(g): -sign(D) for male words, +sign(D) for
/// female words; sign(0) = 0.
inline void jd_l1_word_grad(std::span<const double> d_sign, GenderClass cls,
                            std::span<double> out) {
  const double s = cls == GenderClass::Male ? -1.0 : 1.0;
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = s * d_sign[t];
}

/// L2 separation term: squared distance of each gendered component from the
/// group's extreme (beta1 for male, beta2 for female).
inline double jd_l2(const Model& model, const GenderLexicon& lexicon,
                    double beta1, double beta2) {
  double loss = 0.0;
  auto side = [&](const std::vector<std::uint32_t>& ids, double beta) {
    for (auto id : ids) {
      auto wg = model.gender_part(id);
      for (double x : wg) {
        const double d = beta - x;
        loss += d * d;
      }
    }
  };
  side(lexicon.male_ids, beta1);
  side(lexicon.female_ids, beta2);
  return loss;
}

inline void jd_l2_word_grad(std::span<const double> wg, double beta,
                            std::span<double> out) {
  for (std::size_t t = 0; t < wg.size(); ++t) out[t] = 2.0 * (wg[t] - beta);
}

/// Neutralization term: squared projection of every neutral word's w^(a)
/// onto the (fixed) gender direction.
inline double je(const Model& model, const GenderLexicon& lexicon,
                 std::span<const double> v_g) {
  if (v_g.size() != model.neutral_dims())
    throw std::invalid_argument("v_g dimension must be d-k");
  double loss = 0.0;
  for (auto id : lexicon.neutral_ids) {
    const double p = dot(v_g, model.neutral_part(id));
    loss += p * p;
  }
  return loss;
}

/// Gradient on w^(a): 2 (v_g . w^(a)) v_g. v_g is treated as a constant.
inline void je_word_grad(std::span<const double> wa,
                         std::span<const double> v_g, std::span<double> out) {
  const double p = 2.0 * dot(v_g, wa);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = p * v_g[t];
}

struct LossReport {
  double j_g = 0.0;
  double j_d = 0.0;
  double j_e = 0.0;
  double total = 0.0;
  std::uint64_t samples = 0;
  bool finite = true;
};

/// Evaluates the full objective over the given records plus the lambda-
/// weighted constraint terms, without touching any parameters.
inline LossReport total_loss(const Model& model,
                             std::span<const CooccurrenceRecord> records,
                             const GenderLexicon& lexicon,
                             const TrainingConfig& cfg,
                             std::span<const double> v_g) {
  LossReport rep;
  for (const auto& rec : records) {
    auto w = model.center_row(rec.i);
    auto c = model.context_row(rec.j);
    const double e = dot(w, c) + model.center_bias[rec.i] +
                     model.context_bias[rec.j] - std::log(rec.x);
    if (!std::isfinite(e)) {
      rep.finite = false;
      continue;
    }
    rep.j_g += weight_fn(rec.x, cfg.x_max, cfg.alpha) * e * e;
    ++rep.samples;
  }
  rep.j_d = cfg.jd_variant == JdVariant::L1
                ? jd_l1(model, lexicon).loss
                : jd_l2(model, lexicon, cfg.beta1, cfg.beta2);
  rep.j_e = je(model, lexicon, v_g);
  rep.total = rep.j_g + cfg.lambda_d * rep.j_d + cfg.lambda_e * rep.j_e;
  return rep;
}

}  // namespace gnglove
