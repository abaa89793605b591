#include "hcot/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hcot/seed.hpp"

namespace hcot {

const char* to_string(Schedule s) noexcept { return s == Schedule::direct ? "direct" : "alternating"; }

const char* to_string(ObjectiveKind k) noexcept {
  switch (k) {
    case ObjectiveKind::xe:
      return "xe";
    case ObjectiveKind::cot:
      return "cot";
    case ObjectiveKind::hcot:
      return "hcot";
  }
  return "?";
}

const char* to_string(AlternatingOrder o) noexcept {
  return o == AlternatingOrder::complement_first ? "complement_first" : "xe_first";
}

std::optional<Schedule> parse_schedule(std::string_view s) noexcept {
  if (s == "direct") return Schedule::direct;
  if (s == "alternating") return Schedule::alternating;
  return std::nullopt;
}

std::optional<ObjectiveKind> parse_objective(std::string_view s) noexcept {
  if (s == "xe") return ObjectiveKind::xe;
  if (s == "cot") return ObjectiveKind::cot;
  if (s == "hcot") return ObjectiveKind::hcot;
  return std::nullopt;
}

std::optional<AlternatingOrder> parse_alternating_order(std::string_view s) noexcept {
  if (s == "complement_first") return AlternatingOrder::complement_first;
  if (s == "xe_first") return AlternatingOrder::xe_first;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("train.weight_decay must be >= 0");
  }
  if (epochs == 0) throw ConfigError("train.epochs must be positive");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!(complement_lr_scale > 0.0) || !std::isfinite(complement_lr_scale)) {
    throw ConfigError("train.complement_lr_scale must be > 0");
  }
  for (Index i = 0; i < lr_milestones.size(); ++i) {
    if (lr_milestones[i] >= epochs) {
      throw ConfigError("train.lr_milestones: milestone " + std::to_string(lr_milestones[i]) +
                        " is not below epochs=" + std::to_string(epochs));
    }
    if (i > 0 && lr_milestones[i] <= lr_milestones[i - 1]) {
      throw ConfigError("train.lr_milestones must be strictly increasing");
    }
  }
}

void sgd_step(Network& net, OptimizerState& state, double lr, double momentum, double weight_decay) {
  if (state.velocity.size() != net.parameter_count()) {
    throw std::invalid_argument("sgd_step: optimizer state does not match network");
  }
  const auto grads = net.gradients();
  auto params = net.mutable_parameters();
  auto& v = state.velocity;
  for (Index i = 0; i < params.size(); ++i) {
    v[i] = momentum * v[i] + grads[i] + weight_decay * params[i];
    params[i] -= lr * v[i];
  }
}

double lr_at(const TrainConfig& cfg, Index epoch) {
  double lr = cfg.lr;
  for (Index m : cfg.lr_milestones) {
    if (m <= epoch) lr /= 10.0;
  }
  return lr;
}

std::vector<Index> epoch_permutation(std::uint64_t seed, Index epoch, Index n) {
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(derive_seed(seed, epoch));
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

namespace {

struct Minibatch {
  Matrix inputs;
  std::vector<Index> labels;
};

template <typename Fn>
void for_each_minibatch(const EpochContext& ctx, Fn&& fn) {
  const Index n = ctx.data.size();
  if (n == 0) throw DataError("training dataset is empty");
  const auto perm = epoch_permutation(ctx.config.seed, ctx.epoch, n);
  const std::uint64_t epoch_seed = derive_seed(derive_seed(ctx.config.seed, SeedStream::augment), ctx.epoch);
  Index batch_index = 0;
  for (Index start = 0; start < n; start += ctx.config.batch_size, ++batch_index) {
    const Index end = std::min(n, start + ctx.config.batch_size);
    const std::span<const Index> rows(perm.data() + start, end - start);
    Minibatch mb{ctx.data.gather_inputs(rows), ctx.data.gather_labels(rows)};
    if (ctx.transform) mb.inputs = ctx.transform(mb.inputs, derive_seed(epoch_seed, batch_index));
    fn(mb);
  }
}

void require_finite(double value, const char* what, const EpochContext& ctx) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("non-finite ") + what + " in epoch " + std::to_string(ctx.epoch));
  }
}

ForwardResult checked_forward(const Network& net, const Matrix& inputs, const EpochContext& ctx) {
  auto fwd = net.forward(inputs);
  if (!fwd.logits.allFinite()) {
    throw NumericalError("non-finite logits in epoch " + std::to_string(ctx.epoch));
  }
  return fwd;
}

// The complement term of the configured objective (reported for xe too).
ObjectiveResult complement_term(const LogitBatch& batch, const EpochContext& ctx) {
  if (ctx.config.objective == ObjectiveKind::cot) return complement_entropy(batch, ctx.config.entropy);
  return hierarchical_complement_entropy(batch, ctx.hierarchy, ctx.config.entropy);
}

void finish(EpochStats& s) {
  if (s.batches == 0) return;
  const auto b = static_cast<double>(s.batches);
  s.xe /= b;
  s.hce /= b;
  s.loss /= b;
}

}  // namespace

EpochStats train_epoch_direct(Network& net, OptimizerState& state, const EpochContext& ctx) {
  const auto& cfg = ctx.config;
  const double lr = lr_at(cfg, ctx.epoch);
  EpochStats stats;
  for_each_minibatch(ctx, [&](const Minibatch& mb) {
    auto fwd = checked_forward(net, mb.inputs, ctx);
    const LogitBatch batch(fwd.logits, mb.labels);
    const auto xe = cross_entropy(batch);
    const auto comp = complement_term(batch, ctx);
    const bool use_complement = cfg.objective != ObjectiveKind::xe;
    const double loss = use_complement ? xe.value - comp.value : xe.value;
    require_finite(loss, "loss", ctx);

    if (use_complement) {
      net.backward(fwd.cache, difference(xe, comp).grad);
    } else {
      net.backward(fwd.cache, xe.grad);
    }
    sgd_step(net, state, lr, cfg.momentum, cfg.weight_decay);

    stats.xe += xe.value;
    stats.hce += comp.value;
    stats.loss += loss;
    ++stats.batches;
    ++stats.updates;
    stats.complement_in_updates = stats.complement_in_updates || use_complement;
  });
  finish(stats);
  return stats;
}

EpochStats train_epoch_alternating(Network& net, OptimizerState& state, const EpochContext& ctx) {
  const auto& cfg = ctx.config;
  const double lr = lr_at(cfg, ctx.epoch);
  const bool use_complement = cfg.objective != ObjectiveKind::xe;
  EpochStats stats;

  for_each_minibatch(ctx, [&](const Minibatch& mb) {
    double xe_value = 0.0;
    double comp_value = 0.0;

    auto complement_step = [&] {
      auto fwd = checked_forward(net, mb.inputs, ctx);
      const LogitBatch batch(fwd.logits, mb.labels);
      const auto comp = complement_term(batch, ctx);
      require_finite(comp.value, "complement entropy", ctx);
      comp_value = comp.value;
      // Ascent on the complement term: descend on its negation.
      net.backward(fwd.cache, -comp.grad);
      sgd_step(net, state, lr * cfg.complement_lr_scale, cfg.momentum, cfg.weight_decay);
      ++stats.updates;
    };
    auto xe_step = [&] {
      auto fwd = checked_forward(net, mb.inputs, ctx);
      const LogitBatch batch(fwd.logits, mb.labels);
      const auto xe = cross_entropy(batch);
      require_finite(xe.value, "cross entropy", ctx);
      xe_value = xe.value;
      if (!use_complement) comp_value = complement_term(batch, ctx).value;
      net.backward(fwd.cache, xe.grad);
      sgd_step(net, state, lr, cfg.momentum, cfg.weight_decay);
      ++stats.updates;
    };

    if (use_complement && cfg.alternating_order == AlternatingOrder::complement_first) {
      complement_step();
      xe_step();
    } else if (use_complement) {
      xe_step();
      complement_step();
    } else {
      xe_step();
    }

    stats.xe += xe_value;
    stats.hce += comp_value;
    stats.loss += use_complement ? xe_value - comp_value : xe_value;
    ++stats.batches;
    stats.complement_in_updates = stats.complement_in_updates || use_complement;
  });
  finish(stats);
  return stats;
}

EpochStats train_epoch(Network& net, OptimizerState& state, const EpochContext& ctx) {
  return ctx.config.schedule == Schedule::direct ? train_epoch_direct(net, state, ctx)
                                                 : train_epoch_alternating(net, state, ctx);
}

}  // namespace hcot
