#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hcot/data.hpp"
#include "hcot/hierarchy.hpp"
#include "hcot/network.hpp"
#include "hcot/objectives.hpp"

namespace hcot {

enum class Schedule { direct, alternating };
enum class ObjectiveKind { xe, cot, hcot };
/// Which half of an alternating iteration runs first.
enum class AlternatingOrder { complement_first, xe_first };

const char* to_string(Schedule s) noexcept;
const char* to_string(ObjectiveKind k) noexcept;
const char* to_string(AlternatingOrder o) noexcept;
std::optional<Schedule> parse_schedule(std::string_view s) noexcept;
std::optional<ObjectiveKind> parse_objective(std::string_view s) noexcept;
std::optional<AlternatingOrder> parse_alternating_order(std::string_view s) noexcept;

struct TrainConfig {
  Schedule schedule = Schedule::direct;
  ObjectiveKind objective = ObjectiveKind::hcot;
  Index epochs = 200;
  Index batch_size = 128;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  /// Epochs at which the learning rate is divided by 10.
  std::vector<Index> lr_milestones = {100, 150};
  /// Seed of the per-epoch shuffling stream.
  std::uint64_t seed = 0;
  AlternatingOrder alternating_order = AlternatingOrder::complement_first;
  /// Learning-rate multiplier for the complement-entropy half of an
  /// alternating iteration.
  double complement_lr_scale = 1.0;
  EntropyOptions entropy;

  /// Throws ConfigError on lr <= 0, momentum outside [0, 1),
  /// weight_decay < 0, zero epochs/batch size, or milestones that are not
  /// strictly increasing and below `epochs`.
  void validate() const;
};

/// Velocity buffer for SGD with momentum; zero-initialized.
struct OptimizerState {
  std::vector<double> velocity;

  OptimizerState() = default;
  explicit OptimizerState(const Network& net) : velocity(net.parameter_count(), 0.0) {}
};

/// v <- momentum * v + grad + weight_decay * theta;  theta <- theta - lr * v.
/// Gradient buffers are left untouched.
void sgd_step(Network& net, OptimizerState& state, double lr, double momentum, double weight_decay);

/// cfg.lr / 10^(number of milestones <= epoch).
double lr_at(const TrainConfig& cfg, Index epoch);

/// Seeded permutation of [0, n) for `epoch`, drawn from derive_seed(seed, epoch).
std::vector<Index> epoch_permutation(std::uint64_t seed, Index epoch, Index n);

/// Optional per-minibatch input transform (e.g. augmentation), given a
/// deterministic per-batch seed.
using BatchTransform = std::function<Matrix(const Matrix& inputs, std::uint64_t batch_seed)>;

struct EpochStats {
  double xe = 0.0;    ///< mean cross entropy over minibatches
  double hce = 0.0;   ///< mean complement term (COT or HCE) over minibatches
  double loss = 0.0;  ///< mean minimized value (xe - hce for complement objectives)
  Index batches = 0;
  Index updates = 0;
  /// True when the complement term contributed to at least one update.
  bool complement_in_updates = false;
};

/// Everything a training epoch needs besides the model and optimizer.
struct EpochContext {
  const Dataset& data;
  /// Hierarchy for the hcot objective; also used to report the HCE value of
  /// xe runs. cot ignores it.
  const LabelHierarchy& hierarchy;
  const TrainConfig& config;
  Index epoch = 0;
  BatchTransform transform = {};
};

/// One pass of direct optimization: per minibatch one forward, the
/// configured loss (xe, xe - complement entropy, or xe - HCE), one backward
/// and one SGD step. Throws DataError on an empty dataset and NumericalError
/// on a non-finite loss.
EpochStats train_epoch_direct(Network& net, OptimizerState& state, const EpochContext& ctx);

/// One pass of alternating optimization: per minibatch an ascent step on
/// the complement term followed by a descent step on cross entropy, with a
/// fresh forward pass before each. For objective xe only the descent step
/// runs.
EpochStats train_epoch_alternating(Network& net, OptimizerState& state, const EpochContext& ctx);

/// Dispatches on ctx.config.schedule.
EpochStats train_epoch(Network& net, OptimizerState& state, const EpochContext& ctx);

}  // namespace hcot
